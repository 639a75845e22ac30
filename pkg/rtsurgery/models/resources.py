import json
import os
from functools import lru_cache
from typing import Any, Dict, List

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'data')


def _load(name: str) -> Dict[str, Any]:
    with open(os.path.join(DATA_DIR, name), 'r', encoding='utf-8') as f:
        return json.load(f)


@lru_cache(maxsize=None)
def get_reference_constants() -> Dict[str, Any]:
    """Named numerical constants shipped with the package"""
    return _load('reference_constants.json')


@lru_cache(maxsize=None)
def get_admissibility_table() -> List[Dict[str, Any]]:
    """Rows {p_min, p_max, q_min}; p_max None means unbounded"""
    return _load('admissibility.json')['rows']
