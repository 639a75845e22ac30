"""
Append-only JSON-lines cache of computed RT values.

One CacheRecord per line. When a key appears more than once the record with
the higher schema version wins, and among equal versions the later line.
"""
import json
import logging
import os
import threading
from typing import Dict, Optional, Tuple

from pydantic import ValidationError

from ..exceptions import CacheError
from ..models import CacheRecord, RTValue, SummationPath

logger = logging.getLogger(__name__)

CacheKey = Tuple[int, int, int]


def cache_load(path: str) -> Dict[CacheKey, CacheRecord]:
    """
    Read every valid record under ``path``; a missing file is an empty cache.

    Raises:
        CacheError: the path exists but cannot be read
    """
    records: Dict[CacheKey, CacheRecord] = {}
    if not os.path.exists(path):
        return records
    corrupt = 0
    try:
        with open(path, 'r', encoding='utf-8') as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                try:
                    record = CacheRecord.model_validate(json.loads(line))
                except (json.JSONDecodeError, ValidationError):
                    corrupt += 1
                    continue
                previous = records.get(record.key)
                if previous is None or record.version >= previous.version:
                    records[record.key] = record
    except OSError as e:
        raise CacheError(f"cannot read cache {path}: {e}") from e
    if corrupt:
        logger.warning("skipped %d corrupt line(s) in cache %s", corrupt, path)
    return records


def cache_store(path: str, record: CacheRecord) -> None:
    """
    Append one record.

    Raises:
        CacheError: the path cannot be written
    """
    try:
        with open(path, 'a', encoding='utf-8') as f:
            f.write(record.model_dump_json() + '\n')
    except OSError as e:
        raise CacheError(f"cannot write cache {path}: {e}") from e


class CacheService:
    """In-memory view of a cache file; writes go through a lock"""

    def __init__(self, path: str):
        self.path = path
        self._records = cache_load(path)
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._records)

    def get(self, p: int, q: int, r: int) -> Optional[RTValue]:
        record = self._records.get((p, q, r))
        if record is None:
            return None
        return RTValue(value=record.value, r=r, path=SummationPath.LATTICE,
                       log_abs=float(record.log_abs), phase=record.phase,
                       precision=record.precision)

    def put(self, p: int, q: int, rt: RTValue) -> CacheRecord:
        record = CacheRecord.from_value(p, q, rt.r, rt.value, rt.log_abs, rt.precision, rt.phase)
        with self._lock:
            cache_store(self.path, record)
            self._records[record.key] = record
        return record
