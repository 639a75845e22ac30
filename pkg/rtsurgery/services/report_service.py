"""
Serialisation of command results as JSON, CSV or text.

Floats are written with repr, so the same result always renders to the same
bytes.
"""
import csv
import io
import json
import logging
import os
from typing import Any, Dict, List, Tuple

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from ..models import REPORT_SCHEMA_VERSION, OutputFormat

logger = logging.getLogger(__name__)

TEMPLATE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'templates')
VERIFY_CSV_HEADER = ['r', 'rt_re', 'rt_im', 'vol_est', 'err_vol', 'cs_est']


def _plain(value: Any) -> Any:
    """Recursively convert result objects into JSON-compatible values"""
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if hasattr(value, 'to_dict'):
        return _plain(value.to_dict())
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, 'item'):
        return value.item()
    return value


def _flatten(prefix: str, value: Any, out: List[Tuple[str, Any]]) -> None:
    if isinstance(value, dict):
        for key, item in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), item, out)
    elif isinstance(value, list):
        for i, item in enumerate(value):
            _flatten(f"{prefix}.{i}", item, out)
    else:
        out.append((prefix, value))


class ReportService:
    """Renders a command result dictionary in one of the output formats"""

    def __init__(self):
        self.env = Environment(loader=FileSystemLoader(TEMPLATE_DIR), undefined=StrictUndefined,
                               keep_trailing_newline=True)
        self.env.filters['fmt'] = lambda v, digits=10: f"{v:.{digits}g}"

    def payload(self, command: str, result: Dict[str, Any]) -> Dict[str, Any]:
        """The JSON document for a result; verify results use the report schema"""
        if not result.get("success", False):
            return {"success": False, "errors": result.get("errors", []),
                    "stage": result.get("stage", "unknown")}
        document: Dict[str, Any] = {"schema_version": REPORT_SCHEMA_VERSION, "command": command}
        if "report" in result:
            document.update(_plain(result["report"]))
            for key in ("cache_hits", "in_S", "kappa", "residuals"):
                if key in result:
                    document[key] = _plain(result[key])
            return document
        for key, value in result.items():
            if key != "success":
                document[key] = _plain(value)
        return document

    def render_json(self, command: str, result: Dict[str, Any]) -> str:
        return json.dumps(self.payload(command, result), indent=2) + '\n'

    def render_csv(self, command: str, result: Dict[str, Any]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        if result.get("success") and "report" in result:
            writer.writerow(VERIFY_CSV_HEADER)
            for row in result["report"].rows:
                writer.writerow([row.r, repr(row.rt.real), repr(row.rt.imag), repr(row.vol_est),
                                 repr(row.err_vol), repr(row.cs_est)])
            return buffer.getvalue()
        pairs: List[Tuple[str, Any]] = []
        _flatten("", self.payload(command, result), pairs)
        writer.writerow(['key', 'value'])
        for key, value in pairs:
            writer.writerow([key, repr(value) if isinstance(value, float) else value])
        return buffer.getvalue()

    def render_text(self, command: str, result: Dict[str, Any]) -> str:
        template = self.env.get_template('report.txt.j2')
        return template.render(command=command, result=result)

    def render(self, command: str, result: Dict[str, Any], output: OutputFormat) -> str:
        if output == OutputFormat.JSON:
            return self.render_json(command, result)
        if output == OutputFormat.CSV:
            return self.render_csv(command, result)
        return self.render_text(command, result)
