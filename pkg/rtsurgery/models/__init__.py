from .params import (
    Command, FourierIndex, OutputFormat, Precision, RootData, SummationPath,
    SurgeryParams, Theta3
)
from .results import (
    AsymptoticConstants, AsymptoticReport, ComplexVolume, CriticalPoint,
    PochhammerTable, Prediction, ReportRow, RTValue, ShapeParams
)
from .run_config import (
    CACHE_SCHEMA_VERSION, REPORT_SCHEMA_VERSION, CacheRecord, RunConfig,
    get_default_cache_path, get_default_log_level
)
from .resources import get_admissibility_table, get_reference_constants

__all__ = [
    'Command', 'FourierIndex', 'OutputFormat', 'Precision', 'RootData', 'SummationPath',
    'SurgeryParams', 'Theta3',
    'AsymptoticConstants', 'AsymptoticReport', 'ComplexVolume', 'CriticalPoint',
    'PochhammerTable', 'Prediction', 'ReportRow', 'RTValue', 'ShapeParams',
    'CACHE_SCHEMA_VERSION', 'REPORT_SCHEMA_VERSION', 'CacheRecord', 'RunConfig',
    'get_default_cache_path', 'get_default_log_level',
    'get_admissibility_table', 'get_reference_constants'
]
