"""
Run configuration and cache records.

Defaults come from the environment (optionally a .env file); command-line
flags override them.
"""
import cmath
import os
from datetime import datetime
from typing import List, Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .params import Command, OutputFormat, Precision

load_dotenv()

CACHE_SCHEMA_VERSION = 1
REPORT_SCHEMA_VERSION = 1
DEFAULT_CACHE_PATH = "rt_cache.jsonl"
DEFAULT_VERIFY_LEVELS = (51, 101, 151, 201, 301)


def get_default_cache_path() -> str:
    return os.getenv('RTSURGERY_CACHE_PATH', DEFAULT_CACHE_PATH)


def get_default_threads() -> int:
    return int(os.getenv('RTSURGERY_THREADS', '1'))


def get_default_precision() -> Precision:
    return Precision(os.getenv('RTSURGERY_PRECISION', Precision.DOUBLE.value))


def get_default_log_level() -> str:
    return os.getenv('RTSURGERY_LOG_LEVEL', 'WARNING').upper()


class RunConfig(BaseModel):
    """One CLI invocation"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    command: Command
    p: Optional[int] = None
    q: Optional[int] = None
    r: Optional[int] = None
    r_min: Optional[int] = None
    r_max: Optional[int] = None
    step: int = 50
    precision: Precision = Field(default_factory=get_default_precision)
    threads: int = Field(default_factory=get_default_threads, ge=1)
    output: OutputFormat = OutputFormat.TEXT
    cache_path: str = Field(default_factory=get_default_cache_path)
    theta: Optional[Tuple[complex, complex, complex]] = None
    real: bool = False
    depth: int = Field(default=1, ge=0)
    fourier_index: Tuple[int, int, int] = (0, 0, 0)

    @field_validator('r', 'r_min', 'r_max')
    @classmethod
    def _odd_level(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and (value < 3 or value % 2 == 0):
            raise ValueError(f"level must be an odd integer >= 3, got {value}")
        return value

    @field_validator('step')
    @classmethod
    def _even_step(cls, value: int) -> int:
        if value <= 0 or value % 2:
            raise ValueError(f"step must be a positive even integer, got {value}")
        return value

    @model_validator(mode='after')
    def _required_fields(self) -> 'RunConfig':
        needs_pq = self.command not in (Command.POTENTIAL_EVAL,)
        if needs_pq and (self.p is None or self.q is None):
            raise ValueError(f"command '{self.command.value}' requires --p and --q")
        if self.command == Command.RT and self.r is None:
            raise ValueError("command 'rt' requires --r")
        if self.command == Command.POTENTIAL_EVAL and self.theta is None:
            raise ValueError("command 'potential-eval' requires --theta")
        if self.r_min is not None and self.r_max is not None and self.r_min > self.r_max:
            raise ValueError("--r-min must not exceed --r-max")
        return self

    def levels(self) -> List[int]:
        """The odd levels swept by verify/fit"""
        if self.r_min is None and self.r_max is None:
            return [self.r] if self.r is not None else list(DEFAULT_VERIFY_LEVELS)
        lo = self.r_min if self.r_min is not None else self.r_max
        hi = self.r_max if self.r_max is not None else self.r_min
        return list(range(lo, hi + 1, self.step))


class CacheRecord(BaseModel):
    """One persisted RT value; floats travel as shortest round-trip decimal strings"""
    p: int
    q: int
    r: int
    rt_re: str
    rt_im: str
    log_abs: str
    arg: Optional[str] = None
    precision: Precision = Precision.DOUBLE
    version: int = CACHE_SCHEMA_VERSION
    timestamp: str = Field(default_factory=lambda: datetime.now().isoformat())

    @property
    def key(self) -> Tuple[int, int, int]:
        return (self.p, self.q, self.r)

    @property
    def value(self) -> complex:
        return complex(float(self.rt_re), float(self.rt_im))

    @property
    def phase(self) -> complex:
        """e^{i arg RT}, available even when the stored value overflowed"""
        if self.arg is not None:
            return cmath.exp(1j * float(self.arg))
        value = self.value
        return value / abs(value)

    @classmethod
    def from_value(cls, p: int, q: int, r: int, value: complex, log_abs: float,
                   precision: Precision = Precision.DOUBLE,
                   phase: Optional[complex] = None) -> 'CacheRecord':
        arg = cmath.phase(phase if phase is not None else value)
        return cls(p=p, q=q, r=r, rt_re=repr(float(value.real)), rt_im=repr(float(value.imag)),
                   log_abs=repr(float(log_abs)), arg=repr(arg), precision=precision)
