import cmath
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .params import Precision, RootData, SummationPath, SurgeryParams, Theta3


def _complex_pair(value: complex, prefix: str) -> Dict[str, float]:
    return {f"{prefix}_re": float(value.real), f"{prefix}_im": float(value.imag)}


@dataclass(frozen=True)
class PochhammerTable:
    """(t)_n for 0 <= n <= 2N, with the running sum of log(1 - t^j) alongside"""
    root: RootData
    values: np.ndarray
    log_values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]


@dataclass(frozen=True)
class RTValue:
    value: complex
    r: int
    path: SummationPath
    log_abs: float
    phase: complex = 1 + 0j
    max_term_log: float = float("-inf")
    precision: Precision = Precision.DOUBLE

    @property
    def log_value(self) -> complex:
        """log RT with the principal argument; finite even when value overflows"""
        return complex(self.log_abs, cmath.phase(self.phase))

    @property
    def cancellation_log(self) -> float:
        """log of (largest single term) / |RT|"""
        return self.max_term_log - self.log_abs

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"r": self.r, "path": self.path.value, "precision": self.precision.value}
        out.update(_complex_pair(self.value, "rt"))
        out["log_abs"] = self.log_abs
        out["arg"] = cmath.phase(self.phase)
        out["cancellation_log"] = self.cancellation_log
        return out


@dataclass(frozen=True)
class CriticalPoint:
    theta: Theta3
    z: Tuple[complex, complex, complex]
    grad_norm: float
    zeta: complex
    iterations: int = 0

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        for name, value in zip(("theta1", "theta2", "theta3"), self.theta):
            out.update(_complex_pair(value, name))
        out["grad_norm"] = self.grad_norm
        out["iterations"] = self.iterations
        return out


@dataclass(frozen=True)
class AsymptoticConstants:
    """zeta, omega and H at the critical point, plus the saddle data they come from"""
    params: SurgeryParams
    critical: CriticalPoint
    zeta: complex
    omega: complex
    H_det: complex
    alpha0: complex
    sqrt_det: complex

    @property
    def zeta_R(self) -> float:
        return self.zeta.real

    def to_dict(self) -> Dict[str, float]:
        out = _complex_pair(self.zeta, "zeta")
        out.update(_complex_pair(self.omega, "omega"))
        out.update(_complex_pair(self.H_det, "H"))
        return out


@dataclass(frozen=True)
class ShapeParams:
    x: complex
    y: complex
    z: complex
    w: complex
    u1: complex
    v1: complex
    u2: complex
    v2: complex

    def to_dict(self) -> Dict[str, float]:
        out: Dict[str, float] = {}
        for name in ("x", "y", "z", "w", "u1", "v1", "u2", "v2"):
            out.update(_complex_pair(getattr(self, name), name))
        return out


@dataclass(frozen=True)
class ComplexVolume:
    vol: float
    cs: float

    @property
    def value(self) -> complex:
        return complex(self.vol, self.cs)

    def to_dict(self) -> Dict[str, float]:
        return {"vol": self.vol, "cs": self.cs}


@dataclass(frozen=True)
class Prediction:
    r: int
    leading: complex
    kappa: Tuple[complex, ...] = ()
    predicted: Optional[complex] = None
    log_leading: complex = 0j


@dataclass(frozen=True)
class ReportRow:
    r: int
    rt: complex
    ratio: complex
    vol_est: float
    cs_est: float
    err_vol: float
    log_abs: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "rt_re": float(self.rt.real),
            "rt_im": float(self.rt.imag),
            "ratio_re": float(self.ratio.real),
            "ratio_im": float(self.ratio.imag),
            "log_abs": self.log_abs,
            "vol_est": self.vol_est,
            "err_vol": self.err_vol,
            "cs_est": self.cs_est,
        }


@dataclass
class AsymptoticReport:
    params: SurgeryParams
    constants: AsymptoticConstants
    volume: "ComplexVolume"
    rows: List[ReportRow] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        constants = {
            "zeta_re": self.constants.zeta.real,
            "zeta_im": self.constants.zeta.imag,
            "omega_re": self.constants.omega.real,
            "omega_im": self.constants.omega.imag,
            "vol": self.volume.vol,
            "cs": self.volume.cs,
        }
        return {
            "params": self.params.to_dict(),
            "constants": constants,
            "rows": [row.to_dict() for row in self.rows],
        }
