from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Union

import numpy as np

from ..exceptions import DomainError


class SummationPath(Enum):
    DEFINITIONAL = "definitional"
    LATTICE = "lattice"


class Precision(Enum):
    DOUBLE = "double"
    EXTENDED = "extended"


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


class Command(Enum):
    RT = "rt"
    CRITICAL = "critical"
    VOLUME = "volume"
    VERIFY = "verify"
    POTENTIAL_EVAL = "potential-eval"
    REGION_CHECK = "region-check"
    FIT = "fit"


@dataclass(frozen=True)
class RootData:
    """Odd level r with N = (r-1)/2 and the root t = e^{4 pi i / r}.

    ``orientation = -1`` describes the conjugate root e^{-4 pi i / r}. Every
    phase used by the quantum sums is read from ``half_phases``, the table of
    e^{orientation * pi i j / r} for 0 <= j < 2r, so integer exponents are
    reduced exactly before any floating point work.
    """
    r: int
    orientation: int = 1
    half_phases: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.r, (int, np.integer)) or self.r < 3 or self.r % 2 == 0:
            raise DomainError(f"level r must be an odd integer >= 3, got {self.r!r}")
        if self.orientation not in (1, -1):
            raise DomainError(f"orientation must be +1 or -1, got {self.orientation!r}")
        j = np.arange(2 * self.r)
        table = np.exp(self.orientation * 1j * np.pi * j / self.r)
        table.setflags(write=False)
        object.__setattr__(self, "half_phases", table)

    @property
    def N(self) -> int:
        return (self.r - 1) // 2

    @property
    def nu(self) -> float:
        """N + 1/2, the large parameter of every asymptotic statement"""
        return self.N + 0.5

    @property
    def t(self) -> complex:
        return complex(self.half_phases[4 % (2 * self.r)])

    def half_phase(self, n: Union[int, np.ndarray]) -> Union[complex, np.ndarray]:
        """e^{orientation * pi i n / r} for integer n (scalar or array)."""
        idx = np.mod(n, 2 * self.r)
        if np.ndim(idx) == 0:
            return complex(self.half_phases[int(idx)])
        return self.half_phases[idx]

    def conjugate(self) -> "RootData":
        return RootData(self.r, -self.orientation)


@dataclass(frozen=True)
class SurgeryParams:
    """The pair (p, q): q-surgery on the twist knot with 2p crossings in its twist region"""
    p: int
    q: int

    def __post_init__(self):
        if self.p < 1:
            raise DomainError(f"twist parameter p must be >= 1, got {self.p}")
        if self.q == 0:
            raise DomainError("surgery coefficient q must be nonzero")

    @property
    def gamma1(self) -> float:
        return 1.0 / self.p

    @property
    def gamma2(self) -> float:
        return 1.0 / self.q

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q}


class Theta3(NamedTuple):
    """Angle coordinates in full turns"""
    theta1: complex
    theta2: complex
    theta3: complex

    @classmethod
    def of(cls, values) -> "Theta3":
        t1, t2, t3 = values
        return cls(complex(t1), complex(t2), complex(t3))

    @property
    def real(self) -> "Theta3":
        return Theta3(complex(self.theta1.real), complex(self.theta2.real), complex(self.theta3.real))

    def as_array(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2, self.theta3], dtype=complex)


class FourierIndex(NamedTuple):
    m1: int = 0
    m2: int = 0
    m3: int = 0
