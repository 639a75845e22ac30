"""
Special functions used by every other module: the dilogarithm, the
Lobachevsky function, the quantum dilogarithm phi_N, q-Pochhammer tables at the
root t = e^{4 pi i / r} and quantum integers.
"""
import cmath
import logging
import math
from functools import lru_cache
from typing import Optional, Union

import mpmath as mp
import numpy as np
from scipy import integrate, special

from ..exceptions import CutViolationError, DomainError
from ..models import PochhammerTable, RootData

logger = logging.getLogger(__name__)

PI_SQUARED_OVER_6 = math.pi ** 2 / 6

# phi_N quadrature: the integrand decays like e^{-2 min(Re theta, 1 - Re theta) |x|}
TAIL_TOLERANCE = 1e-15
QUAD_EPSABS = 1e-14
QUAD_EPSREL = 1e-13
QUAD_LIMIT = 500

ComplexLike = Union[complex, float, np.ndarray]


def li2(z: ComplexLike, dps: Optional[int] = None):
    """
    Principal branch of the dilogarithm Li2, holomorphic off the cut [1, inf).

    Args:
        z: complex scalar or array
        dps: if given, evaluate in extended precision with mpmath at this many
            decimal digits (scalar argument only) and return an mpmath.mpc

    Returns:
        Li2(z), complex or complex ndarray

    Raises:
        CutViolationError: z real and z > 1
        DomainError: z not finite
    """
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"li2 argument is not finite: {z!r}")
    if np.any((arr.imag == 0.0) & (arr.real > 1.0)):
        raise CutViolationError(f"li2 argument lies on the branch cut (1, inf): {z!r}")

    if dps is not None:
        if arr.ndim:
            raise DomainError("extended precision li2 takes a scalar argument")
        with mp.workdps(dps):
            return mp.polylog(2, mp.mpc(float(arr.real), float(arr.imag)))

    # scipy's spence(w) is Li2(1 - w), cut along w in (-inf, 0]
    value = special.spence(1.0 - arr)
    if arr.ndim == 0:
        return complex(value)
    return value


def lobachevsky(theta: Union[float, np.ndarray]):
    """
    Lobachevsky function -int_0^theta log|2 sin(pi s)| ds (odd, period 1).

    Evaluated as Im Li2(e^{2 pi i theta}) / (2 pi) after reducing theta mod 1.
    """
    theta = np.asarray(theta, dtype=float)
    frac = theta - np.floor(theta)
    value = np.asarray(np.imag(li2(np.exp(2j * np.pi * frac)))) / (2 * np.pi)
    if value.ndim == 0:
        return float(value)
    return value


def bloch_wigner(z: complex) -> float:
    """D(z) = Im Li2(z) + arg(1 - z) log|z|, the volume of the ideal tetrahedron of shape z"""
    z = complex(z)
    if z == 0 or z == 1:
        return 0.0
    return li2(z).imag + cmath.phase(1 - z) * math.log(abs(z))


def _line_integrand(x: float, theta: complex, nu: float) -> complex:
    # e^{(2 theta - 1) x} / (4 x sinh x sinh(x/nu)) rewritten without overflowing sinh
    ax = abs(x)
    return cmath.exp((2 * theta - 1) * x - ax * (1 + 1 / nu)) / (
        x * -math.expm1(-2 * ax) * -math.expm1(-2 * ax / nu))


def _arc_integrand(phi: float, theta: complex, nu: float) -> complex:
    x = cmath.exp(1j * phi)
    return cmath.exp((2 * theta - 1) * x) / (4 * x * cmath.sinh(x) * cmath.sinh(x / nu)) * 1j * x


@lru_cache(maxsize=1 << 16)
def _phi(n_level: int, theta: complex) -> complex:
    nu = n_level + 0.5
    gap = min(theta.real, 1.0 - theta.real)
    cutoff = max(2.0, -math.log(TAIL_TOLERANCE) / (2.0 * gap))
    logger.debug("phi_%d(%s): contour truncated at |x| = %.1f", n_level, theta, cutoff)

    opts = dict(complex_func=True, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
    left = integrate.quad(_line_integrand, -cutoff, -1.0, args=(theta, nu), **opts)[0]
    right = integrate.quad(_line_integrand, 1.0, cutoff, args=(theta, nu), **opts)[0]
    # upper semicircle traversed from -1 to 1, i.e. phi from pi down to 0
    arc = integrate.quad(_arc_integrand, 0.0, math.pi, args=(theta, nu), **opts)[0]
    return complex(left + right - arc)


def quantum_dilog(n_level: int, theta: complex) -> complex:
    """
    The quantum dilogarithm phi_N(theta) at level r = 2N + 1.

    phi_N(theta) = int_gamma e^{(2 theta - 1) x} / (4 x sinh x sinh(x / (N + 1/2))) dx
    where gamma runs along (-inf, -1], the upper unit semicircle and [1, inf).

    Args:
        n_level: N
        theta: complex with 0 < Re theta < 1

    Returns:
        phi_N(theta)
    """
    theta = complex(theta)
    if not (math.isfinite(theta.real) and math.isfinite(theta.imag)):
        raise DomainError(f"phi_N argument is not finite: {theta!r}")
    if not 0.0 < theta.real < 1.0:
        raise DomainError(f"phi_N is defined on 0 < Re(theta) < 1, got {theta!r}")
    return _phi(int(n_level), theta)


def quantum_dilog_derivative(n_level: int, theta: complex, step: float = 1e-5) -> complex:
    """Central difference of phi_N; it approaches -(N + 1/2) log(1 - e^{2 pi i theta})"""
    theta = complex(theta)
    return (quantum_dilog(n_level, theta + step) - quantum_dilog(n_level, theta - step)) / (2 * step)


@lru_cache(maxsize=64)
def pochhammer_table(root: RootData) -> PochhammerTable:
    """
    (t)_n = prod_{j=1..n} (1 - t^j) for 0 <= n <= 2N.

    The table is built once per RootData and returned read-only.
    """
    j = np.arange(1, 2 * root.N + 1)
    factors = 1.0 - root.half_phase(4 * j)
    values = np.concatenate(([1.0 + 0.0j], np.cumprod(factors)))
    log_values = np.concatenate(([0.0j], np.cumsum(np.log(factors))))
    values.setflags(write=False)
    log_values.setflags(write=False)
    return PochhammerTable(root=root, values=values, log_values=log_values)


def quantum_integer(root: RootData, n: int) -> float:
    """[n] = sin(2 pi n / r) / sin(2 pi / r)"""
    return math.sin(2 * math.pi * n / root.r) / math.sin(2 * math.pi / root.r)
