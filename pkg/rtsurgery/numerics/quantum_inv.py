"""
Colored Jones polynomials of the twist knots K_p at t = e^{4 pi i / r} and the
Reshetikhin-Turaev invariants RT_r(M_{p,q}), summed two independent ways.

Both paths reduce every power of t to an integer multiple of pi i / r before
exponentiating, so the only rounding comes from the Pochhammer products and the
final summation.
"""
import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import partial
from typing import List, Optional, Tuple

import mpmath as mp
import numpy as np

from ..exceptions import IndexRangeError, ZeroFramingError
from ..models import PochhammerTable, Precision, RootData, RTValue, SummationPath, SurgeryParams
from .special_fn import pochhammer_table, quantum_integer

logger = logging.getLogger(__name__)

EXTENDED_DPS = 40
# a double-precision sum is kept only while log(max term / |RT|) <= CANCELLATION_RATE * N
CANCELLATION_RATE = 0.05
DOUBLE_DIGITS = 16
GUARD_DIGITS = 10


def signature_framed(q: int) -> int:
    """Signature of the 1x1 linking matrix (q)"""
    if q == 0:
        raise ZeroFramingError("0-surgery has a singular linking matrix")
    return 1 if q > 0 else -1


def _rational_phase(x: Fraction, orientation: int = 1) -> complex:
    """e^{orientation * pi i x} with x reduced mod 2 exactly"""
    reduced = x % 2
    return cmath.exp(orientation * 1j * math.pi * float(reduced))


def unknot_bracket(root: RootData) -> complex:
    """Bracket of the Kirby-colored +1-framed unknot, e^{(-3/r - (r+1)/4) pi i}"""
    r = root.r
    return _rational_phase(Fraction(-3, r) - Fraction(r + 1, 4), root.orientation)


def kappa(root: RootData, sigma: int) -> complex:
    """kappa_r = (sin(2 pi / r))^2 / r * <Omega_r>_{U+}^{-sigma}"""
    r = root.r
    phase = _rational_phase(sigma * (Fraction(3, r) + Fraction(r + 1, 4)), root.orientation)
    return math.sin(2 * math.pi / r) ** 2 / r * phase


def lattice_prefactor(root: RootData, sigma: int) -> complex:
    """kappa_r / sin^2(pi / (N + 1/2)); note pi / (N + 1/2) = 2 pi / r"""
    r = root.r
    return _rational_phase(sigma * (Fraction(3, r) + Fraction(r + 1, 4)), root.orientation) / r


def _twice_jones_exponent(p: int, m, k, l):
    # 2 * ((p + 1/2) l (l + 1) - m (k + 1/2) + k^2/2 + 3k/2 + 1/2), an integer
    return (2 * p + 1) * l * (l + 1) - m * (2 * k + 1) + k * k + 3 * k + 1


def _triangle(m: int, two_n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Index pairs 0 <= l <= k <= m-1 whose numerator (t)_{m+k} is nonzero"""
    k, l = np.tril_indices(m)
    keep = m + k <= two_n
    return k[keep], l[keep]


def colored_jones_root(p: int, m: int, root: RootData,
                       table: Optional[PochhammerTable] = None) -> complex:
    """
    m-colored Jones polynomial J_m(K_p; t) at t = e^{4 pi i / r}.

    Args:
        p: twist parameter
        m: color, 1 <= m <= 2N (m = 2N + 1 makes the sine prefactor singular)
        root: level data
        table: Pochhammer table to reuse; built (and cached) when omitted

    Returns:
        J_m as a complex number
    """
    N = root.N
    if not 1 <= m <= 2 * N:
        raise IndexRangeError(f"color m must satisfy 1 <= m <= {2 * N} at r = {root.r}, got {m}")
    if table is None:
        table = pochhammer_table(root)
    vals = table.values
    nu = root.nu

    k, l = _triangle(m, 2 * N)
    n = 2 * _twice_jones_exponent(p, m, k, l) + root.r * (k + l)
    sines = np.sin(np.pi * (2 * l + 1) / nu) / math.sin(m * math.pi / nu)
    ratio = vals[k] * vals[m + k] / (vals[k + l + 1] * vals[k - l] * vals[m - k - 1])
    terms = root.half_phase(n) * sines * ratio
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _rt_value(value: complex, root: RootData, path: SummationPath, max_term_log: float,
              precision: Precision = Precision.DOUBLE) -> RTValue:
    return RTValue(value=value, r=root.r, path=path, log_abs=math.log(abs(value)),
                   phase=value / abs(value), max_term_log=max_term_log, precision=precision)


def rt_definitional(params: SurgeryParams, root: RootData,
                    table: Optional[PochhammerTable] = None,
                    sigma: Optional[int] = None) -> RTValue:
    """
    RT_r(M_{p,q}) = kappa_r * sum_{m=0}^{r-2} [m+1]^2 (-1)^{qm} t^{qm(m+2)/4} J_{m+1}(K_p; t).

    Args:
        params: (p, q)
        root: level data
        table: Pochhammer table to reuse
        sigma: signature override; defaults to sign(q)
    """
    if sigma is None:
        sigma = signature_framed(params.q)
    if table is None:
        table = pochhammer_table(root)
    r, q = root.r, params.q
    prefactor = kappa(root, sigma)

    terms = []
    for m in range(r - 1):
        weight = quantum_integer(root, m + 1) ** 2 * root.half_phase(q * m * (m + 2) + r * q * m)
        terms.append(weight * colored_jones_root(params.p, m + 1, root, table))
    total = complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
    max_term_log = math.log(max(abs(t) for t in terms)) + math.log(abs(prefactor))
    return _rt_value(prefactor * total, root, SummationPath.DEFINITIONAL, max_term_log)


def _lattice_exponent(params: SurgeryParams, root: RootData, a: int, k, l):
    """Integer n with (sign) * t^{E(a,k,l)} = e^{pi i n / r}"""
    N, r, q = root.N, root.r, params.q
    m = N - a
    return (q * (N - 1 - a) * (N + 1 - a) + 2 * _twice_jones_exponent(params.p, m, k, l)
            + r * (q * (N - 1 - a) + k + l))


def _lattice_slice(params: SurgeryParams, root: RootData, log_values: np.ndarray,
                   a: int) -> Tuple[complex, float, float]:
    """
    Sum of the (k, l) terms at fixed a, scaled by e^{-shift}.

    Returns:
        (scaled sum, shift, log of the largest term)
    """
    N, nu = root.N, root.nu
    m = N - a
    k, l = _triangle(m, 2 * N)
    if k.size == 0:
        return 0j, -math.inf, -math.inf
    log_ratio = (log_values[k] + log_values[m + k]
                 - log_values[k + l + 1] - log_values[k - l] - log_values[m - k - 1])
    weights = root.half_phase(_lattice_exponent(params, root, a, k, l)) * np.sin(2 * np.pi * (l + 0.5) / nu)
    shift = float(log_ratio.real.max())
    terms = np.exp(log_ratio - shift) * weights * math.sin(math.pi * (a + 0.5) / nu)
    total = complex(math.fsum(terms.real), math.fsum(terms.imag))
    return total, shift, shift + math.log(float(np.abs(terms).max()))


def _combine_slices(slices: List[Tuple[complex, float, float]]) -> Tuple[complex, float, float]:
    live = [s for s in slices if s[1] > -math.inf]
    top = max(s[1] for s in live)
    scaled = [total * math.exp(shift - top) for total, shift, _ in live]
    total = complex(math.fsum(z.real for z in scaled), math.fsum(z.imag for z in scaled))
    return total, top, max(s[2] for s in live)


def _inner_phase(p: int, r: int, l: int) -> int:
    """The l-dependent part 2 (2p + 1) l (l + 1) + r l of the lattice exponent"""
    return 2 * (2 * p + 1) * l * (l + 1) + r * l


def _rt_lattice_extended(params: SurgeryParams, root: RootData, sigma: int, dps: int) -> RTValue:
    """
    The triple sum accumulated in mpmath at ``dps`` digits.

    The exponent splits as E(a, k, 0) + 2 (2p + 1) l (l + 1) + r l, so the
    innermost sum over l depends on k alone; it is formed once per k and each
    (a, k) term only scales it.
    """
    N, r, nu, p = root.N, root.r, root.nu, params.p
    with mp.workdps(dps):
        unit = [mp.expjpi(mp.mpf(root.orientation * n) / r) for n in range(2 * r)]
        vals = [mp.mpc(1)]
        for j in range(1, 2 * N + 1):
            vals.append(vals[-1] * (1 - unit[(4 * j) % (2 * r)]))
        half = mp.mpf(1) / 2
        s3 = [mp.sin(2 * mp.pi * (l + half) / nu) for l in range(N)]

        inner, inner_max = [], []
        for k in range(N):
            pieces = [unit[_inner_phase(p, r, l) % (2 * r)] * s3[l] / (vals[k + l + 1] * vals[k - l])
                      for l in range(k + 1)]
            inner.append(mp.fsum(pieces))
            inner_max.append(max(abs(x) for x in pieces))

        terms, largest = [], mp.mpf(0)
        for a in range(-N, N):
            m = N - a
            s1 = mp.sin(mp.pi * (a + half) / nu)
            for k in range(min(m, 2 * N - m + 1)):
                outer = (vals[k] * vals[m + k] / vals[m - k - 1] * s1
                         * unit[_lattice_exponent(params, root, a, k, 0) % (2 * r)])
                terms.append(outer * inner[k])
                largest = max(largest, abs(outer) * inner_max[k])

        total = mp.fsum(terms)
        prefactor = mp.expjpi(root.orientation * sigma * (mp.mpf(3) / r + mp.mpf(r + 1) / 4)) / r
        value = prefactor * total
        log_abs = float(mp.log(abs(value)))
        max_term_log = float(mp.log(largest * abs(prefactor)))
        phase = complex(value / abs(value))
    return RTValue(value=complex(value), r=r, path=SummationPath.LATTICE, log_abs=log_abs,
                   phase=phase, max_term_log=max_term_log, precision=Precision.EXTENDED)


def _escalated_dps(cancellation_log: float) -> int:
    """Digits that keep DOUBLE_DIGITS significant after losing e^cancellation_log"""
    return max(EXTENDED_DPS, DOUBLE_DIGITS + GUARD_DIGITS + math.ceil(cancellation_log / math.log(10)))


def rt_lattice(params: SurgeryParams, root: RootData,
               table: Optional[PochhammerTable] = None,
               precision: Precision = Precision.DOUBLE,
               threads: int = 1,
               dps: Optional[int] = None) -> RTValue:
    """
    RT_r(M_{p,q}) as the triple sum over -N <= a <= N-1, 0 <= l <= k <= N-a-1.

    Each a-slice is accumulated in log-magnitude form with its own shift, then
    the slices are combined in fixed order, so the result does not depend on
    the thread count.

    Args:
        params: (p, q)
        root: level data
        table: Pochhammer table to reuse (double precision only)
        precision: DOUBLE, or EXTENDED for an mpmath accumulation. A DOUBLE sum
            whose largest term exceeds |RT| by more than e^{0.05 N} is redone in
            extended precision with enough digits for the lost ones.
        threads: worker threads for the a-slices
        dps: digits of the extended accumulation; EXTENDED_DPS by default

    Returns:
        RTValue with value, log|RT| and the largest-term diagnostic
    """
    sigma = signature_framed(params.q)
    if precision == Precision.EXTENDED:
        rt = _rt_lattice_extended(params, root, sigma, dps or EXTENDED_DPS)
        needed = _escalated_dps(rt.cancellation_log)
        if dps is None and needed > EXTENDED_DPS:
            rt = _rt_lattice_extended(params, root, sigma, needed)
        return rt
    if table is None:
        table = pochhammer_table(root)

    N = root.N
    worker = partial(_lattice_slice, params, root, table.log_values)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            slices = list(pool.map(worker, range(-N, N)))
    else:
        slices = [worker(a) for a in range(-N, N)]
    total, top, max_term = _combine_slices(slices)

    prefactor = lattice_prefactor(root, sigma)
    log_abs = math.log(abs(prefactor)) + math.log(abs(total)) + top
    phase = prefactor * total / abs(prefactor * total)
    try:
        value = prefactor * total * math.exp(top)
    except OverflowError:
        logger.warning("RT_%d(M_%d,%d) exceeds the float range; only log|RT| is kept",
                       root.r, params.p, params.q)
        value = complex(math.inf, math.inf)

    max_term_log = max_term + math.log(abs(prefactor))
    ratio = max_term_log - log_abs
    logger.debug("RT_%d(M_%d,%d): log|RT| = %.6f, cancellation log-ratio %.3f",
                 root.r, params.p, params.q, log_abs, ratio)
    if ratio > CANCELLATION_RATE * N:
        dps = _escalated_dps(ratio)
        logger.warning("cancellation at r = %d: largest term exceeds |RT| by e^%.2f; "
                       "re-summing with %d digits", root.r, ratio, dps)
        return _rt_lattice_extended(params, root, sigma, dps)
    return RTValue(value=value, r=root.r, path=SummationPath.LATTICE, log_abs=log_abs,
                   phase=phase, max_term_log=max_term_log)


def lattice_summand(params: SurgeryParams, root: RootData, a: int, k: int, l: int,
                    table: Optional[PochhammerTable] = None) -> complex:
    """
    g_N(a, k, l) = (N + 1/2)^{1/2} times the (a, k, l) term of the triple sum,
    built from Pochhammer products directly (no logarithms).

    RT_r = lattice_prefactor * (N + 1/2)^{-1/2} * sum of g_N.
    """
    N, nu = root.N, root.nu
    m = N - a
    if not (-N <= a <= N - 1 and 0 <= l <= k <= m - 1 and m + k <= 2 * N):
        raise IndexRangeError(f"(a, k, l) = {(a, k, l)} is outside the summation range at r = {root.r}")
    if table is None:
        table = pochhammer_table(root)
    vals = table.values
    ratio = vals[k] * vals[m + k] / (vals[k + l + 1] * vals[k - l] * vals[m - k - 1])
    phase = root.half_phase(int(_lattice_exponent(params, root, a, k, l)))
    sines = math.sin(math.pi * (a + 0.5) / nu) * math.sin(2 * math.pi * (l + 0.5) / nu)
    return math.sqrt(nu) * sines * phase * ratio
