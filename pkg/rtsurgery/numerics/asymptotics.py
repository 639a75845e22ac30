"""
Large-r behaviour of RT_r(M_{p,q}): the saddle point leading term, fitted
correction coefficients, the one-dimensional slice used to bound Re V, and the
verification engine comparing (4 pi / r) log RT_r with the complex volume.
"""
import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import DegenerateHessianError, DomainError, IllConditionedFitError, IndexRangeError
from ..models import (
    AsymptoticConstants, AsymptoticReport, ComplexVolume, Precision, Prediction, ReportRow,
    RootData, RTValue, SurgeryParams
)
from .geometry import complex_volume, reduce_cs, solve_gluing
from .potential import (
    asymptotic_constants, growth_hessian, hessian, in_S, principal_sqrt_det
)
from .quantum_inv import lattice_prefactor, rt_lattice, signature_framed
from .special_fn import li2

logger = logging.getLogger(__name__)

TWO_PI_I = 2 * math.pi * 1j

# four equal saddle contributions give half of the bare phase * omega * e^{(N+1/2) zeta}
LEADING_NORMALISATION = 0.5
MAX_CONDITION = 1e12

RTLookup = Callable[[int], RTValue]


def _orientation_phase(params: SurgeryParams, root: RootData) -> complex:
    """(-1)^{p+1} i e^{sigma (3/r + (r+1)/4) pi i}"""
    sigma = signature_framed(params.q)
    sign = (-1) ** (params.p + 1)
    return sign * 1j * lattice_prefactor(root, sigma) * root.r


def _log_leading(params: SurgeryParams, constants: AsymptoticConstants, root: RootData) -> complex:
    scale = LEADING_NORMALISATION * constants.omega * _orientation_phase(params, root)
    return cmath.log(scale) + root.nu * constants.zeta


def _safe_exp(value: complex) -> complex:
    try:
        return cmath.exp(value)
    except OverflowError:
        return complex(math.inf, math.inf)


def predict_rt(params: SurgeryParams, constants: AsymptoticConstants, root: RootData,
               kappa: Sequence[complex] = ()) -> Prediction:
    """
    Leading asymptotics of RT_r:
    (1/2) (-1)^{p+1} i e^{sigma (3/r + (r+1)/4) pi i} omega e^{(N+1/2) zeta},
    times 1 + sum_i kappa_i (4 pi i / r)^i when corrections are supplied.
    """
    log_leading = _log_leading(params, constants, root)
    leading = _safe_exp(log_leading)
    h = 4j * math.pi / root.r
    correction = 1 + sum(k * h ** (i + 1) for i, k in enumerate(kappa))
    return Prediction(r=root.r, leading=leading, kappa=tuple(kappa),
                      predicted=leading * correction, log_leading=log_leading)


def saddle_leading(matrix: np.ndarray, n_scale: float) -> complex:
    """
    pi^{d/2} / (n^{d/2} sqrt det(-A)): the Gaussian factor of int e^{n (x^T A x)} dx.

    sqrt det is the product of principal square roots of the eigenvalues of -A.

    Raises:
        DegenerateHessianError: A is singular
    """
    A = np.asarray(matrix, dtype=complex)
    dim = A.shape[0]
    if abs(np.linalg.det(A)) < 1e-300:
        raise DegenerateHessianError("saddle point matrix is singular")
    half = dim / 2
    return math.pi ** half / (n_scale ** half * principal_sqrt_det(-A))


def saddle_assembly(params: SurgeryParams, constants: AsymptoticConstants, root: RootData) -> complex:
    """
    The leading term rebuilt from the saddle point data rather than from omega:
    4 kappa'_r (N+1/2)^{5/2} alpha0 e^{(N+1/2) zeta} * Gaussian factor of Hess(V)/2.
    """
    theta = constants.critical.theta
    sigma = signature_framed(params.q)
    nu = root.nu
    gaussian = saddle_leading(0.5 * hessian(params, theta), nu)
    return (4 * lattice_prefactor(root, sigma) * nu ** 2.5 * gaussian * constants.alpha0
            * _safe_exp(nu * constants.zeta))


def _exp_coefficients(lam: Sequence[complex]) -> Tuple[complex, ...]:
    """kappa_1..kappa_d with 1 + sum kappa_i h^i = exp(sum lam_i h^i) to order d"""
    coeffs = [1 + 0j]
    for i in range(1, len(lam) + 1):
        coeffs.append(sum(j * lam[j - 1] * coeffs[i - j] for j in range(1, i + 1)) / i)
    return tuple(complex(c) for c in coeffs[1:])


def fit_kappa(rows: Sequence[ReportRow], depth: int) -> Tuple[complex, ...]:
    """
    Correction coefficients kappa_i of rt/leading = 1 + sum kappa_i (4 pi i / r)^i.

    log(rt/leading) is fitted by least squares against h^i, h = 4 pi i / r,
    i = 1..depth, and the fitted series is exponentiated.

    Args:
        rows: report rows carrying r and the ratio rt/leading
        depth: number of coefficients

    Returns:
        (kappa_1, ..., kappa_depth)

    Raises:
        IndexRangeError: fewer than depth + 2 distinct levels
        IllConditionedFitError: the design matrix is numerically singular
    """
    if depth < 0:
        raise IndexRangeError(f"fit depth must be non-negative, got {depth}")
    if depth == 0:
        return ()
    by_level = {row.r: row.ratio for row in rows}
    if len(by_level) < depth + 2:
        raise IndexRangeError(f"fitting {depth} coefficients needs at least {depth + 2} levels, "
                              f"got {len(by_level)}")
    levels = sorted(by_level)
    h = np.array([4j * math.pi / r for r in levels])
    design = np.column_stack([h ** i for i in range(1, depth + 1)])
    ratios = np.array([by_level[r] for r in levels])
    # phases unwrapped from the largest level, where the ratio is closest to 1
    target = np.log(np.abs(ratios)) + 1j * np.unwrap(np.angle(ratios[::-1]))[::-1]
    condition = float(np.linalg.cond(design))
    if condition > MAX_CONDITION:
        raise IllConditionedFitError(f"kappa fit of depth {depth} is ill-conditioned", condition)
    solution, *_ = np.linalg.lstsq(design, target, rcond=None)
    kappa = _exp_coefficients(solution)
    logger.debug("kappa fit over r = %s: %s (condition %.2e)", levels, kappa, condition)
    return kappa


def _check_slice(c1: float, c3: float) -> None:
    if not (0 <= c1 <= 0.25 and 0.5 <= c3 <= 0.75):
        raise DomainError(f"slice parameters must satisfy 0 <= c1 <= 1/4, 1/2 <= c3 <= 3/4, got ({c1}, {c3})")


def t2_slice(c1: float, c3: float) -> complex:
    """
    The theta2 solving dV/dtheta2 = 0 with theta1 = c1 and theta3 = c3 held real:
    T2 = log(cos 2 pi c1 - 2 sqrt(sin^4 pi c1 - sin^2 pi c3)) / (2 pi i) + 1.
    """
    _check_slice(c1, c3)
    s1 = math.sin(math.pi * c1)
    s3 = math.sin(math.pi * c3)
    inner = math.cos(2 * math.pi * c1) - 2 * cmath.sqrt(s1 ** 4 - s3 ** 2)
    return cmath.log(inner) / TWO_PI_I + 1


def slice_convexity(c1: float, c3: float, theta2: complex) -> float:
    """f_{X2 X2} = 2 pi (a + b + c + d + e) at (c1, theta2, c3)"""
    theta2 = complex(theta2)
    if not (0.5 < theta2.real < 1 and 0 < c1 < 0.25 and 0.5 < c3 < 0.75 and theta2.real + c1 < 1):
        raise DomainError(f"slice convexity is stated for 1/2 < Re theta2 < 1, 0 < c1 < 1/4, "
                          f"1/2 < c3 < 3/4, Re theta2 + c1 < 1; got ({c1}, {theta2}, {c3})")
    matrix = growth_hessian((c1, theta2.real, c3), (0.0, theta2.imag, 0.0))
    return float(matrix[1, 1])


def slice_potential(c1: float, c3: float, theta2: complex) -> float:
    """
    f = Re V(c1, theta2, c3). With theta1, theta3 real the polynomial part of V
    contributes 2 pi Im theta2 only, so f does not depend on (p, q).
    """
    theta2 = complex(theta2)
    z2 = cmath.exp(TWO_PI_I * theta2)
    z1 = cmath.exp(TWO_PI_I * c1)
    z3 = cmath.exp(TWO_PI_I * c3)
    dilogs = li2(z2 * z3) + li2(z2 / z3) - li2(z2 * z1) - li2(z2) - li2(z2 / z1)
    return 2 * math.pi * theta2.imag + (dilogs / TWO_PI_I).real


def sweep_levels(r_values: Iterable[int]) -> List[int]:
    """Every level a sweep over ``r_values`` reads: each r and its companion r + 2"""
    levels = set(int(r) for r in r_values)
    return sorted(levels | {r + 2 for r in levels})


def _report_row(params: SurgeryParams, constants: AsymptoticConstants, volume: ComplexVolume,
                rt: RTValue, companion: RTValue) -> ReportRow:
    root = RootData(rt.r)
    nu = root.nu
    prediction = predict_rt(params, constants, root)
    log_ratio = rt.log_value - prediction.log_leading
    ratio = _safe_exp(log_ratio)

    vol_est = (2 * math.pi / nu) * (rt.log_abs - math.log(abs(LEADING_NORMALISATION * constants.omega)))
    # RT_{r+2} / RT_r with the bare phases divided out is e^zeta up to O(1/r^2)
    bare = _orientation_phase(params, root) / _orientation_phase(params, RootData(companion.r))
    zeta_im = cmath.phase(companion.phase * rt.phase.conjugate() * bare)
    return ReportRow(r=rt.r, rt=rt.value, ratio=ratio, vol_est=vol_est,
                     cs_est=reduce_cs(2 * math.pi * zeta_im),
                     err_vol=abs(vol_est - volume.vol), log_abs=rt.log_abs)


def verify_conjecture(params: SurgeryParams, r_values: Iterable[int],
                      rt_lookup: Optional[RTLookup] = None,
                      constants: Optional[AsymptoticConstants] = None,
                      volume: Optional[ComplexVolume] = None,
                      threads: int = 1,
                      precision: Precision = Precision.DOUBLE) -> AsymptoticReport:
    """
    Rows of (4 pi / r) log RT_r against Vol + i CS for increasing odd r.

    vol_est = (4 pi / r)(log|RT_r| - log|omega / 2|). cs_est is 2 pi times the
    phase step from RT_r to RT_{r+2} after the bare phases are removed; that
    step fixes Im zeta mod 2 pi and so CS mod pi^2. It is reduced to [0, pi^2).
    RT_r is handled in log form throughout, so levels whose value overflows a
    float still produce rows.

    Args:
        params: (p, q); a warning is logged outside S
        r_values: odd levels
        rt_lookup: r -> RTValue, e.g. a cache; rt_lattice otherwise. It is asked
            for every level in sweep_levels(r_values).
        constants: precomputed asymptotic constants
        volume: precomputed complex volume
        threads: levels evaluated concurrently
        precision: passed to rt_lattice when no lookup is given
    """
    levels = sorted(set(int(r) for r in r_values))
    for r in levels:
        if r < 3 or r % 2 == 0:
            raise DomainError(f"levels must be odd integers >= 3, got {r}")
    if not in_S(params):
        logger.warning("(p, q) = (%d, %d) lies outside the admissible set S", params.p, params.q)
    if constants is None:
        constants = asymptotic_constants(params)
    if volume is None:
        volume = complex_volume(params, solve_gluing(params, constants.critical))
    if rt_lookup is None:
        def rt_lookup(r: int) -> RTValue:
            return rt_lattice(params, RootData(r), precision=precision)

    needed = sweep_levels(levels)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = dict(zip(needed, pool.map(rt_lookup, needed)))
    else:
        values = {r: rt_lookup(r) for r in needed}

    rows: List[ReportRow] = [_report_row(params, constants, volume, values[r], values[r + 2])
                             for r in levels]
    for row in rows:
        logger.info("r = %d: vol_est %.6f (error %.2e), cs_est %.6f", row.r, row.vol_est,
                    row.err_vol, row.cs_est)
    return AsymptoticReport(params=params, constants=constants, volume=volume, rows=rows)
