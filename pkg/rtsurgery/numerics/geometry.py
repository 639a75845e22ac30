"""
Hyperbolic structure of M_{p,q}: the gluing and Dehn filling equations, their
complex volume, and the small-(1/p, 1/q) expansions of the volume.
"""
import cmath
import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np

from ..exceptions import ConvergenceError, IndexRangeError
from ..models import ComplexVolume, CriticalPoint, ShapeParams, SurgeryParams
from .potential import solve_critical
from .special_fn import bloch_wigner, li2, lobachevsky

logger = logging.getLogger(__name__)

PI_I = math.pi * 1j
TWO_PI_I = 2 * math.pi * 1j
PI_SQUARED = math.pi ** 2

GLUING_TOL = 1e-10
NEWTON_TOL = 1e-13
NEWTON_MAX_ITER = 60
FD_STEP = 1e-7
SEED_TOL = 1e-3


def octahedron_volume() -> float:
    """v8, the volume of the regular ideal octahedron"""
    return 8 * math.pi * lobachevsky(0.25)


def _power(base: complex, exponent: int) -> complex:
    return cmath.exp(exponent * cmath.log(base))


def _twist_factor(params: SurgeryParams, x: complex, z: complex) -> complex:
    """(xz)^{2p-1}"""
    return cmath.exp((2 * params.p - 1) * (cmath.log(x) + cmath.log(z)))


def _complete(params: SurgeryParams, x: complex, z: complex) -> Tuple[complex, complex]:
    """y and w from (x, z) through the edge equations"""
    E = _twist_factor(params, x, z)
    return 1 - E * (x - 1), 1 - E * (z - 1)


def _reduced_residuals(params: SurgeryParams, v: np.ndarray) -> np.ndarray:
    x, z = complex(v[0]), complex(v[1])
    y, w = _complete(params, x, z)
    q = params.q
    filling = cmath.exp(q * cmath.log(-(z - 1) / (x - 1)) + (q + 2) * cmath.log(x * y)) - 1
    return np.array([x * y * z * w - 1, filling], dtype=complex)


def _jacobian(params: SurgeryParams, v: np.ndarray, f0: np.ndarray) -> np.ndarray:
    n = len(v)
    jacob = np.empty((n, n), dtype=complex)
    for i in range(n):
        dx = FD_STEP * max(1.0, abs(v[i]))
        shifted = v.copy()
        shifted[i] += dx
        jacob[:, i] = (_reduced_residuals(params, shifted) - f0) / dx
    return jacob


def gluing_residuals(shapes: ShapeParams, params: SurgeryParams) -> np.ndarray:
    """
    Residuals of the four polynomial consequences of the geometric equations:
    xyzw = 1, (1-w)(1-x) = (1-y)(1-z), (xz)^{2p-1} = -(w-1)/(z-1) and
    (-(w-1)xy/(y-1))^q (xy)^2 = 1.
    """
    x, y, z, w = shapes.x, shapes.y, shapes.z, shapes.w
    p, q = params.p, params.q
    return np.array([
        x * y * z * w - 1,
        (1 - w) * (1 - x) - (1 - y) * (1 - z),
        _power(x * z, 2 * p - 1) + (w - 1) / (z - 1),
        _power(-(w - 1) * x * y / (y - 1), q) * (x * y) ** 2 - 1,
    ], dtype=complex)


def _reduce_two_pi_i(value: complex) -> complex:
    k = round(value.imag / (2 * math.pi))
    return value - TWO_PI_I * k


def holonomy_residuals(shapes: ShapeParams, params: SurgeryParams) -> Dict[str, complex]:
    """
    q u1 + v1 + 2 pi i and u2 - p v2 + 2 pi i, raw and reduced mod 2 pi i.

    With principal logarithms both relations hold only up to a multiple of 2 pi i.
    """
    raw1 = params.q * shapes.u1 + shapes.v1 + TWO_PI_I
    raw2 = shapes.u2 - params.p * shapes.v2 + TWO_PI_I
    return {
        "meridian_raw": raw1,
        "meridian": _reduce_two_pi_i(raw1),
        "twist_raw": raw2,
        "twist": _reduce_two_pi_i(raw2),
    }


def _shape_params(x: complex, y: complex, z: complex, w: complex) -> ShapeParams:
    log = cmath.log
    return ShapeParams(
        x=x, y=y, z=z, w=w,
        u1=log(w - 1) + log(x) + log(y) - log(y - 1) - PI_I,
        v1=2 * log(x) + 2 * log(y) - TWO_PI_I,
        u2=log(w - 1) + log(x) + log(z) - log(z - 1) - PI_I,
        v2=2 * log(x) + 2 * log(z) - TWO_PI_I,
    )


def gluing_seed(critical: CriticalPoint) -> Tuple[complex, complex]:
    """
    (x, z) read off from a critical point of V.

    The correspondence fixes xy, xz, (w-1)xy/(y-1) = -1/z1 and
    (z-1)/((w-1)xz) = z3 (1 - z2/z3)/(1 - z2 z3); with xyzw = 1 this leaves a
    quadratic in w. The root reproducing xz = z3 is returned.

    Raises:
        ConvergenceError: neither root matches the correspondence to SEED_TOL
    """
    z1, z2, z3 = critical.z
    xy = -z1 * (1 - z2 / z1) / (1 - z2 * z1)
    K = z3 * (1 - z2 / z3) / (1 - z2 * z3)
    a = K * z3 * xy
    b = xy - a
    disc = cmath.sqrt(b * b + 4 * a)

    best, best_err = None, math.inf
    for w in ((-b + disc) / (2 * a), (-b - disc) / (2 * a)):
        z = 1 / (xy * w)
        y = 1 - z1 * xy * (w - 1)
        x = xy / y
        err = abs(x * z - z3)
        if err < best_err:
            best, best_err = (x, z), err
    if best_err > SEED_TOL:
        raise ConvergenceError(f"seed-branch mismatch: critical point gives xz off by {best_err:.2e}")
    return best


def solve_gluing(params: SurgeryParams, critical: Optional[CriticalPoint] = None) -> ShapeParams:
    """
    Shape parameters of the hyperbolic structure on M_{p,q}.

    Newton's method on the reduced system in (x, z), seeded from the critical
    point of V, with a forward-difference Jacobian.

    Raises:
        ConvergenceError: the reduced system stalls, or a gluing residual stays above 1e-10
    """
    if critical is None:
        critical = solve_critical(params)
    v = np.array(gluing_seed(critical), dtype=complex)
    f0 = _reduced_residuals(params, v)
    for iteration in range(NEWTON_MAX_ITER):
        norm = float(np.max(np.abs(f0)))
        if norm < NEWTON_TOL:
            break
        step = np.linalg.solve(_jacobian(params, v, f0), -f0)
        v = v + step
        f0 = _reduced_residuals(params, v)
        logger.debug("gluing iteration %d: max residual %.3e", iteration + 1, float(np.max(np.abs(f0))))

    x, z = complex(v[0]), complex(v[1])
    y, w = _complete(params, x, z)
    shapes = _shape_params(x, y, z, w)
    residual = float(np.max(np.abs(gluing_residuals(shapes, params))))
    if not residual < GLUING_TOL:
        raise ConvergenceError(f"gluing equations of M_({params.p},{params.q}) unsolved: "
                               f"max residual {residual:.3e}")
    return shapes


def correspondence_residual(shapes: ShapeParams, critical: CriticalPoint) -> complex:
    """log x + log z - 2 pi i (theta3 - 1)"""
    return cmath.log(shapes.x) + cmath.log(shapes.z) - TWO_PI_I * (critical.theta.theta3 - 1)


def rogers(x: complex) -> complex:
    """R(x) = 1/2 log(x) log(1 - x) + Li2(x), principal branches"""
    x = complex(x)
    return 0.5 * cmath.log(x) * cmath.log(1 - x) + li2(x)


def reduce_cs(cs: float) -> float:
    """cs reduced into [0, pi^2)"""
    reduced = cs % PI_SQUARED
    return 0.0 if reduced == PI_SQUARED else reduced


def _tetrahedra(shapes: ShapeParams) -> Tuple[complex, complex, complex, complex]:
    return shapes.w, shapes.x, 1 / (1 - shapes.y), 1 / (1 - shapes.z)


def rogers_complex_volume(params: SurgeryParams, shapes: ShapeParams) -> complex:
    """
    -(1/i)(R(w) + R(x) + R(1/(1-y)) + R(1/(1-z)))
    + (pi/2)(u1 + 4 pi i) - (pi/(2p))(u2 + 4 pi i), before any reduction mod pi^2 i.
    """
    rogers_sum = sum(rogers(t) for t in _tetrahedra(shapes))
    return (-rogers_sum / 1j + (math.pi / 2) * (shapes.u1 + 4 * PI_I)
            - (math.pi / (2 * params.p)) * (shapes.u2 + 4 * PI_I))


def bloch_wigner_volume(shapes: ShapeParams) -> float:
    """|D(w) + D(x) + D(1/(1-y)) + D(1/(1-z))|, the volume summed over the four tetrahedra"""
    return abs(sum(bloch_wigner(t) for t in _tetrahedra(shapes)))


def complex_volume(params: SurgeryParams, shapes: Optional[ShapeParams] = None) -> ComplexVolume:
    """
    Vol + i CS of M_{p,q} from the Rogers dilogarithm formula, with CS reduced
    to [0, pi^2). The Bloch-Wigner volume of the tetrahedra is compared against
    the real part and a disagreement is logged.
    """
    if shapes is None:
        shapes = solve_gluing(params)
    value = rogers_complex_volume(params, shapes)
    check = bloch_wigner_volume(shapes)
    if abs(value.real - check) > 1e-8:
        logger.warning("Rogers volume %.12f disagrees with Bloch-Wigner volume %.12f for (%d, %d)",
                       value.real, check, params.p, params.q)
    return ComplexVolume(vol=value.real, cs=reduce_cs(value.imag))


# coefficients of g1^i g2^j in the volume expansion, grouped by total order
_VOLUME_COEFFICIENTS = {
    2: {(2, 0): -PI_SQUARED / 4, (0, 2): -2 * PI_SQUARED},
    3: {(3, 0): -PI_SQUARED / 8, (0, 3): 8 * PI_SQUARED},
    4: {(4, 0): -PI_SQUARED / 32 - math.pi ** 4 / 192,
        (2, 2): -math.pi ** 4 / 4,
        (0, 4): -16 * PI_SQUARED + math.pi ** 4 / 3},
}


def _series(g1: float, g2: float, order: int) -> float:
    if order not in _VOLUME_COEFFICIENTS:
        raise IndexRangeError(f"volume series is available to order 2, 3 or 4, got {order}")
    total = octahedron_volume()
    for degree in range(2, order + 1):
        for (i, j), coeff in _VOLUME_COEFFICIENTS[degree].items():
            total += coeff * g1 ** i * g2 ** j
    return total


def volume_series(params: SurgeryParams, order: int = 4) -> float:
    """Vol(M_{p,q}) expanded in g1 = 1/p and g2 = 1/q up to total degree ``order``"""
    return _series(params.gamma1, params.gamma2, order)


def knot_complement_series(p: int, order: int = 4) -> float:
    """The q = infinity limit of volume_series: the volume of the twist knot complement"""
    return _series(1.0 / p, 0.0, order)


def complex_volume_series(params: SurgeryParams) -> complex:
    """Second-order complex expansion in g1, g2; its real part is volume_series(order=2)"""
    g1, g2 = params.gamma1, params.gamma2
    return (octahedron_volume() - 1j * PI_SQUARED / g1 - 3j * PI_SQUARED / g2
            - 1j * PI_SQUARED * (g1 + g2)
            - ((0.25 + 0.25j) * PI_SQUARED * g1 ** 2 + 2 * (1 - 1j) * PI_SQUARED * g2 ** 2))
