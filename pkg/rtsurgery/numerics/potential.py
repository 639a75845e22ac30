"""
The potential functions V and V_N of the lattice sum, their derivatives, the
regions on which the saddle point analysis is carried out, and the critical
point data zeta, omega and H.

Coordinates are in full turns: z_i = e^{2 pi i theta_i}.
"""
import cmath
import logging
import math
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import ConvergenceError, CutViolationError, DegenerateHessianError, DomainError
from ..models import (
    AsymptoticConstants, CriticalPoint, FourierIndex, RootData, SurgeryParams, Theta3,
    get_admissibility_table, get_reference_constants
)
from .special_fn import li2, lobachevsky, quantum_dilog

logger = logging.getLogger(__name__)

PI_I = math.pi * 1j
TWO_PI_I = 2 * math.pi * 1j

# constant term of the 1/(N + 1/2) correction in V_N, fixed by the exact product formula
FINITE_SHIFT = 11 / 4

# boundary parameters of the admissible region, used only numerically
C10 = get_reference_constants()['c10']
C30 = get_reference_constants()['c30']

NEWTON_MAX_ITER = 100
NEWTON_TOL = 1e-12
MAX_HALVINGS = 40
# |1 - w| below this puts a log or pole of the derivatives at w = 1
SINGULAR_TOL = 1e-14

ThetaLike = Union[Theta3, Sequence[complex]]


def _theta(theta: ThetaLike) -> Theta3:
    if isinstance(theta, Theta3):
        return theta
    return Theta3.of(theta)


def _z(theta: Theta3) -> Tuple[complex, complex, complex]:
    return tuple(cmath.exp(TWO_PI_I * t) for t in theta)


def _polynomial(params: SurgeryParams, theta: Theta3) -> complex:
    t1, t2, t3 = theta
    p, q = params.p, params.q
    return PI_I * (1.5 * q + (q / 2 - 1) * t1 ** 2 - t1 + (2 * p + 1) * t3 ** 2
                   - (2 * p + 3) * t3 - 2 * t2 - 1 / 12)


def potential(params: SurgeryParams, theta: ThetaLike) -> complex:
    """
    V(theta) = pi i (3q/2 + (q/2 - 1) t1^2 - t1 + (2p+1) t3^2 - (2p+3) t3 - 2 t2)
               + (1 / 2 pi i) (pi^2/6 + Li2(z2 z3) + Li2(z2/z3) - Li2(z2 z1) - Li2(z2) - Li2(z2/z1))

    The pi^2/6 is carried as the -1/12 inside the polynomial part.

    Raises:
        CutViolationError: a dilogarithm argument is real and > 1
    """
    theta = _theta(theta)
    t1, t2, t3 = theta
    dilogs = (li2(cmath.exp(TWO_PI_I * (t2 + t3))) + li2(cmath.exp(TWO_PI_I * (t2 - t3)))
              - li2(cmath.exp(TWO_PI_I * (t2 + t1))) - li2(cmath.exp(TWO_PI_I * t2))
              - li2(cmath.exp(TWO_PI_I * (t2 - t1))))
    value = _polynomial(params, theta) + dilogs / TWO_PI_I
    if not cmath.isfinite(value):
        raise DomainError(f"potential is not finite at {tuple(theta)}")
    return value


def real_potential(theta: Sequence[float]) -> float:
    """v = Re V on real arguments, as a combination of five Lobachevsky values"""
    t1, t2, t3 = (float(np.real(t)) for t in theta)
    return (lobachevsky(t2 + t3) + lobachevsky(t2 - t3) - lobachevsky(t2 + t1)
            - lobachevsky(t2) - lobachevsky(t2 - t1))


def _finite_arguments(theta: Theta3, nu: float) -> Tuple[complex, ...]:
    t1, t2, t3 = theta
    half = 0.5 / nu
    return (t2 + t3 + half - 1, t2 - t3 + half, t2 + t1, t2, t2 - t1)


def finite_branch_valid(theta: ThetaLike, n_level: int) -> bool:
    """True when every quantum dilogarithm argument of V_N lies in 0 < Re < 1"""
    args = _finite_arguments(_theta(theta), n_level + 0.5)
    return all(0.0 < arg.real < 1.0 for arg in args)


def potential_finite(params: SurgeryParams, n_level: int, theta: ThetaLike) -> complex:
    """
    V_N(theta), whose exponential reproduces the lattice summand:
    sin(pi t1) sin(2 pi t3) e^{(N + 1/2) V_N} = g_N(a, k, l) at the lattice point.

    Args:
        params: (p, q)
        n_level: N
        theta: angles

    Raises:
        DomainError: a quantum dilogarithm argument leaves the strip 0 < Re < 1
    """
    theta = _theta(theta)
    nu = n_level + 0.5
    args = _finite_arguments(theta, nu)
    if not all(0.0 < arg.real < 1.0 for arg in args):
        raise DomainError(f"V_N at N = {n_level} is not defined at {tuple(theta)}: "
                          f"quantum dilogarithm arguments {args} leave the strip")
    p, q = params.p, params.q
    t2 = theta.theta2
    phis = [quantum_dilog(n_level, arg) for arg in args]
    value = (_polynomial(params, theta)
             + PI_I * (2 * t2 + p - 2 * q + FINITE_SHIFT) / nu
             - PI_I * (3 * (p + q) + 2) / (6 * nu ** 2)
             + (phis[0] + phis[1] - phis[2] - phis[3] - phis[4]) / nu)
    return value


def lattice_point(root: RootData, a: int, k: int, l: int) -> Theta3:
    """((a + 1/2), (k + 1/2), (l + 1/2)) / (N + 1/2)"""
    nu = root.nu
    return Theta3.of(((a + 0.5) / nu, (k + 0.5) / nu, (l + 0.5) / nu))


def potential_expansion_term(params: SurgeryParams, theta: ThetaLike) -> complex:
    """Coefficient of 1/(N + 1/2) in V_N - V."""
    theta = _theta(theta)
    z1, z2, z3 = _z(theta)
    return (PI_I * (2 * theta.theta2 + params.p - 2 * params.q + FINITE_SHIFT)
            - 0.5 * cmath.log(1 - z2 * z3) - 0.5 * cmath.log(1 - z2 / z3))


def potential_shifted(params: SurgeryParams, theta: ThetaLike, idx: FourierIndex,
                      n_level: Optional[int] = None) -> complex:
    """V(theta; m) = V(theta) - 2 pi i (m1 t1 + m2 t2 + m3 t3); V_N when n_level is given."""
    theta = _theta(theta)
    base = potential(params, theta) if n_level is None else potential_finite(params, n_level, theta)
    m1, m2, m3 = idx
    return base - TWO_PI_I * (m1 * theta.theta1 + m2 * theta.theta2 + m3 * theta.theta3)


def _one_minus(w: complex, theta: Theta3) -> complex:
    gap = 1 - w
    if abs(gap) < SINGULAR_TOL:
        raise CutViolationError(f"derivatives of V are singular at {tuple(theta)}: "
                                f"an argument of Li2 equals 1")
    return gap


def gradient(params: SurgeryParams, theta: ThetaLike) -> np.ndarray:
    """
    The three partial derivatives of V.

    Raises:
        CutViolationError: theta2 = +-theta1, +-theta3 or 0 modulo 1
    """
    theta = _theta(theta)
    t1, t2, t3 = theta
    z1, z2, z3 = _z(theta)
    p, q = params.p, params.q

    def log1m(w: complex) -> complex:
        return cmath.log(_one_minus(w, theta))

    d1 = PI_I * ((q - 2) * t1 - 1) + log1m(z2 * z1) - log1m(z2 / z1)
    d2 = (-TWO_PI_I - log1m(z2 * z3) - log1m(z2 / z3)
          + log1m(z2 * z1) + log1m(z2) + log1m(z2 / z1))
    d3 = PI_I * (2 * (2 * p + 1) * t3 - (2 * p + 3)) - log1m(z2 * z3) + log1m(z2 / z3)
    return np.array([d1, d2, d3], dtype=complex)


def _u(w: complex, theta: Theta3) -> complex:
    return TWO_PI_I * w / _one_minus(w, theta)


def hessian(params: SurgeryParams, theta: ThetaLike) -> np.ndarray:
    """
    Symmetric 3x3 matrix of second partials; the (1, 3) entry vanishes identically.

    Raises:
        CutViolationError: at the poles shared with the gradient
    """
    theta = _theta(theta)
    z1, z2, z3 = _z(theta)
    p, q = params.p, params.q
    u_p1, u_m1, u_2 = _u(z2 * z1, theta), _u(z2 / z1, theta), _u(z2, theta)
    u_p3, u_m3 = _u(z2 * z3, theta), _u(z2 / z3, theta)

    h11 = PI_I * (q - 2) - u_p1 - u_m1
    h12 = -u_p1 + u_m1
    h22 = u_p3 + u_m3 - u_p1 - u_2 - u_m1
    h23 = u_p3 - u_m3
    h33 = (4 * p + 2) * PI_I + u_p3 + u_m3
    return np.array([[h11, h12, 0j],
                     [h12, h22, h23],
                     [0j, h23, h33]], dtype=complex)


def h_function(params: SurgeryParams, z: Sequence[complex]) -> complex:
    """
    H(p, q; z1, z2, z3), the determinant of Hess(V) / (2 pi i) written in the
    shape variables.

    With A = z2/(z1 - z2), B = z1 z2/(1 - z1 z2), C = z2/(1 - z2),
    D = z2 z3/(1 - z2 z3), E = z2/(z3 - z2), P = 2p + 1 and Q = q/2 - 1.
    """
    z1, z2, z3 = (complex(v) for v in z)
    p, q = params.p, params.q
    A = z2 / (z1 - z2)
    B = z1 * z2 / (1 - z1 * z2)
    C = z2 / (1 - z2)
    D = z2 * z3 / (1 - z2 * z3)
    E = z2 / (z3 - z2)
    P = 2 * p + 1
    Q = q / 2 - 1
    return (4 * A * B * (D + E) - 4 * (A + B) * D * E + (A + B) * C * (D + E)
            + (8 * p + 4) * A * B + P * (A + B) * C - (2 * p + q / 2) * (A + B) * (D + E)
            - Q * C * (D + E) + 4 * Q * D * E - P * Q * (A + B + C - D - E))


def principal_sqrt_det(matrix: np.ndarray) -> complex:
    """Product of the principal square roots of the eigenvalues"""
    eigenvalues = np.linalg.eigvals(np.asarray(matrix, dtype=complex))
    return complex(np.prod(np.sqrt(eigenvalues)))


def _growth_coefficients(z: Tuple[complex, complex, complex]) -> Tuple[float, ...]:
    z1, z2, z3 = z
    a = -(1 / (1 - z2 / z1)).imag
    b = -(1 / (1 - z2)).imag
    c = -(1 / (1 - z1 * z2)).imag
    d = (1 / (1 - z2 * z3)).imag
    e = (1 / (1 - z2 / z3)).imag
    return a, b, c, d, e


def growth_hessian(theta_real: Sequence[float], X: Sequence[float]) -> np.ndarray:
    """
    Hessian of f(X) = Re V(theta_real + i X) in X, i.e. Re(-Hess V).

    Independent of (p, q): the polynomial part of V has purely imaginary
    second derivatives.
    """
    theta = Theta3.of([complex(float(np.real(t)), float(x)) for t, x in zip(theta_real, X)])
    a, b, c, d, e = _growth_coefficients(_z(theta))
    return 2 * math.pi * np.array([[a + c, c - a, 0.0],
                                   [c - a, a + b + c + d + e, d - e],
                                   [0.0, d - e, d + e]])


def growth_minors(theta_real: Sequence[float], X: Sequence[float]) -> Tuple[float, float, float]:
    """Leading principal minors of growth_hessian, in closed form"""
    theta = Theta3.of([complex(float(np.real(t)), float(x)) for t, x in zip(theta_real, X)])
    a, b, c, d, e = _growth_coefficients(_z(theta))
    pi = math.pi
    first = 2 * pi * (a + c)
    second = 4 * pi ** 2 * (a * b + 4 * a * c + a * d + a * e + c * b + c * d + c * e)
    third = 8 * pi ** 3 * (a * b * d + a * b * e + 4 * a * c * d + 4 * a * c * e + 4 * a * d * e
                           + c * b * d + c * b * e + 4 * c * d * e)
    return first, second, third


def in_S(params: SurgeryParams) -> bool:
    """Whether (p, q) lies in the admissible set S"""
    for row in get_admissibility_table():
        p_max = row['p_max']
        if row['p_min'] <= params.p and (p_max is None or params.p <= p_max):
            return params.q >= row['q_min']
    return False


def _in_D_prime(t1: float, t2: float, t3: float) -> bool:
    return -1 <= t1 <= 1 and 0 <= t3 <= t2 <= 1 - t1


def in_D0(theta_real: Sequence[float]) -> bool:
    t1, t2, t3 = (float(np.real(t)) for t in theta_real)
    bounds = get_reference_constants()['domain_D0']
    checks = (
        (t2 - t3, bounds['theta2_minus_theta3']),
        (t2 + t3, bounds['theta2_plus_theta3']),
        (t3, bounds['theta3']),
        (t2, bounds['theta2']),
    )
    return _in_D_prime(t1, t2, t3) and all(lo <= value <= hi for value, (lo, hi) in checks)


def in_DH(theta_real: Sequence[float]) -> bool:
    """D0 cut down to where every dilogarithm term of f is convex"""
    t1, t2, t3 = (float(np.real(t)) for t in theta_real)
    return (in_D0((t1, t2, t3))
            and 0.5 < t2 + t1 < 1 and 0.5 < t2 - t1 < 1 and 0.5 < t2 < 1
            and 1 < t2 + t3 < 1.5 and 0 < t2 - t3 < 0.5)


def check_26(theta_real: Sequence[float], idx: FourierIndex, params: SurgeryParams) -> bool:
    """
    The inequalities under which F(X; m) grows to +infinity in every direction.

    (18) and (25) are kept in their published form, where the m2 terms of (18)
    cancel and m1 appears twice in (25).
    """
    t1, t2, t3 = (float(np.real(t)) for t in theta_real)
    m1, m2, m3 = idx
    p, q = params.p, params.q
    h = q / 2
    conditions = (
        m2 + 1 > 0,
        (2 * p + 1) * t3 < p + m2 + m3 + 2.5,
        2 * p * t3 + t2 < p + m3 + 2,
        (2 * p - 1) * t3 - t2 < p - m2 + m3,
        t2 > m2 + 0.5,
        (2 * p - 1) * t3 + t2 > p + m2 + m3 + 1,
        2 * p * t3 - t2 > p + m3,
        (2 * p + 1) * t3 > p - m2 + m3 + 0.5,
        (2 * p + 1) * t3 + (h - 1) * t1 < p + m2 + m3 + m1 + 3,
        (h - 1) * t1 < m2 + m1 + 1.5,
        t2 - h * t1 > -m1,
        (2 * p + 1) * t3 - (h - 1) * t1 < p + m2 + m3 - m1 + 2,
        (h - 1) * t1 > -m2 + m1 - 0.5,
        t2 + h * t1 > m1 + 1,
        2 * p * t3 + h * t1 < p + m3 + m1 + 2,
        2 * p * t3 - h * t1 < p + m3 - m1 + 1,
        (2 * p - 1) * t3 - t2 + (h + 1) * t1 < p - m2 + m3 + m1 + 0.5,
        (2 * p - 1) * t3 - t2 - (h + 1) * t1 < p - m2 + m2 - m1 - 0.5,
        t2 - (h + 1) * t1 > m2 - m1,
        t2 + (h + 1) * t1 > m2 + m1 + 1,
        (2 * p - 1) * t3 + t2 - (h + 1) * t1 > p + m2 + m3 - m1 + 0.5,
        (2 * p - 1) * t3 + t2 + (h + 1) * t1 > p + m2 + m3 + m1 + 1.5,
        2 * p * t3 - h * t1 > p + m3 - m1,
        2 * p * t3 + h * t1 > p + m3 + m1 + 1,
        (2 * p + 1) * t3 - (h - 1) * t1 > p - m1 + m3 - m1,
        (2 * p + 1) * t3 + (h - 1) * t1 > p - m2 + m3 + m1 + 1,
    )
    return all(conditions)


def growth_F(X: Sequence[float], theta_real: Sequence[float], idx: FourierIndex,
             params: SurgeryParams) -> float:
    """
    Piecewise-linear asymptotic slope of -Re V(theta + iX; m) / (2 pi) as |X| grows.
    """
    x1, x2, x3 = (float(v) for v in X)
    t1, t2, t3 = (float(np.real(t)) for t in theta_real)
    m1, m2, m3 = idx
    p, q = params.p, params.q

    def kink(slope: float, s: float) -> float:
        return slope * s if s < 0 else 0.0

    return (kink(t2 + t3 - 1.5, x2 + x3)
            + kink(t2 - t3 - 0.5, x2 - x3)
            - kink(t2 - 0.5, x2)
            - kink(t2 + t1 - 0.5, x2 + x1)
            - kink(t2 - t1 - 0.5, x2 - x1)
            + (-(q / 2 - 1) * t1 + m1 + 0.5) * x1
            + (m2 + 1) * x2
            + (p + 1.5 + m3 - (2 * p + 1) * t3) * x3)


def descent_ray(coeffs: Sequence[float]) -> Optional[Tuple[float, float, float]]:
    """
    For F = A X1 + B X2 + C X3 on the chamber X1 >= X2 >= X3 >= 0, a direction
    along which F tends to -infinity, or None when F grows in every direction.
    """
    A, B, C = coeffs
    if A < 0:
        return (1.0, 0.0, 0.0)
    if A + B < 0:
        return (1.0, 1.0, 0.0)
    if A + B + C < 0:
        return (1.0, 1.0, 1.0)
    return None


def edge_values() -> Dict[str, float]:
    """2 pi v on the four boundary pieces that bound the admissible region"""
    two_pi = 2 * math.pi
    return {
        "theta1_edge": two_pi * real_potential((C10, C10 + 0.5, 0.5)),
        "theta2_edge": two_pi * real_potential((C10, 1 - C10, 0.5)),
        "diagonal_edge": two_pi * real_potential((0.0, C30, C30)),
        "antidiagonal_edge": two_pi * real_potential((0.0, 1.5 - C30, C30)),
    }


def critical_seed(params: SurgeryParams) -> Theta3:
    """Third-order expansion of the critical point in g1 = 1/p, g2 = 1/q."""
    g1, g2 = params.gamma1, params.gamma2
    pi = math.pi
    t1 = (g2 - 2 * (1 + 1j) * g2 ** 2 + 8j * g2 ** 3
          - 0.25j * pi ** 2 * g1 ** 2 * g2 ** 2 - (1 - 1j) * pi ** 2 * g1 ** 2 * g2 ** 3)
    t2 = (cmath.log(1 - 2j) / TWO_PI_I + 1 + (1 + 2j) * pi * g1 ** 2 / 40
          + (-2 + 1j) * pi * g2 ** 2 / 5 + (-3 + 4j) * pi ** 3 * g1 ** 2 * g2 ** 2 / 100)
    t3 = (0.5 + g1 / 2 + (1 - 1j) * g1 ** 2 / 8 - 1j * g1 ** 3 / 16
          - 1j * pi ** 2 * g1 ** 2 * g2 ** 2 / 8)
    return Theta3(t1, t2, t3)


def _newton(params: SurgeryParams, seed: Theta3, tol: float,
            max_iter: int) -> Tuple[np.ndarray, float, int]:
    x = seed.as_array()
    g = gradient(params, x)
    norm = float(np.linalg.norm(g))
    for iteration in range(1, max_iter + 1):
        if norm < tol:
            return x, norm, iteration - 1
        step = np.linalg.solve(hessian(params, x), g)
        scale = 1.0
        for _ in range(MAX_HALVINGS):
            trial = x - scale * step
            try:
                g_trial = gradient(params, trial)
            except (ValueError, ZeroDivisionError):
                scale /= 2
                continue
            norm_trial = float(np.linalg.norm(g_trial))
            if norm_trial < norm:
                break
            scale /= 2
        else:
            logger.debug("newton stalled at |grad| = %.3e after %d iterations", norm, iteration)
            return x, norm, iteration
        x, g, norm = trial, g_trial, norm_trial
        logger.debug("newton iteration %d: |grad| = %.3e, damping %g", iteration, norm, scale)
    return x, norm, max_iter


def solve_critical(params: SurgeryParams, seed: Optional[ThetaLike] = None,
                   tol: float = NEWTON_TOL, max_iter: int = NEWTON_MAX_ITER) -> CriticalPoint:
    """
    The critical point of V, found by damped Newton from the series seed.

    Args:
        params: (p, q) with p, q >= 2
        seed: starting point; critical_seed(params) when omitted
        tol: required gradient norm
        max_iter: iteration cap

    Returns:
        CriticalPoint with theta, z, grad_norm and zeta = V(theta)

    Raises:
        DomainError: p or q below 2, or the limit lies outside D0
        ConvergenceError: the gradient norm did not reach tol
    """
    if params.p < 2 or params.q < 2:
        raise DomainError(f"the critical point is only sought for p, q >= 2, got {params.to_dict()}")
    start = critical_seed(params) if seed is None else _theta(seed)
    x, norm, iterations = _newton(params, start, tol, max_iter)
    if norm >= tol:
        raise ConvergenceError(f"Newton did not converge for (p, q) = ({params.p}, {params.q}): "
                               f"|grad| = {norm:.3e} after {iterations} iterations")
    theta = Theta3.of(x)
    if not in_D0([t.real for t in theta]):
        raise DomainError(f"critical point {tuple(theta)} has real part outside D0")
    logger.debug("critical point of (%d, %d) after %d iterations: %s",
                 params.p, params.q, iterations, theta)
    return CriticalPoint(theta=theta, z=_z(theta), grad_norm=norm,
                         zeta=potential(params, theta), iterations=iterations)


def omega_display(params: SurgeryParams, z: Sequence[complex], H: complex) -> complex:
    """
    omega = z2 (z3 - 1/z3) (sqrt z1 - 1/sqrt z1) /
            (sqrt(1 - z2 z3) sqrt(1 - z2/z3) sqrt H), principal branches throughout
    """
    z1, z2, z3 = (complex(v) for v in z)
    root_z1 = cmath.sqrt(z1)
    numerator = z2 * (z3 - 1 / z3) * (root_z1 - 1 / root_z1)
    return numerator / (cmath.sqrt(1 - z2 * z3) * cmath.sqrt(1 - z2 / z3) * cmath.sqrt(H))


def asymptotic_constants(params: SurgeryParams,
                         critical: Optional[CriticalPoint] = None) -> AsymptoticConstants:
    """
    zeta, omega and H at the critical point.

    The global sign of omega is fixed against the saddle point amplitude
    4 pi^{3/2} alpha0 / ((-1)^{p+1} i sqrt det(-Hess/2)), where
    alpha0 = sin(pi t1) sin(2 pi t3) e^{V1} and V1 is the 1/(N + 1/2) term.

    Raises:
        DegenerateHessianError: H vanishes at the critical point
    """
    if critical is None:
        critical = solve_critical(params)
    theta, z = critical.theta, critical.z
    H = h_function(params, z)
    if abs(H) < 1e-14:
        raise DegenerateHessianError(f"H vanishes at the critical point of ({params.p}, {params.q})")

    sqrt_det = principal_sqrt_det(-0.5 * hessian(params, theta))
    alpha0 = (cmath.sin(math.pi * theta.theta1) * cmath.sin(2 * math.pi * theta.theta3)
              * cmath.exp(potential_expansion_term(params, theta)))
    sign = (-1) ** (params.p + 1)
    omega_saddle = 4 * math.pi ** 1.5 * alpha0 / (sign * 1j * sqrt_det)

    omega = omega_display(params, z, H)
    if abs(-omega - omega_saddle) < abs(omega - omega_saddle):
        omega = -omega
    mismatch = abs(omega - omega_saddle) / abs(omega_saddle)
    if mismatch > 1e-6:
        logger.warning("omega(%d, %d) differs from the saddle amplitude by relative %.2e",
                       params.p, params.q, mismatch)
    return AsymptoticConstants(params=params, critical=critical, zeta=critical.zeta, omega=omega,
                               H_det=H, alpha0=alpha0, sqrt_det=sqrt_det)
