"""
tests/test_potential.py
The potential V and its finite-N version, derivatives, regions, the critical
point and the constants zeta, omega and H.

ANCHORS (2 pi v on real points, 2 pi Re V on complex points):
- (0, 5/6, 3/4)                              -> 3.552296
- (1/4, 0.688635, 1/2)                       -> 3.252728
- (0, 3/2 - c30, c30)                        -> 3.56337
- (c10, 0.808058 - 0.111315i, c30)           -> 3.25806
- (0, 0.8270666460 - 0.1216893136i, c30)     -> 3.563367
"""
import cmath
import itertools
import math

import numpy as np
import pytest

from rtsurgery.exceptions import ConvergenceError, CutViolationError, DomainError
from rtsurgery.models import FourierIndex, RootData, SurgeryParams, get_reference_constants
from rtsurgery.numerics.geometry import octahedron_volume, volume_series
from rtsurgery.numerics.potential import (
    C10,
    C30,
    asymptotic_constants,
    check_26,
    critical_seed,
    descent_ray,
    edge_values,
    finite_branch_valid,
    gradient,
    growth_F,
    growth_hessian,
    growth_minors,
    h_function,
    hessian,
    in_D0,
    in_DH,
    in_S,
    lattice_point,
    potential,
    potential_expansion_term,
    potential_finite,
    potential_shifted,
    real_potential,
    solve_critical,
)
from rtsurgery.numerics.quantum_inv import lattice_summand

PI = math.pi
P627 = SurgeryParams(6, 27)
ZERO = FourierIndex(0, 0, 0)


def random_interior_points(n, seed):
    """Complex points away from every dilogarithm branch cut"""
    rng = np.random.default_rng(seed)
    points = []
    for _ in range(n):
        re = (rng.uniform(-0.1, 0.1), rng.uniform(0.7, 0.85), rng.uniform(0.5, 0.62))
        im = rng.uniform(-0.1, 0.1, 3)
        points.append(tuple(complex(a, b) for a, b in zip(re, im)))
    return points


def random_DH_points(n, seed):
    rng = np.random.default_rng(seed)
    points = []
    while len(points) < n:
        theta = (rng.uniform(-0.25, 0.25), rng.uniform(0.5, 0.909), rng.uniform(0.2, 0.8))
        if in_DH(theta):
            points.append(theta)
    return points


class TestPotential:
    """V on real and complex points."""

    def test_real_slice(self):
        """Re V at real theta is the Lobachevsky combination v."""
        theta = (0.1, 0.8, 0.6)
        assert abs(potential(P627, theta).real - real_potential(theta)) < 1e-12

    def test_real_anchors(self):
        """2 pi v at the published comparison points."""
        for anchor in get_reference_constants()['anchors']['real_potential']:
            assert abs(2 * PI * real_potential(anchor['theta']) - anchor['two_pi_v']) < 1e-4
        assert abs(2 * PI * real_potential((0, 5 / 6, 0.75)) - 3.552296) < 1e-5
        assert abs(2 * PI * real_potential((0.25, 0.688635, 0.5)) - 3.252728) < 1e-5

    def test_complex_anchors(self):
        """2 pi Re V at two complex points of the boundary analysis."""
        first = (C10, 0.808058 - 0.111315j, C30)
        second = (0.0, 0.8270666460 - 0.1216893136j, C30)
        assert abs(2 * PI * potential(P627, first).real - 3.25806) < 1e-4
        assert abs(2 * PI * potential(P627, second).real - 3.563367) < 1e-5

    def test_real_part_independent_of_pq(self):
        """With theta1, theta3 real, Re V does not see (p, q)."""
        theta = (0.05, 0.8 - 0.1j, 0.6)
        assert abs(potential(P627, theta).real - potential(SurgeryParams(11, 14), theta).real) < 1e-12

    def test_edge_values(self):
        """2 pi v on the four boundary pieces."""
        expected = get_reference_constants()['anchors']['edge_values']
        for name, value in edge_values().items():
            assert abs(value - expected[name]) < 1e-4


class TestPotentialFinite:
    """V_N and its relation to the lattice summand."""

    def test_lattice_reproduction(self):
        """sin(pi t1) sin(2 pi t3) e^{(N+1/2) V_N} is the lattice summand at r = 13."""
        root = RootData(13)
        N = root.N
        checked = 0
        for a in range(-N, N):
            m = N - a
            for k in range(m):
                if m + k > 2 * N:
                    break
                for l in range(k + 1):
                    theta = lattice_point(root, a, k, l)
                    if not finite_branch_valid(theta, N):
                        continue
                    t1, _, t3 = (t.real for t in theta)
                    value = (math.sin(PI * t1) * math.sin(2 * PI * t3)
                             * cmath.exp(root.nu * potential_finite(P627, N, theta)))
                    summand = lattice_summand(P627, root, a, k, l)
                    assert abs(value - summand) < 1e-9 * abs(summand)
                    checked += 1
        assert checked > 0

    def test_outside_strip(self):
        """V_N is undefined where a quantum dilogarithm argument leaves the strip."""
        with pytest.raises(DomainError):
            potential_finite(P627, 10, (0.0, 0.2, 0.6))

    def test_expansion(self):
        """V_N - V - V1 / (N + 1/2) decays quadratically."""
        theta = (0.05, 0.75 + 0.02j, 0.6)
        errors = []
        for N in (20, 40, 80):
            nu = N + 0.5
            remainder = (potential_finite(P627, N, theta) - potential(P627, theta)
                         - potential_expansion_term(P627, theta) / nu)
            errors.append(abs(remainder))
        assert errors[1] / errors[0] < 0.35
        assert errors[2] / errors[1] < 0.35

    @pytest.mark.slow
    def test_uniform_convergence(self):
        """sup |V_N - V| over a grid roughly halves when N doubles."""
        grid = itertools.product(np.linspace(-0.1, 0.1, 5), np.linspace(0.7, 0.85, 5),
                                 np.linspace(0.5, 0.62, 5))
        points = [p for p in grid if finite_branch_valid(p, 20) and finite_branch_valid(p, 40)]

        def sup(N):
            return max(abs(potential_finite(P627, N, p) - potential(P627, p)) for p in points)

        assert sup(40) / sup(20) < 0.55


class TestFourierShift:
    """V(theta; m) = V(theta) - 2 pi i m.theta."""

    def test_zero_index(self):
        """idx = (0, 0, 0) is V itself."""
        theta = (0.05, 0.8 - 0.05j, 0.58)
        assert potential_shifted(P627, theta, ZERO) == potential(P627, theta)

    def test_theta3_symmetry(self):
        """V(t1, t2, 1 - t3; m) = V(t1, t2, t3; m1, m2, -m3 - 2) - 2 pi i (m3 + 1)."""
        rng = np.random.default_rng(3)
        for theta in random_interior_points(20, 11):
            m1, m2, m3 = (int(v) for v in rng.integers(-3, 4, 3))
            t1, t2, t3 = theta
            lhs = potential_shifted(P627, (t1, t2, 1 - t3), FourierIndex(m1, m2, m3))
            rhs = (potential_shifted(P627, theta, FourierIndex(m1, m2, -m3 - 2))
                   - 2j * PI * (m3 + 1))
            assert abs(lhs - rhs) < 1e-9

    def test_theta3_symmetry_finite(self):
        """The same symmetry for V_N."""
        theta = (0.05, 0.78 + 0.03j, 0.56)
        idx = FourierIndex(1, 0, 2)
        t1, t2, t3 = theta
        lhs = potential_shifted(P627, (t1, t2, 1 - t3), idx, n_level=30)
        rhs = potential_shifted(P627, theta, FourierIndex(1, 0, -4), n_level=30) - 2j * PI * 3
        assert abs(lhs - rhs) < 1e-9

    def test_theta1_reflection(self):
        """V(-t1, t2, t3; m) = V(t1, t2, t3; -m1 - 1, m2, m3)."""
        for theta in random_interior_points(20, 12):
            t1, t2, t3 = theta
            idx = FourierIndex(2, -1, 1)
            lhs = potential_shifted(P627, (-t1, t2, t3), idx)
            rhs = potential_shifted(P627, theta, FourierIndex(-3, -1, 1))
            assert abs(lhs - rhs) < 1e-9


class TestDerivatives:
    """Gradient and Hessian against finite differences."""

    def test_gradient(self):
        """Central differences with step 1e-6."""
        h = 1e-6
        for theta in random_interior_points(20, 21):
            grad = gradient(P627, theta)
            for j in range(3):
                plus, minus = list(theta), list(theta)
                plus[j] += h
                minus[j] -= h
                fd = (potential(P627, plus) - potential(P627, minus)) / (2 * h)
                assert abs(fd - grad[j]) < 1e-6 * max(1.0, abs(grad[j]))

    def test_real_slice_theta1_derivative(self):
        """dv/dtheta1 = log(|sin pi(t2 + t1)| / |sin pi(t2 - t1)|) < 0 for 0 < t1 < 1/2 < t2 < 1."""
        h = 1e-6
        for t1 in (0.05, 0.12, 0.3):
            for t2 in (0.6, 0.76):
                expected = math.log(abs(math.sin(PI * (t2 + t1))) / abs(math.sin(PI * (t2 - t1))))
                fd = (real_potential((t1 + h, t2, 0.55)) - real_potential((t1 - h, t2, 0.55))) / (2 * h)
                assert expected < 0
                assert abs(gradient(P627, (t1, t2, 0.55))[0].real - expected) < 1e-9
                assert abs(fd - expected) < 1e-6

    @pytest.mark.parametrize("theta", [(0.05, 0.6, 0.6), (0.2, 0.2, 0.6), (0.1, 0.0, 0.6),
                                       (0.3, 0.7, 0.6)])
    def test_singular_points(self, theta):
        """theta2 = theta3, theta2 = theta1, theta2 = 0 and theta2 = -theta1 mod 1 are cut violations."""
        with pytest.raises(CutViolationError):
            gradient(P627, theta)
        with pytest.raises(CutViolationError):
            hessian(P627, theta)

    def test_hessian(self):
        """Symmetric, zero (1, 3) entry, and central differences of the gradient."""
        h = 1e-6
        for theta in random_interior_points(20, 22):
            H = hessian(P627, theta)
            assert abs(H[0, 2]) == 0
            assert np.allclose(H, H.T)
            for j in range(3):
                plus, minus = list(theta), list(theta)
                plus[j] += h
                minus[j] -= h
                fd = (gradient(P627, plus) - gradient(P627, minus)) / (2 * h)
                assert np.max(np.abs(fd - H[:, j])) < 1e-5 * max(1.0, np.max(np.abs(H[:, j])))

    def test_growth_hessian_positive_on_DH(self):
        """Hess f is positive definite at 50 random points of D_H."""
        for theta in random_DH_points(50, 31):
            matrix = growth_hessian(theta, (0.0, 0.0, 0.0))
            assert np.all(np.linalg.eigvalsh(matrix) > 0)
            assert all(m > 0 for m in growth_minors(theta, (0.0, 0.0, 0.0)))

    def test_growth_minors(self):
        """Closed-form leading minors match the matrix."""
        theta, X = (0.05, 0.75, 0.6), (0.01, -0.02, 0.03)
        matrix = growth_hessian(theta, X)
        first, second, third = growth_minors(theta, X)
        assert abs(first - matrix[0, 0]) < 1e-9
        assert abs(second - np.linalg.det(matrix[:2, :2])) < 1e-8 * max(1.0, abs(second))
        assert abs(third - np.linalg.det(matrix)) < 1e-8 * max(1.0, abs(third))

    def test_growth_hessian_is_real_part(self):
        """growth_hessian = Re(-Hess V) at complex points."""
        theta_real, X = (0.05, 0.78, 0.58), (0.02, -0.05, 0.01)
        point = [complex(t, x) for t, x in zip(theta_real, X)]
        assert np.allclose(growth_hessian(theta_real, X), (-hessian(P627, point)).real, atol=1e-9)


class TestRegions:
    """S, D0, D_H and the growth conditions."""

    def test_in_S(self):
        """Rows of the admissibility table."""
        assert in_S(SurgeryParams(6, 27))
        assert not in_S(SurgeryParams(6, 26))
        assert in_S(SurgeryParams(33, 12))
        assert not in_S(SurgeryParams(5, 100))
        assert in_S(SurgeryParams(20, 13))

    def test_domains(self):
        """Membership of simple points, closed bounds included."""
        assert in_D0((0, 0.83, 0.6))
        assert in_DH((0, 0.83, 0.6))
        assert not in_D0((0, 0.4, 0.3))
        assert not in_DH((0, 0.4, 0.3))
        assert in_D0((0, 0.909, 0.6))

    def test_check_26_at_critical_point(self, critical_6_27):
        """The growth conditions hold at the real part of the (6, 27) critical point."""
        theta_real = [t.real for t in critical_6_27.theta]
        assert check_26(theta_real, ZERO, P627)

    def test_check_26_failures(self, critical_6_27):
        """m2 = 5 and m2 = -1 break the growth conditions."""
        theta_real = [t.real for t in critical_6_27.theta]
        assert not check_26(theta_real, FourierIndex(0, 5, 0), P627)
        assert not check_26(theta_real, FourierIndex(0, -1, 0), P627)
        assert not check_26((0, 0.83, 0.6), FourierIndex(0, 5, 0), P627)

    def test_growth_F_origin(self, critical_6_27):
        """F(0) = 0."""
        theta_real = [t.real for t in critical_6_27.theta]
        assert growth_F((0, 0, 0), theta_real, ZERO, P627) == 0

    def test_growth_F_positive(self, critical_6_27):
        """F > 0 along 26 random rays of length 1000 when the conditions hold."""
        theta_real = [t.real for t in critical_6_27.theta]
        rng = np.random.default_rng(26)
        for _ in range(26):
            direction = rng.normal(size=3)
            X = 1000 * direction / np.linalg.norm(direction)
            assert growth_F(X, theta_real, ZERO, P627) > 0

    def test_descent_ray(self):
        """A negative coefficient gives a descending ray."""
        ray = descent_ray((-1.0, 0.0, 0.0))
        assert ray == (1.0, 0.0, 0.0)
        assert sum(c * x for c, x in zip((-1.0, 0.0, 0.0), ray)) * 1e6 < -1e5
        assert descent_ray((1.0, 1.0, 1.0)) is None
        assert descent_ray((1.0, -2.0, 0.5)) == (1.0, 1.0, 0.0)


class TestCriticalPoint:
    """Damped Newton from the series seed."""

    def test_6_27(self, critical_6_27):
        """Converged, with Re theta3 in (1/2, 3/4)."""
        assert critical_6_27.grad_norm < 1e-12
        assert 0.5 < critical_6_27.theta.theta3.real < 0.75
        assert in_D0([t.real for t in critical_6_27.theta])

    def test_seed_quality(self):
        """At (100, 100) the seed is within 1e-2 of the solution."""
        params = SurgeryParams(100, 100)
        seed = critical_seed(params)
        solution = solve_critical(params).theta
        for s, t in zip(seed, solution):
            assert abs(s - t) < 1e-2

    def test_uniqueness(self, critical_6_27):
        """Perturbed seeds converge to the same point."""
        rng = np.random.default_rng(5)
        base = critical_seed(P627)
        for _ in range(20):
            seed = [t + complex(*rng.uniform(-0.015, 0.015, 2)) for t in base]
            theta = solve_critical(P627, seed=seed).theta
            assert max(abs(a - b) for a, b in zip(theta, critical_6_27.theta)) < 1e-9

    def test_domain(self):
        """p and q must be at least 2."""
        with pytest.raises(DomainError):
            solve_critical(SurgeryParams(1, 27))

    def test_no_iterations(self):
        """A zero iteration budget cannot converge."""
        with pytest.raises(ConvergenceError):
            solve_critical(P627, max_iter=0)


class TestAsymptoticConstants:
    """zeta, omega and H."""

    def test_zeta_exceeds_threshold(self, constants_6_27):
        """2 pi zeta_R(6, 27) > 3.56337."""
        assert 2 * PI * constants_6_27.zeta_R > 3.56337

    @pytest.mark.parametrize("p,q", [(6, 27), (7, 19), (8, 17), (9, 15), (11, 14), (14, 13), (33, 12)])
    def test_threshold_on_boundary_of_S(self, p, q):
        """2 pi zeta_R > 3.56337 at every corner of the admissibility table."""
        params = SurgeryParams(p, q)
        assert in_S(params)
        assert 2 * PI * asymptotic_constants(params).zeta_R > 3.56337

    def test_large_pq(self):
        """2 pi zeta_R(100, 100) follows the volume expansion."""
        params = SurgeryParams(100, 100)
        value = 2 * PI * asymptotic_constants(params).zeta_R
        g1, g2 = params.gamma1, params.gamma2
        third_order = (octahedron_volume() - PI ** 2 * (0.25 * g1 ** 2 + 2 * g2 ** 2)
                       + PI ** 2 * (-g1 ** 3 / 8 + 8 * g2 ** 3))
        assert abs(value - third_order) < 200 * max(g1, g2) ** 4
        assert abs(value - volume_series(params, 4)) < 1e-6

    def test_determinant_relation(self, constants_6_27):
        """det(-Hess/2) = (-1/2)^3 (2 pi i)^3 H at the critical point."""
        theta = constants_6_27.critical.theta
        det = np.linalg.det(-0.5 * hessian(P627, theta))
        expected = (-0.5) ** 3 * (2j * PI) ** 3 * constants_6_27.H_det
        assert abs(det - expected) < 1e-9 * abs(expected)

    def test_h_function(self):
        """H = det(Hess V / 2 pi i) away from the critical point too."""
        theta = (0.04, 0.79 - 0.03j, 0.57 + 0.01j)
        z = [cmath.exp(2j * PI * t) for t in theta]
        det = np.linalg.det(hessian(P627, theta) / (2j * PI))
        assert abs(h_function(P627, z) - det) < 1e-9 * abs(det)

    def test_omega_matches_saddle(self, constants_6_27):
        """omega equals the saddle amplitude 4 pi^{3/2} alpha0 / ((-1)^{p+1} i sqrt det)."""
        c = constants_6_27
        saddle = 4 * PI ** 1.5 * c.alpha0 / ((-1) ** (P627.p + 1) * 1j * c.sqrt_det)
        assert abs(c.omega - saddle) < 1e-8 * abs(saddle)
