"""
tests/test_geometry.py
Gluing equations of M_{p,q}, the Rogers dilogarithm, the complex volume and
its expansion in 1/p, 1/q.

ANCHORS:
- v8 = 8 pi Lambda(1/4) = 3.663862377 (regular ideal octahedron)
- 2 pi zeta - (Vol + i CS) - (3q - p - 7) pi^2 i = 0 mod pi^2 i
"""
import cmath
import math

import pytest

from rtsurgery.exceptions import IndexRangeError
from rtsurgery.models import SurgeryParams
from rtsurgery.numerics.geometry import (
    bloch_wigner_volume,
    complex_volume,
    complex_volume_series,
    correspondence_residual,
    gluing_residuals,
    gluing_seed,
    holonomy_residuals,
    knot_complement_series,
    octahedron_volume,
    reduce_cs,
    rogers,
    rogers_complex_volume,
    solve_gluing,
    volume_series,
)
from rtsurgery.numerics.potential import asymptotic_constants, solve_critical

PI = math.pi
V8 = 3.663862376708876


def reduce_mod(value: float, period: float) -> float:
    """Distance of value from the nearest multiple of period"""
    return abs(value - period * round(value / period))


class TestOctahedron:
    """v8 from the Lobachevsky function."""

    def test_value(self):
        """v8 = 3.663862377."""
        assert abs(octahedron_volume() - V8) < 1e-12


class TestGluing:
    """Shapes of M_{6,27}."""

    def test_edge_and_completeness(self, params_6_27, shapes_6_27):
        """xyzw = 1 and (xz)^{2p-1} = -(w-1)/(z-1)."""
        s = shapes_6_27
        assert abs(s.x * s.y * s.z * s.w - 1) < 1e-10
        assert abs((s.x * s.z) ** (2 * params_6_27.p - 1) + (s.w - 1) / (s.z - 1)) < 1e-10

    def test_all_residuals(self, params_6_27, shapes_6_27):
        """All four equations hold to 1e-10."""
        assert max(abs(v) for v in gluing_residuals(shapes_6_27, params_6_27)) < 1e-10

    def test_correspondence(self, shapes_6_27, critical_6_27):
        """log x + log z = 2 pi i (theta3 - 1) at the critical point."""
        assert abs(correspondence_residual(shapes_6_27, critical_6_27)) < 1e-9

    def test_seed_is_close(self, shapes_6_27, critical_6_27):
        """The seed read off the critical point is already the solution."""
        x, z = gluing_seed(critical_6_27)
        assert abs(x - shapes_6_27.x) < 1e-6
        assert abs(z - shapes_6_27.z) < 1e-6

    def test_holonomy(self, params_6_27, shapes_6_27):
        """Meridian and twist relations hold modulo 2 pi i."""
        holonomy = holonomy_residuals(shapes_6_27, params_6_27)
        assert abs(holonomy["meridian"]) < 1e-9
        assert abs(holonomy["twist"]) < 1e-9
        for key in ("meridian_raw", "twist_raw"):
            raw = holonomy[key]
            assert abs(raw.real) < 1e-9
            assert reduce_mod(raw.imag, 2 * PI) < 1e-9


class TestRogers:
    """R(x) = (1/2) log x log(1 - x) + Li2(x)."""

    def test_half(self):
        """R(1/2) = pi^2 / 12."""
        assert abs(rogers(0.5) - PI ** 2 / 12) < 1e-14

    def test_reflection(self):
        """R(x) + R(1 - x) = pi^2 / 6 on and off the real axis."""
        for x in (0.3, 0.3 + 0.2j, 0.7 - 0.4j):
            assert abs(rogers(x) + rogers(1 - x) - PI ** 2 / 6) < 1e-13

    def test_derivative(self):
        """R'(x) = -(log(1 - x)/x + log(x)/(1 - x)) / 2 against central differences."""
        x = 0.3 + 0.2j
        h = 1e-6
        fd = (rogers(x + h) - rogers(x - h)) / (2 * h)
        expected = -0.5 * (cmath.log(1 - x) / x + cmath.log(x) / (1 - x))
        assert abs(fd - expected) < 1e-8

    def test_conjugation(self):
        """R(conj x) = conj R(x)."""
        x = 0.4 + 0.6j
        assert abs(rogers(x.conjugate()) - rogers(x).conjugate()) < 1e-14


class TestComplexVolume:
    """Vol + i CS of M_{p,q}."""

    def test_above_threshold(self, volume_6_27):
        """Vol(M_{6,27}) > 3.56337."""
        assert volume_6_27.vol > 3.56337
        assert 0 <= volume_6_27.cs < PI ** 2

    def test_volume_is_critical_value(self, volume_6_27, constants_6_27):
        """Vol = 2 pi zeta_R."""
        assert abs(volume_6_27.vol - 2 * PI * constants_6_27.zeta_R) < 1e-9

    @pytest.mark.parametrize("p,q", [(6, 27), (10, 15)])
    def test_critical_value_identity(self, p, q):
        """2 pi zeta - (Vol + i CS) - (3q - p - 7) pi^2 i vanishes modulo pi^2 i."""
        params = SurgeryParams(p, q)
        critical = solve_critical(params)
        zeta = asymptotic_constants(params, critical).zeta
        volume = complex_volume(params, solve_gluing(params, critical))
        difference = 2 * PI * zeta - volume.value - (3 * q - p - 7) * PI ** 2 * 1j
        assert abs(difference.real) < 1e-9
        assert reduce_mod(difference.imag, PI ** 2) < 1e-8

    @pytest.mark.parametrize("p,q", [(6, 27), (10, 15)])
    def test_rogers_matches_bloch_wigner(self, p, q):
        """The real part of the Rogers formula is the Bloch-Wigner volume of the tetrahedra."""
        params = SurgeryParams(p, q)
        shapes = solve_gluing(params)
        value = rogers_complex_volume(params, shapes)
        assert abs(value.real - bloch_wigner_volume(shapes)) < 1e-9
        assert abs(complex_volume(params, shapes).vol - value.real) < 1e-15

    def test_cs_is_reduced_rogers_imaginary_part(self, params_6_27, shapes_6_27, volume_6_27):
        """CS is Im of the Rogers formula reduced into [0, pi^2)."""
        raw = rogers_complex_volume(params_6_27, shapes_6_27).imag
        assert abs(volume_6_27.cs - reduce_cs(raw)) < 1e-15

    @pytest.mark.parametrize("k", [-2, -1, 0, 1, 2])
    def test_cs_reduction_stable(self, volume_6_27, k):
        """Shifting CS by k pi^2 leaves the reduced value unchanged."""
        shifted = reduce_cs(volume_6_27.cs + k * PI ** 2)
        assert 0 <= shifted < PI ** 2
        assert reduce_mod(shifted - volume_6_27.cs, PI ** 2) < 1e-12

    def test_volume_grows_towards_v8(self):
        """Vol increases along a chain of growing (p, q) and stays below v8."""
        chain = [(6, 27), (10, 27), (10, 40), (33, 40), (100, 100)]
        volumes = [complex_volume(SurgeryParams(p, q)).vol for p, q in chain]
        assert all(b > a for a, b in zip(volumes, volumes[1:]))
        assert volumes[-1] < V8

    def test_sample_below_v8(self):
        """Vol at (6, 27), (10, 20), (33, 12) and (100, 100) lies in (3.56337, v8), largest at (100, 100)."""
        sample = [(6, 27), (10, 20), (33, 12), (100, 100)]
        volumes = {pq: complex_volume(SurgeryParams(*pq)).vol for pq in sample}
        assert all(3.56337 < vol < V8 for vol in volumes.values())
        assert max(volumes, key=volumes.get) == (100, 100)

    def test_large_pq(self):
        """Vol(M_{200,200}) is within 1e-3 of the second-order expansion."""
        params = SurgeryParams(200, 200)
        vol = complex_volume(params).vol
        g1, g2 = params.gamma1, params.gamma2
        assert abs(vol - (V8 - PI ** 2 * (0.25 * g1 ** 2 + 2 * g2 ** 2))) < 1e-3


class TestVolumeSeries:
    """Expansion of Vol(M_{p,q}) in g1 = 1/p, g2 = 1/q."""

    def test_octahedral_limit(self):
        """The series tends to v8."""
        params = SurgeryParams(10 ** 9, 10 ** 9)
        for order in (2, 3, 4):
            assert abs(volume_series(params, order) - V8) < 1e-12

    def test_against_complex_volume(self):
        """Order 4 at (100, 100) against the gluing solution."""
        params = SurgeryParams(100, 100)
        assert abs(volume_series(params, 4) - complex_volume(params).vol) < 1e-6

    def test_knot_complement(self):
        """Third order of the q = infinity limit."""
        p = 12
        g = 1 / p
        expected = V8 - 0.25 * PI ** 2 * g ** 2 - 0.125 * PI ** 2 * g ** 3
        assert abs(knot_complement_series(p, 3) - expected) < 1e-12

    def test_knot_complement_is_q_limit(self):
        """volume_series approaches knot_complement_series as q grows."""
        p = 8
        assert abs(volume_series(SurgeryParams(p, 10 ** 8), 4) - knot_complement_series(p, 4)) < 1e-12

    def test_order_range(self):
        """Orders other than 2, 3, 4 are rejected."""
        with pytest.raises(IndexRangeError):
            volume_series(SurgeryParams(10, 10), 5)

    def test_complex_series_real_part(self):
        """The real part of the complex expansion is the order-2 volume series."""
        params = SurgeryParams(40, 30)
        assert abs(complex_volume_series(params).real - volume_series(params, 2)) < 1e-12
