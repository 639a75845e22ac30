"""
Shared fixtures: the (6, 27) critical point and its geometry, computed once per
session, and an independent Kauffman bracket evaluation of the trefoil used as
an oracle for the colored Jones sum.
"""
import cmath
import itertools
import math

import pytest

from rtsurgery.models import SurgeryParams
from rtsurgery.numerics.geometry import complex_volume, solve_gluing
from rtsurgery.numerics.potential import asymptotic_constants, solve_critical

# right-handed trefoil; edges 1..6 in traversal order, X[a, b, c, d] counterclockwise
# from the incoming under-edge a
TREFOIL_PD = [(1, 5, 2, 4), (3, 1, 4, 6), (5, 3, 6, 2)]


def _loops(pairs, n_edges):
    parent = list(range(n_edges + 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairs:
        parent[find(a)] = find(b)
    return len({find(e) for e in range(1, n_edges + 1)})


def kauffman_bracket(pd, A):
    """State sum over all smoothings; the A-smoothing of X[a,b,c,d] joins (a,b) and (c,d)"""
    n_edges = 2 * len(pd)
    delta = -A ** 2 - A ** -2
    total = 0j
    for state in itertools.product((0, 1), repeat=len(pd)):
        pairs = []
        for (a, b, c, d), smoothing in zip(pd, state):
            pairs.extend([(a, b), (c, d)] if smoothing == 0 else [(a, d), (b, c)])
        n_b = sum(state)
        total += A ** (len(pd) - 2 * n_b) * delta ** (_loops(pairs, n_edges) - 1)
    return total


def writhe(pd):
    n_edges = 2 * len(pd)
    return sum(1 if (b - d) % n_edges == 1 else -1 for _, b, _, d in pd)


def jones_from_pd(pd, r):
    """Jones polynomial at t = e^{4 pi i / r}, i.e. A = t^{-1/4}"""
    A = cmath.exp(-1j * math.pi / r)
    return (-A ** 3) ** (-writhe(pd)) * kauffman_bracket(pd, A)


@pytest.fixture(scope="session")
def trefoil_jones():
    return lambda r: jones_from_pd(TREFOIL_PD, r)


@pytest.fixture(scope="session")
def params_6_27():
    return SurgeryParams(6, 27)


@pytest.fixture(scope="session")
def critical_6_27(params_6_27):
    return solve_critical(params_6_27)


@pytest.fixture(scope="session")
def constants_6_27(params_6_27, critical_6_27):
    return asymptotic_constants(params_6_27, critical_6_27)


@pytest.fixture(scope="session")
def shapes_6_27(params_6_27, critical_6_27):
    return solve_gluing(params_6_27, critical_6_27)


@pytest.fixture(scope="session")
def volume_6_27(params_6_27, shapes_6_27):
    return complex_volume(params_6_27, shapes_6_27)


@pytest.fixture
def cache_path(tmp_path):
    return str(tmp_path / "rt_cache.jsonl")
