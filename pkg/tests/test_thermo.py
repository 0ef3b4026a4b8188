import math

import numpy as np
import pytest

from dimdrop import hyperbolic as H
from dimdrop import thermo as T
from dimdrop.errors import BracketError


@pytest.fixture(scope="module")
def sys6(rep4):
    return T.refine(rep4, 6)


def test_refine_sizes(rep4):
    s1 = T.refine(rep4, 1)
    assert len(s1) == 4 and s1.successors.shape == (4, 3)
    assert len(T.refine(rep4, 2)) == 12
    with pytest.raises(ValueError):
        T.refine(rep4, 11)


def test_marked_points_in_first_arc(rep4):
    s = T.refine(rep4, 3)
    for w, xi in zip(s.words, s.marked):
        assert rep4.planes[w[0]].contains_angle(np.angle(xi))
    assert np.all(s.contraction > 0) and np.all(s.contraction < 1)


def test_successors_are_shifts(rep4):
    s = T.refine(rep4, 3)
    for i, w in enumerate(s.words):
        for j in s.successors[i]:
            assert s.words[j][:-1] == w[1:]


def test_radius_at_zero(sys6):
    assert T.spectral_radius(sys6, 0.0) == pytest.approx(3.0, abs=1e-9)


def test_radius_strictly_decreasing(sys6):
    s = np.linspace(0, 1, 11)
    r = [T.spectral_radius(sys6, x) for x in s]
    assert all(a > b for a, b in zip(r, r[1:]))
    assert T.spectral_radius(sys6, 0.2) > T.spectral_radius(sys6, 0.8)


def test_bisection_trace_is_continuous(rep4):
    est = T.hausdorff_dimension(rep4, 6)
    s, r = zip(*est.trace)
    logs = np.log(r)
    # log radius has slope bounded by the largest one-step potential
    lip = float(T.refine(rep4, 6).potential.max())
    assert np.all(np.abs(np.diff(logs)) <= lip * np.diff(s) + 1e-12)


def test_dimension_properties(rep4):
    est = T.hausdorff_dimension(rep4, 6)
    assert 0 < est.value < 1
    assert est.bracket[1] - est.bracket[0] <= 1e-8
    d = [T.hausdorff_dimension(H.standard_schottky(L), 6).value for L in (3, 4, 5, 6)]
    assert all(a > b for a, b in zip(d, d[1:]))


def test_depth_convergence(rep4):
    est = T.hausdorff_dimension(rep4, 7, start=3)
    table = [v for _, v in est.convergence_table]
    assert abs(table[-1] - table[-2]) < 1e-3
    gaps = [abs(b - a) for a, b in zip(table, table[1:])]
    # differences shrink until they hit the bisection tolerance
    assert all(g2 <= g1 + 2e-8 for g1, g2 in zip(gaps, gaps[1:]))


def test_rotation_invariance(rep4):
    a = T.hausdorff_dimension(rep4, 6).value
    b = T.hausdorff_dimension(rep4.rotated(0.7), 6).value
    assert abs(a - b) <= 1e-6


def test_tolerance_floor(rep4):
    with pytest.raises(ValueError):
        T.hausdorff_dimension(rep4, 4, tol=1e-11)


def test_bracket_failure(sys6):
    # a system whose radius never falls below 1 on [0, 1]
    flat = T.RefinedSystem(sys6.depth, sys6.words, sys6.successors, sys6.marked,
                           np.zeros_like(sys6.potential), sys6.contraction)
    with pytest.raises(BracketError):
        T.bowen_root(flat)


def test_moran_equal_lengths():
    for N, r in ((2, 1 / 3), (4, 0.1), (3, 0.2)):
        assert T.moran_root(np.full(N, r)) == pytest.approx(math.log(N) / math.log(1 / r), abs=1e-10)


def test_oracle(rep4):
    d6 = T.hausdorff_dimension(rep4, 6).value
    o6, o7 = T.box_counting_oracle(rep4, 6), T.box_counting_oracle(rep4, 7)
    assert abs(o6 - d6) <= 0.05
    assert abs(o7 - o6) <= 1e-2
