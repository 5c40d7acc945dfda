import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from levyfit.distance import (
    NegativeDensityError,
    absolute_sup,
    hellinger,
    hellinger_sq,
    objective,
    relative_l2,
)
from levyfit.grid import Density, Grid1D, GridMismatchError

G = Grid1D(-3.0, 3.0, 121)


def gaussian(grid, mu, sigma):
    x = grid.nodes
    return Density(grid, np.exp(-0.5 * ((x - mu) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi)))


def gaussian_h2(m1, s1, m2, s2):
    return 1 - math.sqrt(2 * s1 * s2 / (s1**2 + s2**2)) * math.exp(-((m1 - m2) ** 2) / (4 * (s1**2 + s2**2)))


def test_identity_is_zero():
    p = gaussian(G, 0.3, 0.5)
    assert hellinger_sq(p, p) == 0.0
    assert relative_l2(p, p) == 0.0
    assert absolute_sup(p, p) == 0.0


def test_disjoint_unit_masses_give_one():
    g = Grid1D(0.0, 10.0, 11)
    p = np.zeros(11)
    q = np.zeros(11)
    p[2] = 1.0
    q[7] = 1.0
    assert hellinger_sq(Density(g, p), Density(g, q)) == pytest.approx(1.0, abs=1e-6)


def test_hand_quadrature_toy():
    # endpoints carry trapezoid weight h/2: 1/2 * 0.5 * (2/2 + 0 + 2/2) = 0.5
    g = Grid1D(0.0, 1.0, 3)
    p = Density(g, [2.0, 0.0, 0.0])
    q = Density(g, [0.0, 0.0, 2.0])
    assert hellinger_sq(p, q) == pytest.approx(0.5, rel=1e-15)


def test_relative_l2_scaling():
    q = gaussian(G, 0.0, 0.7)
    assert relative_l2(Density(G, 2 * q.values), q) == pytest.approx(1.0, rel=1e-14)


def test_relative_l2_zero_reference():
    with pytest.raises(ZeroDivisionError):
        relative_l2(gaussian(G, 0, 1), Density(G, np.zeros(G.m)))


def test_absolute_sup_single_node():
    p = gaussian(G, 0.0, 1.0)
    q = Density(G, p.values.copy())
    q.values[40] += 0.125
    assert absolute_sup(p, q) == pytest.approx(0.125, rel=1e-12)


def test_grid_mismatch():
    p = gaussian(G, 0, 1)
    q = gaussian(Grid1D(-3.0, 3.0, 61), 0, 1)
    for fn in (hellinger_sq, relative_l2, absolute_sup):
        with pytest.raises(GridMismatchError):
            fn(p, q)


def test_negative_clamping():
    p = gaussian(G, 0, 1)
    q = Density(G, p.values.copy())
    q.values[:3] = -5e-9
    diag = {}
    assert hellinger_sq(q, p, diag) >= 0
    assert diag["clamped"] == 3
    q.values[5] = -1e-6
    with pytest.raises(NegativeDensityError):
        hellinger_sq(q, p)


def test_matches_gaussian_closed_form():
    g = Grid1D(-12.0, 12.0, 2401)
    h2 = hellinger_sq(gaussian(g, 0.2, 0.6), gaussian(g, -0.3, 0.9))
    assert h2 == pytest.approx(gaussian_h2(0.2, 0.6, -0.3, 0.9), abs=1e-10)


def test_refinement_changes_little():
    coarse = Grid1D(-6.0, 6.0, 121)
    fine = Grid1D(-6.0, 6.0, 241)
    h_c = hellinger_sq(gaussian(coarse, 0.5, 0.4), gaussian(coarse, -0.5, 0.8))
    h_f = hellinger_sq(gaussian(fine, 0.5, 0.4), gaussian(fine, -0.5, 0.8))
    assert abs(h_c - h_f) < 1e-3


def test_objective_dispatch():
    p, q = gaussian(G, 0, 1), gaussian(G, 0.1, 1)
    assert objective("hellinger", p, q) == hellinger_sq(p, q)
    assert objective("relative-l2", p, q) == relative_l2(p, q)
    assert objective("absolute-sup", p, q) == absolute_sup(p, q)
    with pytest.raises(ValueError):
        objective("kl", p, q)


unit_mass = st.lists(st.floats(0.0, 1.0), min_size=8, max_size=8).filter(lambda v: sum(v) > 1e-3)


def as_density(vals):
    g = Grid1D(0.0, 7.0, 8)
    d = Density(g, np.array(vals))
    return d.normalized()


@settings(max_examples=100, deadline=None)
@given(unit_mass, unit_mass, unit_mass)
def test_hellinger_axioms(a, b, c):
    p, q, r = as_density(a), as_density(b), as_density(c)
    assert hellinger_sq(p, q) == hellinger_sq(q, p)
    assert -1e-15 <= hellinger_sq(p, q) <= 1 + 1e-9
    assert hellinger(p, r) <= hellinger(p, q) + hellinger(q, r) + 1e-9
    assert hellinger_sq(p, p) == 0.0


@settings(max_examples=50, deadline=None)
@given(unit_mass, unit_mass)
def test_zero_iff_equal(a, b):
    p, q = as_density(a), as_density(b)
    if hellinger_sq(p, q) == 0.0:
        np.testing.assert_allclose(p.values, q.values, atol=1e-12)
    if not np.allclose(p.values, q.values, atol=1e-6):
        assert hellinger_sq(p, q) > 0
