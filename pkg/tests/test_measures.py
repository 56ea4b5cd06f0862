import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

import oracles
from wetsim.exactlog import ExactLog2
from wetsim.geom2d import Halfplane, Location, convex_hull, locate
from wetsim.measures import (ConcentricCircles, DropSequence, PolygonBoundaryMeasure, UniformDisk,
                             UnsupportedMeasure, drop_p, drop_radius, drop_s, drop_sequence_index,
                             equilateral_triangle_boundary, halfplane_measure,
                             measure_of_halfplane_profile, sample, single_circle, support_total,
                             two_circle_drop)

TWO = two_circle_drop(0.01, 1.0, 2.0)
ALL = [single_circle(), TWO, UniformDisk(1.0), DropSequence(), equilateral_triangle_boundary()]
RADIAL = ALL[:4]


def test_two_circle_drop_weights():
    assert list(TWO.weights) == [0.99, 0.01]
    assert list(two_circle_drop(0.5, 1, 3).weights) == [0.5, 0.5]
    assert support_total(TWO) == pytest.approx(1.0, abs=1e-12)
    for bad in [(0.0, 1, 2), (1.0, 1, 2), (0.3, 2, 1), (0.3, 1, 1)]:
        with pytest.raises(ValueError):
            two_circle_drop(*bad)


def test_concentric_validation():
    with pytest.raises(ValueError):
        ConcentricCircles([1.0, 2.0], [0.5, 0.6])
    with pytest.raises(ValueError):
        ConcentricCircles([2.0, 1.0], [0.5, 0.5])


@pytest.mark.parametrize("m", ALL, ids=lambda m: type(m).__name__)
def test_weights_sum_to_one(m):
    assert m.total_mass() == pytest.approx(1.0, abs=1e-12)


def test_outer_circle_frequency():
    rng = np.random.default_rng(1)
    n = 10 ** 6
    pts = TWO.sample(rng, n)
    freq = np.mean(np.hypot(pts[:, 0], pts[:, 1]) > 1.5)
    assert abs(freq - 0.01) <= 4 * math.sqrt(0.01 * 0.99 / n)


def test_disk_mean_radius():
    rng = np.random.default_rng(2)
    n = 10 ** 6
    r = np.hypot(*UniformDisk(1.0).sample(rng, n).T)
    # E r = 2/3, Var r = 1/2 - 4/9
    assert abs(r.mean() - 2 / 3) <= 4 * math.sqrt((0.5 - 4 / 9) / n)
    assert r.max() <= 1.0


def test_drop_sequence_first_circle_frequency_and_chi2():
    rng = np.random.default_rng(3)
    n = 10 ** 6
    m = DropSequence()
    r = np.hypot(*m.sample(rng, n).T)
    idx = np.rint(1.0 / (1.0 - r) - 1.0).astype(int)  # r_i = 1 - 1/(i+1)
    assert abs(np.mean(idx == 1) - 0.75) <= 4 * math.sqrt(0.75 * 0.25 / n)
    # chi-square over circles 1, 2, 3 and the rest
    probs = np.array([drop_p(i).to_float() for i in (1, 2, 3)])
    probs = np.append(probs, 1 - probs.sum())
    counts = np.array([np.sum(idx == 1), np.sum(idx == 2), np.sum(idx == 3), np.sum(idx >= 4)])
    keep = probs * n >= 5
    obs = np.append(counts[keep], counts[~keep].sum())
    exp = np.append(probs[keep], probs[~keep].sum()) * n
    obs, exp = obs[exp > 0], exp[exp > 0]
    assert stats.chisquare(obs, exp).pvalue > 1e-3


def test_circle_sampler_chi2_angles():
    rng = np.random.default_rng(4)
    pts = single_circle().sample(rng, 10 ** 6)
    th = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * math.pi)
    counts = np.histogram(th, bins=36, range=(0, 2 * math.pi))[0]
    assert stats.chisquare(counts).pvalue > 1e-3


def test_triangle_boundary_samples_on_edges():
    m = equilateral_triangle_boundary()
    rng = np.random.default_rng(5)
    pts = m.sample(rng, 10 ** 5)
    locs = [locate(m.polygon, tuple(p)) for p in pts[:2000]]
    assert all(l is Location.BOUNDARY for l in locs)
    # arc-length uniform: each of the three (equal) edges gets a third
    v = m.polygon.vertices

    def dist(k):
        d, q = v[(k + 1) % 3] - v[k], pts - v[k]
        return np.abs(d[0] * q[:, 1] - d[1] * q[:, 0])

    edge = np.argmin([dist(k) for k in range(3)], axis=0)
    counts = np.bincount(edge, minlength=3)
    assert stats.chisquare(counts).pvalue > 1e-3
    assert m.perimeter == pytest.approx(3 * math.sqrt(3), rel=1e-7)


def test_sample_single_point():
    p = sample(TWO, np.random.default_rng(0))
    assert math.hypot(*p) in (pytest.approx(1.0), pytest.approx(2.0))


# drop sequence

def test_drop_sequence_index_examples():
    assert drop_sequence_index(0.5) == 1
    assert drop_sequence_index(1.0) == 1
    assert drop_sequence_index(0.25) == 2     # tie u == s_2 goes to the deeper circle
    assert drop_sequence_index(np.nextafter(0.25, 1)) == 1
    assert drop_sequence_index(2.0 ** -20) == 4
    assert drop_sequence_index(2.0 ** -1074, i_max=40) == 10
    assert drop_sequence_index(1e-300, i_max=5) == 5
    with pytest.raises(ValueError):
        drop_sequence_index(0.0)


@given(st.floats(min_value=5e-324, max_value=1.0))
def test_drop_sequence_index_against_definition(u):
    i = drop_sequence_index(u)
    # smallest i with u > s_{i+1}, compared exactly through ExactLog2
    assert ExactLog2.from_float(u) > drop_s(i + 1)
    assert i == 1 or not ExactLog2.from_float(u) > drop_s(i)


def test_drop_identity_p_equals_s_times_one_minus_quarter_s():
    for i in range(1, 21):
        s = drop_s(i)
        assert drop_p(i) == s * (1 - s / 4)
        assert drop_s(i) - drop_s(i + 1) == drop_p(i)
    assert drop_s(1) == 1


def test_drop_threshold_lower_bound_at_r4():
    m = DropSequence()
    nu = m.tangent_mass_log(4)
    assert nu >= drop_s(5) * (math.sqrt(2) / (math.pi * 5))
    assert float(measure_of_halfplane_profile(m, drop_radius(4))) == pytest.approx(nu.to_float(),
                                                                                  rel=1e-12)


def test_drop_profile_log_matches_float_profile():
    m = DropSequence()
    for rho in [0.0, 0.3, 0.5, 0.6, 0.7, 0.75, 0.8, 0.85]:
        assert m.profile_log(rho).to_float() == pytest.approx(m.profile(rho), rel=1e-12, abs=1e-300)


# halfplane measures

def test_tau_two_circle():
    tau = halfplane_measure(TWO, Halfplane((1.0, 0.0), 1.0))
    assert tau == pytest.approx(1 / 300, abs=1e-15)
    assert tau < 0.01 / 2


@pytest.mark.parametrize("m", RADIAL, ids=lambda m: type(m).__name__)
def test_profile_properties(m):
    assert m.profile(0.0) == pytest.approx(0.5, abs=1e-15)
    assert m.profile(m.support_radius) == 0.0
    assert m.profile(m.support_radius * 1.5) == 0.0
    grid = np.linspace(0, m.support_radius * 1.1, 5001)
    prof = m.profile(grid)
    assert np.all(np.diff(prof) <= 1e-15)


def test_profile_near_support_edge():
    assert TWO.profile(2.0 - 1e-12) < 1e-7
    assert UniformDisk(1.0).profile(1.0) == 0.0


def test_profile_unsupported():
    with pytest.raises(UnsupportedMeasure):
        measure_of_halfplane_profile(equilateral_triangle_boundary(), 0.1)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(-2.5, 2.5))
def test_halfplane_plus_opposite_is_one(theta, offset):
    h = Halfplane.from_angle(theta, offset)
    for m in ALL:
        total = halfplane_measure(m, h) + halfplane_measure(m, h.opposite())
        assert total == pytest.approx(1.0, abs=1e-12)


def test_triangle_halfplane_measure_vs_sampling():
    m = equilateral_triangle_boundary()
    rng = np.random.default_rng(6)
    n = 10 ** 6
    pts = m.sample(rng, n)
    for theta, off in [(0.3, 0.0), (1.7, 0.2), (4.0, -0.3), (math.pi / 2, 0.49)]:
        h = Halfplane.from_angle(theta, off)
        freq = np.mean(pts @ np.array(h.normal) >= off)
        p = halfplane_measure(m, h)
        assert abs(freq - p) <= 4 * oracles.binomial_sigma(p, n)


def test_disk_halfplane_measure_vs_quadrature():
    m = UniformDisk(2.0)
    for rho in [0.0, 0.5, 1.3, 1.99]:
        want = oracles.segment_area_quad(2.0, rho) / (math.pi * 4.0)
        assert m.halfplane_measure(Halfplane((0.0, 1.0), rho)) == pytest.approx(want, abs=1e-12)


def test_polygon_boundary_requires_full_polygon():
    with pytest.raises(ValueError):
        PolygonBoundaryMeasure(convex_hull([(0.0, 0.0), (1.0, 0.0)]))
