import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from wetsim.bounds import drop_n
from wetsim.exactlog import ExactLog2
from wetsim.measures import (DropSequence, UniformDisk, UnsupportedMeasure, drop_s,
                             equilateral_triangle_boundary, single_circle, two_circle_drop)
from wetsim.wetpart import (closed_wet_measure, disk_cap_area, mc_wet_oracle, rho_star,
                            wet_measure, wet_steps, w1)

TWO = two_circle_drop(0.01, 1.0, 2.0)
RADIAL = [single_circle(), TWO, UniformDisk(1.0), DropSequence()]


def test_two_circle_step():
    assert wet_measure(TWO, 0.001) == 0.01
    assert wet_measure(TWO, 0.01) == 1.0
    assert wet_measure(TWO, 1 / 300) == 1.0
    assert wet_measure(TWO, np.nextafter(1 / 300, 0) * (1 - 1e-9)) == 0.01
    assert wet_measure(TWO, 1.0) == 1.0


def test_drop_sequence_at_log_n4_over_n4():
    t = ExactLog2.from_int(2 ** 4 + 8) / drop_n(4)
    assert wet_measure(DropSequence(), t) == drop_s(4)
    assert wet_measure(DropSequence(), t.to_float()) == 2.0 ** -14


def test_disk_half():
    assert wet_measure(UniformDisk(1.0), 0.5) == 1.0
    assert wet_measure(UniformDisk(1.0), 0.0) == 0.0


def test_wet_unsupported():
    with pytest.raises(UnsupportedMeasure):
        wet_measure(equilateral_triangle_boundary(), 0.1)


def test_disk_cap_area_examples():
    assert disk_cap_area(1.0, 0.0) == pytest.approx(math.pi / 2, abs=1e-15)
    assert disk_cap_area(1.0, 1.0) == 0.0
    assert disk_cap_area(1.0, 2.0) == 0.0
    want = math.acos(0.5) - 0.5 * math.sqrt(0.75)
    assert disk_cap_area(1.0, 0.5) == pytest.approx(want, abs=1e-15)
    assert disk_cap_area(1.0, 0.5) == pytest.approx(oracles.segment_area_quad(1.0, 0.5), abs=1e-12)
    assert want == pytest.approx(0.61418, abs=1e-5)
    with pytest.raises(ValueError):
        disk_cap_area(1.0, -0.1)


def test_wet_steps_two_circle():
    prof = wet_steps(TWO)
    interior = [thr for thr in prof.thresholds if thr > 0]
    assert len(interior) == 1
    assert interior[0] == pytest.approx(1 / 300, abs=1e-12)
    assert prof.value(0.001) == 0.01 and prof.value(0.004) == 1.0
    assert [r for _, r in prof.radial] == [2.0, 1.0]


def test_wet_steps_single_circle():
    prof = wet_steps(single_circle())
    assert prof.steps == ((0.0, 1.0),)
    assert wet_measure(single_circle(), 1e-9) == 1.0


@pytest.mark.parametrize("m", [TWO, DropSequence(), two_circle_drop(0.3, 1.0, 1.5)],
                         ids=["two_circle", "drop", "two_circle_b"])
def test_step_consistency(m):
    prof = wet_steps(m)
    vals = [v for _, v in prof.steps]
    for k, (thr, val) in enumerate(prof.steps):
        if thr <= 0 or val == 0.0 or thr < 1e-290:
            continue
        assert wet_measure(m, thr) == pytest.approx(val, rel=1e-12)
        below = wet_measure(m, thr * (1 - 1e-9))
        assert below == pytest.approx(vals[k - 1], rel=1e-12)


@pytest.mark.parametrize("m", RADIAL, ids=lambda m: type(m).__name__)
def test_wet_measure_monotone(m):
    ts = np.concatenate(([0.0], np.geomspace(1e-12, 1.0, 600)))
    ws = [float(wet_measure(m, t)) for t in ts]
    assert all(0.0 <= w <= 1.0 for w in ws)
    assert all(a <= b for a, b in zip(ws, ws[1:]))


@given(st.floats(0.0, 1.0))
def test_closed_wet_equals_open(t):
    assert closed_wet_measure(TWO, t) == wet_measure(TWO, t)


def test_rho_star_inverts_profile():
    m = UniformDisk(1.0)
    for t in [0.01, 0.1, 0.3, 0.49]:
        assert m.profile(rho_star(m, t)) == pytest.approx(t, rel=1e-12)
    assert rho_star(m, 0.5) == 0.0
    assert rho_star(TWO, 0.002) == pytest.approx(math.cos(math.pi * 0.002 / 0.01) * 2.0, rel=1e-10)


@pytest.mark.parametrize("m", RADIAL, ids=lambda m: type(m).__name__)
def test_oracle_agreement(m):
    rng = np.random.default_rng(21)
    n = 20000
    for t in np.geomspace(1e-4, 0.49, 20):
        w = float(wet_measure(m, t))
        est = mc_wet_oracle(m, t, 360, n, rng)
        assert abs(est - w) <= 4 * oracles.binomial_sigma(w, n)


def test_oracle_direction_grid_path():
    # a symmetric measure forced through the direction-grid branch
    class Plain(UniformDisk):
        symmetric = False

    m = Plain(1.0)
    rng = np.random.default_rng(3)
    t = 0.1
    est = mc_wet_oracle(m, t, 720, 4000, rng)
    w = float(wet_measure(UniformDisk(1.0), t))
    # the grid minimum can only overshoot the true minimum slightly
    assert abs(est - w) <= 4 * oracles.binomial_sigma(w, 4000) + 0.01


def test_oracle_trivial_ends():
    rng = np.random.default_rng(0)
    assert mc_wet_oracle(TWO, 1.0, 360, 1000, rng) == 1.0
    # at t = 0 only the outermost circle is wet (its tangent halfplanes are null)
    for m in RADIAL:
        assert mc_wet_oracle(m, 0.0, 360, 2000, rng) == pytest.approx(
            float(wet_measure(m, 0.0)), abs=4 * oracles.binomial_sigma(0.01, 2000))
    assert wet_measure(single_circle(), 0.0) == 1.0
    assert wet_measure(UniformDisk(1.0), 0.0) == 0.0
    assert mc_wet_oracle(UniformDisk(1.0), 0.0, 360, 2000, rng) == 0.0
    assert mc_wet_oracle(equilateral_triangle_boundary(), 0.0, 360, 500, rng) == 0.0
    with pytest.raises(ValueError):
        mc_wet_oracle(TWO, 0.1, 100, 10, rng)


def test_triangle_oracle():
    # a boundary point at distance a from the nearest corner has halfplanes of
    # mass just above a / perimeter, so w(t) = 6 t for t <= 1/6
    est = mc_wet_oracle(equilateral_triangle_boundary(), 0.1, 720, 4000, np.random.default_rng(1))
    assert abs(est - 0.6) <= 4 * oracles.binomial_sigma(0.6, 4000) + 0.02
    est = mc_wet_oracle(equilateral_triangle_boundary(), 0.2, 360, 1000, np.random.default_rng(2))
    assert est == 1.0


# one-dimensional sanity check

def test_w1_closed_form():
    assert w1(0.0) == 0.0 and w1(0.25) == 0.5 and w1(0.7) == 1.0


def test_one_dimensional_efron_chain():
    # E[1 - mu(P_n)] = 2/(n+1) <= w1(1/(n+1)) <= w1(3 ln n / n), exactly in rationals
    for n in range(2, 2000):
        lhs = Fraction(2, n + 1)
        mid = min(2 * Fraction(1, n + 1), Fraction(1))
        assert lhs <= mid
        assert w1(1 / (n + 1)) <= w1(3 * math.log(n) / n)


def test_one_dimensional_missing_mass_simulation():
    rng = np.random.default_rng(9)
    for n in (3, 10, 50):
        x = rng.random((200000, n))
        miss = 1 - (x.max(axis=1) - x.min(axis=1))
        se = miss.std(ddof=1) / math.sqrt(len(miss))
        assert abs(miss.mean() - 2 / (n + 1)) <= 4 * se
