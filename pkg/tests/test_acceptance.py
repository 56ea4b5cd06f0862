"""The ten acceptance criteria at full size.

Each test records a one-line verdict that the terminal summary prints under
"acceptance criteria". Deselect with ``-m "not acceptance"`` for a quick run.
"""
import math

import numpy as np
import pytest

import oracles
from wetsim.bounds import (drop_n, f0_threshold, kpw_failure_bound, shatter_halfplanes,
                           theorem2_envelopes, theorem3_ledger)
from wetsim.geom2d import Location, convex_hull, locate_many
from wetsim.hullstats import hull_mass, hull_stats
from wetsim.measures import (DropSequence, UniformDisk, equilateral_triangle_boundary,
                             single_circle, two_circle_drop)
from wetsim.montecarlo import (efron_check, epsnet_failure_rate, estimate, log_grid, trial_rng)
from wetsim.wetpart import mc_wet_oracle, wet_measure, wet_steps

pytestmark = pytest.mark.acceptance

SEED = 20240917
SIGMAS = 3.0
Z_MAX = 4.0
TWO = two_circle_drop(0.01, 1.0, 2.0)
RADIAL = {"circle": single_circle(), "two_circle": TWO, "disk": UniformDisk(1.0),
          "drop_sequence": DropSequence()}


def test_1_sawtooth(record):
    taus = [t for t in wet_steps(TWO).thresholds if t > 0]
    tau_ok = len(taus) == 1 and abs(taus[0] - 1 / 300) <= 1e-12
    bad = []
    for n in range(1, 10 ** 4 + 1):
        nw = n * wet_measure(TWO, 1.0 / n)
        want = n if n <= 300 else n / 100
        if nw != pytest.approx(want, rel=1e-15):
            bad.append(n)
    drop = (300 * wet_measure(TWO, 1 / 300), 301 * wet_measure(TWO, 1 / 301))
    ok = tau_ok and not bad and drop[0] == 300 and drop[1] == pytest.approx(3.01, rel=1e-15)
    record(1, "Figure 1 sawtooth", ok,
           f"tau - 1/300 = {taus[0] - 1 / 300:.2e}, drop {drop[0]:g} -> {drop[1]:.4g}, "
           f"{len(bad)} mismatches over n <= 10^4")
    assert ok


def test_2_non_monotone_f0(record):
    a = estimate(TWO, 150, 10 ** 4, SEED, "f0", stream=1)
    b = estimate(TWO, 400, 10 ** 4, SEED, "f0", stream=2)
    gap = a.mean - b.mean
    se = math.hypot(a.stderr, b.stderr)
    ok = gap > SIGMAS * se
    record(2, "E[f0] drops from n=150 to n=400", ok,
           f"{a.mean:.3f} -> {b.mean:.3f}, gap {gap / se:.1f} se")
    assert ok


@pytest.fixture(scope="module")
def theorem2_runs():
    grid = log_grid(2, 10 ** 4, 20)
    out = {}
    for name, m in RADIAL.items():
        report = theorem2_envelopes(m, grid)
        for env in report.rows:
            out[name, env.n] = (env, estimate(m, env.n, 10 ** 4, SEED, "missing_mass"))
    return grid, out


def test_3_theorem2_lower(record, theorem2_runs):
    grid, runs = theorem2_runs
    bad, worst = [], math.inf
    for (name, n), (env, r) in runs.items():
        margin = r.mean + SIGMAS * r.stderr - env.lower
        worst = min(worst, margin)
        if margin < 0:
            bad.append((name, n))
    ok = len(grid) == 20 and not bad
    record(3, "lower envelope w(1/n)/4", ok,
           f"{len(runs)} (measure, n) pairs, smallest margin {worst:.3g}, failures {bad}")
    assert ok


def test_4_theorem2_upper(record, theorem2_runs):
    _, runs = theorem2_runs
    bad, checked, worst = [], 0, math.inf
    for (name, n), (env, r) in runs.items():
        if not env.valid:
            continue
        checked += 1
        margin = env.upper - (r.mean - SIGMAS * r.stderr)
        worst = min(worst, margin)
        if margin < 0:
            bad.append((name, n))
    n0 = theorem2_envelopes(TWO, [10]).n0
    ok = checked > 0 and not bad
    record(4, "upper envelope w(4 ln n/n) + eps_2(n)/n", ok,
           f"n0 = {n0}, {checked} pairs checked, smallest margin {worst:.3g}, failures {bad}")
    assert ok


def test_5_efron(record):
    zs = {}
    for name, m in (("two_circle", TWO), ("disk", UniformDisk(1.0))):
        for n in (10, 50, 200):
            zs[name, n] = efron_check(m, n, 10 ** 5, SEED).z
    worst = max(abs(z) for z in zs.values())
    ok = worst <= Z_MAX
    record(5, "Efron identity", ok, f"max |z| = {worst:.2f} over {len(zs)} cases")
    assert ok


def test_6_theorem3_analytic(record):
    seq = DropSequence()
    chain = [i for i in range(4, 61) if not theorem3_ledger(i, seq).chain_check]
    wet = [i for i in range(4, 21) if not theorem3_ledger(i, seq).wet_ok]
    ok = not chain and not wet
    record(6, "drop-sequence chain and w(log2 n_i/n_i) = s_i", ok,
           f"chain failures {chain} (i = 4..60), wet failures {wet} (i = 4..20)")
    assert ok


def test_7_theorem3_monte_carlo(record):
    n = int(drop_n(4).to_float()) + 1
    thr = f0_threshold(4).to_float()
    r = estimate(DropSequence(), n, 200, SEED, "f0")
    lower = r.mean - SIGMAS * r.stderr
    ok = lower > thr
    record(7, "E[f0] at n_4 + 1 above (n_4 + 1) s_4 / 2", ok,
           f"mean {r.mean:.2f}, se {r.stderr:.2f}, mean - 3 se = {lower:.2f} vs {thr:.7f}")
    assert ok


def _hull_cases(rng):
    for k in range(1000):
        n = int(rng.integers(1, 13))
        if k % 3 == 0:
            pts = rng.random((n, 2))
        elif k % 3 == 1:
            pts = rng.integers(0, 4, (n, 2)).astype(float)
        else:
            t = rng.integers(-3, 4, n).astype(float)
            pts = np.column_stack((t, 2 * t + 1))
            if n > 3:
                pts[: n // 3] = rng.random((n // 3, 2)) * 6
        if n > 2 and k % 5 == 0:
            pts[-1] = pts[0]
        yield pts


def test_8_oracle_equivalences(record):
    rng = np.random.default_rng(SEED)
    hull_bad = 0
    for pts in _hull_cases(rng):
        got = {tuple(map(float, v)) for v in convex_hull(pts).vertices}
        hull_bad += got != oracles.extreme_points(pts)

    measures = list(RADIAL.values()) + [equilateral_triangle_boundary()]
    mass_bad, mass_cases = 0, 0
    for m in measures:
        for _ in range(20):
            hull = convex_hull(m.sample(rng, int(rng.integers(3, 200))))
            probe = m.sample(rng, 10 ** 6)
            freq = np.mean(locate_many(hull, probe) != Location.OUTSIDE)
            mass = hull_mass(m, hull)
            mass_cases += 1
            mass_bad += abs(freq - mass) > 4 * oracles.binomial_sigma(mass, len(probe))

    wet_bad, wet_cases = 0, 0
    for m in RADIAL.values():
        for t in np.geomspace(1e-4, 0.49, 20):
            w = float(wet_measure(m, t))
            est = mc_wet_oracle(m, t, 360, 10 ** 5, rng)
            wet_cases += 1
            wet_bad += abs(est - w) > 4 * oracles.binomial_sigma(w, 10 ** 5)
    ok = hull_bad == 0 and mass_bad == 0 and wet_bad == 0
    record(8, "oracle equivalences", ok,
           f"hull mismatches {hull_bad}/1000, hull-mass outside 4 sigma {mass_bad}/{mass_cases}, "
           f"w(t) outside 4 sigma {wet_bad}/{wet_cases}")
    assert ok


def test_9_triangle(record):
    m = equilateral_triangle_boundary()
    bad = 0
    max_f0 = 0
    for t in range(1000):
        s = hull_stats(m, m.sample(trial_rng(SEED, t), 100))
        max_f0 = max(max_f0, s.f0)
        bad += not (s.f0_bar == 100 and s.f0 <= 6 and s.interior_mass == 0.0)
    ok = bad == 0
    record(9, "triangle boundary per trial", ok,
           f"{bad} violating trials of 1000, largest f0 {max_f0}")
    assert ok


def test_10_shatter_and_epsnet(record):
    square = [(0, 0), (1, 0), (1, 1), (0, 1)]
    brute = len(oracles.halfplane_dichotomies(square))
    parts = [f"shatter(4,2) = {shatter_halfplanes(4, 2)}, brute force {brute}"]
    ok = brute == shatter_halfplanes(4, 2) == 14
    for n in (100, 1000):
        N = n * math.ceil(math.log(n))
        eps = 4 * math.log(n) / n
        rate = epsnet_failure_rate(TWO, n, eps, 1000, SEED).mean
        bound = kpw_failure_bound(N, n, eps)
        ok = ok and rate <= bound
        parts.append(f"n={n}: rate {rate:.4g} <= bound {bound:.3g}")
    record(10, "shatter function and epsilon-net failures", ok, "; ".join(parts))
    assert ok
