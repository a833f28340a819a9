"""Exit criteria for the filter, the simulation families and the benchmark.

Every test records a one-line PASS/FAIL verdict; the lines are printed in a
dedicated section at the end of the pytest run.
"""

import numpy as np
import pytest

from sdm import measurement as ms
from sdm.belief import FLOOR, DiffusionEstimator, estimate_theta, predict
from sdm.filter import run_filter
from sdm.metrics import DEFAULT_SIGMA_GRID, FULL_TRIALS, run_benchmark, run_trial
from sdm.simulation import FAMILIES, SimConfig, apply_lag_single, gen_ar1, make_pair, make_rng

GRID = DEFAULT_SIGMA_GRID
N_STATES = 30


def _fmt_cells(cells):
    return ", ".join(f"{c.family}@{c.sigma_u:g}={c.mean_fe:.3f}" for c in cells)


def test_c1_fixed_lag_50_trials(grid_report, verdict):
    cells = [grid_report.cell("f5", s) for s in GRID]
    ok = all(c.trials == 50 and c.mean_fe < 0.15 for c in cells)
    verdict("C1a fixed-lag FE < 0.15 (50 trials)", ok, _fmt_cells(cells))
    assert ok


@pytest.mark.slow
def test_c1_fixed_lag_500_trials(verdict):
    rep = run_benchmark(["f5"], GRID, FULL_TRIALS, seed_base=0)
    cells = rep.cells
    ok = all(c.trials == FULL_TRIALS and c.mean_fe < 0.1 for c in cells)
    verdict("C1b fixed-lag FE < 0.1 (500 trials)", ok, _fmt_cells(cells))
    assert ok


def test_c2_rmse_tracks_noise(grid_report, verdict):
    problems = []
    cells = []
    for fam in FAMILIES:
        lo, hi = grid_report.cell(fam, 1.0), grid_report.cell(fam, 2.0)
        cells += [lo, hi]
        for c in (lo, hi):
            if not c.mean_fe <= 0.35:
                problems.append(f"{fam}@{c.sigma_u:g} FE {c.mean_fe:.3f} > 0.35")
        if not hi.mean_rmse > lo.mean_rmse:
            problems.append(f"{fam} RMSE not increasing")
    ok = not problems
    verdict("C2 FE <= 0.35 at sigma 1, 2 and RMSE increasing", ok,
            _fmt_cells(cells) + ("" if ok else " | " + "; ".join(problems)))
    assert ok, problems


def test_c3_low_noise_ordering(grid_report, verdict):
    f5, f1, f3 = (grid_report.cell(f, 0.25) for f in ("f5", "f1", "f3"))
    gap1 = 2 * max(f5.se_fe, f1.se_fe)
    gap2 = 2 * max(f1.se_fe, f3.se_fe)
    ok = f5.mean_fe <= f1.mean_fe + gap1 and f1.mean_fe <= f3.mean_fe + gap2
    verdict("C3 FE(f5) <= FE(f1) <= FE(f3) at sigma 0.25", ok,
            f"{f5.mean_fe:.3f} <= {f1.mean_fe:.3f} <= {f3.mean_fe:.3f} (2SE {gap1:.3f}, {gap2:.3f})")
    assert ok


def test_c4_lag_tracking(verdict):
    step_hits = []
    walk_err = []
    for seed in range(10):
        res = run_trial(SimConfig("f1", 600, 0.1, seed=seed))
        t = res.fit.t + 1
        keep = ~(((t > 200) & (t <= 230)) | ((t > 400) & (t <= 430)))
        step_hits.append(np.mean(res.argmax_lag()[keep] == res.lag_path[keep]))
        res = run_trial(SimConfig("f3", 600, 0.1, seed=seed))
        walk_err.append(np.mean(np.abs(res.argmax_lag() - res.lag_path)))
    ok = min(step_hits) >= 0.8 and max(walk_err) <= 3
    verdict("C4 lag tracking (f1 hit rate >= 0.8, f3 mean |err| <= 3)", ok,
            f"f1 min hit rate {min(step_hits):.3f}, f3 max mean |err| {max(walk_err):.2f} over 10 seeds")
    assert ok


def test_c5_invariant_suite(verdict):
    rng = np.random.default_rng(5)
    failures = []

    worst = 0.0
    floor_ok = True
    for k in range(100):
        fam = FAMILIES[k % 5]
        sigma = float(rng.choice(GRID))
        pair = make_pair(SimConfig(fam, 300, sigma, seed=10_000 + k))
        fit = run_filter(pair.x, pair.y, N_STATES)
        worst = max(worst, np.abs(fit.beliefs.sum(axis=1) - 1).max())
        floor_ok &= bool(fit.beliefs.min() >= FLOOR)
    if worst > 1e-9 or not floor_ok:
        failures.append(f"normalization {worst:.2e}")

    for _ in range(1000):
        h = rng.uniform(0, 2, rng.integers(1, 80)).tolist()
        s = sorted(h)
        n = len(s)
        brute = s[n // 2] if n % 2 else (s[n // 2 - 1] + s[n // 2]) / 2
        if estimate_theta(DiffusionEstimator(h)) != brute:
            failures.append("median oracle")
            break

    for _ in range(1000):
        lam = rng.uniform(0.01, 20)
        d1, d2 = np.sort(rng.uniform(0, 10, 2))
        if d1 < d2 and not ms.log_likelihood(d1, lam) > ms.log_likelihood(d2, lam):
            failures.append("likelihood monotonicity")
            break
        if d1 < d2 and lam * d2 < 700 and not ms.likelihood(d1, lam) > ms.likelihood(d2, lam):
            failures.append("likelihood monotonicity")
            break

    for _ in range(1000):
        n = int(rng.integers(2, 40))
        prior = rng.random(n) + FLOOR
        prior /= prior.sum()
        theta = float(rng.uniform(0, 2)) if rng.random() > 0.1 else 0.0
        total = predict(prior, theta).sum()
        if (theta == 0 and abs(total - 1) > 1e-12) or (theta > 0 and not total > 1):
            failures.append("mass inflation")
            break

    pair = make_pair(SimConfig("f3", 300, 0.4, seed=77))
    base = run_filter(pair.x, pair.y, N_STATES)
    for t in rng.integers(N_STATES + 1, 299, 20):
        y = pair.y.copy()
        y[t] += 5.0
        mut = run_filter(pair.x, y, N_STATES)
        if not np.array_equal(base.y_hat[base.t <= t], mut.y_hat[mut.t <= t]):
            failures.append("no-lookahead")
            break

    ok = not failures
    verdict("C5 invariant suite", ok,
            f"max |sum-1| {worst:.1e}; median, monotonicity, inflation, no-lookahead"
            + ("" if ok else " | failed: " + ", ".join(failures)))
    assert ok, failures


def test_c6_zero_noise_recovery(verdict):
    rmses = []
    all_five = True
    for seed in range(10):
        cfg = SimConfig("f5", 600, 0.01, seed=seed)
        res = run_trial(cfg)
        y = make_pair(cfg).y
        post = res.fit.t + 1 > 80
        e = res.fit.y_hat[post] - y[res.fit.t[post]]
        rmses.append(float(np.sqrt(np.mean(e**2))))
        all_five &= bool(np.all(res.argmax_lag()[post] == 5))
    ok = max(rmses) <= 0.1 and all_five
    verdict("C6 zero-noise recovery (t > 80)", ok,
            f"max RMSE {max(rmses):.4f}, argmax == 5 everywhere: {all_five}")
    assert ok


def test_c7_direction_detection(verdict):
    low_fwd, low_rev = [], []
    for seed in range(5):
        pair = make_pair(SimConfig("f5", 600, 0.25, seed=seed))
        fwd = run_filter(pair.x, pair.y, N_STATES, "bidirectional")
        rev = run_filter(pair.y, pair.x, N_STATES, "bidirectional")
        late = fwd.t + 1 > 100
        low_fwd.append(fwd.column_mass[late, 0].min())
        low_rev.append(rev.column_mass[late, 1].min())
    ok = min(low_fwd) >= 0.8 and min(low_rev) >= 0.8
    verdict("C7 bidirectional direction detection", ok,
            f"min x-leads mass {min(low_fwd):.4f}; swapped min y-leads mass {min(low_rev):.4f}")
    assert ok


def _sign_switch_pair(seed, length=600, switch=300, lag=5, sigma=0.25, warmup=50):
    rng = make_rng(seed)
    x = gen_ar1(length + warmup, rng=rng)
    shifted = apply_lag_single(x, np.full(length, lag), 0.0, start=warmup)
    sign = np.where(np.arange(1, length + 1) <= switch, 1.0, -1.0)
    return x[warmup:], sign * shifted + sigma * rng.standard_normal(length)


def test_c8_sign_regime_detection(verdict):
    delays, steady = [], []
    for seed in range(5):
        x, y = _sign_switch_pair(seed)
        fit = run_filter(x, y, N_STATES, "posneg")
        t = fit.t + 1
        m = fit.column_mass
        flipped = np.flatnonzero((t > 300) & (m[:, 1] > m[:, 0]))
        delays.append(int(t[flipped[0]] - 300) if flipped.size else 10**6)
        before = (t > N_STATES + 50) & (t <= 300)
        after = t > 350
        steady.append(min(m[before, 0].min(), m[after, 1].min()))
    ok = max(delays) <= 50 and min(steady) > 0.7
    verdict("C8 pos-neg regime detection", ok,
            f"max flip delay {max(delays)} steps, min steady dominant mass {min(steady):.4f}")
    assert ok
