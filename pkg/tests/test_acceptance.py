"""End-to-end acceptance checks.

Each test prints one ``criterion N: PASS|FAIL ...`` line (visible without -s)
and asserts the tolerance it pins.
"""
import math
import statistics
import time

import numpy as np
import pytest

from depthlab import pie, verify
from depthlab.agents import PlayerSpec
from depthlab.elo import LEVEL_RATIO, WinMatrix, depth_from_plc, elo_gap, plc_chain, plc_extremes
from depthlab.games import canonical_openings, get_geometry
from depthlab.harness import FREE, ExperimentConfig, free_opening_plc, play_match, run_experiment
from depthlab.rng import derive_seed


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok
    return emit


def per_call(fn, repeats=200):
    fn()
    t = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t) / repeats


def test_01_table3a_exact(report):
    t = pie.fixture("table3a")[0]
    rdr, pr = pie.w_rdr(t).w, pie.w_pr(t).w
    dt = per_call(lambda: (pie.w_rdr(t), pie.w_pr(t)))
    ok = abs(rdr - 0.95) <= 1e-12 and abs(pr - 0.90) <= 1e-12 and dt < 1e-3
    assert report(1, ok, f"w_rdr={rdr!r} w_pr={pr!r} ({dt * 1e6:.0f} us)")


def test_02_table3b_exact(report):
    t = pie.fixture("table3b")[0]
    rdr, pr = pie.w_rdr(t).w, pie.w_pr(t).w
    dt = per_call(lambda: (pie.w_rdr(t), pie.w_pr(t)))
    ok = abs(rdr - 0.50005) <= 1e-12 and abs(pr - 0.75) <= 1e-12 and dt < 1e-3
    assert report(2, ok, f"w_rdr={rdr!r} w_pr={pr!r} ({dt * 1e6:.0f} us)")


def test_03_table3c_plc(report):
    pool = pie.fixture("table3c")
    gfm = pie.plc_under_rule(pool, pie.GFM)
    pr = pie.plc_under_rule(pool, pie.PR)
    dt = per_call(lambda: (pie.plc_under_rule(pool, pie.GFM), pie.plc_under_rule(pool, pie.PR)))
    a, b = gfm.per_index
    # the pool lists the weaker pair first, so gaps read (pair 2-3, pair 1-2)
    ok = (abs(a.gaps[1] - 636.43) <= 0.05 and abs(a.gaps[0] - 13.91) <= 0.05
          and abs(b.gaps[1] - 275.45) <= 0.05 and abs(b.gaps[0] - 251.89) <= 0.05
          and a.plc < 651 and b.plc < 651
          and abs(pr.gaps[1] - 530.72) <= 0.05 and min(abs(pr.gaps[0] - 126.96), abs(pr.gaps[0] - 126.97)) <= 0.05
          and pr.plc > 657 and dt < 1e-3)
    assert report(3, ok, f"GFM-A {a.gaps[1]:.3f}/{a.gaps[0]:.3f} plc {a.plc:.2f}; GFM-B {b.gaps[1]:.3f}/"
                         f"{b.gaps[0]:.3f} plc {b.plc:.2f}; PR {pr.gaps[1]:.3f}/{pr.gaps[0]:.3f} plc {pr.plc:.2f}"
                         f" ({dt * 1e6:.0f} us)")


def test_04_level_ratio(report):
    d1, d2 = depth_from_plc(270.73)[0], depth_from_plc(323.95)[0]
    dt = per_call(lambda: (elo_gap(0.6), depth_from_plc(270.73)))
    ok = (abs(elo_gap(0.6) - 70.437) <= 1e-3 and abs(LEVEL_RATIO - 70.437) <= 1e-3
          and abs(d1 - 3.84) <= 0.01 and abs(d2 - 4.60) <= 0.01 and dt < 1e-3)
    assert report(4, ok, f"ratio {LEVEL_RATIO:.4f}, depths {d1:.4f} and {d2:.4f}")


def test_05_theorem1(report):
    t = time.perf_counter()
    res = verify.theorem1(100_000, 7)
    dt = time.perf_counter() - t
    ok = res.ok and res.checked == 100_000 and dt < 5
    assert report(5, ok, f"{res.checked} random tables, {len(res.failures)} violations, {dt:.2f} s")


def test_06_counterexample_search(report):
    t = time.perf_counter()
    three = pie.search_pr_superiority(3, 2, 10_000, seed=42)
    two = pie.search_pr_superiority(2, 2, 100_000, seed=42)
    dt = time.perf_counter() - t
    ok = len(three) >= 1 and len(two) == 0 and dt < 30
    assert report(6, ok, f"{len(three)} hits in 3-player pools, {len(two)} in pairs, {dt:.1f} s")


def test_07_opening_counts(report):
    get_geometry.cache_clear()
    t = time.perf_counter()
    counts = [len(canonical_openings("nogo", n)) for n in (5, 6, 7)]
    cold = time.perf_counter() - t
    warm = per_call(lambda: [canonical_openings("nogo", n) for n in (5, 6, 7)])
    ok = counts == [6, 6, 10] and warm < 1e-3
    assert report(7, ok, f"counts {counts} ({warm * 1e6:.0f} us per call, {cold * 1e3:.1f} ms cold)")


def test_08_y_soundness(report):
    t = time.perf_counter()
    exhaustive = [verify.nodraws("y", n) for n in (1, 2, 3)]
    random5 = verify.nodraws("y", 5, 10_000, seed=5)
    dt = time.perf_counter() - t
    ok = all(r.ok and "exhaustive" in r.name for r in exhaustive) and random5.ok and random5.checked == 10_000 \
        and dt < 60
    leaves = sum(r.checked for r in exhaustive)
    assert report(8, ok, f"{leaves} exhaustive leaves, {random5.checked} size-5 playouts, {dt:.1f} s")


def wilson_lower(wins, n, confidence=0.95):
    z = statistics.NormalDist().inv_cdf(confidence)
    p = wins / n
    centre = p + z * z / (2 * n)
    spread = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return (centre - spread) / (1 + z * z / n)


@pytest.mark.slow
def test_09_ladder_monotonicity(report):
    strong, weak = PlayerSpec("mcts", 1000), PlayerSpec("mcts", 125)
    t = time.perf_counter()
    wins = 0
    for k in range(200):
        black, white = (strong, weak) if k % 2 == 0 else (weak, strong)
        rec = play_match("nogo", 5, black, white, None, derive_seed(9, k), pair=(strong.label, weak.label))
        wins += rec.strong_won()
    dt = time.perf_counter() - t
    lower = wilson_lower(wins, 200)
    ok = lower >= 0.6 and dt < 600
    assert report(9, ok, f"mcts-1000 won {wins}/200, one-sided 95% lower bound {lower:.3f}, {dt:.0f} s")


def test_10_eq1_eq2(report):
    rng = np.random.Generator(np.random.PCG64(10))
    worst = 0.0
    for _ in range(500):
        ratings = np.sort(rng.uniform(0, 1500, int(rng.integers(2, 9))))[::-1].tolist()
        m = WinMatrix.from_ratings(ratings)
        eq1 = plc_chain(m).plc
        eq2 = plc_extremes(m.p[0][m.n - 1])
        worst = max(worst, abs(eq1 - eq2))
    c = ExperimentConfig("nogo", 5, [PlayerSpec("mcts", b) for b in (16, 64, 256)], games_per_cell=30,
                         master_seed=10, rules=[FREE], bootstrap_resamples=200)
    row = free_opening_plc(c).row(FREE)
    ok = worst <= 1e-6 and math.isfinite(row.plc_eq1) and math.isfinite(row.plc_eq2)
    assert report(10, ok, f"exact-Elo max |Eq1-Eq2| = {worst:.2e}; empirical NoGo 5x5 run: Eq1 {row.plc_eq1:.1f}, "
                          f"Eq2 {row.plc_eq2:.1f} (difference {row.plc_eq1 - row.plc_eq2:+.1f})")


@pytest.mark.slow
def test_11_board_size_trend_and_determinism(report, tmp_path):
    pool = [PlayerSpec("mcts", b) for b in (4, 16, 64)]
    reports = {}
    for size in (5, 6):
        c = ExperimentConfig("nogo", size, pool, games_per_cell=20, master_seed=11, rules=[pie.PR],
                             out=str(tmp_path / f"n{size}"), bootstrap_resamples=200)
        reports[size] = run_experiment(c)
    r5, r6 = reports[5].row("RDR+PR"), reports[6].row("RDR+PR")
    trend = r6.plc_eq1 > r5.plc_eq1 or (r5.ci_low <= r6.ci_high and r6.ci_low <= r5.ci_high)

    again = run_experiment(ExperimentConfig("nogo", 5, pool, games_per_cell=20, master_seed=11, rules=[pie.PR],
                                            out=str(tmp_path / "again"), bootstrap_resamples=200))
    replays = [verify.replay_log(tmp_path / d / "matches.jsonl") for d in ("n5", "n6")]
    deterministic = again.to_csv() == reports[5].to_csv() and \
        (tmp_path / "again" / "summary.csv").read_bytes() == (tmp_path / "n5" / "summary.csv").read_bytes()
    replay_ok = all(r.ok for r in replays)
    detail = (f"PR PLC 5x5 {r5.plc_eq1:.1f} [{r5.ci_low:.1f}, {r5.ci_high:.1f}], 6x6 {r6.plc_eq1:.1f} "
              f"[{r6.ci_low:.1f}, {r6.ci_high:.1f}], trend {'consistent' if trend else 'NOT consistent (reported only)'}; "
              f"rerun identical: {deterministic}; replay: {sum(r.checked for r in replays)} games, "
              f"{sum(len(r.failures) for r in replays)} mismatches")
    # the size trend is reported, not enforced
    assert report(11, deterministic and replay_ok, detail)
