"""Acceptance suite: one numbered check per exit criterion, each printing a
PASS/FAIL line (run with ``pytest -s`` to see them streamed).

The precision-band fixture runs the full reference experiment (nine
functions, two schedules, twenty runs each at population 100, dimension
50, 1000 iterations) and takes several minutes.
"""

import statistics
import time
import warnings

import numpy as np
import pytest

from sso.benchmarks import make_function
from sso.core import SsoParams, _compose_update, initialize, run_sequential
from sso.harness import (
    ExperimentConfig,
    compute_speedup,
    read_records,
    run_experiment,
    write_records,
)
from sso.parallel import (
    LayoutMode,
    convert_layout,
    evaluate_phase,
    run_parallel,
    search_phase,
    update_gbest_phase,
    update_pbests_phase,
)
from sso.records import RunRecord, ScheduleKind
from sso.rng import RngStream, SubStream
from sso.stats import (
    friedman,
    kruskal_wallis,
    normality,
    t_test_independent,
    variance_homogeneity,
)
from test_stats import CHI2_TABLE, F_TABLE, T_TABLE, chi_square_sf, f_sf, t_sf

DEFAULTS = dict(cw=0.3, cp=0.6, cg=0.8)


def check(criterion: str, ok: bool, detail: str) -> None:
    print(f"[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def make_params(fn, nsol, nvar, niter):
    return SsoParams(var_min=fn.var_min, var_max=fn.var_max,
                     nsol=nsol, nvar=nvar, niter=niter, **DEFAULTS)


# -- criterion 1 -------------------------------------------------------------


def test_criterion_1_worker_invariance_and_budget():
    fn = make_function("f1", 50)
    params = make_params(fn, nsol=100, nvar=50, niter=200)
    start = time.perf_counter()
    records = {w: run_parallel(params, fn, seed=20260810, workers=w)
               for w in (1, 2, 4, 8)}
    elapsed = time.perf_counter() - start
    base = records[1]
    identical = all(
        rec.best_fitness == base.best_fitness
        and np.array_equal(rec.best_position, base.best_position)
        for rec in records.values()
    )
    check("1", identical and elapsed < 30.0,
          f"bit-identical across workers 1/2/4/8: {identical}; "
          f"total runtime {elapsed:.1f}s (< 30s)")


# -- criterion 2 -------------------------------------------------------------


def test_criterion_2_schedule_coincidence_single_particle():
    mismatches = []
    for fid in ("f1", "f4"):
        fn = make_function(fid, 50)
        params = make_params(fn, nsol=1, nvar=50, niter=200)
        for seed in range(10):
            seq = run_sequential(params, fn, seed)
            par = run_parallel(params, fn, seed)
            if not (np.array_equal(seq.trajectory, par.trajectory)
                    and np.array_equal(seq.best_position, par.best_position)):
                mismatches.append((fid, seed))
    check("2", not mismatches,
          f"sequential == parallel at nsol=1 for 10 seeds on f1 and f4 "
          f"(mismatches: {mismatches})")


# -- criterion 3 -------------------------------------------------------------


def test_criterion_3_branch_law():
    params = SsoParams(var_min=0.0, var_max=1.0, nsol=1000, nvar=1000, niter=1,
                       **DEFAULTS)
    u = RngStream(3).matrix(SubStream.BRANCH, 0, 0, 1000, 1000)
    sentinels = [np.full_like(u, v) for v in (0.0, 1.0, 2.0, 3.0)]
    taken = _compose_update(u, sentinels[3], sentinels[0], sentinels[1],
                            sentinels[2][0], params)
    freq = np.array([(taken == v).mean() for v in (0.0, 1.0, 2.0, 3.0)])
    target = np.array([0.30, 0.30, 0.20, 0.20])
    worst = np.abs(freq - target).max()
    check("3", worst <= 0.003,
          f"branch frequencies {np.round(freq, 4).tolist()} within "
          f"0.003 of {target.tolist()} over 10^6 draws (worst |dev| {worst:.5f})")


# -- criterion 4 -------------------------------------------------------------


def test_criterion_4_benchmark_reference_values():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # f8 at 50 evaluates 12 complete groups
        cases = [
            ("f1", np.zeros(50), 0.0), ("f2", np.zeros(50), 0.0),
            ("f3", np.zeros(50), 0.0), ("f4", np.ones(50), 0.0),
            ("f5", np.zeros(50), 0.0), ("f6", np.zeros(50), 0.0),
            ("f7", np.zeros(50), 0.0), ("f8", np.zeros(50), 0.0),
            ("f9", np.zeros(50), 20949.145),
        ]
        errors = {fid: abs(float(make_function(fid, 50)(point)) - expected)
                  for fid, point, expected in cases}
    worst = max(errors.values())
    check("4", worst <= 1e-9,
          f"all nine reference evaluations within 1e-9 (worst {worst:.2e})")


# -- criterion 5 -------------------------------------------------------------


@pytest.fixture(scope="module")
def precision_report():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # f8 at dimension 50 truncates
        functions = [make_function(fid, 50) for fid in
                     ("f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9")]
        config = ExperimentConfig(
            functions=functions,
            schedules=[ScheduleKind.SEQUENTIAL, ScheduleKind.PARALLEL],
            replications=20, base_seed=0, nsol=100, nvar=50, niter=1000,
        )
        return run_experiment(config)


def _cell_means(report):
    means = {}
    for row in report.summaries:
        means[(row.function, row.schedule)] = row.mean
    return means


# reference study's accelerated-schedule column: f1/f5/f6 banded at +-50%,
# f9 at +-60 absolute.  Note the f9 target is below the analytic floor of the
# implemented (as-printed) function, ~20752.02 at dimension 50, so only
# [floor, 20768.05] of its band is attainable at all; see the README's
# known-failures note.
BANDS = {
    "f1": (41.0156 * 0.5, 41.0156 * 1.5),
    "f5": (220.6183 * 0.5, 220.6183 * 1.5),
    "f6": (15.2896 * 0.5, 15.2896 * 1.5),
    "f9": (20708.0471 - 60.0, 20708.0471 + 60.0),
}


@pytest.mark.parametrize("fid", ["f1", "f5", "f6", "f9"])
def test_criterion_5_precision_band(precision_report, fid):
    lo, hi = BANDS[fid]
    mean = _cell_means(precision_report)[(fid, ScheduleKind.PARALLEL)]
    check("5", lo <= mean <= hi,
          f"{fid} parallel mean best fitness {mean:.4f} in [{lo:.4f}, {hi:.4f}]")


def test_criterion_5_schedule_direction(precision_report):
    means = _cell_means(precision_report)
    functions = sorted({fn for fn, _ in means})
    wins = [fn for fn in functions
            if means[(fn, ScheduleKind.PARALLEL)] <= means[(fn, ScheduleKind.SEQUENTIAL)]]
    check("5", len(wins) >= 6,
          f"parallel mean <= sequential mean on {len(wins)}/9 functions "
          f"(need >= 6): {wins}")


def test_sequential_f1_tracks_reference_vicinity(precision_report):
    # supplementary regression band, not a numbered criterion: the sequential
    # f1 mean should sit near the reference 54.9497 +- 7.4781 study column
    mean = _cell_means(precision_report)[("f1", ScheduleKind.SEQUENTIAL)]
    assert abs(mean - 54.9497) <= 2 * 7.4781, mean


# -- criterion 6 -------------------------------------------------------------

# reference per-run wall times (seconds), twenty runs per population size
REFERENCE_TIMES_A = {
    100: [49.063, 49.073, 48.418, 47.88, 47.758, 48.389, 49.176, 48.248, 48.212,
          50.346, 49.061, 49.662, 49.306, 49.547, 48.484, 48.968, 48.827, 48.903,
          47.779, 49.426],
    200: [191.183, 189.712, 190.58, 192.824, 192.861, 191.056, 188.301, 190.205,
          189.323, 189.678, 192.337, 194.05, 195.631, 192.663, 197.172, 196.5,
          195.68, 197.722, 196.185, 198.394],
    300: [437.161, 439.999, 440.908, 437.476, 428.533, 434.753, 434.557, 431.854,
          435.387, 432.782, 432.366, 427.215, 429.057, 433.167, 435.056, 432.65,
          439.168, 436.881, 439.258, 438.808],
    350: [564.453, 562.614, 565.67, 563.651, 563.799, 565.119, 571.929, 575.904,
          568.348, 582.892, 583.594, 607.547, 601.964, 598.993, 599.659, 598.553,
          604.617, 591.776, 594.146, 589.143],
}
REFERENCE_TIMES_B = {
    100: [0.15, 0.139, 0.139, 0.138, 0.138, 0.139, 0.141, 0.136, 0.137, 0.136,
          0.137, 0.136, 0.137, 0.143, 0.144, 0.135, 0.14, 0.135, 0.134, 0.141],
    200: [0.166, 0.152, 0.144, 0.144, 0.142, 0.143, 0.148, 0.154, 0.159, 0.146,
          0.173, 0.168, 0.153, 0.152, 0.151, 0.16, 0.168, 0.158, 0.15, 0.149],
    300: [0.18, 0.174, 0.162, 0.169, 0.156, 0.167, 0.157, 0.16, 0.161, 0.166,
          0.166, 0.162, 0.163, 0.162, 0.166, 0.165, 0.165, 0.158, 0.158, 0.159],
    350: [0.19, 0.167, 0.166, 0.174, 0.161, 0.172, 0.16, 0.169, 0.17, 0.165,
          0.165, 0.172, 0.169, 0.177, 0.161, 0.177, 0.169, 0.166, 0.17, 0.17],
}
EXPECTED_RE = {100: 164.2206, 200: 585.1602, 300: 1238.8940, 350: 1604.3382}


def test_criterion_6_rectified_efficiency_arithmetic():
    deviations = {}
    for nsol, expected in EXPECTED_RE.items():
        report = compute_speedup(REFERENCE_TIMES_A[nsol], REFERENCE_TIMES_B[nsol],
                                 power_a=84.0, power_b=180.0, nsol=nsol)
        deviations[nsol] = abs(report.rectified_efficiency - expected)
    worst = max(deviations.values())
    check("6", worst <= 0.01,
          f"all four rectified-efficiency values reproduced to +-0.01 "
          f"(worst |dev| {worst:.4f})")


# -- criterion 7 -------------------------------------------------------------


def test_criterion_7_hand_derived_statistics():
    checks = [
        ("kruskal-wallis", kruskal_wallis([[1, 2], [3, 4], [5, 6]]).statistic, 32.0 / 7.0),
        ("friedman", friedman([[1, 2], [3, 9], [0, 4]]).statistic, 3.0),
        ("bartlett", variance_homogeneity([[1, 2, 3, 4], [10, 20, 30, 40]],
                                          "bartlett").statistic, 8.3282823940488092),
        ("levene", variance_homogeneity([[1, 2, 3, 4], [10, 20, 30, 40]],
                                        "levene-mean").statistic, 972.0 / 101.0),
        ("ttest", t_test_independent([1, 2, 3], [4, 5, 6]).statistic,
         -3.0 / np.sqrt(2.0 / 3.0)),
    ]
    worst = max(abs(got - want) for _, got, want in checks)
    check("7", worst <= 1e-8,
          f"five hand-derived statistics reproduced to 1e-8 (worst |dev| {worst:.2e})")


def test_criterion_7_tail_probability_tables():
    deviations = (
        [abs(chi_square_sf(x, df) - a) for a, x, df in CHI2_TABLE]
        + [abs(t_sf(x, df) - a) for a, x, df in T_TABLE]
        + [abs(f_sf(x, d1, d2) - a) for a, x, d1, d2 in F_TABLE]
    )
    check("7", len(deviations) >= 20 and max(deviations) <= 1e-4,
          f"{len(deviations)} published critical values matched to 1e-4 "
          f"(worst |dev| {max(deviations):.2e})")


def _rejection_rate(run_trial, trials=1000, alpha=0.05):
    hits = sum(run_trial(np.random.default_rng(50_000 + t)).p_value < alpha
               for t in range(trials))
    return hits / trials


def test_criterion_7_null_calibration():
    rates = {
        "kruskal-wallis": _rejection_rate(
            lambda r: kruskal_wallis([r.normal(size=25) for _ in range(3)])),
        "friedman": _rejection_rate(lambda r: friedman(r.normal(size=(20, 3)))),
        "bartlett": _rejection_rate(
            lambda r: variance_homogeneity([r.normal(size=25) for _ in range(3)],
                                           "bartlett")),
        "levene": _rejection_rate(
            lambda r: variance_homogeneity([r.normal(size=25) for _ in range(3)],
                                           "levene-mean")),
        "ttest": _rejection_rate(
            lambda r: t_test_independent(r.normal(size=25), r.normal(size=25))),
        "normality": _rejection_rate(lambda r: normality(r.normal(size=60))),
    }
    ok = all(0.03 <= rate <= 0.07 for rate in rates.values())
    check("7", ok, f"null rejection rates at alpha=0.05 over 1000 trials "
                   f"all in [0.03, 0.07]: {rates}")


# -- criterion 8 -------------------------------------------------------------


def test_criterion_8_scaling_direction():
    # calibrated for >= 4 physical cores, but the phased engine's advantage
    # is vectorization, so the ratio ordering is stable on smaller machines too
    fn = make_function("f4", 50)

    def median_time(schedule, nsol, trials=5):
        params = make_params(fn, nsol=nsol, nvar=50, niter=200)
        times = []
        for seed in range(trials):
            if schedule is ScheduleKind.SEQUENTIAL:
                times.append(run_sequential(params, fn, seed).wall_time_s)
            else:
                times.append(run_parallel(params, fn, seed, workers=4).wall_time_s)
        return statistics.median(times)

    seq_ratio = (median_time(ScheduleKind.SEQUENTIAL, 350)
                 / median_time(ScheduleKind.SEQUENTIAL, 100))
    par_ratio = (median_time(ScheduleKind.PARALLEL, 350)
                 / median_time(ScheduleKind.PARALLEL, 100))
    check("8", par_ratio < seq_ratio,
          f"wall-time ratio 350/100 on f4: parallel {par_ratio:.3f} < "
          f"sequential {seq_ratio:.3f}")


# -- criterion 9 -------------------------------------------------------------


def test_criterion_9_property_battery(tmp_path):
    fn = make_function("f5", 20)
    params = make_params(fn, nsol=15, nvar=20, niter=40)

    # monotone global best, personal-best dominance, bounds closure
    rng = RngStream(99)
    swarm = initialize(params, fn, rng)
    g_prev = swarm.g_f
    dynamics_ok = True
    for t in range(params.niter):
        search_phase(swarm, params, rng, t)
        evaluate_phase(swarm, fn, t)
        update_pbests_phase(swarm)
        update_gbest_phase(swarm)
        dynamics_ok &= bool(np.all(swarm.p_f <= swarm.sol_f))
        dynamics_ok &= bool(np.all(swarm.g_f <= swarm.p_f))
        dynamics_ok &= swarm.g_f <= g_prev
        dynamics_ok &= swarm.sol.min() >= params.var_min
        dynamics_ok &= swarm.sol.max() <= params.var_max
        g_prev = swarm.g_f
    seq = run_sequential(params, fn, seed=7)
    dynamics_ok &= bool((np.diff(seq.trajectory) <= 0).all())

    # layout round trip
    matrix = np.random.default_rng(1).normal(size=(7, 5))
    round_trip = convert_layout(
        convert_layout(matrix, LayoutMode.PARTICLE_MAJOR, LayoutMode.INTERLEAVED),
        LayoutMode.INTERLEAVED, LayoutMode.PARTICLE_MAJOR)
    layout_ok = np.array_equal(round_trip, matrix)

    # rank invariance under strictly increasing transforms
    groups = [[3, 1, 4], [1, 5, 9], [2, 6, 5]]
    moved = [[2.0 * v + 1.0 for v in g] for g in groups]
    rank_ok = (kruskal_wallis(groups).statistic == kruskal_wallis(moved).statistic
               and friedman(groups).statistic == friedman(moved).statistic)

    # CSV round trip
    records = [RunRecord(i, ScheduleKind.PARALLEL, "f5", 15, 20, 40,
                         0.3, 0.6, 0.8, i, float(i) / 3.0, 0.25)
               for i in range(5)]
    path = tmp_path / "round.csv"
    write_records(records, path)
    csv_ok = read_records(path) == records

    check("9", dynamics_ok and layout_ok and rank_ok and csv_ok,
          f"dynamics invariants {dynamics_ok}, layout round-trip {layout_ok}, "
          f"rank invariance {rank_ok}, CSV round-trip {csv_ok}")
