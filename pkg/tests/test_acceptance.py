"""Acceptance suite: one test per release criterion, one PASS line each.

The heavier criteria share cached ensembles via module-scoped fixtures.
Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
report lines.
"""

import math

import numpy as np
import pytest

from mhsim.analysis import SampleSet, info_gain_table, information_gain
from mhsim.flow import ZERO_PROFILE, max_throughput
from mhsim.harness import (
    ExperimentConfig,
    collect_ensemble,
    combo_gains_for_setup,
    run_factor_sweep,
    run_gain_ensemble,
    run_partial_info,
)
from mhsim.parameters import compute_parameters
from mhsim.scheduler import ControlPlaneConfig, IpSampler, run_control_plane
from mhsim.strategy import enumerate_strategies
from mhsim.topology import assign_capacities, generate_waxman, sample_multihome_setup

from conftest import random_instance
from oracles import grid_search_total


def report(criterion: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


# ---------------------------------------------------------------- fixtures


@pytest.fixture(scope="module")
def evaluation_reps():
    """Ten independent evaluation ensembles at peak background load.

    Waxman n=1000 with the diurnal profile at hour 20; each repetition holds
    the per-setup strategy totals and parameter vectors.
    """
    reps = []
    for rep in range(10):
        cfg = ExperimentConfig(
            kind="info-gain",
            seed=20_000 + 1_000 * rep,
            ensemble=100,
            topology={"generator": "waxman", "n": 1000},
            profile={"preset": "diurnal", "jitter": 0.5},
            hour=20,
        )
        reps.append(collect_ensemble(cfg))
    return reps


# --------------------------------------------------------------- criteria


def test_criterion_01_golden_parameter_vector(
    golden_table, golden_strategy, golden_residuals
):
    vec = compute_parameters(golden_strategy, golden_table, golden_residuals)
    got = (vec.P, vec.E, vec.O, vec.B, vec.W, vec.BL1, vec.BL2, vec.BL3)
    want = (9, 7, 2, 2, 10.0, 1, 0, 1)
    report(1, got == want, f"worked-example vector {got} == {want}")


def test_criterion_02_strategy_space_size():
    count = len(enumerate_strategies(3, 5))
    report(2, count == 243, f"3 ISPs x 5 clients enumerates {count} strategies")


def test_criterion_03_gain_dominance(tmp_path):
    cfg = ExperimentConfig(
        kind="gain-ensemble",
        seed=30_000,
        ensemble=200,
        topology={"generator": "waxman", "n": 1000, "m_per_node": 2},
        profile=None,
    )
    out = run_gain_ensemble(cfg, str(tmp_path))
    gains = np.array([r["gain_percent"] for r in out["rows"]])
    ok = bool((gains >= 100.0).all()) and gains.mean() > 110.0
    report(
        3,
        ok,
        f"{len(gains)} setups: min gain {gains.min():.1f}%, mean {gains.mean():.1f}% > 110%",
    )


def test_criterion_04_factor_trends(tmp_path):
    hops_dir, deg_dir, bg_dir = tmp_path / "hops", tmp_path / "deg", tmp_path / "bg"
    for d in (hops_dir, deg_dir, bg_dir):
        d.mkdir()
    hops = run_factor_sweep(
        ExperimentConfig(
            kind="factor-sweep", factor="hops", seed=40_000, seeds_per_level=125,
            topology={"generator": "waxman"}, levels=(300, 700, 1500, 3000),
        ),
        str(hops_dir),
    )
    degree = run_factor_sweep(
        ExperimentConfig(
            kind="factor-sweep", factor="degree", seed=41_000, seeds_per_level=100,
            topology={"generator": "waxman", "n": 600}, levels=(2, 3, 4, 5, 6),
        ),
        str(deg_dir),
    )
    background = run_factor_sweep(
        ExperimentConfig(
            kind="factor-sweep", factor="background", seed=42_000, seeds_per_level=100,
            topology={"generator": "waxman", "n": 600},
        ),
        str(bg_dir),
    )
    rh, rd, rb = hops["spearman_rho"], degree["spearman_rho"], background["spearman_rho"]
    ok = rh < -0.5 and rd < -0.5 and rb > 0.5
    report(4, ok, f"spearman rho: hops {rh:.2f} < -0.5, degree {rd:.2f} < -0.5, "
                  f"background {rb:.2f} > 0.5")


def test_criterion_05_information_gain_ranking(evaluation_reps):
    firsts = 0
    tops = []
    for rep in evaluation_reps:
        records = []
        for setup in rep:
            for vec, tot in zip(setup["vectors"], setup["totals"]):
                records.append((vec, float(tot)))
        table = info_gain_table(SampleSet(tuple(records)))
        tops.append(table.top())
        firsts += table.top() == "W"
    report(5, firsts >= 8, f"W ranked first in {firsts}/10 repetitions (tops: {tops})")


def test_criterion_06_combination_effectiveness(evaluation_reps):
    excess = {"EOW": [], "baseline": []}
    for rep in evaluation_reps:
        for setup in rep:
            gains = combo_gains_for_setup(setup)
            excess["EOW"].append(gains["EOW"] - 1.0)
            excess["baseline"].append(gains["baseline"] - 1.0)
    mean_combo = float(np.mean(excess["EOW"]))
    mean_opt = float(np.mean(excess["baseline"]))
    ratio = mean_combo / mean_opt
    report(
        6,
        ratio >= 0.70,
        f"EOW mean excess {mean_combo:.3f} = {ratio:.2f} x optimal excess {mean_opt:.3f} "
        f"(need >= 0.70) over {len(excess['EOW'])} setups",
    )


def test_criterion_07_partial_information(tmp_path):
    cfg = ExperimentConfig(
        kind="partial-info",
        seed=70_000,
        ensemble=120,
        topology={"generator": "transit-stub", "num_as": 6, "nodes_per_as": 50},
        profile=None,
        combination="EOW",
    )
    out = run_partial_info(cfg, str(tmp_path))
    ratios = out["ratios"]
    fr = [ratios[("clients", f)] for f in (1.0, 0.8, 0.6, 0.4)]
    monotone = all(a >= b - 1e-9 for a, b in zip(fr, fr[1:]))
    cliff = ratios[("clients", 0.4)] < 0.20
    lc = ratios[("region", "L-C")]
    ls = ratios[("region", "L-S")]
    lsc = ratios[("region", "L-SC")]
    region_order = lc < ls and lc < lsc
    ok = monotone and cliff and region_order
    report(
        7,
        ok,
        f"client-fraction excess ratios {[f'{x:.2f}' for x in fr]} non-increasing={monotone}, "
        f"0.4 ratio {fr[-1]:.2f} < 0.20, regions L-C {lc:.2f} < L-S {ls:.2f} and L-SC {lsc:.2f} "
        f"({out['setups']} setups)",
    )


def test_criterion_08_allocation_oracle_equivalence():
    worst = 0.0
    checked = 0
    seed = 0
    while checked < 100:
        seed += 1
        rng = np.random.default_rng(80_000 + seed)
        num_clients = int(rng.integers(2, 5))
        num_isps = int(rng.integers(2, 4))
        try:
            topo, setup, table = random_instance(
                80_000 + seed, max_nodes=8, max_extra_links=4,
                num_isps=num_isps, num_clients=num_clients,
            )
        except Exception:
            continue
        assert topo.num_links <= 12
        strategy = tuple(int(x) for x in rng.integers(0, num_isps, size=num_clients))
        if not table.is_feasible(strategy):
            continue
        demands = tuple(
            0.06 * int(rng.integers(1, 9)) if rng.random() < 0.3 else math.inf
            for _ in range(num_clients)
        )
        sol = max_throughput(strategy, table, demands, topo.capacities())
        paths = [table.path(ci, fi).links for ci, fi in enumerate(strategy)]
        oracle = grid_search_total(paths, topo.capacities(), demands)
        worst = max(worst, abs(sol.total - oracle))
        checked += 1
    report(8, worst <= 0.02, f"{checked} instances, worst |lp - grid| = {worst:.6f} Gbps <= 0.02")


def test_criterion_09_information_gain_bounds(evaluation_reps):
    rep = evaluation_reps[0]
    records = []
    for setup in rep[:20]:
        for vec, tot in zip(setup["vectors"], setup["totals"]):
            records.append((vec, float(tot)))
    table = info_gain_table(SampleSet(tuple(records)))
    bounds_ok = all(-1e-12 <= g <= 1.0 + 1e-12 for g in table.gains.values())

    rng = np.random.default_rng(90_000)
    y = rng.random(10_000)
    deterministic = information_gain(y, y)
    permuted = information_gain(rng.permutation(y), y)
    ok = bounds_ok and deterministic == pytest.approx(1.0) and permuted < 0.05
    report(
        9,
        ok,
        f"all gains in [0,1]={bounds_ok}, deterministic I={deterministic:.3f}, "
        f"permuted control I={permuted:.4f} < 0.05",
    )


def test_criterion_10_control_plane_cadence():
    topo = assign_capacities(generate_waxman(200, 2, seed=100_001), seed=100_002)
    setup = sample_multihome_setup(topo, 3, 5, seed=100_003)
    trace = run_control_plane(
        ControlPlaneConfig(), topo, setup, ZERO_PROFILE,
        workload=1.0, duration_hours=24, seed=100_004,
    )
    cadence_ok = (
        len(trace.bottleneck_refreshes) == 30 and len(trace.topology_refreshes) == 1
    )
    sampler = IpSampler(0.6, seed=100_005)
    admitted = sum(sampler.offer(i) for i in range(1000))
    sampler_ok = 550 <= admitted <= 650
    report(
        10,
        cadence_ok and sampler_ok,
        f"{len(trace.bottleneck_refreshes)} bottleneck + {len(trace.topology_refreshes)} topology "
        f"refreshes in 24 h; sampler admitted {admitted}/1000 in [550, 650]",
    )
