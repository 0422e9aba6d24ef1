"""Experiment orchestration: ensembles, factor sweeps, and CSV reports.

Every experiment is described by a JSON config (see README for the schema)
and produces one or more CSV files whose contents are a pure function of the
config and its seeds.  Ensemble members are independent, so they are
evaluated across processes and merged back in seed order.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.stats import spearmanr

from . import flow, parameters, routing, scheduler, strategy, topology
from .errors import (
    BaselineError,
    NoFeasibleStrategyError,
    ParameterError,
    UndefinedGainError,
)

FRACTION_LEVELS = (1.0, 0.8, 0.6, 0.4)
REGION_LEVELS = (
    parameters.REGION_ALL,
    parameters.REGION_SERVER,
    parameters.REGION_CLIENT,
    parameters.REGION_ENDS,
)
EXPERIMENT_KINDS = (
    "gain-ensemble",
    "factor-sweep",
    "info-gain",
    "combo-eval",
    "partial-info",
    "runtime",
)
DEFAULT_HOP_SIZES = (300, 700, 1500, 3000)
DEFAULT_DEGREE_LEVELS = (2, 3, 4, 5, 6)
DEFAULT_BACKGROUND_LEVELS = (0.0, 0.2, 0.4, 0.6, 0.8)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int = 1
    ensemble: int = 200
    topology: dict[str, Any] = field(default_factory=lambda: {"generator": "waxman", "n": 1000})
    setup: dict[str, Any] = field(default_factory=dict)
    profile: dict[str, Any] | None = None
    hour: int = 20
    factor: str | None = None
    levels: tuple[Any, ...] | None = None
    seeds_per_level: int = 100
    combination: str = "EOW"
    fractions: tuple[float, ...] = FRACTION_LEVELS
    regions: tuple[str, ...] = REGION_LEVELS
    control: dict[str, Any] = field(default_factory=dict)
    workload: Any = 2.0
    hours: int = 24
    workers: int | None = None

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ParameterError(f"config field 'kind' must be one of {EXPERIMENT_KINDS}, got {self.kind!r}")
        if self.ensemble < 1:
            raise ParameterError("config field 'ensemble' must be >= 1")
        if self.kind == "factor-sweep" and self.factor not in ("hops", "degree", "background"):
            raise ParameterError("config field 'factor' must be hops, degree, or background")

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            raw = json.load(fh)
        for key in ("levels", "fractions", "regions"):
            if key in raw and raw[key] is not None:
                raw[key] = tuple(raw[key])
        return cls(**raw)


def _build_profile(spec: dict[str, Any] | None, setup_seed: int) -> flow.BackgroundProfile:
    """Materialise a profile spec; jitter draws vary with the setup seed."""
    if spec is None:
        return flow.ZERO_PROFILE
    if spec.get("preset") == "diurnal":
        return flow.diurnal_profile(jitter=spec.get("jitter", 0.5), seed=spec.get("seed", 0) + setup_seed)
    return flow.BackgroundProfile(
        hourly_load=tuple(spec["hourly_load"]),
        per_link_jitter=spec.get("per_link_jitter", 0.0),
        seed=spec.get("seed", 0) + setup_seed,
    )


def build_topology(spec: dict[str, Any], seed: int) -> topology.Topology:
    if "file" in spec:
        return topology.load_topology(spec["file"])
    gen = spec.get("generator", "waxman")
    if gen == "waxman":
        topo = topology.generate_waxman(
            n=spec.get("n", 1000),
            m_per_node=spec.get("m_per_node", 2),
            alpha=spec.get("alpha", topology.WAXMAN_ALPHA),
            beta=spec.get("beta", topology.WAXMAN_BETA),
            seed=seed,
        )
    elif gen == "transit-stub":
        topo = topology.generate_transit_stub(
            num_as=spec.get("num_as", 6),
            nodes_per_as=spec.get("nodes_per_as", 50),
            seed=seed,
            m_per_node=spec.get("m_per_node", 2),
        )
    else:
        raise ParameterError(f"config field 'topology.generator' unknown: {gen!r}")
    return topology.assign_capacities(
        topo,
        low=spec.get("capacity_low", topology.CAPACITY_LOW),
        high=spec.get("capacity_high", topology.CAPACITY_HIGH),
        shape=spec.get("capacity_shape", topology.CAPACITY_SHAPE),
        seed=seed + 7_777,
    )


def build_instance(
    topo_spec: dict[str, Any], setup_spec: dict[str, Any], seed: int
) -> tuple[topology.Topology, topology.MultihomeSetup, routing.PathTable]:
    topo = build_topology(topo_spec, seed)
    demands = setup_spec.get("demands", "unbounded")
    demand_value = math.inf if demands == "unbounded" else float(demands)
    setup = topology.sample_multihome_setup(
        topo,
        num_isps=setup_spec.get("num_isps", 3),
        num_clients=setup_spec.get("num_clients", 5),
        seed=seed + 999,
        demands=demand_value,
    )
    return topo, setup, routing.build_path_table(topo, setup)


# ---------------------------------------------------------------------------
# per-setup workers (module level so they pickle for ProcessPoolExecutor)


def _gain_worker(args: tuple[dict, dict, dict | None, int, int]) -> dict | None:
    topo_spec, setup_spec, profile_spec, hour, seed = args
    topo, setup, table = build_instance(topo_spec, setup_spec, seed)
    profile = _build_profile(profile_spec, seed)
    residuals = flow.residual_vector(topo, hour, profile)
    try:
        report = strategy.optimal_strategy(setup, table, residuals)
    except (BaselineError, NoFeasibleStrategyError, UndefinedGainError):
        return None  # degenerate setup: skip, the row count reports attrition
    n, m, h = routing.setup_stats(topo, setup, table)
    return {
        "seed": seed,
        "n": n,
        "m": m,
        "h": h,
        "static_total": report.static_total,
        "optimal_total": report.optimal_total,
        "gain_percent": 100.0 * report.gain,
        "optimal_strategy": strategy.strategy_to_letters(report.optimal_strategy),
    }


def _ensemble_worker(args: tuple[dict, dict, dict | None, int, int]) -> dict | None:
    """Full per-setup evaluation: totals and parameter vectors per strategy."""
    topo_spec, setup_spec, profile_spec, hour, seed = args
    topo, setup, table = build_instance(topo_spec, setup_spec, seed)
    profile = _build_profile(profile_spec, seed)
    residuals = flow.residual_vector(topo, hour, profile)
    feasible, totals = strategy.score_all_strategies(setup, table, residuals)
    if setup.static_strategy not in feasible:
        return None
    static_total = float(totals[feasible.index(setup.static_strategy)])
    if static_total <= 0:
        return None
    vectors = parameters.build_param_table(feasible, table, residuals)
    return {
        "seed": seed,
        "strategies": feasible,
        "totals": totals,
        "static_total": static_total,
        "vectors": vectors,
    }


def _map_seeds(worker, argses: list, workers: int | None) -> list:
    max_workers = workers if workers is not None else min(os.cpu_count() or 1, 8)
    if max_workers <= 1 or len(argses) <= 1:
        return [worker(a) for a in argses]
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(worker, argses, chunksize=max(1, len(argses) // (4 * max_workers))))


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


# ---------------------------------------------------------------------------
# experiment kinds


def run_gain_ensemble(cfg: ExperimentConfig, out_dir: str) -> dict[str, Any]:
    argses = [
        (cfg.topology, cfg.setup, cfg.profile, cfg.hour, cfg.seed + i)
        for i in range(cfg.ensemble)
    ]
    rows = [r for r in _map_seeds(_gain_worker, argses, cfg.workers) if r is not None]
    header = ["seed", "n", "m", "h", "static_total", "optimal_total", "gain_percent", "optimal_strategy"]
    _write_csv(os.path.join(out_dir, "gains.csv"), header, [[r[c] for c in header] for r in rows])
    gains = np.array([r["gain_percent"] for r in rows])
    summary = {
        "count": len(rows),
        "mean_gain_percent": float(gains.mean()),
        "median_gain_percent": float(np.median(gains)),
        "std_gain_percent": float(gains.std()),
        "min_gain_percent": float(gains.min()),
    }
    _write_csv(
        os.path.join(out_dir, "gains_summary.csv"),
        list(summary),
        [[summary[k] for k in summary]],
    )
    return {"rows": rows, "summary": summary}


def _sweep_points(cfg: ExperimentConfig) -> list[tuple[Any, dict, dict | None, int]]:
    """(level, topo spec, profile spec, seed) points for one factor sweep."""
    points = []
    seeds = [cfg.seed + i for i in range(cfg.seeds_per_level)]
    base_topo = dict(cfg.topology)
    if cfg.factor == "hops":
        sizes = cfg.levels or DEFAULT_HOP_SIZES
        for size in sizes:
            spec = dict(base_topo)
            spec["n"] = int(size)
            for s in seeds:
                points.append((int(size), spec, cfg.profile, s))
    elif cfg.factor == "degree":
        levels = cfg.levels or DEFAULT_DEGREE_LEVELS
        base_topo.setdefault("n", 600)
        for m in levels:
            spec = dict(base_topo)
            spec["m_per_node"] = int(m)
            for s in seeds:
                points.append((int(m), spec, cfg.profile, s))
    else:  # background
        levels = cfg.levels or DEFAULT_BACKGROUND_LEVELS
        base_topo.setdefault("n", 600)
        jitter = (cfg.profile or {}).get("per_link_jitter", 0.5)
        for level in levels:
            prof = {"hourly_load": [float(level)] * 24, "per_link_jitter": jitter, "seed": 0}
            for s in seeds:
                points.append((float(level), base_topo, prof, s))
    return points


def run_factor_sweep(cfg: ExperimentConfig, out_dir: str) -> dict[str, Any]:
    points = _sweep_points(cfg)
    argses = [(spec, cfg.setup, prof, cfg.hour, seed) for _, spec, prof, seed in points]
    results = _map_seeds(_gain_worker, argses, cfg.workers)
    rows = []
    for (level, _, _, seed), res in zip(points, results):
        if res is None:
            continue
        rows.append([cfg.factor, level, seed, res["h"], res["n"], res["gain_percent"]])
    _write_csv(
        os.path.join(out_dir, "factor_sweep.csv"),
        ["factor", "level", "seed", "h", "n", "gain_percent"],
        rows,
    )
    if cfg.factor == "hops":
        # report axis is the measured hop bucket, pooled over the size mix
        buckets = _hop_buckets(rows)
    else:
        buckets = {}
        for row in rows:
            buckets.setdefault(row[1], []).append(row[5])
    levels_sorted = sorted(buckets)
    mean_gain = [float(np.mean(buckets[lv])) for lv in levels_sorted]
    rho = float(spearmanr(levels_sorted, mean_gain).statistic) if len(levels_sorted) > 1 else 0.0
    summary_rows = [
        [cfg.factor, lv, len(buckets[lv]), mg] for lv, mg in zip(levels_sorted, mean_gain)
    ]
    summary_rows.append([cfg.factor, "spearman_rho", "", rho])
    _write_csv(
        os.path.join(out_dir, "factor_sweep_summary.csv"),
        ["factor", "level", "count", "mean_gain_percent"],
        summary_rows,
    )
    return {"rows": rows, "levels": levels_sorted, "mean_gain": mean_gain, "spearman_rho": rho}


def _hop_buckets(rows: list[list]) -> dict[float, list[float]]:
    """Group sweep rows into five quantile buckets of the measured hop count."""
    hs = np.array([r[3] for r in rows], dtype=float)
    gains = np.array([r[5] for r in rows], dtype=float)
    edges = np.unique(np.quantile(hs, [0.2, 0.4, 0.6, 0.8], method="inverted_cdf"))
    codes = np.searchsorted(edges, hs, side="right")
    out: dict[float, list[float]] = {}
    for code in np.unique(codes):
        sel = codes == code
        out[float(np.mean(hs[sel]))] = [float(g) for g in gains[sel]]
    return out


def collect_ensemble(cfg: ExperimentConfig) -> list[dict]:
    """Evaluated setups (strategies, totals, vectors) for analysis experiments."""
    argses = [
        (cfg.topology, cfg.setup, cfg.profile, cfg.hour, cfg.seed + i)
        for i in range(cfg.ensemble)
    ]
    return [r for r in _map_seeds(_ensemble_worker, argses, cfg.workers) if r is not None]


def run_info_gain(cfg: ExperimentConfig, out_dir: str) -> dict[str, Any]:
    from .analysis import SampleSet, info_gain_table

    setups = collect_ensemble(cfg)
    records = []
    for s in setups:
        for vec, tot in zip(s["vectors"], s["totals"]):
            records.append((vec, float(tot)))
    table = info_gain_table(SampleSet(tuple(records), provenance=f"{cfg.kind}:{cfg.seed}"))
    rows = [[name, gain] for name, gain in table.ranked()]
    _write_csv(os.path.join(out_dir, "info_gains.csv"), ["parameter", "info_gain"], rows)
    samples_rows = [
        [*(getattr(vec, n) for n in parameters.PARAMETER_NAMES), tot] for vec, tot in records
    ]
    _write_csv(
        os.path.join(out_dir, "samples.csv"),
        [*parameters.PARAMETER_NAMES, "throughput"],
        samples_rows,
    )
    return {"table": table, "num_records": len(records)}


def combo_gains_for_setup(setup_record: dict) -> dict[str, float]:
    """Per-combination selected-strategy gain for one evaluated setup."""
    rows = list(zip(setup_record["strategies"], setup_record["vectors"]))
    totals = setup_record["totals"]
    static_total = setup_record["static_total"]
    out = {}
    for combo in scheduler.ALL_COMBINATIONS:
        result = scheduler.select_strategy(combo, rows)
        out[str(combo)] = float(totals[result.selected_index]) / static_total
    out["baseline"] = float(max(totals)) / static_total
    return out


def run_combo_eval(cfg: ExperimentConfig, out_dir: str) -> dict[str, Any]:
    setups = collect_ensemble(cfg)
    if not setups:
        raise ParameterError("combo-eval ensemble produced no usable setups")
    acc: dict[str, list[float]] = {}
    for s in setups:
        for name, gain in combo_gains_for_setup(s).items():
            acc.setdefault(name, []).append(gain)
    mean_opt_excess = float(np.mean([g - 1.0 for g in acc["baseline"]]))
    rows = []
    for combo in [*map(str, scheduler.ALL_COMBINATIONS), "baseline"]:
        gains = acc[combo]
        mean_gain = float(np.mean(gains))
        excess_ratio = (
            (mean_gain - 1.0) / mean_opt_excess if mean_opt_excess > 0 else float("nan")
        )
        rows.append([combo, 100.0 * mean_gain, excess_ratio])
    _write_csv(
        os.path.join(out_dir, "combo_eval.csv"),
        ["combination", "mean_param_gain_percent", "excess_ratio"],
        rows,
    )
    return {"rows": rows, "mean_optimal_excess": mean_opt_excess, "setups": len(setups)}


def partial_info_for_setup(setup_record: dict, combination: scheduler.Combination,
                           fractions, regions, seed: int,
                           table: routing.PathTable, residuals: np.ndarray) -> dict:
    """Selected-strategy gain under degraded views for one evaluated setup."""
    feasible = setup_record["strategies"]
    totals = setup_record["totals"]
    static_total = setup_record["static_total"]
    out: dict[tuple[str, Any], float] = {}
    for fraction in fractions:
        view = parameters.degrade_client_info(parameters.FULL_VIEW, fraction, seed, table.num_clients)
        vectors = parameters.build_param_table(feasible, table, residuals, view)
        result = scheduler.select_strategy(combination, list(zip(feasible, vectors)))
        out[("clients", fraction)] = float(totals[result.selected_index]) / static_total
    for region in regions:
        view = parameters.degrade_link_info(parameters.FULL_VIEW, region)
        vectors = parameters.build_param_table(feasible, table, residuals, view)
        result = scheduler.select_strategy(combination, list(zip(feasible, vectors)))
        out[("region", region)] = float(totals[result.selected_index]) / static_total
    out[("optimal", "")] = float(max(totals)) / static_total
    return out


def _partial_worker(args) -> dict | None:
    topo_spec, setup_spec, profile_spec, hour, seed, combination, fractions, regions = args
    topo, setup, table = build_instance(topo_spec, setup_spec, seed)
    profile = _build_profile(profile_spec, seed)
    residuals = flow.residual_vector(topo, hour, profile)
    feasible, totals = strategy.score_all_strategies(setup, table, residuals)
    if setup.static_strategy not in feasible:
        return None
    static_total = float(totals[feasible.index(setup.static_strategy)])
    if static_total <= 0:
        return None
    record = {"strategies": feasible, "totals": totals, "static_total": static_total}
    combo = scheduler.Combination.parse(combination)
    return partial_info_for_setup(record, combo, fractions, regions, seed + 424_242, table, residuals)


def run_partial_info(cfg: ExperimentConfig, out_dir: str) -> dict[str, Any]:
    argses = [
        (cfg.topology, cfg.setup, cfg.profile, cfg.hour, cfg.seed + i,
         cfg.combination, cfg.fractions, cfg.regions)
        for i in range(cfg.ensemble)
    ]
    per_setup = [r for r in _map_seeds(_partial_worker, argses, cfg.workers) if r is not None]
    if not per_setup:
        raise ParameterError("partial-info ensemble produced no usable setups")
    mean_opt_excess = float(np.mean([r[("optimal", "")] - 1.0 for r in per_setup]))
    rows = []
    results: dict[tuple[str, Any], float] = {}
    keys = [("clients", f) for f in cfg.fractions] + [("region", m) for m in cfg.regions]
    for key in keys:
        gains = [r[key] for r in per_setup]
        mean_gain = float(np.mean(gains))
        ratio = (mean_gain - 1.0) / mean_opt_excess if mean_opt_excess > 0 else float("nan")
        results[key] = ratio
        rows.append([key[0], key[1], 100.0 * mean_gain, ratio])
    rows.append(["optimal", "", 100.0 * (1.0 + mean_opt_excess), 1.0])
    _write_csv(
        os.path.join(out_dir, "partial_info.csv"),
        ["mode", "level", "mean_param_gain_percent", "excess_ratio"],
        rows,
    )
    return {"rows": rows, "ratios": results, "mean_optimal_excess": mean_opt_excess,
            "setups": len(per_setup)}


def run_runtime(cfg: ExperimentConfig, out_dir: str) -> dict[str, Any]:
    topo, setup, _ = build_instance(cfg.topology, cfg.setup, cfg.seed)
    profile = _build_profile(cfg.profile, cfg.seed)
    control = scheduler.ControlPlaneConfig(**cfg.control)
    trace = scheduler.run_control_plane(
        control, topo, setup, profile, cfg.workload, cfg.hours, seed=cfg.seed
    )
    ratio_by_hourstart = dict(trace.achieved_vs_oracle)
    rows = []
    for t, client, isp, hit in trace.events:
        ratio = ratio_by_hourstart.get(t - t % 60, 0.0)
        rows.append([t, client, strategy.strategy_to_letters((isp,)), int(hit), ratio])
    _write_csv(
        os.path.join(out_dir, "runtime_trace.csv"),
        ["t_min", "client", "isp", "hit", "oracle_ratio"],
        rows,
    )
    total_bytes = sum(p[2] for p in trace.probe_log)
    total_seconds = sum(p[3] for p in trace.probe_log)
    summary = {
        "events": len(trace.events),
        "hit_rate": trace.hit_rate(),
        "bottleneck_refreshes": len(trace.bottleneck_refreshes),
        "topology_refreshes": len(trace.topology_refreshes),
        "probe_count": len(trace.probe_log),
        "probe_bytes": total_bytes,
        "probe_seconds": total_seconds,
        "mean_oracle_ratio": float(np.mean([r for _, r in trace.achieved_vs_oracle])),
    }
    _write_csv(os.path.join(out_dir, "runtime_summary.csv"), list(summary), [[summary[k] for k in summary]])
    return {"trace": trace, "summary": summary}


_RUNNERS = {
    "gain-ensemble": run_gain_ensemble,
    "factor-sweep": run_factor_sweep,
    "info-gain": run_info_gain,
    "combo-eval": run_combo_eval,
    "partial-info": run_partial_info,
    "runtime": run_runtime,
}


def run_experiment(cfg: ExperimentConfig, out_dir: str, render_plots: bool = True) -> dict[str, Any]:
    """Run one experiment kind and write its CSV report (and figures) to out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    result = _RUNNERS[cfg.kind](cfg, out_dir)
    if render_plots:
        from . import plots

        plots.render(cfg.kind, out_dir)
    return result
