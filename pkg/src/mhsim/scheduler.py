"""Parameter-combination strategy selection and the control-plane runtime.

The local heuristic never sees throughputs: it scores every feasible
strategy from cheap observables only.  Each member of the chosen combination
(E, O, W) is standardized across the strategy table, oriented so that larger
is better (E and W maximise, O minimises), weighted by the parameter's
measured association strength with throughput, and summed.  The arg-max of a
positively weighted sum of oriented objectives is always Pareto-non-dominated
with respect to those objectives; ties resolve to the lowest enumeration
index.

The runtime simulates the deployment loop at one-minute resolution: daily
topology probing, periodic bottleneck probing (faster during peak hours), a
probabilistic IP sampler that admits unknown client networks to the probe
database, and a hash table mapping known clients to their assigned egress.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, SelectionError
from .flow import BackgroundProfile, max_total, residual_vector
from .parameters import FULL_VIEW, InfoView, ParameterVector, build_param_table
from .routing import PathTable, build_path_table
from .strategy import Strategy, enumerate_strategies, strategy_from_letters
from .topology import MultihomeSetup, Topology

# Relative association strength of each observable with throughput; the
# bottleneck bandwidth dominates, overlap and coverage contribute less.
DEFAULT_PARAM_WEIGHTS = {"E": 0.305, "O": 0.337, "W": 0.753}

_DIRECTIONS = {"E": 1.0, "O": -1.0, "W": 1.0}


@dataclass(frozen=True)
class Combination:
    """Non-empty subset of {E, O, W} with fixed optimisation directions."""

    members: frozenset[str]

    def __post_init__(self):
        if not self.members:
            raise ParameterError("combination must be non-empty")
        extra = self.members - {"E", "O", "W"}
        if extra:
            raise ParameterError(f"combination may only contain E, O, W; got {sorted(extra)}")

    @classmethod
    def parse(cls, text: str) -> "Combination":
        return cls(frozenset(text.strip().upper()))

    def __str__(self) -> str:
        return "".join(m for m in ("E", "O", "W") if m in self.members)


ALL_COMBINATIONS = tuple(
    Combination(frozenset(m))
    for m in (("E",), ("O",), ("W",), ("E", "O"), ("E", "W"), ("O", "W"), ("E", "O", "W"))
)


@dataclass(frozen=True)
class SelectionResult:
    selected: Strategy
    selected_index: int
    pareto_set: tuple[Strategy, ...]
    param_gain: float | None = None


def _oriented_matrix(combination: Combination, vectors: list[ParameterVector]) -> np.ndarray:
    cols = []
    for name in ("E", "O", "W"):
        if name in combination.members:
            cols.append(_DIRECTIONS[name] * np.array([getattr(v, name) for v in vectors], dtype=float))
    return np.column_stack(cols)


def _pareto_mask(oriented: np.ndarray) -> np.ndarray:
    """Boolean mask of non-dominated rows (larger is better in every column)."""
    ge = (oriented[:, None, :] >= oriented[None, :, :]).all(axis=2)
    gt = (oriented[:, None, :] > oriented[None, :, :]).any(axis=2)
    return ~(ge & gt).any(axis=0)


def selection_scores(
    combination: Combination,
    vectors: list[ParameterVector],
    weights: dict[str, float] | None = None,
) -> np.ndarray:
    """Weighted standardized score per strategy; higher is better."""
    if weights is None:
        weights = DEFAULT_PARAM_WEIGHTS
    oriented = _oriented_matrix(combination, vectors)
    mean = oriented.mean(axis=0)
    std = oriented.std(axis=0)
    std[std == 0.0] = 1.0
    z = (oriented - mean) / std
    w = np.array([weights[n] for n in ("E", "O", "W") if n in combination.members])
    return z @ w


def select_strategy(
    combination: Combination,
    param_table: list[tuple[Strategy, ParameterVector]],
    weights: dict[str, float] | None = None,
) -> SelectionResult:
    """Pick the best strategy under a parameter combination.

    The winner maximises the weighted standardized score over the table;
    exact score ties resolve to the lowest index.  The full Pareto set under
    the combination's directions is reported alongside.
    """
    if not param_table:
        raise SelectionError("parameter table is empty")
    strategies = [k for k, _ in param_table]
    vectors = [v for _, v in param_table]
    scores = selection_scores(combination, vectors, weights)
    best = int(np.argmax(scores))
    oriented = _oriented_matrix(combination, vectors)
    mask = _pareto_mask(oriented)
    pareto = tuple(strategies[i] for i in np.flatnonzero(mask))
    return SelectionResult(strategies[best], best, pareto)


def feasible_param_table(
    table: PathTable,
    residuals: np.ndarray,
    view: InfoView = FULL_VIEW,
) -> list[tuple[Strategy, ParameterVector]]:
    """(strategy, parameter vector) rows for every feasible strategy, enumeration order."""
    strategies = [
        k
        for k in enumerate_strategies(table.num_isps, table.num_clients)
        if table.is_feasible(k)
    ]
    vectors = build_param_table(strategies, table, residuals, view)
    return list(zip(strategies, vectors))


def param_performance_gain(
    combination: Combination,
    setup: MultihomeSetup,
    table: PathTable,
    residuals: np.ndarray,
    static: Strategy | None = None,
    view: InfoView = FULL_VIEW,
) -> tuple[float, SelectionResult]:
    """Gain of the heuristic's selected strategy over the static baseline.

    The selection uses parameters only (possibly under a degraded view); the
    reported ratio uses the true allocator on both sides.
    """
    if static is None:
        static = setup.static_strategy
    rows = feasible_param_table(table, residuals, view)
    result = select_strategy(combination, rows)
    static_total = max_total(static, table, residuals, setup.demands)
    if static_total == 0:
        raise ParameterError("static strategy carries zero throughput; gain undefined")
    selected_total = max_total(result.selected, table, residuals, setup.demands)
    gain = selected_total / static_total
    return gain, SelectionResult(result.selected, result.selected_index, result.pareto_set, gain)


class IpSampler:
    """Admits unknown client networks to the probe database with fixed probability."""

    def __init__(self, probability: float, seed: int = 0):
        if not (0.0 <= probability <= 1.0):
            raise ParameterError(f"sampler probability must be in [0, 1], got {probability}")
        self.probability = probability
        self._rng = np.random.default_rng(seed)
        self.offered = 0
        self.admitted = 0

    def offer(self, client: int) -> bool:
        self.offered += 1
        hit = bool(self._rng.random() < self.probability)
        self.admitted += hit
        return hit


def _parse_clock(text: str) -> int:
    try:
        hh, mm = text.strip().split(":")
        minutes = int(hh) * 60 + int(mm)
    except ValueError:
        raise ParameterError(f"clock time must be 'HH:MM', got {text!r}") from None
    if not (0 <= minutes < 24 * 60):
        raise ParameterError(f"clock time out of range: {text!r}")
    return minutes


@dataclass(frozen=True)
class ControlPlaneConfig:
    """Cadences, sampler, and probe-cost accounting for the runtime loop."""

    topo_probe_time: str = "04:00"
    offpeak_bottleneck_period: int = 60
    peak_bottleneck_period: int = 30
    peak_hours: tuple[int, ...] = (18, 19, 20, 21, 22, 23)
    sampler_probability: float = 0.6
    probe_bytes: int = 33600
    probe_seconds: float = 2.5
    probe_targets_per_network: int = 3
    combination: str = "EOW"
    default_rule: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.offpeak_bottleneck_period <= 0 or self.peak_bottleneck_period <= 0:
            raise ParameterError("bottleneck probe periods must be positive")
        if not (0.0 <= self.sampler_probability <= 1.0):
            raise ParameterError("sampler_probability must be in [0, 1]")
        if any(not (0 <= h < 24) for h in self.peak_hours):
            raise ParameterError("peak_hours must be hours in 0..23")
        _parse_clock(self.topo_probe_time)
        Combination.parse(self.combination)

    @classmethod
    def from_json(cls, path: str) -> "ControlPlaneConfig":
        with open(path) as fh:
            raw = json.load(fh)
        if "peak_hours" in raw:
            raw["peak_hours"] = tuple(raw["peak_hours"])
        if isinstance(raw.get("default_rule"), str):
            raw["default_rule"] = strategy_from_letters(raw["default_rule"])
        elif raw.get("default_rule") is not None:
            raw["default_rule"] = tuple(raw["default_rule"])
        return cls(**raw)


@dataclass
class RequestTrace:
    """Chronological record of one control-plane simulation."""

    events: list[tuple[int, int, int, bool]] = field(default_factory=list)
    probe_log: list[tuple[int, str, int, float]] = field(default_factory=list)
    achieved_vs_oracle: list[tuple[int, float]] = field(default_factory=list)
    bottleneck_refreshes: list[int] = field(default_factory=list)
    topology_refreshes: list[int] = field(default_factory=list)

    def hit_rate(self) -> float:
        if not self.events:
            return 0.0
        return sum(1 for e in self.events if e[3]) / len(self.events)


def run_control_plane(
    config: ControlPlaneConfig,
    topology: Topology,
    setup: MultihomeSetup,
    profile: BackgroundProfile,
    workload: float | list[float],
    duration_hours: int,
    seed: int = 0,
    initial_probe_db: tuple[int, ...] = (),
) -> RequestTrace:
    """Discrete-time simulation of the scheduling framework at 1-minute steps.

    Topology parameters refresh once per day at ``topo_probe_time``;
    bottleneck parameters refresh on the off-peak period, or the peak period
    during peak hours, starting at minute zero.  Every refresh re-traces the
    probe database, rebuilds the client-to-ISP hash table from the selected
    strategy over the known clients, and accounts probe cost.  Requests from
    known clients resolve through the hash table; unknown clients fall back
    to the default rule and may be admitted to the probe set by the sampler.
    """
    if duration_hours < 1:
        raise ParameterError("duration must be at least one hour")
    nclients = setup.num_clients
    if isinstance(workload, (int, float)):
        rates = [float(workload)] * nclients
    else:
        rates = [float(r) for r in workload]
        if len(rates) != nclients:
            raise ParameterError("workload must carry one rate per client")
    default_rule = config.default_rule if config.default_rule is not None else setup.static_strategy
    if len(default_rule) != nclients:
        raise ParameterError("default_rule length must match the client count")
    combination = Combination.parse(config.combination)

    table = build_path_table(topology, setup)
    strategies = [
        k for k in enumerate_strategies(setup.num_isps, nclients) if table.is_feasible(k)
    ]
    if setup.static_strategy not in strategies:
        raise ParameterError("static/default strategy must be feasible for the runtime")

    rng = np.random.default_rng(seed)
    sampler = IpSampler(config.sampler_probability, seed=seed + 1)
    trace = RequestTrace()
    probe_db: set[int] = set(initial_probe_db)
    known: set[int] = set()
    hash_table1: dict[int, int] = {}

    topo_minute = _parse_clock(config.topo_probe_time)
    end = duration_hours * 60
    next_bneck = 0
    per_probe_bytes = config.probe_targets_per_network * config.probe_bytes
    per_probe_seconds = config.probe_targets_per_network * config.probe_seconds
    residuals = residual_vector(topology, 0, profile)
    current_ratio = 0.0

    def refresh(t: int, kind: str) -> None:
        nonlocal hash_table1
        known.update(probe_db)
        for _ in probe_db:
            trace.probe_log.append((t, kind, per_probe_bytes, per_probe_seconds))
        if not known:
            return
        view = InfoView(known_clients=tuple(sorted(known)))
        rows = [
            (k, v)
            for k, v in zip(strategies, build_param_table(strategies, table, residuals, view))
        ]
        result = select_strategy(combination, rows)
        hash_table1 = {c: result.selected[c] for c in known}

    for t in range(end):
        hour = (t // 60) % 24
        if t % 60 == 0:
            residuals = residual_vector(topology, hour, profile)
        if t % (24 * 60) == topo_minute:
            trace.topology_refreshes.append(t)
            refresh(t, "topology")
        if t == next_bneck:
            trace.bottleneck_refreshes.append(t)
            refresh(t, "bottleneck")
            period = (
                config.peak_bottleneck_period
                if hour in config.peak_hours
                else config.offpeak_bottleneck_period
            )
            next_bneck = t + period
        if t % 60 == 0:
            running = tuple(hash_table1.get(c, default_rule[c]) for c in range(nclients))
            achieved = max_total(running, table, residuals, setup.demands)
            oracle = max(max_total(k, table, residuals, setup.demands) for k in strategies)
            current_ratio = achieved / oracle if oracle > 0 else 1.0
            trace.achieved_vs_oracle.append((t, current_ratio))
        for c in range(nclients):
            for _ in range(rng.poisson(rates[c])):
                if c in hash_table1:
                    trace.events.append((t, c, hash_table1[c], True))
                else:
                    trace.events.append((t, c, default_rule[c], False))
                    if c not in probe_db and sampler.offer(c):
                        probe_db.add(c)
    return trace
