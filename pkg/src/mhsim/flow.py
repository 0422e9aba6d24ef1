"""Throughput allocation and bottleneck detection over fixed paths.

A strategy fixes one path per client; the server's throughput is the optimum
of a small linear program: maximise the sum of client rates subject to
per-link residual capacities and per-client demand caps.

Two solver routes exist on purpose.  ``max_total`` runs a dense tableau
simplex tuned for these tiny instances (hot path for strategy enumeration);
``max_throughput`` solves the same program through scipy and additionally
refines the optimum to the lexicographically greatest rate vector so the
returned solution is deterministic.  The two are cross-checked in tests.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import InfeasibleStrategyError, ParameterError
from .routing import PathTable
from .topology import Topology

_EPS = 1e-9


@dataclass(frozen=True)
class BackgroundProfile:
    """Hourly background load fractions plus deterministic per-link jitter.

    ``hourly_load`` has 24 entries in [0, 1).  The effective load on a link is
    hourly_load[hour] * jitter(link, hour, seed) with jitter drawn once per
    (link, hour, seed) from 1 +/- per_link_jitter, clamped at zero.
    """

    hourly_load: tuple[float, ...] = field(default=tuple([0.0] * 24))
    per_link_jitter: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if len(self.hourly_load) != 24:
            raise ParameterError("hourly_load must have 24 entries")
        if any(not (0.0 <= x < 1.0) for x in self.hourly_load):
            raise ParameterError("hourly_load entries must lie in [0, 1)")
        if self.per_link_jitter < 0:
            raise ParameterError("per_link_jitter must be non-negative")
        object.__setattr__(self, "hourly_load", tuple(float(x) for x in self.hourly_load))

    def jitter_factors(self, hour: int, num_links: int) -> np.ndarray:
        rng = np.random.default_rng(np.random.SeedSequence((self.seed, hour)))
        u = rng.random(num_links)
        return np.clip(1.0 + self.per_link_jitter * (2.0 * u - 1.0), 0.0, None)


ZERO_PROFILE = BackgroundProfile()

# Plausible diurnal utilisation curve: overnight trough, evening peak at hour 20.
DIURNAL_LOAD = (
    0.30, 0.25, 0.22, 0.20, 0.20, 0.22,
    0.28, 0.35, 0.42, 0.45, 0.48, 0.50,
    0.52, 0.50, 0.48, 0.50, 0.55, 0.60,
    0.65, 0.68, 0.70, 0.70, 0.65, 0.45,
)


def diurnal_profile(jitter: float = 0.5, seed: int = 0) -> BackgroundProfile:
    return BackgroundProfile(hourly_load=DIURNAL_LOAD, per_link_jitter=jitter, seed=seed)


def profile_from_json(path: str) -> BackgroundProfile:
    """Load a profile file: {"hourly_load": [...24 floats], "per_link_jitter": w, "seed": s}."""
    with open(path) as fh:
        raw = json.load(fh)
    return BackgroundProfile(
        hourly_load=tuple(raw["hourly_load"]),
        per_link_jitter=float(raw.get("per_link_jitter", 0.0)),
        seed=int(raw.get("seed", 0)),
    )


def residual_capacity(
    topology: Topology, link: int, hour: int, profile: BackgroundProfile
) -> float:
    """Residual Gbps on one link at the given hour, clamped at zero."""
    if not (0 <= hour < 24):
        raise ParameterError(f"hour must be in 0..23, got {hour}")
    return float(residual_vector(topology, hour, profile)[link])


def residual_vector(
    topology: Topology, hour: int, profile: BackgroundProfile
) -> np.ndarray:
    """Residual Gbps for every link at the given hour."""
    if not (0 <= hour < 24):
        raise ParameterError(f"hour must be in 0..23, got {hour}")
    caps = topology.capacities()
    load = profile.hourly_load[hour]
    if load == 0.0:
        return caps
    j = profile.jitter_factors(hour, topology.num_links)
    return np.maximum(0.0, caps * (1.0 - load * j))


@dataclass(frozen=True)
class ThroughputSolution:
    """Optimal per-client rates (Gbps), their sum, and binding links."""

    rates: tuple[float, ...]
    total: float
    saturated_links: tuple[int, ...]


@dataclass(frozen=True)
class BottleneckSet:
    """Per-client choke link (index, residual Gbps) and the distinct choke links."""

    per_path_choke: tuple[tuple[int, float], ...]
    distinct_links: tuple[int, ...]


def _usage_rows(
    strategy: tuple[int, ...],
    table: PathTable,
    residuals: np.ndarray,
    demands: tuple[float, ...],
) -> tuple[np.ndarray, np.ndarray]:
    """Compressed constraint system A x <= b for the allocation LP.

    Links with identical client-usage signatures collapse to their minimum
    residual; finite demands append one extra row each.
    """
    n = len(strategy)
    paths = table.paths_for(strategy)
    mask: dict[int, int] = {}
    for ci, p in enumerate(paths):
        bit = 1 << ci
        for li in p.links:
            mask[li] = mask.get(li, 0) | bit
    sig_min: dict[int, float] = {}
    for li, m in mask.items():
        r = float(residuals[li])
        cur = sig_min.get(m)
        if cur is None or r < cur:
            sig_min[m] = r
    rows = []
    rhs = []
    for m, r in sig_min.items():
        rows.append([(m >> ci) & 1 for ci in range(n)])
        rhs.append(r)
    for ci, d in enumerate(demands):
        if math.isfinite(d):
            rows.append([1 if j == ci else 0 for j in range(n)])
            rhs.append(float(d))
    return np.array(rows, dtype=float), np.array(rhs, dtype=float)


def _simplex_max_sum(A: np.ndarray, b: np.ndarray, max_pivots: int = 20000) -> tuple[float, np.ndarray]:
    """Maximise 1'x subject to A x <= b, x >= 0 (b >= 0), by dense tableau simplex.

    Bland's rule guards against cycling; instances here are a handful of
    variables and at most a few dozen rows.
    """
    m, n = A.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -1.0
    basis = list(range(n, n + m))
    for _ in range(max_pivots):
        reduced = T[m, : n + m]
        negatives = np.flatnonzero(reduced < -_EPS)
        if negatives.size == 0:
            x = np.zeros(n + m)
            for i, bv in enumerate(basis):
                x[bv] = T[i, -1]
            return float(T[m, -1]), x[:n]
        j = int(negatives[0])
        col = T[:m, j]
        rows = np.flatnonzero(col > _EPS)
        if rows.size == 0:
            raise ParameterError("allocation program is unbounded; missing demand or link cap")
        ratios = T[rows, -1] / col[rows]
        rmin = ratios.min()
        tied = rows[ratios <= rmin + _EPS]
        r = int(tied[np.argmin([basis[i] for i in tied])])
        T[r, :] /= T[r, j]
        column = T[:, j].copy()
        column[r] = 0.0
        T -= np.outer(column, T[r, :])
        basis[r] = j
    raise RuntimeError("simplex failed to converge")


def max_total(
    strategy: tuple[int, ...],
    table: PathTable,
    residuals: np.ndarray,
    demands: tuple[float, ...] | None = None,
) -> float:
    """Optimal total throughput of a strategy (fast path, no rate vector)."""
    if demands is None:
        demands = tuple(math.inf for _ in strategy)
    A, b = _usage_rows(strategy, table, residuals, demands)
    total, _ = _simplex_max_sum(A, b)
    return total


def max_throughput(
    strategy: tuple[int, ...],
    table: PathTable,
    demands: tuple[float, ...],
    residuals: np.ndarray,
) -> ThroughputSolution:
    """Full allocation: optimal total plus the lexicographically greatest rates.

    Among optimal rate vectors the returned one maximises rate(client 0),
    then rate(client 1), and so on, which pins a unique vertex.
    """
    if np.any(residuals < 0):
        raise ParameterError("residuals must be non-negative")
    n = len(strategy)
    A, b = _usage_rows(strategy, table, residuals, demands)
    cost = -np.ones(n)
    res = linprog(cost, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
    if not res.success:
        raise InfeasibleStrategyError(f"allocation LP failed: {res.message}")
    total = -float(res.fun)
    rates = np.asarray(res.x, dtype=float)
    # lexicographic refinement: fix the optimal total, then maximise each
    # client's rate in turn
    eq_rows = [np.ones(n)]
    eq_rhs = [total]
    for ci in range(n):
        c = np.zeros(n)
        c[ci] = -1.0
        res_i = linprog(
            c,
            A_ub=A,
            b_ub=b,
            A_eq=np.vstack(eq_rows),
            b_eq=np.array(eq_rhs),
            bounds=(0, None),
            method="highs",
        )
        if not res_i.success:
            break  # keep the last consistent vertex on numerical trouble
        rates = np.asarray(res_i.x, dtype=float)
        eq_rows.append(c * -1.0)
        eq_rhs.append(float(rates[ci]))
    rates = np.clip(rates, 0.0, None)
    paths = table.paths_for(strategy)
    load: dict[int, float] = {}
    for ci, p in enumerate(paths):
        for li in p.links:
            load[li] = load.get(li, 0.0) + float(rates[ci])
    saturated = tuple(
        sorted(li for li, used in load.items() if used >= float(residuals[li]) - 1e-7)
    )
    return ThroughputSolution(tuple(float(r) for r in rates), total, saturated)


def detect_bottlenecks(
    strategy: tuple[int, ...], table: PathTable, residuals: np.ndarray
) -> BottleneckSet:
    """Per-client choke link: minimum-residual link on the path, ties toward the server."""
    paths = table.paths_for(strategy)
    per_path = []
    distinct: list[int] = []
    seen: set[int] = set()
    for p in paths:
        path_res = [float(residuals[li]) for li in p.links]
        pos = int(np.argmin(path_res))  # argmin takes the first minimum: nearest the server
        li = p.links[pos]
        per_path.append((li, path_res[pos]))
        if li not in seen:
            seen.add(li)
            distinct.append(li)
    return BottleneckSet(tuple(per_path), tuple(distinct))
