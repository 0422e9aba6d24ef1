"""Per-strategy path observables and their partial-information variants.

Eight observables describe a strategy's footprint: P (path links with
multiplicity), E (unique links), O = P - E (overlap), B (distinct choke
links), W (sum of distinct choke residual bandwidths, Gbps), and BL1/BL2/BL3
(chokes near the server, in-network, near the clients).

Positions along a path of L links split into thirds with ceiling: positions
1..ceil(L/3) count as server-side, the last ceil(L/3) as client-side (server
side wins the overlap on very short paths), the rest as in-network.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleStrategyError, ParameterError
from .routing import PathTable

REGION_ALL = "all"
REGION_SERVER = "L-S"
REGION_CLIENT = "L-C"
REGION_ENDS = "L-SC"
REGIONS = (REGION_ALL, REGION_SERVER, REGION_CLIENT, REGION_ENDS)

PARAMETER_NAMES = ("P", "E", "O", "B", "W", "BL1", "BL2", "BL3")


@dataclass(frozen=True)
class ParameterVector:
    P: int
    E: int
    O: int
    B: int
    W: float
    BL1: int
    BL2: int
    BL3: int

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in PARAMETER_NAMES}


@dataclass(frozen=True)
class InfoView:
    """Which clients and which path regions are observable.

    ``known_clients`` is None for the full client set; ``known_region``
    restricts link positions per path (see the region helpers below).
    """

    known_clients: tuple[int, ...] | None = None
    known_region: str = REGION_ALL

    def __post_init__(self):
        if self.known_region not in REGIONS:
            raise ParameterError(f"unknown region mode {self.known_region!r}")
        if self.known_clients is not None and len(self.known_clients) == 0:
            raise ParameterError("known_clients must be non-empty")

    def clients(self, num_clients: int) -> tuple[int, ...]:
        if self.known_clients is None:
            return tuple(range(num_clients))
        return self.known_clients


FULL_VIEW = InfoView()


def known_positions(length: int, region: str) -> tuple[int, ...]:
    """1-based link positions visible under a region mode, for a path of ``length`` links."""
    third = math.ceil(length / 3)
    two_thirds = math.ceil(2 * length / 3)
    if region == REGION_ALL:
        return tuple(range(1, length + 1))
    if region == REGION_SERVER:
        return tuple(range(1, two_thirds + 1))
    if region == REGION_CLIENT:
        return tuple(range(length - two_thirds + 1, length + 1))
    head = range(1, third + 1)
    tail = range(length - third + 1, length + 1)
    return tuple(sorted(set(head) | set(tail)))


def position_class(position: int, length: int) -> int:
    """0 for server-side, 1 for in-network, 2 for client-side."""
    third = math.ceil(length / 3)
    if position <= third:
        return 0
    if position > length - third:
        return 2
    return 1


def degrade_client_info(
    view: InfoView, fraction: float, seed: int, num_clients: int
) -> InfoView:
    """Keep a uniform sample of ceil(fraction * |C|) clients, deterministic per seed."""
    if not (0.0 < fraction <= 1.0):
        raise ParameterError(f"fraction must be in (0, 1], got {fraction}")
    if fraction == 1.0:
        return view
    pool = view.clients(num_clients)
    keep = math.ceil(fraction * len(pool))
    rng = np.random.default_rng(seed)
    chosen = rng.permutation(len(pool))[:keep]
    return InfoView(
        known_clients=tuple(sorted(pool[i] for i in chosen)),
        known_region=view.known_region,
    )


def degrade_link_info(view: InfoView, mode: str) -> InfoView:
    """Restrict the view to a path region: L-S, L-C, or L-SC."""
    if mode not in REGIONS:
        raise ParameterError(f"unknown region mode {mode!r}")
    return InfoView(known_clients=view.known_clients, known_region=mode)


@dataclass(frozen=True)
class _PathSlice:
    """Observable slice of one (client, ISP) path under a region mode."""

    num_links: int
    link_set: frozenset[int]
    choke_link: int | None
    choke_bandwidth: float
    choke_class: int


class ViewCache:
    """Precomputed per-(client, ISP) path slices for one residual vector.

    Building parameter vectors for all strategies of a setup reuses these
    slices instead of re-walking the paths 243 times.
    """

    def __init__(self, table: PathTable, residuals: np.ndarray, region: str = REGION_ALL):
        self.table = table
        self.region = region
        self._slices: dict[tuple[int, int], _PathSlice | None] = {}
        for ci in range(table.num_clients):
            for fi in range(table.num_isps):
                path = table.path(ci, fi)
                if path is None:
                    self._slices[(ci, fi)] = None
                    continue
                length = path.hop_count
                positions = known_positions(length, region)
                links = [(pos, path.links[pos - 1]) for pos in positions]
                if not links:
                    self._slices[(ci, fi)] = _PathSlice(0, frozenset(), None, 0.0, 1)
                    continue
                pos, li = min(links, key=lambda t: (float(residuals[t[1]]), t[0]))
                self._slices[(ci, fi)] = _PathSlice(
                    num_links=len(links),
                    link_set=frozenset(li2 for _, li2 in links),
                    choke_link=li,
                    choke_bandwidth=float(residuals[li]),
                    choke_class=position_class(pos, length),
                )

    def slice(self, client: int, isp: int) -> _PathSlice | None:
        return self._slices[(client, isp)]

    def vector(self, strategy: tuple[int, ...], clients: tuple[int, ...]) -> ParameterVector:
        total = 0
        union: set[int] = set()
        chokes: dict[int, tuple[float, int]] = {}
        for ci in clients:
            sl = self._slices[(ci, strategy[ci])]
            if sl is None:
                raise InfeasibleStrategyError(f"client {ci} unreachable via ISP {strategy[ci]}")
            total += sl.num_links
            union |= sl.link_set
            if sl.choke_link is not None and sl.choke_link not in chokes:
                chokes[sl.choke_link] = (sl.choke_bandwidth, sl.choke_class)
        classes = [0, 0, 0]
        for _, cls in chokes.values():
            classes[cls] += 1
        return ParameterVector(
            P=total,
            E=len(union),
            O=total - len(union),
            B=len(chokes),
            W=float(sum(bw for bw, _ in chokes.values())),
            BL1=classes[0],
            BL2=classes[1],
            BL3=classes[2],
        )


def compute_parameters(
    strategy: tuple[int, ...],
    table: PathTable,
    residuals: np.ndarray,
    view: InfoView = FULL_VIEW,
) -> ParameterVector:
    """Parameter vector of one strategy under an information view.

    P/E/O count the observable links of the known clients' paths; B, W and
    the BL classes come from the per-path choke among observable links, with
    choke positions classified against the full path length.  A choke link
    serving several clients counts once, classified at its first (lowest
    client index) occurrence.
    """
    clients = view.clients(table.num_clients)
    if not clients:
        raise ParameterError("view exposes no clients")
    cache = ViewCache(table, residuals, view.known_region)
    return cache.vector(strategy, clients)


def build_param_table(
    strategies: list[tuple[int, ...]],
    table: PathTable,
    residuals: np.ndarray,
    view: InfoView = FULL_VIEW,
) -> list[ParameterVector]:
    """Parameter vectors for many strategies, sharing one precomputed view."""
    clients = view.clients(table.num_clients)
    if not clients:
        raise ParameterError("view exposes no clients")
    cache = ViewCache(table, residuals, view.known_region)
    return [cache.vector(k, clients) for k in strategies]
