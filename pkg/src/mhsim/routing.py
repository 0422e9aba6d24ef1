"""Least-cost path computation with a forced egress link.

The routing metric is the classic cost 1e8 / bandwidth-in-bps.  The
multihoming decision pins the first link of a path; the remainder follows
unconstrained least cost, which (because a simple path cannot revisit the
server) equals the least-cost path in the graph with the server removed.

Ties break deterministically: fewer hops first, then the lexicographically
smallest node-id sequence.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .errors import InfeasibleStrategyError, ParameterError, StatsError
from .topology import Link, MultihomeSetup, Topology


def link_cost(link: Link) -> float:
    """Routing cost 1e8 / bandwidth(bps); capacity is stored in Gbps."""
    if link.capacity <= 0:
        raise ParameterError(f"link capacity must be positive, got {link.capacity}")
    return 1e8 / (link.capacity * 1e9)


@dataclass(frozen=True)
class Path:
    """Simple walk from the server to a client, stored as link and node ids."""

    links: tuple[int, ...]
    nodes: tuple[int, ...]
    cost: float

    @property
    def first_link(self) -> int:
        return self.links[0]

    @property
    def hop_count(self) -> int:
        return len(self.links)


@dataclass(frozen=True)
class PathTable:
    """Per-(client, ISP) least-cost paths; None marks an unreachable pair."""

    entries: tuple[tuple[Path | None, ...], ...]

    @property
    def num_clients(self) -> int:
        return len(self.entries)

    @property
    def num_isps(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def path(self, client: int, isp: int) -> Path | None:
        return self.entries[client][isp]

    def paths_for(self, strategy: tuple[int, ...]) -> list[Path]:
        """Paths selected by a strategy; raises if any pair is unreachable."""
        out = []
        for ci, fi in enumerate(strategy):
            p = self.entries[ci][fi]
            if p is None:
                raise InfeasibleStrategyError(f"client {ci} unreachable via ISP {fi}")
            out.append(p)
        return out

    def is_feasible(self, strategy: tuple[int, ...]) -> bool:
        return all(self.entries[ci][fi] is not None for ci, fi in enumerate(strategy))


@dataclass(frozen=True)
class Footprint:
    """Links and nodes touched by a strategy's selected paths."""

    link_multiset: tuple[int, ...]
    link_set: frozenset[int]
    node_set: frozenset[int]


def _forced_sssp(
    topology: Topology, server: int, egress: int, targets: set[int]
) -> dict[int, Path]:
    """Least-cost simple paths from server through ``egress`` to each target.

    Runs Dijkstra from the egress far endpoint on the graph without the
    server.  Labels are (cost, hops, node sequence) so the pop order realises
    the documented tie-break exactly.
    """
    lk = topology.links[egress]
    if server not in (lk.endpoint_a, lk.endpoint_b):
        raise ParameterError(f"egress link {egress} is not incident to server {server}")
    start = lk.other(server)
    base = link_cost(lk)
    best: dict[int, tuple[float, int, tuple[int, ...]]] = {}
    done: set[int] = set()
    heap: list[tuple[float, int, tuple[int, ...]]] = [(base, 1, (server, start))]
    found: dict[int, Path] = {}
    remaining = set(targets)
    if start in remaining:
        pass  # resolved when popped
    while heap and remaining:
        cost, hops, nodes = heapq.heappop(heap)
        v = nodes[-1]
        if v in done:
            continue
        done.add(v)
        if v in remaining:
            links = _links_of(topology, nodes, egress)
            found[v] = Path(links=links, nodes=nodes, cost=cost)
            remaining.discard(v)
            if not remaining:
                break
        for li in topology.adjacency[v]:
            w = topology.links[li].other(v)
            if w == server or w in done:
                continue
            label = (cost + link_cost(topology.links[li]), hops + 1, nodes + (w,))
            prev = best.get(w)
            if prev is None or label < prev:
                best[w] = label
                heapq.heappush(heap, label)
    return found


def _links_of(topology: Topology, nodes: tuple[int, ...], egress: int) -> tuple[int, ...]:
    links = [egress]
    for a, b in zip(nodes[1:], nodes[2:]):
        for li in topology.adjacency[a]:
            if topology.links[li].other(a) == b:
                links.append(li)
                break
    return tuple(links)


def shortest_path(
    topology: Topology, server: int, egress: int, client: int
) -> Path | None:
    """Least-cost simple path whose first link is ``egress``; None if unreachable."""
    if client == server:
        raise ParameterError("client must differ from server")
    return _forced_sssp(topology, server, egress, {client}).get(client)


def build_path_table(topology: Topology, setup: MultihomeSetup) -> PathTable:
    """All |C| x |F| forced-egress least-cost paths for a setup."""
    per_isp = [
        _forced_sssp(topology, setup.server, eg, set(setup.clients))
        for eg in setup.isp_egress
    ]
    entries = tuple(
        tuple(per_isp[fi].get(c) for fi in range(setup.num_isps)) for c in setup.clients
    )
    return PathTable(entries)


def footprint(strategy: tuple[int, ...], table: PathTable) -> Footprint:
    """Multiset/union of links and nodes over the strategy's selected paths."""
    paths = table.paths_for(strategy)
    multiset: list[int] = []
    nodes: set[int] = set()
    for p in paths:
        multiset.extend(p.links)
        nodes.update(p.nodes)
    return Footprint(tuple(multiset), frozenset(multiset), frozenset(nodes))


def setup_stats(
    topology: Topology, setup: MultihomeSetup, table: PathTable
) -> tuple[int, int, int]:
    """(N, M, H) where H is the minimal server-client hop distance in the table."""
    hops = [
        p.hop_count
        for row in table.entries
        for p in row
        if p is not None
    ]
    if not hops:
        raise StatsError("all clients unreachable; H undefined")
    per_client = []
    for row in table.entries:
        reach = [p.hop_count for p in row if p is not None]
        if reach:
            per_client.append(min(reach))
    return topology.num_nodes, topology.num_links, min(per_client)
