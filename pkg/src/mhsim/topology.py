"""Capacitated network topologies and multihome setups.

Node ids are dense integers 0..N-1.  Links are undirected, carry a capacity
in Gbps, and are referenced everywhere else by their index into
``Topology.links``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError, SamplingError, StructuralError, TopologyFormatError

WAXMAN_ALPHA = 0.15
WAXMAN_BETA = 0.2
CAPACITY_LOW = 1.0
CAPACITY_HIGH = 50.0
CAPACITY_SHAPE = 1.2


@dataclass(frozen=True)
class Link:
    """Undirected link between two nodes with a capacity in Gbps."""

    endpoint_a: int
    endpoint_b: int
    capacity: float

    def other(self, node: int) -> int:
        return self.endpoint_b if node == self.endpoint_a else self.endpoint_a


@dataclass(frozen=True)
class Topology:
    """Immutable undirected graph: no self-loops, at most one link per pair."""

    num_nodes: int
    links: tuple[Link, ...]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def num_links(self) -> int:
        return len(self.links)

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def mean_degree(self) -> float:
        return 2.0 * self.num_links / self.num_nodes

    def capacities(self) -> np.ndarray:
        return np.array([lk.capacity for lk in self.links])


@dataclass(frozen=True)
class MultihomeSetup:
    """A peering server, its egress ISP links, and the client nodes.

    ``demands`` holds one rate cap per client in Gbps; ``math.inf`` means
    unconstrained.  ``static_strategy`` is the baseline outgoing-ISP vector,
    one egress index in [0, num_isps) per client.
    """

    server: int
    isp_egress: tuple[int, ...]
    clients: tuple[int, ...]
    demands: tuple[float, ...]
    static_strategy: tuple[int, ...]

    @property
    def num_isps(self) -> int:
        return len(self.isp_egress)

    @property
    def num_clients(self) -> int:
        return len(self.clients)


def _build(num_nodes: int, pairs: list[tuple[int, int]], caps: np.ndarray) -> Topology:
    links = []
    adjacency: list[list[int]] = [[] for _ in range(num_nodes)]
    for idx, ((a, b), cap) in enumerate(zip(pairs, caps)):
        links.append(Link(a, b, float(cap)))
        adjacency[a].append(idx)
        adjacency[b].append(idx)
    return Topology(num_nodes, tuple(links), tuple(tuple(x) for x in adjacency))


def _waxman_pairs(
    rng: np.random.Generator,
    node_ids: list[int],
    m_per_node: int,
    alpha: float,
    beta: float,
) -> set[tuple[int, int]]:
    """Incremental Waxman attachment over the given nodes.

    Each arriving node links to up to ``m_per_node`` distinct earlier nodes,
    chosen with probability proportional to alpha * exp(-d / (beta * L))
    where d is Euclidean distance on the unit square and L its diagonal.
    Attaching to earlier nodes keeps the subgraph connected by construction.
    """
    n = len(node_ids)
    xs = rng.random(n)
    ys = rng.random(n)
    diag = math.sqrt(2.0)
    pairs: set[tuple[int, int]] = set()
    for v in range(1, n):
        d = np.hypot(xs[:v] - xs[v], ys[:v] - ys[v])
        weights = alpha * np.exp(-d / (beta * diag))
        total = weights.sum()
        probs = weights / total if total > 0 else np.full(v, 1.0 / v)
        k = min(m_per_node, v)
        targets = rng.choice(v, size=k, replace=False, p=probs)
        for u in targets:
            a, b = sorted((node_ids[int(u)], node_ids[v]))
            pairs.add((a, b))
    return pairs


def generate_waxman(
    n: int,
    m_per_node: int = 2,
    alpha: float = WAXMAN_ALPHA,
    beta: float = WAXMAN_BETA,
    seed: int = 0,
) -> Topology:
    """Generate a connected flat Waxman topology with N=n and M close to m_per_node*n.

    Capacities are initialised to 1.0 Gbps; call :func:`assign_capacities`
    to draw the heavy-tailed capacity vector.
    """
    if n < 2:
        raise ParameterError(f"waxman needs n >= 2, got {n}")
    if m_per_node < 1:
        raise ParameterError(f"waxman needs m_per_node >= 1, got {m_per_node}")
    if not (0.0 < alpha <= 1.0 and 0.0 < beta <= 1.0):
        raise ParameterError(f"waxman needs alpha, beta in (0, 1], got {alpha}, {beta}")
    rng = np.random.default_rng(seed)
    pairs = sorted(_waxman_pairs(rng, list(range(n)), m_per_node, alpha, beta))
    return _build(n, pairs, np.ones(len(pairs)))


def generate_transit_stub(
    num_as: int,
    nodes_per_as: int,
    seed: int = 0,
    m_per_node: int = 2,
    alpha: float = WAXMAN_ALPHA,
    beta: float = WAXMAN_BETA,
) -> Topology:
    """Generate a two-level transit-stub topology with N = num_as * nodes_per_as.

    Each AS is an internal Waxman subgraph whose first node acts as the border
    router; border routers are joined by a Waxman transit core, so every
    inter-AS path funnels through the core.
    """
    if num_as < 2:
        raise ParameterError(f"transit-stub needs num_as >= 2, got {num_as}")
    if nodes_per_as < 2:
        raise ParameterError(f"transit-stub needs nodes_per_as >= 2, got {nodes_per_as}")
    rng = np.random.default_rng(seed)
    pairs: set[tuple[int, int]] = set()
    borders = []
    for a in range(num_as):
        ids = list(range(a * nodes_per_as, (a + 1) * nodes_per_as))
        borders.append(ids[0])
        pairs |= _waxman_pairs(rng, ids, m_per_node, alpha, beta)
    pairs |= _waxman_pairs(rng, borders, m_per_node, alpha, beta)
    n = num_as * nodes_per_as
    ordered = sorted(pairs)
    return _build(n, ordered, np.ones(len(ordered)))


def assign_capacities(
    topology: Topology,
    low: float = CAPACITY_LOW,
    high: float = CAPACITY_HIGH,
    shape: float = CAPACITY_SHAPE,
    seed: int = 0,
) -> Topology:
    """Draw i.i.d. truncated-Pareto capacities in [low, high] for every link.

    Pareto with scale ``low`` and tail index ``shape``; draws above ``high``
    are resampled.  Deterministic per seed.
    """
    if not (0 < low < high):
        raise ParameterError(f"need 0 < low < high, got {low}, {high}")
    if shape <= 0:
        raise ParameterError(f"need shape > 0, got {shape}")
    if topology.num_links == 0:
        raise StructuralError("cannot assign capacities to a topology with no links")
    rng = np.random.default_rng(seed)
    caps = np.empty(topology.num_links)
    todo = np.arange(topology.num_links)
    while todo.size:
        caps[todo] = low * (1.0 + rng.pareto(shape, size=todo.size))
        todo = todo[caps[todo] > high]
    new_links = tuple(replace(lk, capacity=float(c)) for lk, c in zip(topology.links, caps))
    return Topology(topology.num_nodes, new_links, topology.adjacency)


def save_topology(topology: Topology, path: str) -> None:
    """Write the edge-list text format: header then one 'u v capacity' line per link."""
    with open(path, "w") as fh:
        fh.write(f"nodes {topology.num_nodes} links {topology.num_links}\n")
        for lk in topology.links:
            fh.write(f"{lk.endpoint_a} {lk.endpoint_b} {lk.capacity!r}\n")


def load_topology(path: str) -> Topology:
    """Parse an edge-list file; node ids are remapped densely in sorted order."""
    header: tuple[int, int] | None = None
    raw: list[tuple[int, int, float]] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if header is None:
                parts = text.split()
                if len(parts) != 4 or parts[0] != "nodes" or parts[2] != "links":
                    raise TopologyFormatError(f"{path}:{lineno}: expected 'nodes <N> links <M>' header")
                try:
                    header = (int(parts[1]), int(parts[3]))
                except ValueError:
                    raise TopologyFormatError(f"{path}:{lineno}: non-integer header counts") from None
                continue
            parts = text.split()
            if len(parts) != 3:
                raise TopologyFormatError(f"{path}:{lineno}: expected 'u v capacity'")
            try:
                u, v, cap = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise TopologyFormatError(f"{path}:{lineno}: malformed link line") from None
            if u == v:
                raise TopologyFormatError(f"{path}:{lineno}: self-loop on node {u}")
            if cap <= 0:
                raise TopologyFormatError(f"{path}:{lineno}: non-positive capacity {cap}")
            raw.append((u, v, cap))
    if header is None:
        raise TopologyFormatError(f"{path}: missing header line")
    n, m = header
    if len(raw) != m:
        raise TopologyFormatError(f"{path}: header declares {m} links, found {len(raw)}")
    ids = sorted({u for u, _, _ in raw} | {v for _, v, _ in raw})
    if len(ids) > n:
        raise TopologyFormatError(f"{path}: header declares {n} nodes, found {len(ids)} distinct ids")
    remap = {orig: i for i, orig in enumerate(ids)}
    seen: set[tuple[int, int]] = set()
    pairs: list[tuple[int, int]] = []
    caps: list[float] = []
    for lineno_offset, (u, v, cap) in enumerate(raw):
        a, b = sorted((remap[u], remap[v]))
        if (a, b) in seen:
            raise TopologyFormatError(f"{path}: duplicate edge {u}-{v}")
        seen.add((a, b))
        pairs.append((a, b))
        caps.append(cap)
    return _build(n, pairs, np.array(caps))


def save_setup(setup: MultihomeSetup, path: str) -> None:
    """Write a multihome setup as JSON; unbounded demands serialise as null."""
    payload = {
        "server": setup.server,
        "isp_egress": list(setup.isp_egress),
        "clients": list(setup.clients),
        "demands": [None if math.isinf(d) else d for d in setup.demands],
        "static_strategy": list(setup.static_strategy),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_setup(path: str) -> MultihomeSetup:
    with open(path) as fh:
        raw = json.load(fh)
    demands = raw.get("demands")
    if demands in (None, "unbounded"):
        demands = [None] * len(raw["clients"])
    return MultihomeSetup(
        server=int(raw["server"]),
        isp_egress=tuple(int(x) for x in raw["isp_egress"]),
        clients=tuple(int(x) for x in raw["clients"]),
        demands=tuple(math.inf if d is None else float(d) for d in demands),
        static_strategy=tuple(int(x) for x in raw["static_strategy"]),
    )


def _reachable_from(topology: Topology, start: int) -> np.ndarray:
    seen = np.zeros(topology.num_nodes, dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        v = stack.pop()
        for li in topology.adjacency[v]:
            w = topology.links[li].other(v)
            if not seen[w]:
                seen[w] = True
                stack.append(w)
    return seen


def round_balanced_strategy(num_isps: int, num_clients: int) -> tuple[int, ...]:
    """Spread clients over ISPs in blocks: (A,A,B,B,C) for 3 ISPs, 5 clients."""
    per = num_clients / num_isps
    return tuple(min(int(i / per), num_isps - 1) for i in range(num_clients))


def sample_multihome_setup(
    topology: Topology,
    num_isps: int = 3,
    num_clients: int = 5,
    seed: int = 0,
    demands: float = math.inf,
) -> MultihomeSetup:
    """Sample a server with degree >= num_isps, its egress links, and clients.

    The server is uniform over eligible nodes, egress links are distinct
    incident links, and clients are distinct non-server nodes reachable from
    the server.  The static baseline defaults to the round-balanced vector.
    """
    if num_isps < 2:
        raise ParameterError(f"multihoming requires num_isps >= 2, got {num_isps}")
    if num_clients < 1:
        raise ParameterError(f"need num_clients >= 1, got {num_clients}")
    if topology.num_nodes <= num_clients:
        raise ParameterError("topology has too few nodes for the requested clients")
    rng = np.random.default_rng(seed)
    eligible = [v for v in range(topology.num_nodes) if topology.degree(v) >= num_isps]
    if not eligible:
        raise SamplingError(f"no node has degree >= {num_isps}")
    server = int(rng.choice(eligible))
    egress = tuple(int(li) for li in rng.choice(topology.adjacency[server], size=num_isps, replace=False))
    reachable = _reachable_from(topology, server)
    pool = [v for v in range(topology.num_nodes) if v != server and reachable[v]]
    if len(pool) < num_clients:
        raise SamplingError("not enough reachable client candidates")
    clients = tuple(int(c) for c in rng.choice(pool, size=num_clients, replace=False))
    return MultihomeSetup(
        server=server,
        isp_egress=egress,
        clients=clients,
        demands=tuple(float(demands) for _ in range(num_clients)),
        static_strategy=round_balanced_strategy(num_isps, num_clients),
    )
