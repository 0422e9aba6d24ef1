import math

import numpy as np
import pytest

from mhsim.topology import Link, MultihomeSetup, Topology


def make_topology(num_nodes, link_specs):
    """Build a Topology from (a, b, capacity) triples."""
    links = []
    adjacency = [[] for _ in range(num_nodes)]
    for idx, (a, b, cap) in enumerate(link_specs):
        links.append(Link(a, b, float(cap)))
        adjacency[a].append(idx)
        adjacency[b].append(idx)
    return Topology(num_nodes, tuple(links), tuple(tuple(x) for x in adjacency))


def unbounded(n):
    return tuple(math.inf for _ in range(n))


@pytest.fixture(scope="session")
def golden_topology():
    """The worked-example topology: a 3-multihomed server and three clients.

    Node 0 is the server; egress links go to nodes 1 (ISP A), 8 (ISP B,
    a stub), and 4 (ISP C).  Client 3 hangs off the A side; clients 6 and 7
    share the C-side trunk.  Capacities put one choke on the C egress
    (6 Gbps, server side) and one on client 3's last hop (4 Gbps).
    """
    return make_topology(
        9,
        [
            (0, 1, 10.0),  # 0: egress A
            (0, 8, 5.0),   # 1: egress B (dead end)
            (0, 4, 6.0),   # 2: egress C
            (1, 2, 8.0),   # 3
            (2, 3, 4.0),   # 4: client 3's last hop
            (4, 5, 9.0),   # 5
            (5, 6, 7.0),   # 6
            (5, 7, 8.0),   # 7
        ],
    )


@pytest.fixture(scope="session")
def golden_setup():
    return MultihomeSetup(
        server=0,
        isp_egress=(0, 1, 2),
        clients=(3, 6, 7),
        demands=unbounded(3),
        static_strategy=(0, 2, 2),
    )


@pytest.fixture(scope="session")
def golden_strategy():
    return (0, 2, 2)  # (A, C, C)


@pytest.fixture(scope="session")
def golden_table(golden_topology, golden_setup):
    from mhsim.routing import build_path_table

    return build_path_table(golden_topology, golden_setup)


@pytest.fixture(scope="session")
def golden_residuals(golden_topology):
    return golden_topology.capacities()


def random_instance(seed, max_nodes=8, max_extra_links=4, num_isps=2, num_clients=3,
                    cap_choices=None):
    """Small random connected topology plus a sampled setup and path table.

    Capacities default to multiples of 0.06 Gbps so that every allocation
    vertex lands on the 0.01 grid (useful for grid-search comparisons).
    """
    from mhsim.routing import build_path_table
    from mhsim.topology import sample_multihome_setup

    rng = np.random.default_rng(seed)
    n = int(rng.integers(max(num_isps + num_clients + 1, 5), max_nodes + 1))
    caps = cap_choices if cap_choices is not None else [0.06 * k for k in range(1, 9)]
    specs = []
    seen = set()
    for v in range(1, n):
        u = int(rng.integers(0, v))
        specs.append((u, v, float(rng.choice(caps))))
        seen.add((u, v))
    extra = int(rng.integers(0, max_extra_links + 1))
    for _ in range(extra):
        a, b = sorted(rng.choice(n, size=2, replace=False).tolist())
        if (a, b) in seen:
            continue
        seen.add((a, b))
        specs.append((a, b, float(rng.choice(caps))))
    topo = make_topology(n, specs)
    setup = sample_multihome_setup(topo, num_isps, num_clients, seed=seed)
    return topo, setup, build_path_table(topo, setup)
