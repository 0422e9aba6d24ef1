"""Independent brute-force oracles used by the tests.

These deliberately avoid the library's solver paths: allocation optima come
from an exhaustive grid search over rate vectors, entropies from direct
counting.
"""

import itertools
import math

import numpy as np


def grid_search_total(path_links, residuals, demands, step=0.01):
    """Exhaustive search over rate vectors on a fixed grid.

    ``path_links`` holds one link-index list per client.  Every client rate
    ranges over multiples of ``step`` up to min(path residual, demand); the
    last two clients are vectorised, any remaining outer clients are looped.
    """
    nc = len(path_links)
    caps = []
    for ci, links in enumerate(path_links):
        cap = min(float(residuals[li]) for li in links)
        if math.isfinite(demands[ci]):
            cap = min(cap, float(demands[ci]))
        caps.append(max(0.0, cap))
    grids = [np.arange(0.0, cap + step / 2, step) for cap in caps]

    rows = {}
    for ci, links in enumerate(path_links):
        for li in links:
            rows.setdefault(li, set()).add(ci)
    constraints = [(sorted(clients), float(residuals[li])) for li, clients in rows.items()]

    if nc == 1:
        return float(grids[0][-1])

    tail_a, tail_b = nc - 2, nc - 1
    ga, gb = grids[tail_a], grids[tail_b]
    pair = ga[:, None] + gb[None, :]
    best = -1.0
    outer = [grids[i] for i in range(nc - 2)]
    for head in itertools.product(*outer) if outer else [()]:
        feasible = np.ones((ga.size, gb.size), dtype=bool)
        ok = True
        for clients, limit in constraints:
            used = sum(head[c] for c in clients if c < tail_a)
            involves_a = tail_a in clients
            involves_b = tail_b in clients
            if not involves_a and not involves_b:
                if used > limit + 1e-12:
                    ok = False
                    break
                continue
            lhs = np.full((ga.size, gb.size), used)
            if involves_a:
                lhs = lhs + ga[:, None]
            if involves_b:
                lhs = lhs + gb[None, :]
            feasible &= lhs <= limit + 1e-12
        if not ok or not feasible.any():
            continue
        head_sum = float(sum(head))
        best = max(best, head_sum + float(pair[feasible].max()))
    return best


def entropy_by_counting(codes):
    """Plain Shannon entropy in bits from integer codes."""
    counts = {}
    for c in codes:
        counts[c] = counts.get(c, 0) + 1
    n = len(codes)
    return -sum((c / n) * math.log2(c / n) for c in counts.values())
