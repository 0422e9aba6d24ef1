"""Outgoing-ISP vectors: enumeration, scoring, and performance gain.

A strategy assigns one egress ISP index to each client.  Strategies
serialise as letter strings over "ABC..." (client order), and enumerate in
odometer order with the last client varying fastest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from string import ascii_uppercase

import numpy as np

from .errors import (
    BaselineError,
    EnumerationTooLargeError,
    NoFeasibleStrategyError,
    ParameterError,
    UndefinedGainError,
)
from .flow import max_total
from .routing import PathTable
from .topology import MultihomeSetup

Strategy = tuple[int, ...]

ENUMERATION_CAP = 10**6


def strategy_to_letters(strategy: Strategy) -> str:
    return "".join(ascii_uppercase[f] for f in strategy)


def strategy_from_letters(text: str, num_isps: int | None = None) -> Strategy:
    out = []
    for ch in text.strip().upper():
        idx = ascii_uppercase.find(ch)
        if idx < 0 or (num_isps is not None and idx >= num_isps):
            raise ParameterError(f"invalid ISP letter {ch!r} in strategy {text!r}")
        out.append(idx)
    return tuple(out)


def enumerate_strategies(
    num_isps: int, num_clients: int, cap: int = ENUMERATION_CAP
) -> list[Strategy]:
    """All num_isps ** num_clients strategies, odometer order, all-A first."""
    if num_isps < 1 or num_clients < 1:
        raise ParameterError("num_isps and num_clients must be >= 1")
    size = num_isps**num_clients
    if size > cap:
        raise EnumerationTooLargeError(f"{size} strategies exceed the cap of {cap}")
    out = []
    for code in range(size):
        assignment = []
        rem = code
        for _ in range(num_clients):
            rem, digit = divmod(rem, num_isps)
            assignment.append(digit)
        out.append(tuple(reversed(assignment)))
    return out


def performance_gain(optimal_total: float, static_total: float) -> float:
    """Best-over-static throughput ratio; reported as a percentage downstream."""
    if static_total == 0:
        raise UndefinedGainError("static throughput is zero; gain undefined")
    return optimal_total / static_total


@dataclass(frozen=True)
class GainReport:
    optimal_strategy: Strategy
    optimal_total: float
    static_total: float
    gain: float


def score_all_strategies(
    setup: MultihomeSetup,
    table: PathTable,
    residuals: np.ndarray,
    demands: tuple[float, ...] | None = None,
) -> tuple[list[Strategy], np.ndarray]:
    """Optimal totals for every feasible enumerated strategy, enumeration order."""
    if demands is None:
        demands = setup.demands
    strategies = enumerate_strategies(setup.num_isps, setup.num_clients)
    feasible: list[Strategy] = []
    totals: list[float] = []
    for k in strategies:
        if not table.is_feasible(k):
            continue
        feasible.append(k)
        totals.append(max_total(k, table, residuals, demands))
    return feasible, np.array(totals)


def optimal_strategy(
    setup: MultihomeSetup,
    table: PathTable,
    residuals: np.ndarray,
    demands: tuple[float, ...] | None = None,
) -> GainReport:
    """Exhaustive search for the best strategy and its gain over the static baseline.

    Infeasible strategies are skipped; ties break by enumeration order.  The
    static baseline must be feasible and is scored with the same solver, so
    gain >= 1 holds exactly.
    """
    if demands is None:
        demands = setup.demands
    if not table.is_feasible(setup.static_strategy):
        raise BaselineError("static baseline strategy is infeasible")
    feasible, totals = score_all_strategies(setup, table, residuals, demands)
    if not feasible:
        raise NoFeasibleStrategyError("no feasible strategy exists")
    best_idx = int(np.argmax(totals))
    static_idx = feasible.index(setup.static_strategy)
    static_total = float(totals[static_idx])
    optimal_total = float(totals[best_idx])
    return GainReport(
        optimal_strategy=feasible[best_idx],
        optimal_total=optimal_total,
        static_total=static_total,
        gain=performance_gain(optimal_total, static_total),
    )
