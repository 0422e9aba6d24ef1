"""Normalized mutual information between parameters and throughput.

Information gain of a parameter b against throughput Y is
(H(Y) - H(Y|b)) / H(Y) with Shannon entropies in bits over a shared binning:
equal-frequency deciles with merged duplicate edges, except that variables
with at most 20 distinct values bin on the exact values.  Decile edges are
taken from the data itself (inverted CDF), so the binning is invariant under
strictly monotone relabelings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .parameters import PARAMETER_NAMES, ParameterVector

MAX_DISCRETE_VALUES = 20
NUM_QUANTILE_BINS = 10


def bin_values(values) -> np.ndarray:
    """Integer bin codes for a 1-D sample under the shared binning rule."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ParameterError("cannot bin an empty sample")
    distinct = np.unique(v)
    if distinct.size <= MAX_DISCRETE_VALUES:
        return np.searchsorted(distinct, v)
    qs = np.arange(1, NUM_QUANTILE_BINS) / NUM_QUANTILE_BINS
    edges = np.unique(np.quantile(v, qs, method="inverted_cdf"))
    return np.searchsorted(edges, v, side="right")


def entropy(values, precomputed_bins: np.ndarray | None = None) -> float:
    """Shannon entropy in bits of the empirical bin distribution."""
    codes = bin_values(values) if precomputed_bins is None else precomputed_bins
    if codes.size == 0:
        raise ParameterError("cannot compute entropy of an empty sample")
    _, counts = np.unique(codes, return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def information_gain(param_samples, throughput_samples) -> float:
    """(H(Y) - H(Y|b)) / H(Y); zero by convention when H(Y) = 0."""
    x = np.asarray(param_samples, dtype=float)
    y = np.asarray(throughput_samples, dtype=float)
    if x.size != y.size:
        raise ParameterError(f"length mismatch: {x.size} vs {y.size}")
    if x.size == 0:
        raise ParameterError("cannot compute information gain of empty samples")
    bx = bin_values(x)
    by = bin_values(y)
    h_y = entropy(y, precomputed_bins=by)
    if h_y == 0.0:
        return 0.0
    h_y_given = _conditional_entropy(by, bx)
    return float((h_y - h_y_given) / h_y)


def _conditional_entropy(target_bins: np.ndarray, cond_bins: np.ndarray) -> float:
    n = target_bins.size
    joint: dict[tuple[int, int], int] = {}
    for a, b in zip(cond_bins.tolist(), target_bins.tolist()):
        joint[(a, b)] = joint.get((a, b), 0) + 1
    per_cond: dict[int, list[int]] = {}
    for (a, _), count in joint.items():
        per_cond.setdefault(a, []).append(count)
    h = 0.0
    for counts in per_cond.values():
        c = np.asarray(counts, dtype=float)
        total = c.sum()
        p = c / total
        h += (total / n) * float(-(p * np.log2(p)).sum())
    return h


@dataclass(frozen=True)
class SampleSet:
    """Paired (parameter vector, throughput) records from an ensemble."""

    records: tuple[tuple[ParameterVector, float], ...]
    provenance: str = ""

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(pv, name) for pv, _ in self.records], dtype=float)

    def throughputs(self) -> np.ndarray:
        return np.array([t for _, t in self.records])


@dataclass(frozen=True)
class InfoGainTable:
    gains: dict[str, float]
    bin_spec: str = "equal-frequency deciles; exact values when <= 20 distinct"

    def ranked(self) -> list[tuple[str, float]]:
        return sorted(self.gains.items(), key=lambda kv: -kv[1])

    def top(self) -> str:
        return self.ranked()[0][0]


def info_gain_table(samples: SampleSet) -> InfoGainTable:
    """Information gain of each of the eight parameters against throughput."""
    if not samples.records:
        raise ParameterError("sample set is empty")
    y = samples.throughputs()
    gains = {
        name: information_gain(samples.column(name), y) for name in PARAMETER_NAMES
    }
    return InfoGainTable(gains)
