"""Figure rendering for experiment reports.

Each experiment kind gets one or two PNG figures rendered next to its CSV
output.  Figures are a convenience layer on top of the CSVs: the CSVs remain
the deterministic report contract and can be re-plotted externally.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _read_csv(path: str) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, list(reader)


def _save(fig, out_dir: str, name: str) -> str:
    path = os.path.join(out_dir, name)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def plot_gain_ensemble(out_dir: str) -> list[str]:
    header, rows = _read_csv(os.path.join(out_dir, "gains.csv"))
    gains = [float(r[header.index("gain_percent")]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(gains, bins=30, color="#4878d0", edgecolor="white")
    ax.axvline(100.0, color="k", lw=1, ls="--")
    ax.set_xlabel("performance gain (%)")
    ax.set_ylabel("topologies")
    ax.set_title("Optimal-over-static throughput gain")
    return [_save(fig, out_dir, "gains.png")]


def plot_factor_sweep(out_dir: str) -> list[str]:
    header, rows = _read_csv(os.path.join(out_dir, "factor_sweep_summary.csv"))
    pts = [(float(r[1]), float(r[3])) for r in rows if r[1] != "spearman_rho"]
    rho = next((float(r[3]) for r in rows if r[1] == "spearman_rho"), float("nan"))
    factor = rows[0][0] if rows else "factor"
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([p[0] for p in pts], [p[1] for p in pts], "o-", color="#d65f5f")
    ax.set_xlabel({"hops": "server-client hops", "degree": "links per node",
                   "background": "background load"}.get(factor, factor))
    ax.set_ylabel("mean gain (%)")
    ax.set_title(f"Gain vs {factor} (Spearman rho = {rho:.2f})")
    return [_save(fig, out_dir, "factor_sweep.png")]


def plot_info_gain(out_dir: str) -> list[str]:
    header, rows = _read_csv(os.path.join(out_dir, "info_gains.csv"))
    names = [r[0] for r in rows]
    gains = [float(r[1]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(names, gains, color="#6acc64")
    ax.set_ylabel("information gain")
    ax.set_ylim(0, 1)
    ax.set_title("Parameter association with throughput")
    return [_save(fig, out_dir, "info_gains.png")]


def plot_combo_eval(out_dir: str) -> list[str]:
    header, rows = _read_csv(os.path.join(out_dir, "combo_eval.csv"))
    names = [r[0] for r in rows]
    gains = [float(r[1]) for r in rows]
    colors = ["#4878d0" if n != "baseline" else "#d65f5f" for n in names]
    fig, ax = plt.subplots(figsize=(6.5, 4))
    ax.bar(names, gains, color=colors)
    ax.axhline(100.0, color="k", lw=1, ls="--")
    ax.set_ylabel("mean param gain (%)")
    ax.set_title("Combination effectiveness vs optimal baseline")
    plt.setp(ax.get_xticklabels(), rotation=30, ha="right")
    return [_save(fig, out_dir, "combo_eval.png")]


def plot_partial_info(out_dir: str) -> list[str]:
    header, rows = _read_csv(os.path.join(out_dir, "partial_info.csv"))
    out = []
    client_rows = [(float(r[1]), float(r[2])) for r in rows if r[0] == "clients"]
    if client_rows:
        fig, ax = plt.subplots(figsize=(6, 4))
        xs = [x for x, _ in client_rows]
        ax.plot(xs, [g for _, g in client_rows], "o-", color="#4878d0")
        ax.axhline(100.0, color="k", lw=1, ls="--")
        ax.set_xlabel("known client fraction")
        ax.set_ylabel("mean param gain (%)")
        ax.invert_xaxis()
        ax.set_title("Degradation with client information loss")
        out.append(_save(fig, out_dir, "partial_info_clients.png"))
    region_rows = [(r[1], float(r[2])) for r in rows if r[0] == "region"]
    if region_rows:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.bar([m for m, _ in region_rows], [g for _, g in region_rows], color="#ee854a")
        ax.axhline(100.0, color="k", lw=1, ls="--")
        ax.set_ylabel("mean param gain (%)")
        ax.set_title("Degradation with link information loss")
        out.append(_save(fig, out_dir, "partial_info_regions.png"))
    return out


def plot_runtime(out_dir: str) -> list[str]:
    header, rows = _read_csv(os.path.join(out_dir, "runtime_trace.csv"))
    if not rows:
        return []
    t_idx, ratio_idx = header.index("t_min"), header.index("oracle_ratio")
    seen: dict[int, float] = {}
    for r in rows:
        seen.setdefault(int(r[t_idx]) // 60, float(r[ratio_idx]))
    hours = sorted(seen)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.step(hours, [seen[h] for h in hours], where="post", color="#956cb4")
    ax.set_xlabel("hour")
    ax.set_ylabel("achieved / oracle throughput")
    ax.set_ylim(0, 1.05)
    ax.set_title("Control-plane strategy vs per-hour oracle")
    return [_save(fig, out_dir, "runtime_trace.png")]


_PLOTTERS = {
    "gain-ensemble": plot_gain_ensemble,
    "factor-sweep": plot_factor_sweep,
    "info-gain": plot_info_gain,
    "combo-eval": plot_combo_eval,
    "partial-info": plot_partial_info,
    "runtime": plot_runtime,
}


def render(kind: str, out_dir: str) -> list[str]:
    """Render the figures for one experiment kind; returns written paths."""
    plotter = _PLOTTERS.get(kind)
    return plotter(out_dir) if plotter else []
