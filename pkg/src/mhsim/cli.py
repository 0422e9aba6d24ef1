"""Command-line interface.

``mhsim`` exposes every tool as a subgroup (``mhsim topo gen-waxman ...``,
``mhsim run ...``); each subgroup is also installed as its own console
script (``topo``, ``route``, ``flow``, ``strategy``, ``params``, ``analyze``,
``schedule``) so the commands can be invoked directly.
"""

from __future__ import annotations

import csv
import sys

import click

from . import analysis
from . import flow as flow_mod
from . import harness, parameters, routing, scheduler
from . import strategy as strategy_mod
from . import topology as topo_mod


@click.group()
def main():
    """Multihoming flow-scheduling simulator."""


# ---------------------------------------------------------------------- topo


@main.group()
def topo():
    """Generate, transform, and sample network topologies."""


@topo.command("gen-waxman")
@click.option("--n", type=int, required=True, help="node count")
@click.option("--m-per-node", type=int, default=2, show_default=True)
@click.option("--alpha", type=float, default=topo_mod.WAXMAN_ALPHA, show_default=True)
@click.option("--beta", type=float, default=topo_mod.WAXMAN_BETA, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--with-caps/--no-caps", default=True, show_default=True,
              help="also draw heavy-tailed capacities")
def gen_waxman(n, m_per_node, alpha, beta, seed, out, with_caps):
    t = topo_mod.generate_waxman(n, m_per_node, alpha, beta, seed)
    if with_caps:
        t = topo_mod.assign_capacities(t, seed=seed + 7_777)
    topo_mod.save_topology(t, out)
    click.echo(f"wrote {out}: N={t.num_nodes} M={t.num_links}")


@topo.command("gen-ts")
@click.option("--as", "num_as", type=int, required=True, help="AS count")
@click.option("--per-as", type=int, required=True, help="nodes per AS")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--with-caps/--no-caps", default=True, show_default=True)
def gen_ts(num_as, per_as, seed, out, with_caps):
    t = topo_mod.generate_transit_stub(num_as, per_as, seed)
    if with_caps:
        t = topo_mod.assign_capacities(t, seed=seed + 7_777)
    topo_mod.save_topology(t, out)
    click.echo(f"wrote {out}: N={t.num_nodes} M={t.num_links}")


@topo.command("caps")
@click.option("--topo", "topo_path", type=click.Path(exists=True), required=True)
@click.option("--low", type=float, default=topo_mod.CAPACITY_LOW, show_default=True)
@click.option("--high", type=float, default=topo_mod.CAPACITY_HIGH, show_default=True)
@click.option("--shape", type=float, default=topo_mod.CAPACITY_SHAPE, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def caps(topo_path, low, high, shape, seed, out):
    """Redraw link capacities from the truncated heavy-tailed law."""
    t = topo_mod.load_topology(topo_path)
    t = topo_mod.assign_capacities(t, low, high, shape, seed)
    topo_mod.save_topology(t, out)
    click.echo(f"wrote {out}: capacities in [{low}, {high}] Gbps")


@topo.command("setup")
@click.option("--topo", "topo_path", type=click.Path(exists=True), required=True)
@click.option("--isps", type=int, default=3, show_default=True)
@click.option("--clients", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def setup_cmd(topo_path, isps, clients, seed, out):
    """Sample a multihome setup (server, egress links, clients) as JSON."""
    t = topo_mod.load_topology(topo_path)
    s = topo_mod.sample_multihome_setup(t, isps, clients, seed)
    topo_mod.save_setup(s, out)
    click.echo(
        f"wrote {out}: server={s.server} egress={list(s.isp_egress)} clients={list(s.clients)}"
    )


# --------------------------------------------------------------------- route


@main.group()
def route():
    """Forced-egress least-cost routing."""


@route.command("table")
@click.option("--topo", "topo_path", type=click.Path(exists=True), required=True)
@click.option("--setup", "setup_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
def route_table(topo_path, setup_path, out):
    """Write the per-(client, ISP) path table as CSV."""
    t = topo_mod.load_topology(topo_path)
    s = topo_mod.load_setup(setup_path)
    table = routing.build_path_table(t, s)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["client", "isp", "hops", "link_ids"])
        for ci in range(table.num_clients):
            for fi in range(table.num_isps):
                p = table.path(ci, fi)
                if p is None:
                    writer.writerow([ci, fi, "", "unreachable"])
                else:
                    writer.writerow([ci, fi, p.hop_count, " ".join(map(str, p.links))])
    click.echo(f"wrote {out}")


# ---------------------------------------------------------------------- flow


@main.group()
def flow():
    """Throughput allocation under capacity constraints."""


def _load_common(topo_path, setup_path, profile_path, hour):
    t = topo_mod.load_topology(topo_path)
    s = topo_mod.load_setup(setup_path)
    prof = flow_mod.profile_from_json(profile_path) if profile_path else flow_mod.ZERO_PROFILE
    residuals = flow_mod.residual_vector(t, hour, prof)
    return t, s, routing.build_path_table(t, s), residuals


@flow.command("throughput")
@click.option("--topo", "topo_path", type=click.Path(exists=True), required=True)
@click.option("--setup", "setup_path", type=click.Path(exists=True), required=True)
@click.option("--strategy", "strategy_text", required=True, help="letters, e.g. AACBC")
@click.option("--hour", type=int, default=0, show_default=True)
@click.option("--profile", "profile_path", type=click.Path(exists=True), default=None)
def flow_throughput(topo_path, setup_path, strategy_text, hour, profile_path):
    """Print per-client rates and the total for one strategy."""
    t, s, table, residuals = _load_common(topo_path, setup_path, profile_path, hour)
    k = strategy_mod.strategy_from_letters(strategy_text, s.num_isps)
    sol = flow_mod.max_throughput(k, table, s.demands, residuals)
    for ci, rate in enumerate(sol.rates):
        click.echo(f"client {ci}: {rate:.6f} Gbps")
    click.echo(f"total: {sol.total:.6f} Gbps")
    if sol.saturated_links:
        click.echo(f"saturated links: {' '.join(map(str, sol.saturated_links))}")


# ------------------------------------------------------------------ strategy


@main.group()
def strategy():
    """Strategy enumeration and optimal search."""


@strategy.command("best")
@click.option("--topo", "topo_path", type=click.Path(exists=True), required=True)
@click.option("--setup", "setup_path", type=click.Path(exists=True), required=True)
@click.option("--hour", type=int, default=0, show_default=True)
@click.option("--profile", "profile_path", type=click.Path(exists=True), default=None)
def strategy_best(topo_path, setup_path, hour, profile_path):
    """Exhaustive search for the optimal strategy and its gain."""
    t, s, table, residuals = _load_common(topo_path, setup_path, profile_path, hour)
    report = strategy_mod.optimal_strategy(s, table, residuals)
    click.echo(f"optimal: {strategy_mod.strategy_to_letters(report.optimal_strategy)}")
    click.echo(f"optimal_total: {report.optimal_total:.6f} Gbps")
    click.echo(f"static_total: {report.static_total:.6f} Gbps")
    click.echo(f"gain: {100.0 * report.gain:.2f}%")


# -------------------------------------------------------------------- params


@main.command("params")
@click.option("--topo", "topo_path", type=click.Path(exists=True), required=True)
@click.option("--setup", "setup_path", type=click.Path(exists=True), required=True)
@click.option("--strategy", "strategy_text", required=True)
@click.option("--hour", type=int, default=0, show_default=True)
@click.option("--profile", "profile_path", type=click.Path(exists=True), default=None)
@click.option("--clients-frac", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--region", type=click.Choice(list(parameters.REGIONS)), default=parameters.REGION_ALL,
              show_default=True)
def params_cmd(topo_path, setup_path, strategy_text, hour, profile_path, clients_frac, seed, region):
    """Print the eight path observables of a strategy as CSV."""
    t, s, table, residuals = _load_common(topo_path, setup_path, profile_path, hour)
    k = strategy_mod.strategy_from_letters(strategy_text, s.num_isps)
    view = parameters.degrade_link_info(parameters.FULL_VIEW, region)
    view = parameters.degrade_client_info(view, clients_frac, seed, s.num_clients)
    vec = parameters.compute_parameters(k, table, residuals, view)
    click.echo(",".join(parameters.PARAMETER_NAMES))
    click.echo(",".join(str(getattr(vec, n)) for n in parameters.PARAMETER_NAMES))


# ------------------------------------------------------------------- analyze


@main.group()
def analyze():
    """Information-gain analysis over parameter/throughput samples."""


@analyze.command("info-gain")
@click.option("--samples", "samples_path", type=click.Path(exists=True), required=True,
              help="CSV with columns P,E,O,B,W,BL1,BL2,BL3,throughput")
@click.option("--out", type=click.Path(), required=True)
def analyze_info_gain(samples_path, out):
    rows = []
    with open(samples_path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            vec = parameters.ParameterVector(
                P=int(float(row["P"])), E=int(float(row["E"])), O=int(float(row["O"])),
                B=int(float(row["B"])), W=float(row["W"]), BL1=int(float(row["BL1"])),
                BL2=int(float(row["BL2"])), BL3=int(float(row["BL3"])),
            )
            rows.append((vec, float(row["throughput"])))
    table = analysis.info_gain_table(analysis.SampleSet(tuple(rows), provenance=samples_path))
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["parameter", "info_gain"])
        for name, gain in table.ranked():
            writer.writerow([name, f"{gain:.6f}"])
    click.echo(f"wrote {out}; top parameter: {table.top()}")


# ------------------------------------------------------------------ schedule


@main.group()
def schedule():
    """Parameter-combination selection and the control-plane runtime."""


@schedule.command("select")
@click.option("--combo", default="EOW", show_default=True)
@click.option("--topo", "topo_path", type=click.Path(exists=True), required=True)
@click.option("--setup", "setup_path", type=click.Path(exists=True), required=True)
@click.option("--hour", type=int, default=0, show_default=True)
@click.option("--profile", "profile_path", type=click.Path(exists=True), default=None)
def schedule_select(combo, topo_path, setup_path, hour, profile_path):
    """Select a strategy from cheap parameters and report its gain."""
    t, s, table, residuals = _load_common(topo_path, setup_path, profile_path, hour)
    combination = scheduler.Combination.parse(combo)
    gain, result = scheduler.param_performance_gain(combination, s, table, residuals)
    click.echo(f"selected: {strategy_mod.strategy_to_letters(result.selected)}")
    click.echo(f"pareto_set_size: {len(result.pareto_set)}")
    click.echo(f"param_gain: {100.0 * gain:.2f}%")


@schedule.command("runtime")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True,
              help="control-plane JSON config")
@click.option("--topo", "topo_path", type=click.Path(exists=True), required=True)
@click.option("--setup", "setup_path", type=click.Path(exists=True), required=True)
@click.option("--profile", "profile_path", type=click.Path(exists=True), default=None)
@click.option("--hours", type=int, default=24, show_default=True)
@click.option("--workload", type=float, default=2.0, show_default=True,
              help="mean requests per client per minute")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def schedule_runtime(config_path, topo_path, setup_path, profile_path, hours, workload, seed, out):
    """Simulate the control plane and write the request trace CSV."""
    t = topo_mod.load_topology(topo_path)
    s = topo_mod.load_setup(setup_path)
    prof = flow_mod.profile_from_json(profile_path) if profile_path else flow_mod.ZERO_PROFILE
    config = scheduler.ControlPlaneConfig.from_json(config_path)
    trace = scheduler.run_control_plane(config, t, s, prof, workload, hours, seed)
    ratio_by_hour = dict(trace.achieved_vs_oracle)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_min", "client", "isp", "hit", "oracle_ratio"])
        for tmin, client, isp, hit in trace.events:
            ratio = ratio_by_hour.get(tmin - tmin % 60, 0.0)
            writer.writerow([tmin, client, strategy_mod.strategy_to_letters((isp,)), int(hit),
                             f"{ratio:.6f}"])
    click.echo(
        f"wrote {out}: {len(trace.events)} events, "
        f"{len(trace.bottleneck_refreshes)} bottleneck refreshes, "
        f"{len(trace.topology_refreshes)} topology refreshes, "
        f"hit rate {trace.hit_rate():.3f}"
    )


# ----------------------------------------------------------------------- run


@main.command("run")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--out-dir", type=click.Path(), required=True)
@click.option("--plots/--no-plots", default=True, show_default=True)
def run_cmd(config_path, out_dir, plots):
    """Run an experiment config and write its CSV report and figures."""
    cfg = harness.ExperimentConfig.from_json(config_path)
    result = harness.run_experiment(cfg, out_dir, render_plots=plots)
    click.echo(f"experiment {cfg.kind} complete; outputs in {out_dir}")
    if "summary" in result:
        for key, value in result["summary"].items():
            click.echo(f"  {key}: {value}")


if __name__ == "__main__":
    main(sys.argv[1:])
