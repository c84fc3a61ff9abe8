"""Command-line surface: design, generate, analyze, oracle, simulate, sweep.

Flags use datacenter units (microseconds, Gbps, MB); outputs are JSON or
CSV on stdout, structured errors on stderr. Exit codes: 0 success,
2 validation, 3 infeasible constraints, 4 budget exceeded.
"""

from __future__ import annotations

import functools
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import click

from . import analytics, io, oracle, sim, topology
from .core import (
    diameter,
    emulated_graph,
    simple_emulated_graph,
)
from .demand import random_permutation_demand, uniform_demand
from .errors import RdcnError, SpecValidationError


def _fail(err: RdcnError) -> None:
    payload = {"error": type(err).__name__, "message": str(err)}
    click.echo(json.dumps(payload, sort_keys=True), err=True)
    sys.exit(err.exit_code)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except RdcnError as err:
            _fail(err)

    return wrapper


@click.group()
def main():
    """Periodic reconfigurable datacenter network toolkit."""


def _schedule_payload_from_design(outcome, nt, nu, delta_us, delta_r_us, cap_gbps):
    return io.schedule_dict(
        num_tors=nt,
        num_uplinks=nu,
        delta_us=delta_us,
        delta_r_us=delta_r_us,
        capacity_gbps=cap_gbps,
        switch_schedules=outcome.switch_schedules,
    )


def _report_display_units(report, delta_us, cap_gbps):
    """Report dict extended with CLI units, computed cancellation-first.

    The exact products (degree * Gbps * us / 8000 for MB, integer hop
    counts times exact microseconds for delay) keep the headline values
    free of float fuzz.
    """
    d = report.degree
    payload = report.to_dict()
    if report.gamma == 1:
        delay_us = 0.0
        buffer_mb = 0.0
    else:
        delay_us = (
            2.0
            * analytics.log_base(report.num_tors, d)
            * d
            * delta_us
            / report.num_uplinks
        )
        buffer_mb = d * cap_gbps * delta_us / 8000.0
    payload["delay_us"] = delay_us
    payload["per_node_buffer_mb"] = buffer_mb
    payload["format"] = io.FORMAT_VERSION
    return payload


@main.command("design")
@click.option("--nt", type=int, required=True, help="Number of ToR switches.")
@click.option("--nu", type=int, required=True, help="Uplinks (and switches).")
@click.option("--delta-us", type=float, required=True, help="Timeslot, microseconds.")
@click.option("--delta-r-us", type=float, required=True, help="Reconfiguration time.")
@click.option("--cap-gbps", type=float, required=True, help="Link capacity, Gbps.")
@click.option("--buffer-mb", type=float, default=None, help="Per-node buffer budget.")
@click.option("--latency-us", type=float, default=None, help="Delay budget.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Directory for artifacts.")
@handle_errors
def cmd_design(nt, nu, delta_us, delta_r_us, cap_gbps, buffer_mb, latency_us, seed, out):
    """Pick the optimal degree and emit the schedule plus its report."""
    if buffer_mb is None and latency_us is None:
        raise SpecValidationError("pass --buffer-mb, --latency-us, or both")
    outcome = analytics.design(
        num_tors=nt,
        num_uplinks=nu,
        delta=io.us_to_s(delta_us),
        reconfig_delta=io.us_to_s(delta_r_us),
        link_capacity=io.gbps_to_bps(cap_gbps),
        buffer_bits=io.mb_to_bits(buffer_mb) if buffer_mb is not None else None,
        max_delay=io.us_to_s(latency_us) if latency_us is not None else None,
        seed=seed,
    )
    report = _report_display_units(outcome.report, delta_us, cap_gbps)
    schedule = _schedule_payload_from_design(
        outcome, nt, nu, delta_us, delta_r_us, cap_gbps
    )
    if out is not None:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        io.save_schedule(out_dir / "schedule.json", schedule)
        (out_dir / "report.json").write_text(io.dump_json(report), encoding="utf-8")
    click.echo(io.dump_json(report), nl=False)


@main.command("gen-schedule")
@click.option("--kind", type=click.Choice(["debruijn", "complete", "static", "random-regular"]), required=True)
@click.option("--nt", type=int, required=True)
@click.option("--nu", type=int, required=True)
@click.option("--degree", type=int, default=None, help="Emulated degree (debruijn/random-regular).")
@click.option("--delta-us", type=float, default=100.0, show_default=True)
@click.option("--delta-r-us", type=float, default=10.0, show_default=True)
@click.option("--cap-gbps", type=float, default=400.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@handle_errors
def cmd_gen_schedule(kind, nt, nu, degree, delta_us, delta_r_us, cap_gbps, seed, out):
    """Generate a periodic matching schedule emulating the chosen graph."""
    if kind == "complete":
        schedules = topology.complete_graph_schedule(nt, nu)
    elif kind == "static":
        schedules = topology.static_schedule(nt, nu, seed)
    else:
        if degree is None:
            raise SpecValidationError(f"--degree is required for kind {kind!r}")
        spec = topology.EmulatedGraphSpec(kind=kind, num_tors=nt, degree=degree, seed=seed)
        graph = topology.generate_emulated_graph(spec)
        matchings = topology.decompose_matchings(graph)
        schedules = topology.assign_to_switches(matchings, nu, seed)
    payload = io.schedule_dict(nt, nu, delta_us, delta_r_us, cap_gbps, schedules)
    io.graph_from_schedule_dict(payload)  # round-trip validation before writing
    io.save_schedule(out, payload)
    click.echo(io.dump_json({"written": str(out), "gamma": len(schedules[0])}), nl=False)


@main.command("analyze")
@click.option("--schedule", "schedule_path", type=click.Path(exists=True), required=True)
@click.option("--emulated-csv", type=click.Path(), default=None, help="Also export the labeled emulated graph.")
@handle_errors
def cmd_analyze(schedule_path, emulated_csv):
    """Analytical envelope (throughput, delay, buffer) of a schedule."""
    g, payload = io.load_schedule(schedule_path)
    simple = simple_emulated_graph(g)
    out_degrees = [
        len(simple.successors(u, include_self=True)) for u in range(g.num_tors)
    ]
    degree = max(out_degrees)
    regular = min(out_degrees) == degree
    diam = diameter(simple)
    report = analytics.report_for_degree(
        degree=degree,
        num_tors=g.num_tors,
        num_uplinks=g.num_uplinks,
        delta=g.delta,
        reconfig_fraction=g.reconfig_fraction,
        link_capacity=io.gbps_to_bps(float(payload["capacity_gbps"])),
    )
    result = _report_display_units(
        report, float(payload["delta_us"]), float(payload["capacity_gbps"])
    )
    result["regular"] = regular
    result["diameter"] = diam if math.isfinite(diam) else None
    result["total_emulated_capacity_bps"] = emulated_graph(g).total_capacity()
    if emulated_csv is not None:
        Path(emulated_csv).write_text(
            io.emulated_graph_csv(emulated_graph(g)), encoding="utf-8"
        )
    click.echo(io.dump_json(result), nl=False)


@main.command("oracle")
@click.option("--schedule", "schedule_path", type=click.Path(exists=True), required=True)
@click.option("--demand", "demand_kind", type=click.Choice(["permutation", "all-to-all", "worst"]), default="permutation", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--temporal", is_flag=True, help="Solve the time-expanded formulation.")
@click.option("--path-cap", type=int, default=None, help="Maximum path length in hops.")
@handle_errors
def cmd_oracle(schedule_path, demand_kind, seed, temporal, path_cap):
    """Exact throughput of a schedule under a chosen demand matrix."""
    g, _ = io.load_schedule(schedule_path)
    simple = simple_emulated_graph(g)
    caps = oracle.node_capacities(simple)
    if demand_kind == "worst":
        worst = oracle.worst_case_permutation(simple, path_len_cap=path_cap)
        payload = {
            "theta": worst.theta,
            "permutation": list(worst.permutation),
            "exhaustive": worst.exhaustive,
        }
        click.echo(io.dump_json(payload), nl=False)
        return
    if demand_kind == "permutation":
        dm = random_permutation_demand(g.num_tors, caps, seed)
    else:
        dm = uniform_demand(g.num_tors, caps)
    if temporal:
        res = oracle.temporal_max_flow(g, dm, hop_cap=path_cap)
    else:
        res = oracle.max_concurrent_flow(simple, dm, path_len_cap=path_cap)
    click.echo(io.dump_json(res.to_dict()), nl=False)


def _sim_config_from_json(path) -> sim.SimConfig:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecValidationError(f"config {path}: {exc}") from exc
    schedule = payload.get("schedule")
    if isinstance(schedule, str):
        g, _ = io.load_schedule(Path(path).parent / schedule)
    elif isinstance(schedule, dict):
        g = io.graph_from_schedule_dict(schedule)
    else:
        raise SpecValidationError("config needs a 'schedule' object or path")
    if "buffer_bits" in payload:
        buffer_bits = int(payload["buffer_bits"])
    elif "buffer_mb" in payload:
        buffer_bits = int(io.mb_to_bits(float(payload["buffer_mb"])))
    elif "buffer_packets" in payload:
        buffer_bits = int(float(payload["buffer_packets"]) * io.PACKET_BITS)
    else:
        raise SpecValidationError("config needs buffer_bits, buffer_mb, or buffer_packets")
    sizes_field = payload.get("flow_sizes", "default")
    if sizes_field == "default":
        sizes = sim.FlowSizeDistribution.default_synthetic()
    elif isinstance(sizes_field, str):
        sizes = sim.FlowSizeDistribution.from_cdf_file(Path(path).parent / sizes_field)
    else:
        sizes = sim.FlowSizeDistribution(points=tuple((int(s), float(p)) for s, p in sizes_field))
    trace = None
    if payload.get("demand") == "trace":
        trace_field = payload.get("trace")
        if not isinstance(trace_field, str):
            raise SpecValidationError("trace demand needs a 'trace' CSV path")
        trace = sim.load_trace(Path(path).parent / trace_field)
    return sim.SimConfig(
        graph=g,
        buffer_bits=buffer_bits,
        routing=payload.get("routing", "valiant"),
        demand=payload.get("demand", "permutation"),
        load=float(payload.get("load", 0.25)),
        duration_slots=int(payload["duration_slots"]),
        seed=int(payload.get("seed", 0)),
        sizes=sizes,
        warmup_slots=payload.get("warmup_slots"),
        short_flow_bits=int(payload.get("short_flow_bits", sim.DEFAULT_SHORT_FLOW_BITS)),
        trace=trace,
        record_occupancy=bool(payload.get("record_occupancy", False)),
    )


@main.command("simulate")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--occupancy-out", type=click.Path(), default=None, help="Per-slot occupancy CSV.")
@handle_errors
def cmd_simulate(config_path, occupancy_out):
    """Run one slotted simulation from a JSON config."""
    cfg = _sim_config_from_json(config_path)
    if occupancy_out is not None:
        cfg = replace(cfg, record_occupancy=True)
    result = sim.run_sim(cfg)
    if occupancy_out is not None and result.occupancy_trace is not None:
        header = "slot," + ",".join(f"node{u}" for u in range(cfg.graph.num_tors))
        rows = [header] + [",".join(str(x) for x in row) for row in result.occupancy_trace]
        Path(occupancy_out).write_text("\n".join(rows) + "\n", encoding="utf-8")
    click.echo(io.dump_json(result.to_dict()), nl=False)


@main.command("sweep")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--axis", type=click.Choice(list(sim.SWEEP_AXES)), required=True)
@click.option("--values", required=True, help="Comma-separated axis values.")
@click.option("--out", type=click.Path(), default=None, help="CSV destination (default stdout).")
@handle_errors
def cmd_sweep(config_path, axis, values, out):
    """Simulate across buffer sizes, loads, or emulated degrees."""
    cfg = _sim_config_from_json(config_path)
    try:
        parsed = [float(v) for v in values.split(",") if v.strip()]
    except ValueError as exc:
        raise SpecValidationError(f"bad --values list: {exc}") from exc
    rows = sim.sweep(cfg, axis, parsed)
    csv_text = sim.sweep_csv(rows, axis)
    if out is not None:
        Path(out).write_text(csv_text, encoding="utf-8")
    else:
        click.echo(csv_text, nl=False)


@main.command("table2")
@click.option("--nt", type=int, default=16, show_default=True)
@click.option("--nu", type=int, default=2, show_default=True)
@click.option("--delta-us", type=float, default=100.0, show_default=True)
@click.option("--cap-gbps", type=float, default=400.0, show_default=True)
@click.option("--buffer-mb", type=float, default=20.0, show_default=True, help="Budget for the buffer-limited row.")
@handle_errors
def cmd_table2(nt, nu, delta_us, cap_gbps, buffer_mb):
    """Four-row design tradeoff table: static, complete, buffer-limited, balanced."""
    delta = io.us_to_s(delta_us)
    cap = io.gbps_to_bps(cap_gbps)
    rows = []

    def add_row(name, degree, theta, static):
        if static:
            delay_us = 0.0
            buf_mb = 0.0
        else:
            delay_us = 2.0 * analytics.log_base(nt, degree) * degree * delta_us / nu
            buf_mb = degree * cap_gbps * delta_us / 8000.0
        rows.append((name, degree, theta, delay_us, buf_mb))

    add_row("static", nu, analytics.unconstrained_theta(nu, nt), static=True)
    add_row("complete", nt, analytics.unconstrained_theta(nt, nt), static=False)
    limited = analytics.buffer_limited_theta(
        nt, nt, nu, delta, cap, io.mb_to_bits(buffer_mb)
    )
    rows.append(
        (
            "complete_buffer_limited",
            nt,
            limited,
            2.0 * analytics.log_base(nt, nt) * nt * delta_us / nu,
            buffer_mb,
        )
    )
    balanced = analytics.optimal_degree_buffer(
        io.mb_to_bits(buffer_mb), cap, delta, nt, nu
    )
    add_row("balanced", balanced, analytics.unconstrained_theta(balanced, nt), static=False)

    lines = ["design,degree,theta,delay_us,buffer_mb"]
    for name, degree, theta, delay, buf in rows:
        lines.append(f"{name},{degree},{theta!r},{delay!r},{buf!r}")
    click.echo("\n".join(lines) + "\n", nl=False)


if __name__ == "__main__":
    main()
