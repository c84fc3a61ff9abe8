"""Stable file formats: schedule JSON, emulated-graph CSV, result dumps.

The CLI speaks microseconds, Gbps, and MB (decimal, 1 MB = 8e6 bits);
everything in core stays in seconds and bits. All JSON emitted here is
key-sorted so byte-identical reruns are guaranteed.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping, Sequence

from .core import PeriodicEvolvingGraph, EmulatedGraph, build_periodic_graph
from .errors import SpecValidationError, TraceParseError

FORMAT_VERSION = 1

MB_BITS = 8e6
PACKET_BITS = 1500 * 8


def us_to_s(us: float) -> float:
    return us / 1e6


def s_to_us(s: float) -> float:
    return s * 1e6


def gbps_to_bps(gbps: float) -> float:
    return gbps * 1e9


def mb_to_bits(mb: float) -> float:
    return mb * MB_BITS


def bits_to_mb(bits: float) -> float:
    return bits / MB_BITS


def schedule_dict(
    num_tors: int,
    num_uplinks: int,
    delta_us: float,
    delta_r_us: float,
    capacity_gbps: float,
    switch_schedules: Sequence[Sequence[Sequence[int]]],
) -> dict:
    return {
        "format": FORMAT_VERSION,
        "nt": num_tors,
        "nu": num_uplinks,
        "delta_us": delta_us,
        "delta_r_us": delta_r_us,
        "capacity_gbps": capacity_gbps,
        "switches": [[list(m) for m in sched] for sched in switch_schedules],
    }


def dump_json(payload: Mapping) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def save_schedule(path: str | Path, payload: Mapping) -> None:
    Path(path).write_text(dump_json(payload), encoding="utf-8")


def load_schedule_dict(path: str | Path) -> dict:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise TraceParseError(f"schedule file {path}: {exc}") from exc
    for key in ("nt", "nu", "delta_us", "delta_r_us", "capacity_gbps", "switches"):
        if key not in payload:
            raise SpecValidationError(f"schedule file {path} lacks field {key!r}")
    return payload


def graph_from_schedule_dict(payload: Mapping) -> PeriodicEvolvingGraph:
    return build_periodic_graph(
        num_tors=int(payload["nt"]),
        num_uplinks=int(payload["nu"]),
        delta=us_to_s(float(payload["delta_us"])),
        reconfig_delta=us_to_s(float(payload["delta_r_us"])),
        switch_schedules=payload["switches"],
        link_capacity=gbps_to_bps(float(payload["capacity_gbps"])),
    )


def load_schedule(path: str | Path) -> tuple[PeriodicEvolvingGraph, dict]:
    payload = load_schedule_dict(path)
    return graph_from_schedule_dict(payload), payload


def emulated_graph_csv(g: EmulatedGraph) -> str:
    lines = ["src,dst,label,capacity_bps"]
    for (u, v, label), cap in g.sorted_edges():
        lines.append(f"{u},{v},{label},{cap!r}")
    return "\n".join(lines) + "\n"


def parse_cdf_points(lines: Sequence[str], origin: str = "<cdf>") -> list[tuple[int, float]]:
    """Parse "size_bits cumulative_probability" lines into CDF points."""
    points: list[tuple[int, float]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise TraceParseError(
                f"{origin}:{lineno}: expected 'size_bits cum_prob', got {raw!r}"
            )
        try:
            size = int(float(parts[0]))
            prob = float(parts[1])
        except ValueError as exc:
            raise TraceParseError(f"{origin}:{lineno}: {exc}") from exc
        if size <= 0 or not 0.0 < prob <= 1.0 + 1e-12:
            raise TraceParseError(
                f"{origin}:{lineno}: size must be positive and prob in (0, 1]"
            )
        points.append((size, min(prob, 1.0)))
    if not points:
        raise TraceParseError(f"{origin}: no CDF points found")
    if any(b[1] < a[1] or b[0] <= a[0] for a, b in zip(points, points[1:])):
        raise TraceParseError(f"{origin}: CDF points must increase in size and prob")
    if abs(points[-1][1] - 1.0) > 1e-9:
        raise TraceParseError(f"{origin}: final cumulative probability must be 1")
    return points
