"""Periodic evolving graphs and their static emulated counterparts.

A periodic circuit-switched fabric is modeled as a sequence of directed
ToR-to-ToR graphs, one per timeslot, repeating with a fixed period. The
module holds the graph model, time-stamped paths and flows, the reduction
to a static labeled multigraph, and the rate-preserving conversions
between temporal and static flows.

Time is integral (timeslot indices) everywhere; the slot duration in
seconds enters only when delays are reported.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    BudgetExceededError,
    ConstraintViolationError,
    InvalidMatchingError,
    ScheduleMismatchError,
    SpecValidationError,
    UndefinedThroughputError,
)

Edge = tuple[int, int]

# Absolute slack for capacity comparisons, scaled by max(1, capacity).
CAPACITY_TOLERANCE = 1e-9


def _cap_slack(capacity: float) -> float:
    return CAPACITY_TOLERANCE * max(1.0, abs(capacity))


def validate_matching(permutation: Sequence[int], num_ports: int) -> tuple[int, ...]:
    """Check that ``permutation`` is a bijection on [0, num_ports)."""
    perm = tuple(int(p) for p in permutation)
    if len(perm) != num_ports or sorted(perm) != list(range(num_ports)):
        raise InvalidMatchingError(
            f"matching {perm} is not a bijection on [0, {num_ports})"
        )
    return perm


@dataclass(frozen=True)
class PeriodicEvolvingGraph:
    """Directed ToR-to-ToR connectivity repeating every ``gamma`` timeslots.

    ``edge_sets[t]`` maps a directed edge to its capacity in bits/second
    during slot ``t``. Queries at ``t >= gamma`` wrap around. A capacity
    of zero is equivalent to the edge being absent, so zero-capacity
    entries are dropped at construction. Instances are immutable and safe
    to share across threads.
    """

    num_tors: int
    num_uplinks: int
    delta: float
    reconfig_fraction: float
    edge_sets: tuple[Mapping[Edge, float], ...] = field(default=())

    def __post_init__(self):
        if self.num_tors < 1:
            raise SpecValidationError("num_tors must be >= 1")
        if self.num_uplinks < 1:
            raise SpecValidationError("num_uplinks must be >= 1")
        if not self.delta > 0.0:
            raise SpecValidationError("timeslot duration must be positive")
        if not 0.0 <= self.reconfig_fraction < 1.0:
            raise SpecValidationError("reconfig fraction must lie in [0, 1)")
        if len(self.edge_sets) < 1:
            raise SpecValidationError("need at least one timeslot of edges")
        normalized = []
        for t, edges in enumerate(self.edge_sets):
            out_deg: Counter = Counter()
            in_deg: Counter = Counter()
            slot = {}
            for (u, v), cap in edges.items():
                if not (0 <= u < self.num_tors and 0 <= v < self.num_tors):
                    raise SpecValidationError(f"edge ({u},{v}) outside ToR range")
                if cap < 0:
                    raise SpecValidationError(f"negative capacity on ({u},{v}) at t={t}")
                if cap == 0:
                    continue
                slot[(u, v)] = float(cap)
                out_deg[u] += 1
                in_deg[v] += 1
            busiest_out = max(out_deg.values(), default=0)
            busiest_in = max(in_deg.values(), default=0)
            if busiest_out > self.num_uplinks or busiest_in > self.num_uplinks:
                raise SpecValidationError(
                    f"slot {t} uses more than {self.num_uplinks} circuit edges at a ToR"
                )
            normalized.append(MappingProxyType(slot))
        object.__setattr__(self, "edge_sets", tuple(normalized))

    @property
    def gamma(self) -> int:
        """Schedule period in timeslots."""
        return len(self.edge_sets)

    def edges_at(self, t: int) -> Mapping[Edge, float]:
        return self.edge_sets[t % self.gamma]

    def sorted_edges_at(self, t: int) -> list[tuple[Edge, float]]:
        return sorted(self.edges_at(t).items())

    def capacity(self, edge: Edge, t: int) -> float:
        return self.edges_at(t).get(edge, 0.0)

    def total_capacity_per_period(self) -> float:
        """Sum of c_t(e) over one period, self-loops included."""
        return sum(sum(slot.values()) for slot in self.edge_sets)


def build_periodic_graph(
    num_tors: int,
    num_uplinks: int,
    delta: float,
    reconfig_delta: float,
    switch_schedules: Sequence[Sequence[Sequence[int]]],
    link_capacity: float,
) -> PeriodicEvolvingGraph:
    """Assemble the evolving graph from per-switch matching schedules.

    Every switch cycles through its own ordered list of matchings, all of
    equal length. Slot ``t`` is the union of the matchings at index ``t``;
    when two switches connect the same ToR pair in the same slot their
    circuit capacities add.
    """
    if not switch_schedules:
        raise SpecValidationError("need at least one switch schedule")
    if len(switch_schedules) > num_uplinks:
        raise SpecValidationError(
            f"{len(switch_schedules)} switches exceed {num_uplinks} uplinks per ToR"
        )
    if reconfig_delta < 0 or reconfig_delta >= delta:
        raise SpecValidationError("reconfiguration time must satisfy 0 <= dr < dt")
    if link_capacity <= 0:
        raise SpecValidationError("link capacity must be positive")
    gamma = len(switch_schedules[0])
    if gamma < 1:
        raise ScheduleMismatchError("schedules must contain at least one matching")
    for i, sched in enumerate(switch_schedules):
        if len(sched) != gamma:
            raise ScheduleMismatchError(
                f"switch {i} has {len(sched)} matchings, expected {gamma}"
            )
    edge_sets = []
    for t in range(gamma):
        slot: dict[Edge, float] = {}
        for sched in switch_schedules:
            perm = validate_matching(sched[t], num_tors)
            for u, v in enumerate(perm):
                slot[(u, v)] = slot.get((u, v), 0.0) + link_capacity
        edge_sets.append(slot)
    return PeriodicEvolvingGraph(
        num_tors=num_tors,
        num_uplinks=num_uplinks,
        delta=delta,
        reconfig_fraction=reconfig_delta / delta,
        edge_sets=tuple(edge_sets),
    )


@dataclass(frozen=True)
class EmulatedGraph:
    """Static labeled multigraph union of one period of the evolving graph.

    Each edge is keyed ``(u, v, label)`` with the label equal to the slot
    in which the circuit is up; its capacity is the slot capacity scaled
    by (1 - reconfig_fraction) / gamma.
    """

    source: PeriodicEvolvingGraph
    capacities: Mapping[tuple[int, int, int], float]

    @property
    def num_tors(self) -> int:
        return self.source.num_tors

    def total_capacity(self) -> float:
        return sum(self.capacities.values())

    def sorted_edges(self) -> list[tuple[tuple[int, int, int], float]]:
        return sorted(self.capacities.items())


def emulated_graph(g: PeriodicEvolvingGraph) -> EmulatedGraph:
    scale = (1.0 - g.reconfig_fraction) / g.gamma
    caps = {}
    for label in range(g.gamma):
        for (u, v), cap in g.edge_sets[label].items():
            caps[(u, v, label)] = scale * cap
    return EmulatedGraph(source=g, capacities=MappingProxyType(caps))


@dataclass(frozen=True)
class WeightedDigraph:
    """Simple weighted digraph; one edge per ordered ToR pair."""

    num_nodes: int
    capacities: Mapping[Edge, float]

    def __post_init__(self):
        object.__setattr__(self, "capacities", MappingProxyType(dict(self.capacities)))

    @property
    def self_loops(self) -> frozenset[int]:
        return frozenset(u for (u, v) in self.capacities if u == v)

    def successors(self, u: int, include_self: bool = False) -> list[int]:
        return sorted(
            v for (s, v) in self.capacities if s == u and (include_self or v != u)
        )

    def capacity(self, edge: Edge) -> float:
        return self.capacities.get(edge, 0.0)

    def out_capacity(self, u: int, include_self: bool = False) -> float:
        return sum(
            c
            for (s, v), c in self.capacities.items()
            if s == u and (include_self or v != u)
        )

    def total_capacity(self, include_self: bool = True) -> float:
        return sum(
            c for (u, v), c in self.capacities.items() if include_self or u != v
        )

    def sorted_edges(self) -> list[tuple[Edge, float]]:
        return sorted(self.capacities.items())

    def adjacency(self) -> dict[int, list[int]]:
        """Successor lists without self-loops, for path searches."""
        adj: dict[int, list[int]] = {u: [] for u in range(self.num_nodes)}
        for (u, v) in self.capacities:
            if u != v:
                adj[u].append(v)
        for u in adj:
            adj[u].sort()
        return adj


def simple_emulated_graph(g: PeriodicEvolvingGraph) -> WeightedDigraph:
    """Collapse the labeled multigraph to one weighted edge per pair.

    Self-loops are retained (query them via ``self_loops``) but every path
    search in this package ignores them.
    """
    scale = (1.0 - g.reconfig_fraction) / g.gamma
    caps: dict[Edge, float] = {}
    for slot in g.edge_sets:
        for edge, cap in slot.items():
            caps[edge] = caps.get(edge, 0.0) + scale * cap
    return WeightedDigraph(num_nodes=g.num_tors, capacities=caps)


@dataclass(frozen=True)
class TemporalPath:
    """A time-stamped path: ordered (edge, timeslot) hops.

    Structural requirements checked at construction: at least one hop,
    consecutive edges chain head-to-tail, hop times strictly increase and
    no vertex repeats. Period-dependent legality (hop gap at most gamma,
    edge present in its slot) is checked against a graph by
    ``validate_temporal_path``.
    """

    hops: tuple[tuple[Edge, int], ...]

    def __post_init__(self):
        hops = tuple(((int(u), int(v)), int(t)) for (u, v), t in self.hops)
        object.__setattr__(self, "hops", hops)
        if not hops:
            raise ConstraintViolationError("temporal path needs at least one hop")
        verts = [hops[0][0][0]]
        last_t = None
        for i, ((u, v), t) in enumerate(hops):
            if u != verts[-1]:
                raise ConstraintViolationError(
                    f"hop {i}: edge ({u},{v}) does not start at {verts[-1]}"
                )
            if last_t is not None and t <= last_t:
                raise ConstraintViolationError(
                    f"hop {i}: time {t} does not increase past {last_t}"
                )
            if v in verts:
                raise ConstraintViolationError(f"hop {i}: vertex {v} repeats")
            verts.append(v)
            last_t = t

    @property
    def vertices(self) -> tuple[int, ...]:
        return (self.hops[0][0][0],) + tuple(v for (_, v), _ in self.hops)

    @property
    def source(self) -> int:
        return self.hops[0][0][0]

    @property
    def destination(self) -> int:
        return self.hops[-1][0][1]

    @property
    def start_time(self) -> int:
        return self.hops[0][1]

    @property
    def end_time(self) -> int:
        return self.hops[-1][1]

    def __len__(self) -> int:
        return len(self.hops)


@dataclass(frozen=True)
class ExtendedPath:
    """Labeled static path plus the originating temporal path as identifier."""

    hops: tuple[tuple[Edge, int], ...]
    identifier: TemporalPath

    @property
    def source(self) -> int:
        return self.identifier.source

    @property
    def destination(self) -> int:
        return self.identifier.destination

    def __len__(self) -> int:
        return len(self.hops)


def validate_temporal_path(path: TemporalPath, g: PeriodicEvolvingGraph) -> list[str]:
    """Return human-readable violations of path legality in ``g``."""
    problems = []
    gamma = g.gamma
    prev_t = None
    for i, (edge, t) in enumerate(path.hops):
        if prev_t is not None and t > prev_t + gamma:
            problems.append(
                f"hop {i}: gap {t - prev_t} exceeds period {gamma}"
            )
        if g.capacity(edge, t) <= 0.0:
            problems.append(f"hop {i}: edge {edge} absent at slot {t % gamma}")
        prev_t = t
    return problems


def static_of(path: TemporalPath, gamma: int) -> ExtendedPath:
    """Project a temporal path onto the emulated graph's labeled edges.

    Labels are hop times modulo the period; the temporal path itself is
    kept as the unique identifier so the projection is invertible. This
    is pure arithmetic: legality of the path against a particular graph
    is the business of ``validate_temporal_path`` and the flow
    conversions, which name the violated hop.
    """
    labeled = tuple((edge, t % gamma) for edge, t in path.hops)
    return ExtendedPath(hops=labeled, identifier=path)


def temporal_of(path: ExtendedPath) -> TemporalPath:
    """Inverse of ``static_of``; recovers the identifying temporal path."""
    return path.identifier


@dataclass(frozen=True)
class TemporalFlow:
    """Rates on foundation temporal paths; periodic extension is implied."""

    assignments: Mapping[TemporalPath, float]

    def __post_init__(self):
        assignments = dict(self.assignments)
        for path, rate in assignments.items():
            if rate < 0:
                raise SpecValidationError(f"negative rate {rate} on {path}")
        object.__setattr__(self, "assignments", MappingProxyType(assignments))

    def total_rate(self) -> float:
        return sum(self.assignments.values())


@dataclass(frozen=True)
class StaticFlow:
    """Rates on extended paths of the emulated graph."""

    assignments: Mapping[ExtendedPath, float]

    def __post_init__(self):
        assignments = dict(self.assignments)
        seen_ids = set()
        for path, rate in assignments.items():
            if rate < 0:
                raise SpecValidationError(f"negative rate {rate} on {path}")
            if path.identifier in seen_ids:
                raise SpecValidationError("duplicate identifier among extended paths")
            seen_ids.add(path.identifier)
        object.__setattr__(self, "assignments", MappingProxyType(assignments))


@dataclass(frozen=True)
class CapacityViolation:
    edge: Edge
    timeslot: int
    load: float
    capacity: float


@dataclass(frozen=True)
class PathViolation:
    path: TemporalPath
    reason: str


@dataclass(frozen=True)
class FlowLegalityReport:
    capacity_violations: tuple[CapacityViolation, ...]
    path_violations: tuple[PathViolation, ...]

    @property
    def legal(self) -> bool:
        return not self.capacity_violations and not self.path_violations


def validate_temporal_flow(
    flow: TemporalFlow, g: PeriodicEvolvingGraph
) -> FlowLegalityReport:
    """Diagnose a temporal flow against per-slot capacities and path rules.

    Capacity is checked in steady state: after unrolling periodic copies,
    the load on edge ``e`` at any slot congruent to ``l`` is the sum of
    rates of every foundation hop on ``e`` with time ``t = l (mod gamma)``,
    which dominates the load at any finite time.
    """
    gamma = g.gamma
    path_violations = []
    loads: dict[tuple[Edge, int], float] = {}
    for path in sorted(flow.assignments, key=lambda p: p.hops):
        rate = flow.assignments[path]
        if not 0 <= path.start_time < gamma:
            path_violations.append(
                PathViolation(path, f"start {path.start_time} outside [0,{gamma})")
            )
        for reason in validate_temporal_path(path, g):
            path_violations.append(PathViolation(path, reason))
        if rate == 0.0:
            continue
        for edge, t in path.hops:
            key = (edge, t % gamma)
            loads[key] = loads.get(key, 0.0) + rate
    capacity_violations = []
    for (edge, slot), load in sorted(loads.items()):
        cap = g.capacity(edge, slot)
        if load > cap + _cap_slack(cap):
            capacity_violations.append(CapacityViolation(edge, slot, load, cap))
    return FlowLegalityReport(tuple(capacity_violations), tuple(path_violations))


def temporal_path_delay(path: TemporalPath, delta: float, gamma: int) -> float:
    """Delay in seconds from first transmission to arrival in steady state."""
    if len(path.hops) == 0:
        raise ConstraintViolationError("delay of an empty path is undefined")
    return (path.end_time - path.start_time + 1) * delta + (gamma - 1) * delta


def _delivered_per_pair(flow: TemporalFlow) -> dict[Edge, float]:
    delivered: dict[Edge, float] = {}
    for path, rate in flow.assignments.items():
        key = (path.source, path.destination)
        delivered[key] = delivered.get(key, 0.0) + rate
    return delivered


def throughput_of_temporal_flow(flow: TemporalFlow, g: PeriodicEvolvingGraph, demand) -> float:
    """Largest theta with per-pair delivery >= theta times the demand.

    Delivery between a pair is the per-period average rate across the
    pair's foundation paths, i.e. the foundation rate sum scaled by
    (1 - reconfig_fraction) / gamma. Self-demand entries are ignored.
    """
    scale = (1.0 - g.reconfig_fraction) / g.gamma
    delivered = _delivered_per_pair(flow)
    theta = None
    for s, d, m in demand.positive_pairs():
        if s == d:
            continue
        ratio = scale * delivered.get((s, d), 0.0) / m
        theta = ratio if theta is None else min(theta, ratio)
    if theta is None:
        raise UndefinedThroughputError("demand matrix has no positive entries")
    return theta


def throughput_of_static_flow(flow: StaticFlow, demand) -> float:
    """Static counterpart of ``throughput_of_temporal_flow`` (no scaling)."""
    delivered: dict[Edge, float] = {}
    for path, rate in flow.assignments.items():
        key = (path.source, path.destination)
        delivered[key] = delivered.get(key, 0.0) + rate
    theta = None
    for s, d, m in demand.positive_pairs():
        if s == d:
            continue
        ratio = delivered.get((s, d), 0.0) / m
        theta = ratio if theta is None else min(theta, ratio)
    if theta is None:
        raise UndefinedThroughputError("demand matrix has no positive entries")
    return theta


def _check_static_flow_legal(flow: StaticFlow, g: PeriodicEvolvingGraph) -> None:
    emu = emulated_graph(g)
    loads: dict[tuple[int, int, int], float] = {}
    for path, rate in flow.assignments.items():
        for reason in validate_temporal_path(path.identifier, g):
            raise ConstraintViolationError(f"identifier illegal: {reason}")
        for (u, v), label in path.hops:
            key = (u, v, label)
            if key not in emu.capacities:
                raise ConstraintViolationError(
                    f"labeled edge {key} absent from emulated graph"
                )
            loads[key] = loads.get(key, 0.0) + rate
    for key, load in sorted(loads.items()):
        cap = emu.capacities[key]
        if load > cap + _cap_slack(cap):
            raise ConstraintViolationError(
                f"labeled edge {key}: load {load} exceeds capacity {cap}"
            )


def flow_static_to_temporal(flow: StaticFlow, g: PeriodicEvolvingGraph) -> TemporalFlow:
    """Lift an emulated-graph flow to the evolving graph.

    Each extended path's rate is multiplied by gamma / (1 - reconfig
    fraction) and placed on the identifying temporal path; legality and
    throughput carry over.
    """
    _check_static_flow_legal(flow, g)
    scale = g.gamma / (1.0 - g.reconfig_fraction)
    return TemporalFlow(
        {temporal_of(p): scale * rate for p, rate in flow.assignments.items()}
    )


def flow_temporal_to_static(flow: TemporalFlow, g: PeriodicEvolvingGraph) -> StaticFlow:
    """Project a temporal flow onto the emulated graph; inverse of the lift."""
    report = validate_temporal_flow(flow, g)
    if not report.legal:
        first = (report.capacity_violations + report.path_violations)[0]
        raise ConstraintViolationError(f"illegal temporal flow: {first}")
    scale = (1.0 - g.reconfig_fraction) / g.gamma
    return StaticFlow(
        {
            static_of(path, g.gamma): scale * rate
            for path, rate in flow.assignments.items()
        }
    )


def hop_distances(g: WeightedDigraph, src: int) -> list[float]:
    """BFS hop counts from ``src``; unreachable nodes get ``inf``."""
    adj = g.adjacency()
    dist = [math.inf] * g.num_nodes
    dist[src] = 0
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if dist[v] == math.inf:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def diameter(g: WeightedDigraph) -> float:
    """Longest finite shortest-path distance over ordered pairs."""
    best = 0.0
    for u in range(g.num_nodes):
        dist = hop_distances(g, u)
        for v in range(g.num_nodes):
            if u != v and dist[v] != math.inf:
                best = max(best, dist[v])
    return best


def shortest_path(g: WeightedDigraph, src: int, dst: int) -> Optional[tuple[int, ...]]:
    """Deterministic BFS shortest path as a vertex tuple, or None."""
    if src == dst:
        return (src,)
    adj = g.adjacency()
    parent: dict[int, int] = {src: -1}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in parent:
                    parent[v] = u
                    if v == dst:
                        path = [v]
                        while path[-1] != src:
                            path.append(parent[path[-1]])
                        return tuple(reversed(path))
                    nxt.append(v)
        frontier = nxt
    return None


def enumerate_foundation_paths(
    g: PeriodicEvolvingGraph,
    pairs: Optional[Iterable[Edge]] = None,
    max_len: Optional[int] = None,
    budget: int = 250_000,
) -> list[TemporalPath]:
    """All legal temporal paths starting in the first period.

    Self-loop edges never appear as hops. ``max_len`` defaults to the
    diameter of the simple emulated graph plus two hops; enumeration stops
    with ``BudgetExceededError`` once ``budget`` paths are produced.
    Results are deterministic and sorted.
    """
    gamma = g.gamma
    if max_len is None:
        diam = diameter(simple_emulated_graph(g))
        max_len = int(diam) + 2 if diam > 0 else 2
    max_len = min(max_len, g.num_tors - 1)
    wanted = None if pairs is None else {tuple(p) for p in pairs}
    out_by_slot: list[dict[int, list[int]]] = []
    for t in range(gamma):
        slot: dict[int, list[int]] = {}
        for (u, v) in g.edge_sets[t]:
            if u != v:
                slot.setdefault(u, []).append(v)
        for u in slot:
            slot[u].sort()
        out_by_slot.append(slot)

    results: list[TemporalPath] = []

    def grow(vertices: tuple[int, ...], hops: tuple, t_last: int, src: int):
        if len(results) >= budget:
            raise BudgetExceededError(
                f"foundation-set enumeration exceeded {budget} paths"
            )
        u = vertices[-1]
        if wanted is None or (src, u) in wanted:
            results.append(TemporalPath(hops))
        if len(hops) >= max_len:
            return
        for dt in range(1, gamma + 1):
            t = t_last + dt
            for v in out_by_slot[t % gamma].get(u, ()):
                if v in vertices:
                    continue
                grow(vertices + (v,), hops + (((u, v), t),), t, src)

    for t1 in range(gamma):
        for u in sorted(out_by_slot[t1]):
            for v in out_by_slot[t1][u]:
                grow((u, v), (((u, v), t1),), t1, u)
    results.sort(key=lambda p: p.hops)
    return results
