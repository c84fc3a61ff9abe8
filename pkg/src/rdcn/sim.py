"""Slotted-time flow-level simulator with finite shared per-node buffers.

Each slot, every active circuit edge moves up to one slot's worth of bits
(scaled by the reconfiguration tax) out of the sending ToR's per-next-hop
FIFO queues; in-transit bits drain before locally originating ones, the
usual discipline in rotor fabrics. Bits advance at most one hop per slot.

Each node has one shared buffer of B bits holding everything resident at
the ToR: bits injected by its servers and bits in transit between
circuits. Flows stream in from the servers at the aggregate server-link
rate and only when buffer space is free, so an overfull ToR backpressures
its own servers (those bits wait server-side as in-flight work) but can
never refuse transit: a circuit hop into a full node cuts the chunk at
the ingress and drops the overflow (drop-newest).

All bit counters are integers, so conservation (offered = delivered +
dropped + queued + in-flight) holds exactly and is checked every slot.

This is a fluid model: transport, packet, and retransmission behavior are
out of scope, so only ordering and trend claims are meaningful, not
absolute completion times.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import (
    Edge,
    PeriodicEvolvingGraph,
    WeightedDigraph,
    hop_distances,
    simple_emulated_graph,
)
from .demand import random_derangement
from .errors import (
    RoutingError,
    SpecValidationError,
    TraceParseError,
)
from .io import parse_cdf_points

ROUTING_KINDS = ("valiant", "shortest-static")
DEMAND_KINDS = ("all-to-all", "permutation", "trace")

DEFAULT_SHORT_FLOW_BITS = 8_000_000  # 1 MB
DEFAULT_SPRAY_GRANULE_BITS = 2_000_000  # 250 kB batches, sprayed independently


@dataclass(frozen=True)
class FlowSizeDistribution:
    """Discrete flow-size CDF sampled by inverse transform."""

    points: tuple[tuple[int, float], ...]

    def __post_init__(self):
        if not self.points:
            raise SpecValidationError("flow size distribution needs points")
        object.__setattr__(
            self, "points", tuple((int(s), float(p)) for s, p in self.points)
        )

    @classmethod
    def default_synthetic(cls) -> "FlowSizeDistribution":
        # Half short transactions, a tail of bulk transfers.
        return cls(points=((512_000, 0.5), (8_000_000, 0.9), (32_000_000, 1.0)))

    @classmethod
    def single(cls, size_bits: int) -> "FlowSizeDistribution":
        return cls(points=((int(size_bits), 1.0),))

    @classmethod
    def from_cdf_file(cls, path) -> "FlowSizeDistribution":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(points=tuple(parse_cdf_points(fh.readlines(), origin=str(path))))

    @property
    def mean_bits(self) -> float:
        mean = 0.0
        prev = 0.0
        for size, prob in self.points:
            mean += size * (prob - prev)
            prev = prob
        return mean

    def sample(self, u: float) -> int:
        for size, prob in self.points:
            if u <= prob:
                return size
        return self.points[-1][0]


@dataclass(frozen=True)
class FlowArrival:
    flow_id: int
    slot: int
    src: int
    dst: int
    size_bits: int


def generate_workload(
    kind: str,
    load: float,
    seed: int,
    num_tors: int,
    per_tor_capacity: float,
    delta: float,
    duration_slots: int,
    sizes: Optional[FlowSizeDistribution] = None,
) -> tuple[FlowArrival, ...]:
    """Poisson flow arrivals at the requested fraction of server capacity.

    The mean arrival rate is load * num_tors * per_tor_capacity divided by
    the mean flow size; sources are uniform, destinations follow the
    demand kind. A fixed seed reproduces the stream byte for byte.
    """
    if kind not in ("all-to-all", "permutation"):
        raise SpecValidationError(f"unknown workload kind {kind!r}")
    if not 0.0 <= load <= 1.0:
        raise SpecValidationError("load must lie in [0, 1]")
    if num_tors < 2:
        raise SpecValidationError("workload needs at least two ToRs")
    sizes = sizes or FlowSizeDistribution.default_synthetic()
    rng = np.random.default_rng(seed)
    perm = random_derangement(num_tors, seed) if kind == "permutation" else None
    offered_rate = load * num_tors * per_tor_capacity
    flows_per_slot = offered_rate * delta / sizes.mean_bits
    arrivals: list[FlowArrival] = []
    fid = 0
    for slot in range(duration_slots):
        count = int(rng.poisson(flows_per_slot)) if flows_per_slot > 0 else 0
        for _ in range(count):
            src = int(rng.integers(num_tors))
            if perm is not None:
                dst = perm[src]
            else:
                dst = int(rng.integers(num_tors - 1))
                if dst >= src:
                    dst += 1
            size = sizes.sample(float(rng.random()))
            arrivals.append(FlowArrival(fid, slot, src, dst, size))
            fid += 1
    return tuple(arrivals)


def load_trace(path) -> tuple[FlowArrival, ...]:
    """Read a flow trace CSV: slot,src,dst,size_bits (header optional)."""
    arrivals = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#") or line.lower().startswith("slot"):
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise TraceParseError(f"{path}:{lineno}: expected slot,src,dst,size_bits")
            try:
                slot, src, dst, size = (int(p) for p in parts)
            except ValueError as exc:
                raise TraceParseError(f"{path}:{lineno}: {exc}") from exc
            if size <= 0 or slot < 0:
                raise TraceParseError(f"{path}:{lineno}: bad slot or size")
            if src == dst:
                raise TraceParseError(f"{path}:{lineno}: self-demand needs no fabric")
            arrivals.append(FlowArrival(len(arrivals), slot, src, dst, size))
    arrivals.sort(key=lambda a: (a.slot, a.flow_id))
    return tuple(arrivals)


@dataclass(frozen=True)
class TemporalRoute:
    """Hop plan with greedy earliest-slot realization (may revisit nodes)."""

    hops: tuple[tuple[Edge, int], ...]
    intermediate: Optional[int] = None

    @property
    def vertices(self) -> tuple[int, ...]:
        return (self.hops[0][0][0],) + tuple(v for (_, v), _ in self.hops)

    def __len__(self) -> int:
        return len(self.hops)


def _earliest_slot(g: PeriodicEvolvingGraph, edge: Edge, not_before: int) -> int:
    for dt in range(g.gamma):
        t = not_before + dt
        if g.capacity(edge, t) > 0:
            return t
    raise RoutingError(f"edge {edge} never appears in the schedule")


def _realize(g: PeriodicEvolvingGraph, vertices: Sequence[int], start_slot: int):
    hops = []
    t = start_slot
    first = True
    for u, v in zip(vertices, vertices[1:]):
        t = _earliest_slot(g, (u, v), t if first else t + 1)
        hops.append(((u, v), t))
        first = False
    return tuple(hops)


def random_shortest_path(
    g: WeightedDigraph, src: int, dst: int, rng: random.Random
) -> Optional[tuple[int, ...]]:
    """Uniformly pick the next hop among shortest-path successors.

    Spreads load across all equal-length routes instead of always taking
    the lexicographically smallest one.
    """
    if src == dst:
        return (src,)
    # Distances *to* dst via reverse BFS.
    reverse = WeightedDigraph(
        num_nodes=g.num_nodes,
        capacities={(v, u): c for (u, v), c in g.capacities.items()},
    )
    dist_to = hop_distances(reverse, dst)
    if dist_to[src] == float("inf"):
        return None
    adj = g.adjacency()
    path = [src]
    at = src
    while at != dst:
        options = [v for v in adj[at] if dist_to[v] == dist_to[at] - 1]
        at = options[rng.randrange(len(options))]
        path.append(at)
    return tuple(path)


class StagePlanner:
    """Digit-style stage routing over an emulated graph.

    A stage between two ToRs follows a uniform-random walk of round(log_d
    n) hops, the stage length the route-length model assumes: digit
    routing on deBruijn-style graphs, a single hop on a complete one.
    Constant-length walks spread stage load evenly across parallel
    branches, unlike always-shortest paths. Pairs with no such walk fall
    back to a uniform shortest path. Self-loop edges are never walked.
    """

    def __init__(self, emulated: WeightedDigraph):
        self.graph = emulated
        self.adjacency = emulated.adjacency()
        n = emulated.num_nodes
        degree = max(
            (len(emulated.successors(u, include_self=True)) for u in range(n)),
            default=1,
        )
        if degree >= 2 and n >= 2:
            self.stage_length = max(1, round(math.log(n) / math.log(degree)))
        else:
            self.stage_length = 1
        # walk_counts[k][x][y]: number of k-step self-loop-free walks.
        counts = [[[0] * n for _ in range(n)]]
        for x in range(n):
            counts[0][x][x] = 1
        for _ in range(self.stage_length):
            prev = counts[-1]
            nxt = [[0] * n for _ in range(n)]
            for x in range(n):
                row = nxt[x]
                for m in self.adjacency[x]:
                    pm = prev[m]
                    for y in range(n):
                        row[y] += pm[y]
            counts.append(nxt)
        self.walk_counts = counts

    def stage(self, x: int, y: int, rng: random.Random) -> Optional[tuple[int, ...]]:
        if x == y:
            return (x,)
        length = self.stage_length
        if self.walk_counts[length][x][y] == 0:
            return random_shortest_path(self.graph, x, y, rng)
        path = [x]
        at = x
        for k in range(length, 0, -1):
            weights = [
                (m, self.walk_counts[k - 1][m][y])
                for m in self.adjacency[at]
                if self.walk_counts[k - 1][m][y] > 0
            ]
            pick = rng.randrange(sum(c for _, c in weights))
            acc = 0
            for m, count in weights:
                acc += count
                if pick < acc:
                    at = m
                    break
            path.append(at)
        return tuple(path)


def valiant_route(
    g: PeriodicEvolvingGraph,
    src: int,
    dst: int,
    current_slot: int,
    rng: random.Random,
    emulated: Optional[WeightedDigraph] = None,
    planner: Optional[StagePlanner] = None,
) -> TemporalRoute:
    """Two-stage route via a uniformly random intermediate ToR.

    The intermediate is drawn over all ToRs; drawing the source or the
    destination degenerates to the direct stage route, which keeps the
    matched pair's own circuits loaded. Stages come from ``StagePlanner``
    (fixed-length balanced walks); every hop is stamped with the earliest
    slot (from the current one) where its edge is scheduled. On a fabric
    meeting every pair once per period a proper intermediate yields
    exactly two circuit hops.
    """
    if src == dst:
        raise SpecValidationError("source and destination must differ")
    if planner is None:
        emu = emulated if emulated is not None else simple_emulated_graph(g)
        planner = StagePlanner(emu)
    w = rng.randrange(g.num_tors)
    if w == src or w == dst:
        direct = planner.stage(src, dst, rng)
        if direct is None:
            raise RoutingError(f"pair ({src},{dst}) unreachable in emulated graph")
        return TemporalRoute(hops=_realize(g, direct, current_slot), intermediate=None)
    first = planner.stage(src, w, rng)
    second = planner.stage(w, dst, rng)
    if first is None or second is None:
        raise RoutingError(f"pair ({src},{dst}) unreachable via {w} in emulated graph")
    vertices = first + second[1:]
    return TemporalRoute(hops=_realize(g, vertices, current_slot), intermediate=w)


def shortest_static_route(
    g: PeriodicEvolvingGraph,
    src: int,
    dst: int,
    current_slot: int,
    rng: Optional[random.Random] = None,
    emulated: Optional[WeightedDigraph] = None,
) -> TemporalRoute:
    emu = emulated if emulated is not None else simple_emulated_graph(g)
    if rng is None:
        from .core import shortest_path

        path = shortest_path(emu, src, dst)
    else:
        path = random_shortest_path(emu, src, dst, rng)
    if path is None:
        raise RoutingError(f"pair ({src},{dst}) unreachable in emulated graph")
    return TemporalRoute(hops=_realize(g, path, current_slot))


@dataclass(frozen=True)
class SimConfig:
    graph: PeriodicEvolvingGraph
    buffer_bits: int
    routing: str = "valiant"
    demand: str = "permutation"
    load: float = 0.25
    duration_slots: int = 0
    seed: int = 0
    sizes: FlowSizeDistribution = field(
        default_factory=FlowSizeDistribution.default_synthetic
    )
    warmup_slots: Optional[int] = None
    short_flow_bits: int = DEFAULT_SHORT_FLOW_BITS
    spray_granule_bits: int = DEFAULT_SPRAY_GRANULE_BITS
    trace: Optional[tuple[FlowArrival, ...]] = None
    record_occupancy: bool = False

    def __post_init__(self):
        if self.routing not in ROUTING_KINDS:
            raise SpecValidationError(f"unknown routing {self.routing!r}")
        if self.demand not in DEMAND_KINDS:
            raise SpecValidationError(f"unknown demand kind {self.demand!r}")
        if not 0.0 <= self.load <= 1.0:
            raise SpecValidationError("load must lie in [0, 1]")
        if self.buffer_bits < 0:
            raise SpecValidationError("buffer must be nonnegative")
        if self.spray_granule_bits < 1:
            raise SpecValidationError("spray granule must be positive")
        if self.duration_slots < 10 * self.graph.gamma:
            raise SpecValidationError(
                f"duration {self.duration_slots} below 10 periods "
                f"({10 * self.graph.gamma} slots)"
            )
        if self.demand == "trace" and self.trace is None:
            raise SpecValidationError("trace demand needs a trace")

    @property
    def effective_warmup(self) -> int:
        return (
            self.warmup_slots if self.warmup_slots is not None else 5 * self.graph.gamma
        )


@dataclass(frozen=True)
class SimResult:
    """Totals, steady-state throughput, occupancy and completion metrics.

    All bit counters are exact integers satisfying
    offered = delivered + dropped + queued + inflight, where ``queued``
    is ToR buffer occupancy summed over nodes (bounded by B each) and
    ``inflight`` is server-side work admitted but not yet injected.
    ``effective_throughput`` is steady-state delivered/offered;
    ``downlink_utilization`` is steady-state delivered bits relative to
    the total server downlink capacity over the same window.
    """

    offered_bits: int
    delivered_bits: int
    dropped_bits: int
    queued_bits: int
    inflight_bits: int
    offered_ss_bits: int
    delivered_ss_bits: int
    effective_throughput: float
    downlink_utilization: float
    occupancy_p50_bits: float
    occupancy_p99_bits: float
    occupancy_max_bits: int
    drops: int
    flows_total: int
    flows_completed: int
    realized_arl: Optional[float]
    fct_short_p50_s: Optional[float]
    fct_short_p99_s: Optional[float]
    fct_long_p50_s: Optional[float]
    fct_long_p99_s: Optional[float]
    occupancy_trace: Optional[tuple[tuple[int, ...], ...]] = None

    def to_dict(self) -> dict:
        return {
            "offered_bits": self.offered_bits,
            "delivered_bits": self.delivered_bits,
            "dropped_bits": self.dropped_bits,
            "queued_bits": self.queued_bits,
            "inflight_bits": self.inflight_bits,
            "offered_ss_bits": self.offered_ss_bits,
            "delivered_ss_bits": self.delivered_ss_bits,
            "effective_throughput": self.effective_throughput,
            "downlink_utilization": self.downlink_utilization,
            "occupancy_p50_bits": self.occupancy_p50_bits,
            "occupancy_p99_bits": self.occupancy_p99_bits,
            "occupancy_max_bits": self.occupancy_max_bits,
            "drops": self.drops,
            "flows_total": self.flows_total,
            "flows_completed": self.flows_completed,
            "realized_arl": self.realized_arl,
            "fct_short_p50_s": self.fct_short_p50_s,
            "fct_short_p99_s": self.fct_short_p99_s,
            "fct_long_p50_s": self.fct_long_p50_s,
            "fct_long_p99_s": self.fct_long_p99_s,
        }


def _percentile(samples: Sequence[float], q: float) -> Optional[float]:
    if not samples:
        return None
    return float(np.percentile(np.asarray(samples, dtype=float), q))


def _slot_budget(g: PeriodicEvolvingGraph, capacity: float) -> int:
    # Whole bits movable over one circuit in one slot, reconfig tax applied.
    return int((1.0 - g.reconfig_fraction) * capacity * g.delta + 1e-6)


def _uniform_link_capacity(g: PeriodicEvolvingGraph) -> float:
    """Single-circuit capacity: the smallest positive slot capacity."""
    caps = [c for slot in g.edge_sets for c in slot.values()]
    if not caps:
        raise SpecValidationError("schedule has no circuits")
    return min(caps)


class _NodeQueues:
    """Per-next-hop FIFOs in two classes; transit drains before local."""

    __slots__ = ("transit", "local")

    def __init__(self):
        self.transit: dict[int, deque] = {}
        self.local: dict[int, deque] = {}


def run_sim(cfg: SimConfig) -> SimResult:
    """Run the slotted simulation; deterministic for a fixed config."""
    g = cfg.graph
    n = g.num_tors
    emu = simple_emulated_graph(g)
    planner = StagePlanner(emu) if cfg.routing == "valiant" else None
    link_capacity = _uniform_link_capacity(g)
    if cfg.demand == "trace":
        arrivals = cfg.trace
    else:
        arrivals = generate_workload(
            kind=cfg.demand,
            load=cfg.load,
            seed=cfg.seed,
            num_tors=n,
            per_tor_capacity=g.num_uplinks * link_capacity,
            delta=g.delta,
            duration_slots=cfg.duration_slots,
            sizes=cfg.sizes,
        )
    by_slot: dict[int, list[FlowArrival]] = {}
    for arr in arrivals:
        by_slot.setdefault(arr.slot, []).append(arr)
    route_rng = random.Random(cfg.seed ^ 0x5EED)

    queues = [_NodeQueues() for _ in range(n)]
    occupancy = [0] * n
    pending: list[deque] = [deque() for _ in range(n)]  # server-side, FIFO
    inflight = [0] * n
    inject_budget = int(g.num_uplinks * link_capacity * g.delta)
    granule = cfg.spray_granule_bits
    flow_size: dict[int, int] = {}
    flow_birth: dict[int, int] = {}
    flow_left: dict[int, int] = {}
    flow_clean: dict[int, bool] = {}
    flow_dst: dict[int, int] = {}

    offered = delivered = dropped = 0
    drop_events = 0
    offered_ss = delivered_ss = 0
    delivered_hop_bits = 0
    delivered_bits_total = 0
    warmup = cfg.effective_warmup
    occ_samples: list[int] = []
    occ_max = 0
    fct_short: list[float] = []
    fct_long: list[float] = []
    flows_completed = 0
    trace_rows: list[tuple[int, ...]] = []

    budgets = {
        t: [(e, _slot_budget(g, c)) for e, c in g.sorted_edges_at(t) if e[0] != e[1]]
        for t in range(g.gamma)
    }

    def route_for(src: int, dst: int, slot: int) -> tuple[int, ...]:
        if cfg.routing == "valiant":
            r = valiant_route(
                g, src, dst, slot, route_rng, emulated=emu, planner=planner
            )
        else:
            r = shortest_static_route(g, src, dst, slot, rng=route_rng, emulated=emu)
        return r.vertices

    # Chunk layout: [flow_id, bits, position_in_route, route].
    def drain(fifo: Optional[deque], room: int, sender: int, sink):
        if not fifo:
            return room
        while room > 0 and fifo:
            chunk = fifo[0]
            send = chunk[1] if chunk[1] <= room else room
            chunk[1] -= send
            room -= send
            occupancy[sender] -= send
            sink.append([chunk[0], send, chunk[2] + 1, chunk[3]])
            if chunk[1] == 0:
                fifo.popleft()
        return room

    for slot in range(cfg.duration_slots):
        # Phase 1: drain active circuits, transit class first. Arrivals
        # land after all sends, so a bit advances at most one hop per slot.
        incoming: dict[int, list[list[int]]] = {}
        for edge, budget in budgets[slot % g.gamma]:
            u, v = edge
            sink = incoming.setdefault(v, [])
            room = drain(queues[u].transit.get(v), budget, u, sink)
            if room > 0:
                drain(queues[u].local.get(v), room, u, sink)
            if not sink:
                del incoming[v]

        # Phase 2: deliver or enqueue the bits that just crossed a circuit.
        for v in sorted(incoming):
            for flow_id, bits, pos, route in incoming[v]:
                if pos == len(route) - 1:
                    delivered += bits
                    if slot >= warmup:
                        delivered_ss += bits
                    delivered_hop_bits += bits * (len(route) - 1)
                    delivered_bits_total += bits
                    flow_left[flow_id] -= bits
                    if flow_left[flow_id] == 0 and flow_clean[flow_id]:
                        flows_completed += 1
                        fct = (slot - flow_birth[flow_id] + 1) * g.delta
                        if flow_size[flow_id] <= cfg.short_flow_bits:
                            fct_short.append(fct)
                        else:
                            fct_long.append(fct)
                else:
                    space = cfg.buffer_bits - occupancy[v]
                    accept = bits if bits <= space else max(space, 0)
                    if accept > 0:
                        nxt = route[pos + 1]
                        fifo = queues[v].transit.get(nxt)
                        if fifo is None:
                            fifo = queues[v].transit[nxt] = deque()
                        fifo.append([flow_id, accept, pos, route])
                        occupancy[v] += accept
                    lost = bits - accept
                    if lost > 0:
                        dropped += lost
                        drop_events += 1
                        flow_clean[flow_id] = False

        # Phase 3: new flows join their source's server-side stream.
        for arr in by_slot.get(slot, ()):  # pre-sorted by flow id
            offered += arr.size_bits
            if slot >= warmup:
                offered_ss += arr.size_bits
            flow_size[arr.flow_id] = arr.size_bits
            flow_birth[arr.flow_id] = slot
            flow_left[arr.flow_id] = arr.size_bits
            flow_clean[arr.flow_id] = True
            flow_dst[arr.flow_id] = arr.dst
            pending[arr.src].append([arr.flow_id, arr.size_bits])
            inflight[arr.src] += arr.size_bits

        # Phase 4: inject server-side work, bounded by the server-link
        # rate and by free buffer space (full ToR backpressures servers).
        # Each granule is routed independently: load balancing sprays
        # batches, not whole flows, across intermediates.
        for u in range(n):
            stream = pending[u]
            if not stream:
                continue
            room = min(inject_budget, cfg.buffer_bits - occupancy[u])
            while room > 0 and stream:
                head = stream[0]
                take = min(head[1], room, granule)
                head[1] -= take
                room -= take
                inflight[u] -= take
                route = route_for(u, flow_dst[head[0]], slot)
                nxt = route[1]
                fifo = queues[u].local.get(nxt)
                if fifo is None:
                    fifo = queues[u].local[nxt] = deque()
                fifo.append([head[0], take, 0, route])
                occupancy[u] += take
                if head[1] == 0:
                    stream.popleft()

        # Invariants, asserted every slot on exact integer counters.
        queued = sum(occupancy)
        waiting = sum(inflight)
        if offered != delivered + dropped + queued + waiting:
            raise RuntimeError(
                f"conservation broken at slot {slot}: offered {offered} != "
                f"delivered {delivered} + dropped {dropped} + queued {queued} "
                f"+ inflight {waiting}"
            )
        for u in range(n):
            if occupancy[u] > cfg.buffer_bits:
                raise RuntimeError(
                    f"occupancy {occupancy[u]} exceeds buffer at node {u}, slot {slot}"
                )
            if occupancy[u] > occ_max:
                occ_max = occupancy[u]
        if slot >= warmup:
            occ_samples.extend(occupancy)
        if cfg.record_occupancy:
            trace_rows.append((slot, *occupancy))

    ss_slots = max(cfg.duration_slots - warmup, 1)
    server_capacity = n * g.num_uplinks * link_capacity
    utilization = delivered_ss / (ss_slots * g.delta * server_capacity)
    throughput = delivered_ss / offered_ss if offered_ss > 0 else 0.0
    arl = (
        delivered_hop_bits / delivered_bits_total if delivered_bits_total > 0 else None
    )
    return SimResult(
        offered_bits=offered,
        delivered_bits=delivered,
        dropped_bits=dropped,
        queued_bits=sum(occupancy),
        inflight_bits=sum(inflight),
        offered_ss_bits=offered_ss,
        delivered_ss_bits=delivered_ss,
        effective_throughput=throughput,
        downlink_utilization=utilization,
        occupancy_p50_bits=_percentile(occ_samples, 50) or 0.0,
        occupancy_p99_bits=_percentile(occ_samples, 99) or 0.0,
        occupancy_max_bits=occ_max,
        drops=drop_events,
        flows_total=len(arrivals),
        flows_completed=flows_completed,
        realized_arl=arl,
        fct_short_p50_s=_percentile(fct_short, 50),
        fct_short_p99_s=_percentile(fct_short, 99),
        fct_long_p50_s=_percentile(fct_long, 50),
        fct_long_p99_s=_percentile(fct_long, 99),
        occupancy_trace=tuple(trace_rows) if cfg.record_occupancy else None,
    )


SWEEP_AXES = ("buffer", "load", "degree")


def sweep(
    cfg: SimConfig,
    axis: str,
    values: Sequence,
    link_capacity: Optional[float] = None,
) -> list[tuple[float, SimResult]]:
    """Run the simulation once per axis value, results in input order.

    The degree axis regenerates a deBruijn schedule (complete graph when
    the degree equals the ToR count) with the base graph's timing and the
    base seed; buffer and load axes only override the one knob.
    """
    if axis not in SWEEP_AXES:
        raise SpecValidationError(f"unknown sweep axis {axis!r}")
    out = []
    for value in values:
        if axis == "buffer":
            run_cfg = replace(cfg, buffer_bits=int(value))
        elif axis == "load":
            run_cfg = replace(cfg, load=float(value))
        else:
            run_cfg = replace(cfg, graph=_degree_variant(cfg, int(value), link_capacity))
        out.append((float(value), run_sim(run_cfg)))
    return out


def _degree_variant(
    cfg: SimConfig, degree: int, link_capacity: Optional[float]
) -> PeriodicEvolvingGraph:
    from .core import build_periodic_graph
    from .topology import (
        assign_to_switches,
        complete_graph_schedule,
        debruijn_digraph,
        decompose_matchings,
    )

    g = cfg.graph
    cap = link_capacity if link_capacity is not None else _uniform_link_capacity(g)
    if degree == g.num_tors:
        schedules = complete_graph_schedule(g.num_tors, g.num_uplinks)
    else:
        matchings = decompose_matchings(debruijn_digraph(g.num_tors, degree))
        schedules = assign_to_switches(matchings, g.num_uplinks, cfg.seed)
    return build_periodic_graph(
        num_tors=g.num_tors,
        num_uplinks=g.num_uplinks,
        delta=g.delta,
        reconfig_delta=g.reconfig_fraction * g.delta,
        switch_schedules=schedules,
        link_capacity=cap,
    )


def sweep_csv(rows: Sequence[tuple[float, SimResult]], axis: str) -> str:
    header = (
        "axis,value,throughput,utilization,occ_p50_bits,occ_p99_bits,"
        "fct_short_p99_s,fct_long_p99_s,drops"
    )
    lines = [header]
    for value, res in rows:
        lines.append(
            f"{axis},{value!r},{res.effective_throughput!r},"
            f"{res.downlink_utilization!r},"
            f"{res.occupancy_p50_bits!r},{res.occupancy_p99_bits!r},"
            f"{res.fct_short_p99_s!r},{res.fct_long_p99_s!r},{res.drops}"
        )
    return "\n".join(lines) + "\n"
