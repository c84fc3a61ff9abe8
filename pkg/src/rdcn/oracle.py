"""Exact desk-scale throughput oracles.

Maximum concurrent flow is solved over an exhaustive path enumeration as
a linear program: maximize the demand scaling theta subject to per-edge
(or per-labeled-edge-and-slot) capacity constraints. Two independent
formulations are provided: one on a static weighted digraph and one on
the time-expanded foundation paths of a periodic evolving graph. Both
return a legal witness flow alongside theta.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import lil_matrix

from .core import (
    Edge,
    PeriodicEvolvingGraph,
    TemporalFlow,
    TemporalPath,
    WeightedDigraph,
    enumerate_foundation_paths,
    hop_distances,
    simple_emulated_graph,
)
from .demand import DemandMatrix, permutation_demand
from .errors import BudgetExceededError, SpecValidationError, UndefinedThroughputError

DEFAULT_NODE_LIMIT = 16
TEMPORAL_NODE_LIMIT = 6
TEMPORAL_GAMMA_LIMIT = 3
DEFAULT_PATH_BUDGET = 250_000


@dataclass(frozen=True)
class OracleResult:
    """Solved throughput with a legal witness flow.

    ``witness`` pairs each route (a vertex tuple for the static
    formulation, a TemporalPath for the temporal one) with its rate.
    ``arl`` is the witness's delivered-rate-weighted route length and
    ``bound`` the capacity/route-length ceiling evaluated at that length.
    """

    theta: float
    arl: float
    bound: float
    witness: tuple[tuple[object, float], ...]
    temporal: bool
    diagnostics: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "diagnostics", MappingProxyType(dict(self.diagnostics)))

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "arl": self.arl,
            "bound": self.bound,
            "temporal": self.temporal,
            "diagnostics": dict(self.diagnostics),
            "witness_paths": len(self.witness),
        }


def enumerate_simple_paths(
    g: WeightedDigraph,
    src: int,
    dst: int,
    max_len: int,
    budget: int = DEFAULT_PATH_BUDGET,
) -> list[tuple[int, ...]]:
    """All simple src->dst vertex paths up to ``max_len`` hops, sorted.

    Self-loops are never traversed.
    """
    adj = g.adjacency()
    found: list[tuple[int, ...]] = []

    def grow(path: tuple[int, ...]):
        if len(found) > budget:
            raise BudgetExceededError(f"path enumeration exceeded {budget} paths")
        u = path[-1]
        if len(path) - 1 >= max_len:
            return
        for v in adj[u]:
            if v == dst:
                found.append(path + (v,))
            elif v not in path:
                grow(path + (v,))

    if src != dst:
        grow((src,))
    found.sort()
    return found


def _default_cap(g: WeightedDigraph) -> int:
    from .core import diameter

    diam = diameter(g)
    if diam == 0 or math.isinf(diam):
        return g.num_nodes - 1
    return min(int(diam) + 2, g.num_nodes - 1)


def _solve_packing(
    columns: Sequence[tuple[int, tuple[int, ...]]],
    pair_demands: Sequence[float],
    bucket_caps: Sequence[float],
    demand_scale: float,
) -> tuple[float, np.ndarray]:
    """Shared LP: maximize theta with path-rate variables.

    ``columns`` holds (pair_index, bucket_indices) per path; a path's rate
    contributes once per listed bucket and ``demand_scale`` times to its
    pair's delivery. Capacities and demands are normalized to order one
    before solving (bits/second magnitudes degrade LP accuracy); theta is
    invariant under that scaling and rates are scaled back.
    """
    num_paths = len(columns)
    num_buckets = len(bucket_caps)
    num_pairs = len(pair_demands)
    unit = max(bucket_caps, default=1.0)
    unit = unit if unit > 0 else 1.0
    n = num_paths + 1
    a = lil_matrix((num_buckets + num_pairs, n))
    b = np.zeros(num_buckets + num_pairs)
    for j, (pair_idx, buckets) in enumerate(columns):
        for bk in buckets:
            a[bk, j] += 1.0
        a[num_buckets + pair_idx, j] = -demand_scale
    for i, cap in enumerate(bucket_caps):
        b[i] = cap / unit
    for i, m in enumerate(pair_demands):
        a[num_buckets + i, n - 1] = m / unit
    cost = np.zeros(n)
    cost[-1] = -1.0
    res = linprog(
        cost,
        A_ub=a.tocsr(),
        b_ub=b,
        bounds=[(0, None)] * n,
        method="highs",
    )
    if res.status != 0:
        raise ArithmeticError(f"throughput LP failed: {res.message}")
    theta = max(0.0, -res.fun)
    rates = np.maximum(res.x[:-1], 0.0) * unit
    return theta, rates


def _witness_arl(
    witness: Sequence[tuple[object, float]],
    lengths: Sequence[int],
    pair_of: Sequence[int],
    demands: Sequence[float],
) -> float:
    """Delivered-flow-weighted average route length of a witness."""
    per_pair_flow: dict[int, float] = {}
    per_pair_hops: dict[int, float] = {}
    for (route, rate), length, pair in zip(witness, lengths, pair_of):
        if rate <= 0:
            continue
        per_pair_flow[pair] = per_pair_flow.get(pair, 0.0) + rate
        per_pair_hops[pair] = per_pair_hops.get(pair, 0.0) + rate * length
    total_m = sum(demands)
    acc = 0.0
    covered = 0.0
    for pair, flow in per_pair_flow.items():
        weight = demands[pair] / total_m
        acc += weight * per_pair_hops[pair] / flow
        covered += weight
    if covered == 0.0:
        return float("nan")
    return acc / covered


def max_concurrent_flow(
    g: WeightedDigraph,
    demand: DemandMatrix,
    path_len_cap: Optional[int] = None,
    node_limit: int = DEFAULT_NODE_LIMIT,
    path_budget: int = DEFAULT_PATH_BUDGET,
) -> OracleResult:
    """Exact max concurrent flow on a static weighted digraph.

    Enumerates every simple path up to ``path_len_cap`` hops (default:
    diameter + 2) between positive-demand pairs, then solves the packing
    LP. Theta is exact over paths within the cap.
    """
    if g.num_nodes > node_limit:
        raise BudgetExceededError(
            f"{g.num_nodes} nodes exceed the oracle limit of {node_limit}"
        )
    pairs = [(s, d, m) for s, d, m in demand.positive_pairs()]
    if not pairs:
        raise UndefinedThroughputError("demand matrix has no positive entries")
    cap = path_len_cap if path_len_cap is not None else _default_cap(g)
    edges = [e for e, c in g.sorted_edges() if e[0] != e[1]]
    eidx = {e: i for i, e in enumerate(edges)}
    bucket_caps = [g.capacity(e) for e in edges]
    columns = []
    routes: list[tuple[int, ...]] = []
    lengths: list[int] = []
    pair_of: list[int] = []
    for pi, (s, d, _) in enumerate(pairs):
        for path in enumerate_simple_paths(g, s, d, cap, budget=path_budget):
            buckets = tuple(eidx[(a, b)] for a, b in zip(path, path[1:]))
            columns.append((pi, buckets))
            routes.append(path)
            lengths.append(len(path) - 1)
            pair_of.append(pi)
    demands = [m for (_, _, m) in pairs]
    theta, rates = _solve_packing(columns, demands, bucket_caps, demand_scale=1.0)
    witness = tuple(
        (routes[j], float(rates[j])) for j in range(len(routes)) if rates[j] > 0
    )
    kept = [j for j in range(len(routes)) if rates[j] > 0]
    arl = _witness_arl(
        witness, [lengths[j] for j in kept], [pair_of[j] for j in kept], demands
    )
    total_m = sum(demands)
    bound = (
        g.total_capacity(include_self=False) / (total_m * arl)
        if arl and not math.isnan(arl)
        else float("inf")
    )
    return OracleResult(
        theta=theta,
        arl=arl,
        bound=bound,
        witness=witness,
        temporal=False,
        diagnostics={
            "paths": float(len(routes)),
            "pairs": float(len(pairs)),
            "edges": float(len(edges)),
            "path_len_cap": float(cap),
        },
    )


def temporal_max_flow(
    g: PeriodicEvolvingGraph,
    demand: DemandMatrix,
    hop_cap: Optional[int] = None,
    node_limit: int = TEMPORAL_NODE_LIMIT,
    gamma_limit: int = TEMPORAL_GAMMA_LIMIT,
    path_budget: int = DEFAULT_PATH_BUDGET,
) -> OracleResult:
    """Max concurrent flow in the time-expanded formulation.

    Enumerates the foundation set of temporal paths and constrains the
    steady-state load of every (edge, slot) bucket by its slot capacity;
    a pair's delivery is its foundation rate sum scaled by
    (1 - reconfig_fraction) / gamma. Feasible only at desk scale.
    """
    if g.num_tors > node_limit:
        raise BudgetExceededError(
            f"{g.num_tors} ToRs exceed the temporal oracle limit of {node_limit}"
        )
    if g.gamma > gamma_limit:
        raise BudgetExceededError(
            f"period {g.gamma} exceeds the temporal oracle limit of {gamma_limit}"
        )
    pairs = [(s, d, m) for s, d, m in demand.positive_pairs()]
    if not pairs:
        raise UndefinedThroughputError("demand matrix has no positive entries")
    pair_index = {(s, d): i for i, (s, d, _) in enumerate(pairs)}
    paths = enumerate_foundation_paths(
        g,
        pairs=[(s, d) for s, d, _ in pairs],
        max_len=hop_cap,
        budget=path_budget,
    )
    buckets: list[tuple[Edge, int]] = []
    bidx: dict[tuple[Edge, int], int] = {}
    bucket_caps: list[float] = []
    for t in range(g.gamma):
        for edge, cap in g.sorted_edges_at(t):
            if edge[0] == edge[1]:
                continue
            bidx[(edge, t)] = len(buckets)
            buckets.append((edge, t))
            bucket_caps.append(cap)
    columns = []
    kept_paths: list[TemporalPath] = []
    pair_of: list[int] = []
    scale = (1.0 - g.reconfig_fraction) / g.gamma
    for path in paths:
        pi = pair_index.get((path.source, path.destination))
        if pi is None:
            continue
        cols = tuple(bidx[(edge, t % g.gamma)] for edge, t in path.hops)
        columns.append((pi, cols))
        kept_paths.append(path)
        pair_of.append(pi)
    demands = [m for (_, _, m) in pairs]
    theta, rates = _solve_packing(columns, demands, bucket_caps, demand_scale=scale)
    witness = tuple(
        (kept_paths[j], float(rates[j])) for j in range(len(kept_paths)) if rates[j] > 0
    )
    kept = [j for j in range(len(kept_paths)) if rates[j] > 0]
    arl = _witness_arl(
        witness,
        [len(kept_paths[j]) for j in kept],
        [pair_of[j] for j in kept],
        demands,
    )
    total_m = sum(demands)
    emu_capacity = simple_emulated_graph(g).total_capacity(include_self=False)
    bound = (
        emu_capacity / (total_m * arl) if arl and not math.isnan(arl) else float("inf")
    )
    return OracleResult(
        theta=theta,
        arl=arl,
        bound=bound,
        witness=witness,
        temporal=True,
        diagnostics={
            "paths": float(len(kept_paths)),
            "pairs": float(len(pairs)),
            "buckets": float(len(buckets)),
        },
    )


def witness_temporal_flow(result: OracleResult) -> TemporalFlow:
    """Package a temporal oracle witness as a flow for re-validation."""
    if not result.temporal:
        raise SpecValidationError("witness is not temporal")
    return TemporalFlow({path: rate for path, rate in result.witness})


@dataclass(frozen=True)
class WorstCaseResult:
    permutation: tuple[int, ...]
    theta: float
    demand: DemandMatrix
    exhaustive: bool


def _derangements(n: int):
    for perm in itertools.permutations(range(n)):
        if all(perm[i] != i for i in range(n)):
            yield perm


def node_capacities(g: WeightedDigraph) -> np.ndarray:
    """Per-node outgoing capacity, self-loops excluded (self-demand is free)."""
    return np.array(
        [g.out_capacity(u, include_self=False) for u in range(g.num_nodes)]
    )


def worst_case_permutation(
    g: WeightedDigraph,
    exhaustive_limit: int = 8,
    path_len_cap: Optional[int] = None,
) -> WorstCaseResult:
    """Saturated permutation demand minimizing throughput.

    Up to ``exhaustive_limit`` nodes every fixed-point-free permutation is
    tried and the first lexicographic minimizer returned. Beyond that a
    longest-matching heuristic assigns pairs by maximizing total shortest
    -path distance (flagged via ``exhaustive=False``).
    """
    n = g.num_nodes
    caps = node_capacities(g)
    if n <= exhaustive_limit:
        best: Optional[tuple[float, tuple[int, ...]]] = None
        for perm in _derangements(n):
            dm = permutation_demand(perm, caps)
            res = max_concurrent_flow(g, dm, path_len_cap=path_len_cap)
            if best is None or res.theta < best[0] - 1e-12:
                best = (res.theta, perm)
        if best is None:
            raise SpecValidationError("graph too small for a derangement")
        theta, perm = best
        return WorstCaseResult(
            permutation=perm,
            theta=theta,
            demand=permutation_demand(perm, caps),
            exhaustive=True,
        )
    from scipy.optimize import linear_sum_assignment

    dist = np.zeros((n, n))
    for u in range(n):
        row = hop_distances(g, u)
        for v in range(n):
            dist[u, v] = row[v] if math.isfinite(row[v]) else n
    cost = -dist
    np.fill_diagonal(cost, np.inf)
    rows, cols = linear_sum_assignment(cost)
    perm = tuple(int(cols[list(rows).index(u)]) for u in range(n))
    dm = permutation_demand(perm, caps)
    res = max_concurrent_flow(g, dm, path_len_cap=path_len_cap)
    return WorstCaseResult(permutation=perm, theta=res.theta, demand=dm, exhaustive=False)
