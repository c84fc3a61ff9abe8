"""Emulated-graph generators and their matching decompositions.

Builds d-regular target digraphs (deBruijn, complete-with-self-loop,
random-regular expanders), splits them into perfect matchings, and
distributes the matchings across circuit switches so that the resulting
periodic schedule emulates the target graph exactly.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import networkx as nx
import numpy as np

from .core import Edge, WeightedDigraph
from .errors import (
    DegenerateDegreeError,
    DivisibilityError,
    RegularityError,
    SpecValidationError,
    SpectralFailureError,
)

Matching = tuple[int, ...]


@dataclass(frozen=True)
class DirectedMultigraph:
    """Edge multiset of a directed graph; self-loops and parallels allowed."""

    num_nodes: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))

    def edge_multiset(self) -> Counter:
        return Counter(self.edges)

    def out_degrees(self) -> list[int]:
        deg = [0] * self.num_nodes
        for u, _ in self.edges:
            deg[u] += 1
        return deg

    def in_degrees(self) -> list[int]:
        deg = [0] * self.num_nodes
        for _, v in self.edges:
            deg[v] += 1
        return deg

    def regular_degree(self) -> int:
        """The common in/out degree, or raise if the graph is irregular."""
        outs, ins = self.out_degrees(), self.in_degrees()
        if len(set(outs)) != 1 or len(set(ins)) != 1 or outs[0] != ins[0]:
            raise RegularityError(
                f"graph is not regular: out degrees {sorted(set(outs))}, "
                f"in degrees {sorted(set(ins))}"
            )
        return outs[0]

    def to_weighted(self, capacity_per_edge: float = 1.0) -> WeightedDigraph:
        caps: dict[Edge, float] = {}
        for e in self.edges:
            caps[e] = caps.get(e, 0.0) + capacity_per_edge
        return WeightedDigraph(num_nodes=self.num_nodes, capacities=caps)


@dataclass(frozen=True)
class EmulatedGraphSpec:
    """Generator choice for the target emulated graph."""

    kind: str
    num_tors: int
    degree: int
    seed: int = 0

    _KINDS = ("debruijn", "complete", "static", "random-regular")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise SpecValidationError(f"unknown emulated graph kind {self.kind!r}")
        if not 1 <= self.degree <= self.num_tors:
            raise SpecValidationError("degree must lie in [1, num_tors]")
        if self.kind == "random-regular" and self.degree >= self.num_tors:
            raise SpecValidationError("random-regular requires degree < num_tors")


def debruijn_digraph(num_tors: int, degree: int) -> DirectedMultigraph:
    """Modular deBruijn digraph: u connects to u*d + a (mod n) for a < d.

    In- and out-degree are exactly ``degree`` for every node and every
    residue choice, self-loops included. When ``num_tors`` is a power of
    ``degree`` the diameter is exactly log_d(n).
    """
    if degree < 2:
        raise DegenerateDegreeError("deBruijn digraph needs degree >= 2")
    if degree > num_tors:
        raise DegenerateDegreeError("degree cannot exceed the node count")
    edges = [
        (u, (u * degree + a) % num_tors)
        for u in range(num_tors)
        for a in range(degree)
    ]
    return DirectedMultigraph(num_nodes=num_tors, edges=tuple(edges))


def complete_digraph_with_self_loops(num_tors: int) -> DirectedMultigraph:
    """Every ordered pair plus one self-loop per node; degree equals n."""
    edges = [(u, v) for u in range(num_tors) for v in range(num_tors)]
    return DirectedMultigraph(num_nodes=num_tors, edges=tuple(edges))


def _perfect_matching(adj: dict[int, Counter], num_nodes: int) -> Matching:
    """One perfect matching of a regular bipartite multigraph.

    Kuhn's augmenting-path search over the out/in double cover; a regular
    bipartite multigraph always admits one.
    """
    match_right: dict[int, int] = {}

    def try_assign(u: int, visited: set[int]) -> bool:
        for v in sorted(adj[u]):
            if adj[u][v] <= 0 or v in visited:
                continue
            visited.add(v)
            if v not in match_right or try_assign(match_right[v], visited):
                match_right[v] = u
                return True
        return False

    for u in range(num_nodes):
        if not try_assign(u, set()):
            raise RegularityError("no perfect matching; graph is not regular")
    perm = [0] * num_nodes
    for v, u in match_right.items():
        perm[u] = v
    return tuple(perm)


def decompose_matchings(g: DirectedMultigraph) -> list[Matching]:
    """Split a d-regular digraph into d perfect matchings.

    The multiset union of the returned matchings equals the input edge
    multiset exactly; each matching is a bijection on the node range.
    """
    degree = g.regular_degree()
    adj: dict[int, Counter] = {u: Counter() for u in range(g.num_nodes)}
    for u, v in g.edges:
        adj[u][v] += 1
    matchings = []
    for _ in range(degree):
        perm = _perfect_matching(adj, g.num_nodes)
        for u, v in enumerate(perm):
            adj[u][v] -= 1
        matchings.append(perm)
    return matchings


def assign_to_switches(
    matchings: Sequence[Matching], num_uplinks: int, seed: int
) -> list[list[Matching]]:
    """Shuffle matchings and deal them out to switches in equal blocks.

    The period becomes len(matchings) / num_uplinks slots. A degree not
    divisible by the uplink count is rejected rather than padded: idle
    matchings would silently change the period and every derived metric.
    """
    d = len(matchings)
    if d == 0 or d % num_uplinks != 0:
        lower = (d // num_uplinks) * num_uplinks
        upper = lower + num_uplinks
        raise DivisibilityError(
            f"{num_uplinks} switches cannot host {d} matchings evenly; "
            f"nearest feasible matching counts are {lower} and {upper}"
        )
    gamma = d // num_uplinks
    shuffled = [tuple(m) for m in matchings]
    random.Random(seed).shuffle(shuffled)
    return [shuffled[s * gamma : (s + 1) * gamma] for s in range(num_uplinks)]


def complete_graph_schedule(num_tors: int, num_uplinks: int) -> list[list[Matching]]:
    """Cyclic-shift schedule meeting every ToR pair once per period.

    The n shift matchings (shift 0 is the self-loop matching) are dealt
    round-robin over the switches, giving a period of n / num_uplinks.
    """
    if num_uplinks < 1 or num_tors % num_uplinks != 0:
        raise DivisibilityError(
            f"{num_uplinks} switches cannot host {num_tors} shift matchings evenly"
        )
    shifts = [
        tuple((u + k) % num_tors for u in range(num_tors)) for k in range(num_tors)
    ]
    return [shifts[s::num_uplinks] for s in range(num_uplinks)]


def static_schedule(num_tors: int, num_uplinks: int, seed: int = 0) -> list[list[Matching]]:
    """One matching per switch: a period-1 schedule of a d=nu regular graph."""
    if num_uplinks < 2:
        raise DegenerateDegreeError("static schedule needs at least 2 uplinks")
    matchings = decompose_matchings(debruijn_digraph(num_tors, num_uplinks))
    return assign_to_switches(matchings, num_uplinks, seed)


def ramanujan_threshold(degree: int) -> float:
    return 2.0 * math.sqrt(degree - 1)


def second_eigenvalue(g: nx.Graph) -> float:
    """Second-largest adjacency eigenvalue of an undirected graph."""
    eigs = np.linalg.eigvalsh(nx.to_numpy_array(g, dtype=float))
    return float(np.sort(eigs)[-2])


def random_regular_expander(
    num_tors: int, degree: int, seed: int, max_attempts: int = 64
) -> tuple[DirectedMultigraph, float]:
    """Random d-regular digraph certified by the Ramanujan bound.

    Undirected d-regular graphs are sampled with distinct sub-seeds until
    the second adjacency eigenvalue is at most 2*sqrt(d-1); each accepted
    undirected edge becomes a pair of opposite directed edges. Returns the
    digraph and the measured eigenvalue.
    """
    if degree < 3:
        raise DegenerateDegreeError("spectral test needs degree >= 3")
    if degree >= num_tors:
        raise SpecValidationError("random regular graph needs degree < num_tors")
    if (num_tors * degree) % 2 != 0:
        raise SpecValidationError("num_tors * degree must be even")
    threshold = ramanujan_threshold(degree)
    best = None
    for attempt in range(max_attempts):
        g = nx.random_regular_graph(degree, num_tors, seed=seed + attempt)
        lam2 = second_eigenvalue(g)
        if best is None or lam2 < best:
            best = lam2
        if lam2 <= threshold + 1e-12:
            edges = []
            for u, v in g.edges():
                edges.append((u, v))
                edges.append((v, u))
            return DirectedMultigraph(num_nodes=num_tors, edges=tuple(edges)), lam2
    raise SpectralFailureError(
        f"no graph met lambda2 <= {threshold:.6f} in {max_attempts} attempts "
        f"(best {best:.6f})",
        best_lambda2=best,
    )


def generate_emulated_graph(spec: EmulatedGraphSpec) -> DirectedMultigraph:
    if spec.kind == "debruijn":
        return debruijn_digraph(spec.num_tors, spec.degree)
    if spec.kind == "complete":
        return complete_digraph_with_self_loops(spec.num_tors)
    if spec.kind == "static":
        return debruijn_digraph(spec.num_tors, spec.degree)
    g, _ = random_regular_expander(spec.num_tors, spec.degree, spec.seed)
    return g


def schedule_edge_multiset(switch_schedules: Sequence[Sequence[Matching]]) -> Counter:
    """Edge multiset emulated by a schedule: the union of all matchings."""
    edges: Counter = Counter()
    for sched in switch_schedules:
        for perm in sched:
            for u, v in enumerate(perm):
                edges[(u, v)] += 1
    return edges
