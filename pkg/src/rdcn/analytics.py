"""Closed-form throughput, delay, and buffer analysis with degree solvers.

Implements the capacity/route-length throughput bound, the average route
length and delay metrics, the bandwidth-delay style buffer bound, and the
solvers that pick the throughput-optimal emulated-graph degree under a
delay or buffer budget (via the Lambert W function).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Optional

from .core import TemporalPath, temporal_path_delay
from .demand import DemandMatrix
from .errors import (
    CoverageError,
    DegenerateDegreeError,
    DomainError,
    InfeasibleBufferError,
    InfeasibleDelayError,
    SpecValidationError,
    UndefinedThroughputError,
)
from .topology import Matching, assign_to_switches, debruijn_digraph, decompose_matchings

_BRANCH_PRINCIPAL = "principal"
_BRANCH_MINUS_ONE = "minus-one"
_INV_E = math.exp(-1.0)

# Nudges floor() across exact integer boundaries reached up to float fuzz.
_FLOOR_GUARD = 1e-9


def log_base(value: float, base: float) -> float:
    """log_base(value); exact when value is an integer power of the base."""
    if base <= 1 or value <= 0:
        raise DomainError("log base must exceed 1 and value must be positive")
    if float(base).is_integer() and float(value).is_integer():
        b, v = int(base), int(value)
        k, p = 0, 1
        while p < v:
            p *= b
            k += 1
        if p == v:
            return float(k)
    return math.log(value) / math.log(base)


@dataclass(frozen=True)
class RouteEnsemble:
    """Per-pair route fractions; fractions of a covered pair sum to one."""

    routes: Mapping[tuple[int, int], tuple[tuple[object, float], ...]]

    def __post_init__(self):
        routes = {k: tuple(v) for k, v in self.routes.items()}
        for pair, entries in routes.items():
            total = 0.0
            for _, frac in entries:
                if not 0.0 <= frac <= 1.0 + 1e-12:
                    raise SpecValidationError(f"fraction {frac} outside [0,1] for {pair}")
                total += frac
            if entries and abs(total - 1.0) > 1e-9:
                raise SpecValidationError(
                    f"fractions for pair {pair} sum to {total}, expected 1"
                )
        object.__setattr__(self, "routes", MappingProxyType(routes))


def route_length(route: object) -> int:
    """Hop count of a route given as a path object or a vertex sequence."""
    hops = getattr(route, "hops", None)
    if hops is not None:
        return len(hops)
    return len(route) - 1


def arl(demand: DemandMatrix, ensemble: RouteEnsemble) -> float:
    """Demand- and fraction-weighted average route length in hops."""
    total = demand.total()
    if total <= 0:
        raise UndefinedThroughputError("total demand is zero")
    acc = 0.0
    for s, d, m in demand.positive_pairs():
        entries = ensemble.routes.get((s, d))
        if not entries:
            raise CoverageError(f"no routes for positive-demand pair ({s},{d})")
        acc += sum((m / total) * frac * route_length(r) for r, frac in entries)
    return acc


def ard(demand: DemandMatrix, ensemble: RouteEnsemble, delta: float, gamma: int) -> float:
    """Demand- and fraction-weighted average route delay in seconds."""
    total = demand.total()
    if total <= 0:
        raise UndefinedThroughputError("total demand is zero")
    acc = 0.0
    for s, d, m in demand.positive_pairs():
        entries = ensemble.routes.get((s, d))
        if not entries:
            raise CoverageError(f"no routes for positive-demand pair ({s},{d})")
        for route, frac in entries:
            if not isinstance(route, TemporalPath):
                raise SpecValidationError("route delay needs temporal paths")
            acc += (m / total) * frac * temporal_path_delay(route, delta, gamma)
    return acc


def throughput_upper_bound(
    total_capacity: float, total_demand: float, average_route_length: float
) -> float:
    """Throughput can never exceed capacity / (demand * route length)."""
    if total_demand <= 0:
        raise UndefinedThroughputError("total demand is zero")
    if average_route_length < 1.0:
        raise SpecValidationError("average route length is at least one hop")
    return total_capacity / (total_demand * average_route_length)


def unconstrained_theta(degree: int, num_tors: int) -> float:
    """Worst-case throughput of a d-regular emulated graph under two-hop
    load balancing: 1 / (2 log_d n)."""
    if degree < 2:
        raise DegenerateDegreeError("throughput formula needs degree >= 2")
    if degree > num_tors:
        raise SpecValidationError("degree cannot exceed the ToR count")
    return 1.0 / (2.0 * log_base(num_tors, degree))


def delay_estimate(degree: int, num_tors: int, num_uplinks: int, delta: float) -> float:
    """Worst-case route delay 2 log_d(n) * d * delta / nu in seconds.

    A degree equal to the uplink count means a period of one slot, i.e. a
    static fabric that never reconfigures; its delay is reported as zero
    by convention.
    """
    if num_uplinks < 1:
        raise SpecValidationError("need at least one uplink")
    if degree == num_uplinks:
        return 0.0
    return 2.0 * log_base(num_tors, degree) * degree * delta / num_uplinks


def per_node_buffer(degree: int, link_capacity: float, delta: float) -> float:
    """Bits a node must hold to sustain a degree-d schedule: d * c * delta."""
    return degree * link_capacity * delta


def buffer_requirement(theta: float, total_demand: float, average_route_delay: float) -> float:
    """Total network buffer needed for throughput theta (bits)."""
    if theta < 0 or total_demand < 0 or average_route_delay < 0:
        raise SpecValidationError("buffer bound inputs must be nonnegative")
    return theta * total_demand * average_route_delay


def buffer_limited_theta(
    degree: int,
    num_tors: int,
    num_uplinks: int,
    delta: float,
    link_capacity: float,
    buffer_bits: float,
) -> float:
    """Throughput of a degree-d schedule when each node has only ``buffer_bits``.

    The unconstrained value scales down by the ratio of available to
    required per-node buffer once the buffer binds.
    """
    ideal = unconstrained_theta(degree, num_tors)
    if degree == num_uplinks:
        return ideal
    needed = per_node_buffer(degree, link_capacity, delta)
    if needed <= 0:
        return ideal
    return ideal * min(1.0, buffer_bits / needed)


def lambert_w(branch: str, x: float) -> float:
    """Real Lambert W: the w solving w * exp(w) = x.

    ``principal`` covers x >= -1/e (w >= -1); ``minus-one`` covers
    -1/e <= x < 0 (w <= -1). Halley iterations from a branch-appropriate
    start converge to a residual below 1e-12 * max(1, |x|).
    """
    if branch not in (_BRANCH_PRINCIPAL, _BRANCH_MINUS_ONE):
        raise DomainError(f"unknown branch {branch!r}")
    if x < -_INV_E - 1e-15:
        raise DomainError(f"{x} is below -1/e; no real W value")
    x = max(x, -_INV_E)
    if branch == _BRANCH_MINUS_ONE:
        if x >= 0:
            raise DomainError("minus-one branch is defined for -1/e <= x < 0")
        p = -math.sqrt(max(0.0, 2.0 * (math.e * x + 1.0)))
        if x > -0.25:
            # Asymptotic start near 0-: w ~ ln(-x) - ln(-ln(-x)).
            l1 = math.log(-x)
            w = l1 - math.log(-l1)
        else:
            w = -1.0 + p - p * p / 3.0
    else:
        if x == 0.0:
            return 0.0
        if x < -0.25:
            p = math.sqrt(2.0 * (math.e * x + 1.0))
            w = -1.0 + p - p * p / 3.0
        elif x < 1.0:
            w = x * (1.0 - x)
        else:
            l1 = math.log(x)
            w = l1 - math.log(max(l1, 1e-300)) if l1 > 1.0 else l1
    target = 1e-13 * max(1.0, abs(x))
    for _ in range(200):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= target:
            return w
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w -= step
        if branch == _BRANCH_MINUS_ONE and w > -1.0:
            w = -1.0 - 1e-12
        if branch == _BRANCH_PRINCIPAL and w < -1.0:
            w = -1.0 + 1e-12
    raise ArithmeticError(f"Lambert W iteration did not converge for x={x}")


def _schedulable(degree: int, num_tors: int, num_uplinks: int) -> int:
    """Clamp to [2, num_tors] and round down to a multiple of the uplinks."""
    d = max(2, min(int(degree), num_tors))
    d -= d % num_uplinks
    if d < max(2, num_uplinks):
        d = num_uplinks if num_uplinks >= 2 else 2
    return min(d, num_tors)


def optimal_degree_delay(
    num_tors: int, num_uplinks: int, delta: float, max_delay: float
) -> int:
    """Largest schedulable degree whose worst-case delay stays within budget.

    Solves 2 log_d(n) d delta / nu = L for d; with k = -2 ln(n) delta /
    (nu L), the two real W branches give the two roots and the larger one
    maximizes throughput. The result is floored, clamped to [2, n], and
    rounded down to a multiple of the uplink count.
    """
    if num_tors < 2:
        raise SpecValidationError("need at least two ToRs")
    if max_delay < delta:
        raise InfeasibleDelayError(
            f"delay budget {max_delay} is below one timeslot {delta}"
        )
    k = -2.0 * math.log(num_tors) * delta / (num_uplinks * max_delay)
    if k < -_INV_E - 1e-15:
        min_delay = 2.0 * math.e * math.log(num_tors) * delta / num_uplinks
        raise InfeasibleDelayError(
            f"no degree meets delay {max_delay}; the minimum achievable "
            f"worst-case delay is about {min_delay:.6g} seconds"
        )
    candidates = []
    if k < 0:
        for branch in (_BRANCH_PRINCIPAL, _BRANCH_MINUS_ONE):
            w = lambert_w(branch, k)
            candidates.append(math.exp(-w))
    else:  # k == 0 only in the limit of an unbounded budget
        candidates.append(float(num_tors))
    raw = max(candidates)
    return _schedulable(math.floor(raw + _FLOOR_GUARD), num_tors, num_uplinks)


def optimal_degree_buffer(
    buffer_bits: float,
    link_capacity: float,
    delta: float,
    num_tors: int,
    num_uplinks: int,
) -> int:
    """Largest schedulable degree whose per-node buffer need fits the budget."""
    per_degree = link_capacity * delta
    if per_degree <= 0:
        raise SpecValidationError("link capacity and timeslot must be positive")
    if buffer_bits < per_degree:
        raise InfeasibleBufferError(
            f"buffer {buffer_bits} bits is below one slot's worth "
            f"({per_degree:.6g} bits) of a single circuit"
        )
    raw = math.floor(buffer_bits / per_degree + _FLOOR_GUARD)
    return _schedulable(raw, num_tors, num_uplinks)


@dataclass(frozen=True)
class DesignReport:
    """Chosen degree with its throughput, delay, and buffer envelope."""

    degree: int
    theta: float
    arl_hops: float
    ard_seconds: float
    max_delay_seconds: float
    per_node_buffer_bits: float
    total_buffer_bits: float
    gamma: int
    num_tors: int
    num_uplinks: int
    delta_seconds: float
    reconfig_fraction: float

    def __post_init__(self):
        if self.theta < 0 or self.theta > 1:
            raise SpecValidationError("throughput must lie in [0, 1]")
        for name in (
            "arl_hops",
            "ard_seconds",
            "max_delay_seconds",
            "per_node_buffer_bits",
            "total_buffer_bits",
        ):
            if getattr(self, name) < 0:
                raise SpecValidationError(f"{name} must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "theta": self.theta,
            "arl_hops": self.arl_hops,
            "ard_seconds": self.ard_seconds,
            "max_delay_seconds": self.max_delay_seconds,
            "per_node_buffer_bits": self.per_node_buffer_bits,
            "total_buffer_bits": self.total_buffer_bits,
            "gamma": self.gamma,
            "num_tors": self.num_tors,
            "num_uplinks": self.num_uplinks,
            "delta_seconds": self.delta_seconds,
            "reconfig_fraction": self.reconfig_fraction,
        }


@dataclass(frozen=True)
class DesignOutcome:
    report: DesignReport
    switch_schedules: tuple[tuple[Matching, ...], ...]


def report_for_degree(
    degree: int,
    num_tors: int,
    num_uplinks: int,
    delta: float,
    reconfig_fraction: float,
    link_capacity: float,
) -> DesignReport:
    """Analytical envelope of a degree-d deBruijn schedule.

    A period-1 (static) choice reports zero delay and buffer: with no
    reconfigurations the timeslot is treated as vanishing.
    """
    gamma = degree // num_uplinks
    theta = unconstrained_theta(degree, num_tors)
    route_len = 2.0 * log_base(num_tors, degree)
    if gamma == 1:
        ard_s = l_max = 0.0
        node_buffer = total_buffer = 0.0
    else:
        ard_s = route_len * gamma * delta
        l_max = delay_estimate(degree, num_tors, num_uplinks, delta)
        node_buffer = per_node_buffer(degree, link_capacity, delta)
        total_buffer = num_tors * node_buffer
    return DesignReport(
        degree=degree,
        theta=theta,
        arl_hops=route_len,
        ard_seconds=ard_s,
        max_delay_seconds=l_max,
        per_node_buffer_bits=node_buffer,
        total_buffer_bits=total_buffer,
        gamma=gamma,
        num_tors=num_tors,
        num_uplinks=num_uplinks,
        delta_seconds=delta,
        reconfig_fraction=reconfig_fraction,
    )


def design(
    num_tors: int,
    num_uplinks: int,
    delta: float,
    reconfig_delta: float,
    link_capacity: float,
    buffer_bits: Optional[float] = None,
    max_delay: Optional[float] = None,
    seed: int = 0,
) -> DesignOutcome:
    """Pick the throughput-optimal degree under the given budgets and emit
    the deBruijn matching schedule realizing it.

    With both budgets present the binding (smaller) degree wins; at least
    one budget is required.
    """
    if buffer_bits is None and max_delay is None:
        raise SpecValidationError("need a buffer or delay budget (or both)")
    if reconfig_delta < 0 or reconfig_delta >= delta:
        raise SpecValidationError("reconfiguration time must satisfy 0 <= dr < dt")
    choices = []
    if max_delay is not None:
        choices.append(optimal_degree_delay(num_tors, num_uplinks, delta, max_delay))
    if buffer_bits is not None:
        choices.append(
            optimal_degree_buffer(
                buffer_bits, link_capacity, delta, num_tors, num_uplinks
            )
        )
    degree = min(choices)
    matchings = decompose_matchings(debruijn_digraph(num_tors, degree))
    schedules = assign_to_switches(matchings, num_uplinks, seed)
    report = report_for_degree(
        degree, num_tors, num_uplinks, delta, reconfig_delta / delta, link_capacity
    )
    return DesignOutcome(
        report=report,
        switch_schedules=tuple(tuple(s) for s in schedules),
    )
