"""Shared builders for desk-scale test instances."""

import random

import pytest

from rdcn import core, topology


def shift_matching(num_tors, shift):
    return tuple((u + shift) % num_tors for u in range(num_tors))


def build_shift_graph(num_tors, shifts_per_switch, delta=100e-6, reconfig=0.0, cap=1.0):
    """Evolving graph from per-switch lists of cyclic-shift matchings."""
    schedules = [
        [shift_matching(num_tors, s) for s in shifts] for shifts in shifts_per_switch
    ]
    return core.build_periodic_graph(
        num_tors=num_tors,
        num_uplinks=len(schedules),
        delta=delta,
        reconfig_delta=reconfig * delta,
        switch_schedules=schedules,
        link_capacity=cap,
    )


def random_schedule_graph(rng, num_tors, num_switches, gamma, delta=100e-6,
                          reconfig=0.0, cap=1.0):
    schedules = [
        [tuple(rng.sample(range(num_tors), num_tors)) for _ in range(gamma)]
        for _ in range(num_switches)
    ]
    return core.build_periodic_graph(
        num_tors=num_tors,
        num_uplinks=num_switches,
        delta=delta,
        reconfig_delta=reconfig * delta,
        switch_schedules=schedules,
        link_capacity=cap,
    )


def directed_cycle(num_nodes, cap=1.0):
    return core.WeightedDigraph(
        num_nodes=num_nodes,
        capacities={(u, (u + 1) % num_nodes): cap for u in range(num_nodes)},
    )


def complete_digraph(num_nodes, cap=1.0):
    """Self-loop-free complete digraph with unit edge capacities."""
    return core.WeightedDigraph(
        num_nodes=num_nodes,
        capacities={
            (u, v): cap for u in range(num_nodes) for v in range(num_nodes) if u != v
        },
    )


@pytest.fixture
def four_cycle():
    return directed_cycle(4)


@pytest.fixture
def shift_graph_4():
    """4 ToRs, one switch, slots shift+1 / shift+2."""
    return build_shift_graph(4, [[1, 2]])


def debruijn_schedule(num_tors=16, num_uplinks=2, degree=4, seed=1):
    matchings = topology.decompose_matchings(
        topology.debruijn_digraph(num_tors, degree)
    )
    return topology.assign_to_switches(matchings, num_uplinks, seed)


def build_fabric(num_tors, num_uplinks, degree, delta_us=100.0, reconfig_us=1.0,
                 cap_bps=400e9, seed=1):
    """Periodic fabric emulating a degree-d graph (complete when d = nt)."""
    if degree == num_tors:
        schedules = topology.complete_graph_schedule(num_tors, num_uplinks)
    else:
        schedules = debruijn_schedule(num_tors, num_uplinks, degree, seed)
    return core.build_periodic_graph(
        num_tors=num_tors,
        num_uplinks=num_uplinks,
        delta=delta_us * 1e-6,
        reconfig_delta=reconfig_us * 1e-6,
        switch_schedules=schedules,
        link_capacity=cap_bps,
    )
