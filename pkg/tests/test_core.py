"""Periodic evolving graph model, conversions, and flow legality."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from rdcn import core
from rdcn.core import (
    StaticFlow,
    TemporalFlow,
    TemporalPath,
    build_periodic_graph,
    emulated_graph,
    enumerate_foundation_paths,
    flow_static_to_temporal,
    flow_temporal_to_static,
    simple_emulated_graph,
    static_of,
    temporal_of,
    temporal_path_delay,
    throughput_of_static_flow,
    throughput_of_temporal_flow,
    validate_temporal_flow,
)
from rdcn.demand import DemandMatrix, permutation_demand
from rdcn.errors import (
    ConstraintViolationError,
    InvalidMatchingError,
    ScheduleMismatchError,
    SpecValidationError,
    UndefinedThroughputError,
)

from conftest import build_shift_graph, random_schedule_graph, shift_matching


random_graphs = st.builds(lambda seed, nt, nu, gamma: random_schedule_graph(
    random.Random(seed), nt, nu, gamma),
    st.integers(0, 2**32 - 1), st.integers(3, 5), st.integers(1, 2), st.integers(1, 3))


class TestBuildPeriodicGraph:
    def test_two_switch_union_is_two_out_regular_per_slot(self):
        g = build_shift_graph(16, [[1, 2], [4, 8]])
        assert g.gamma == 2
        for t in range(2):
            out = {u: 0 for u in range(16)}
            inc = {u: 0 for u in range(16)}
            for (u, v) in g.edges_at(t):
                out[u] += 1
                inc[v] += 1
            assert set(out.values()) == {2}
            assert set(inc.values()) == {2}

    def test_identity_matching_gives_self_loops(self):
        g = build_shift_graph(4, [[0]])
        assert g.gamma == 1
        assert set(g.edges_at(0)) == {(u, u) for u in range(4)}

    def test_cyclic_shift_construction(self, shift_graph_4):
        assert set(shift_graph_4.edges_at(0)) == {(u, (u + 1) % 4) for u in range(4)}
        assert set(shift_graph_4.edges_at(1)) == {(u, (u + 2) % 4) for u in range(4)}

    def test_unequal_schedule_lengths_rejected(self):
        with pytest.raises(ScheduleMismatchError):
            build_periodic_graph(
                4, 2, 1e-4, 0.0,
                [[shift_matching(4, 1)], [shift_matching(4, 1), shift_matching(4, 2)]],
                1.0,
            )

    def test_non_bijective_matching_rejected(self):
        with pytest.raises(InvalidMatchingError):
            build_periodic_graph(4, 1, 1e-4, 0.0, [[(0, 0, 1, 2)]], 1.0)

    def test_too_many_switches_rejected(self):
        with pytest.raises(SpecValidationError):
            build_periodic_graph(
                4, 1, 1e-4, 0.0,
                [[shift_matching(4, 1)], [shift_matching(4, 2)]],
                1.0,
            )

    def test_reconfig_must_be_shorter_than_slot(self):
        with pytest.raises(SpecValidationError):
            build_periodic_graph(4, 1, 1e-4, 1e-4, [[shift_matching(4, 1)]], 1.0)

    def test_parallel_circuits_add_capacity(self):
        g = build_periodic_graph(
            4, 2, 1e-4, 0.0,
            [[shift_matching(4, 1)], [shift_matching(4, 1)]],
            3.0,
        )
        assert g.capacity((0, 1), 0) == 6.0

    @given(random_graphs, st.integers(0, 20))
    @settings(max_examples=30, deadline=None)
    def test_periodicity(self, g, t):
        assert g.edges_at(t) == g.edges_at(t + g.gamma)
        for edge in g.edges_at(t):
            assert g.capacity(edge, t) == g.capacity(edge, t + 7 * g.gamma)


class TestEmulatedGraph:
    def test_identity_period_is_slot_graph(self):
        g = build_shift_graph(4, [[1]], reconfig=0.0, cap=5.0)
        emu = emulated_graph(g)
        assert emu.capacities == {(u, (u + 1) % 4, 0): 5.0 for u in range(4)}

    def test_capacity_scaling(self):
        g = build_periodic_graph(
            16, 2, 100e-6, 10e-6,
            [[shift_matching(16, k) for k in range(0, 16, 2)],
             [shift_matching(16, k) for k in range(1, 16, 2)]],
            400e9,
        )
        emu = emulated_graph(g)
        assert g.gamma == 8
        for cap in emu.capacities.values():
            assert cap == pytest.approx(45e9)

    def test_edge_multiset_matches_slots(self, shift_graph_4):
        emu = emulated_graph(shift_graph_4)
        expected = {(u, (u + 1) % 4, 0) for u in range(4)} | {
            (u, (u + 2) % 4, 1) for u in range(4)
        }
        assert set(emu.capacities) == expected

    @given(random_graphs)
    @settings(max_examples=30, deadline=None)
    def test_capacity_conservation(self, g):
        emu = emulated_graph(g)
        expected = (1 - g.reconfig_fraction) / g.gamma * g.total_capacity_per_period()
        assert emu.total_capacity() == pytest.approx(expected, rel=1e-12)


class TestSimpleEmulatedGraph:
    def test_pair_in_both_slots_sums(self):
        g = build_shift_graph(4, [[1, 1]], reconfig=0.2, cap=10.0)
        simple = simple_emulated_graph(g)
        assert simple.capacity((0, 1)) == pytest.approx((1 - 0.2) * 10.0)

    def test_absent_edge_absent(self, shift_graph_4):
        simple = simple_emulated_graph(shift_graph_4)
        assert simple.capacity((0, 3)) == 0.0

    def test_self_loops_flagged(self):
        g = build_shift_graph(4, [[0, 1]])
        simple = simple_emulated_graph(g)
        assert simple.self_loops == frozenset(range(4))
        # successors exclude self-loops unless asked
        assert simple.successors(0) == [1]
        assert simple.successors(0, include_self=True) == [0, 1]


class TestPathConversions:
    def test_mod_arithmetic_labels(self):
        delta = TemporalPath(hops=(((0, 1), 0), ((1, 2), 3)))
        p = static_of(delta, gamma=4)
        assert [label for _, label in p.hops] == [0, 3]
        p2 = static_of(delta, gamma=2)
        assert [label for _, label in p2.hops] == [0, 1]
        assert temporal_of(p2) == delta

    def test_round_trip_identity(self, shift_graph_4):
        for path in enumerate_foundation_paths(shift_graph_4):
            assert temporal_of(static_of(path, shift_graph_4.gamma)) == path

    def test_wraparound_labels_share_value(self):
        gamma = 3
        delta = TemporalPath(hops=(((0, 1), gamma - 1), ((1, 2), 2 * gamma - 1)))
        p = static_of(delta, gamma)
        assert [label for _, label in p.hops] == [gamma - 1, gamma - 1]

    def test_illegal_gap_names_hop(self):
        # Gap legality is enforced where flows bind paths to a graph.
        g = build_shift_graph(5, [[1, 2, 3]])
        delta = TemporalPath(hops=(((0, 1), 0), ((1, 3), 4)))
        problems = core.validate_temporal_path(delta, g)
        assert any("hop 1" in reason and "gap" in reason for reason in problems)
        flow = StaticFlow({static_of(delta, g.gamma): 0.1})
        with pytest.raises(ConstraintViolationError, match="hop 1"):
            flow_static_to_temporal(flow, g)

    def test_foundation_set_bijection_small_instance(self):
        # 3 nodes, period 2: projection onto labeled paths is one-to-one.
        g = build_shift_graph(3, [[1, 2]])
        foundation = enumerate_foundation_paths(g, max_len=2)
        assert foundation
        projected = {static_of(p, g.gamma) for p in foundation}
        assert len(projected) == len(foundation)
        assert {temporal_of(p) for p in projected} == set(foundation)

    def test_structural_validation(self):
        with pytest.raises(ConstraintViolationError):
            TemporalPath(hops=())
        with pytest.raises(ConstraintViolationError):  # chain break
            TemporalPath(hops=(((0, 1), 0), ((2, 3), 1)))
        with pytest.raises(ConstraintViolationError):  # time not increasing
            TemporalPath(hops=(((0, 1), 1), ((1, 2), 1)))
        with pytest.raises(ConstraintViolationError):  # vertex repeats
            TemporalPath(hops=(((0, 1), 0), ((1, 0), 1)))


class TestFlowConversions:
    def _legal_static_flow(self, g, seed=0, scale=0.9):
        rng = random.Random(seed)
        paths = enumerate_foundation_paths(g, max_len=g.num_tors - 1)
        emu = emulated_graph(g)
        raw = {static_of(p, g.gamma): rng.random() for p in paths}
        loads = {}
        for p, rate in raw.items():
            for hop in p.hops:
                key = (hop[0][0], hop[0][1], hop[1])
                loads[key] = loads.get(key, 0.0) + rate
        worst = max(loads[k] / emu.capacities[k] for k in loads)
        return StaticFlow({p: scale * rate / worst for p, rate in raw.items()})

    def test_zero_flow_round_trip(self, shift_graph_4):
        zero = StaticFlow({})
        assert flow_static_to_temporal(zero, shift_graph_4).assignments == {}

    def test_scale_factor(self):
        g = build_shift_graph(4, [[1, 2]], reconfig=0.0, cap=100.0)
        path = TemporalPath(hops=(((0, 1), 0),))
        flow = StaticFlow({static_of(path, g.gamma): 5.0})
        lifted = flow_static_to_temporal(flow, g)
        assert lifted.assignments[path] == pytest.approx(10.0)

    def test_round_trip_exact(self, shift_graph_4):
        flow = self._legal_static_flow(shift_graph_4, seed=3)
        back = flow_temporal_to_static(flow_static_to_temporal(flow, shift_graph_4),
                                       shift_graph_4)
        assert set(back.assignments) == set(flow.assignments)
        for p, rate in flow.assignments.items():
            assert back.assignments[p] == pytest.approx(rate, rel=1e-12)

    def test_throughput_preserved_both_definitions(self):
        # Compare the two throughput definitions computed independently.
        g = build_shift_graph(4, [[1, 2]], reconfig=0.1)
        flow = self._legal_static_flow(g, seed=11)
        lifted = flow_static_to_temporal(flow, g)
        demand = permutation_demand((1, 2, 3, 0), 0.05)
        theta_static = throughput_of_static_flow(flow, demand)
        theta_temporal = throughput_of_temporal_flow(lifted, g, demand)
        assert abs(theta_static - theta_temporal) <= 1e-9

    def test_conversion_preserves_legality(self, shift_graph_4):
        flow = self._legal_static_flow(shift_graph_4, seed=7, scale=1.0)
        lifted = flow_static_to_temporal(flow, shift_graph_4)
        assert validate_temporal_flow(lifted, shift_graph_4).legal

    def test_saturating_flow_saturates_emulated_edges(self):
        # One-hop paths at full slot capacity on the 4-node shift graph.
        g = build_shift_graph(4, [[1, 2]], cap=8.0)
        assignments = {}
        for t, shift in enumerate((1, 2)):
            for u in range(4):
                path = TemporalPath(hops=(((u, (u + shift) % 4), t),))
                assignments[path] = 8.0
        flow = TemporalFlow(assignments)
        assert validate_temporal_flow(flow, g).legal
        static = flow_temporal_to_static(flow, g)
        emu = emulated_graph(g)
        sums = {}
        for p, rate in static.assignments.items():
            for (e, label) in p.hops:
                sums[(e[0], e[1], label)] = sums.get((e[0], e[1], label), 0.0) + rate
        assert set(sums) == set(emu.capacities)
        for key, total in sums.items():
            assert total == pytest.approx(emu.capacities[key])

    def test_illegal_static_flow_rejected(self):
        g = build_shift_graph(4, [[1, 2]], cap=1.0)
        path = TemporalPath(hops=(((0, 1), 0),))
        flow = StaticFlow({static_of(path, g.gamma): 10.0})
        with pytest.raises(ConstraintViolationError):
            flow_static_to_temporal(flow, g)


class TestValidateTemporalFlow:
    def test_exact_capacity_is_legal(self):
        g = build_shift_graph(4, [[1, 2]], cap=2.0)
        flow = TemporalFlow({TemporalPath(hops=(((0, 1), 0),)): 2.0})
        assert validate_temporal_flow(flow, g).legal

    def test_overload_reports_edge_and_slot(self):
        g = build_shift_graph(4, [[1, 1]], cap=2.0)
        p1 = TemporalPath(hops=(((0, 1), 0),))
        p2 = TemporalPath(hops=(((0, 1), 0), ((1, 2), 1)))
        report = validate_temporal_flow(TemporalFlow({p1: 1.5, p2: 1.5}), g)
        assert len(report.capacity_violations) == 1
        violation = report.capacity_violations[0]
        assert violation.edge == (0, 1) and violation.timeslot == 0
        assert violation.load == pytest.approx(3.0)

    def test_hop_gap_violation(self):
        g = build_shift_graph(4, [[1, 2]])
        bad = TemporalPath(hops=(((0, 1), 0), ((1, 3), 3)))
        report = validate_temporal_flow(TemporalFlow({bad: 0.1}), g)
        assert any("gap" in v.reason for v in report.path_violations)

    def test_missing_edge_violation(self):
        g = build_shift_graph(4, [[1, 2]])
        ghost = TemporalPath(hops=(((0, 3), 0),))
        report = validate_temporal_flow(TemporalFlow({ghost: 0.1}), g)
        assert any("absent" in v.reason for v in report.path_violations)


class TestDelayAndThroughput:
    def test_direct_substitution(self):
        path = TemporalPath(hops=(((0, 1), 0), ((1, 2), 2)))
        assert temporal_path_delay(path, 100e-6, 2) == pytest.approx(400e-6)

    def test_one_hop_static(self):
        path = TemporalPath(hops=(((0, 1), 0),))
        assert temporal_path_delay(path, 1e-4, 1) == pytest.approx(1e-4)

    def test_maximal_gap_hits_len_gamma_bound(self):
        gamma, delta = 4, 1e-4
        # Enumerate legal hop-time triples: gaps in 1..gamma.
        spans = [
            g1 + g2
            for g1 in range(1, gamma + 1)
            for g2 in range(1, gamma + 1)
        ]
        assert max(spans) == 8
        path = TemporalPath(hops=(((0, 1), 0), ((1, 2), 4), ((2, 3), 8)))
        delay = temporal_path_delay(path, delta, gamma)
        assert delay == pytest.approx((8 + 1) * delta + (gamma - 1) * delta)
        assert delay == pytest.approx(len(path.hops) * gamma * delta)

    def test_throughput_exact_and_half(self):
        g = build_shift_graph(4, [[1, 2]], reconfig=0.2, cap=10.0)
        demand = permutation_demand((1, 2, 3, 0), 1.0)
        scale = g.gamma / (1 - g.reconfig_fraction)
        full = TemporalFlow(
            {TemporalPath(hops=(((u, (u + 1) % 4), 0),)): scale for u in range(4)}
        )
        assert throughput_of_temporal_flow(full, g, demand) == pytest.approx(1.0)
        half = TemporalFlow(
            {p: r / 2 for p, r in full.assignments.items()}
        )
        assert throughput_of_temporal_flow(half, g, demand) == pytest.approx(0.5)

    def test_zero_demand_undefined(self, shift_graph_4):
        flow = TemporalFlow({})
        zeros = DemandMatrix(rates=[[0.0] * 4 for _ in range(4)])
        with pytest.raises(UndefinedThroughputError):
            throughput_of_temporal_flow(flow, shift_graph_4, zeros)


class TestFoundationEnumeration:
    def test_budget_refusal(self, shift_graph_4):
        from rdcn.errors import BudgetExceededError

        with pytest.raises(BudgetExceededError):
            enumerate_foundation_paths(shift_graph_4, budget=3)

    def test_paths_are_legal_and_start_in_first_period(self, shift_graph_4):
        paths = enumerate_foundation_paths(shift_graph_4)
        assert paths
        for p in paths:
            assert 0 <= p.start_time < shift_graph_4.gamma
            assert not core.validate_temporal_path(p, shift_graph_4)

    def test_self_loops_excluded(self):
        g = build_shift_graph(4, [[0, 1]])
        paths = enumerate_foundation_paths(g)
        for p in paths:
            for (u, v), _ in p.hops:
                assert u != v


class TestGraphUtilities:
    def test_hop_distances_and_diameter(self, four_cycle):
        assert core.hop_distances(four_cycle, 0) == [0, 1, 2, 3]
        assert core.diameter(four_cycle) == 3

    def test_shortest_path_deterministic(self, four_cycle):
        assert core.shortest_path(four_cycle, 0, 2) == (0, 1, 2)
        assert core.shortest_path(four_cycle, 2, 0) == (2, 3, 0)

    def test_unreachable_returns_none(self):
        g = core.WeightedDigraph(num_nodes=3, capacities={(0, 1): 1.0})
        assert core.shortest_path(g, 1, 0) is None
        assert math.isinf(core.hop_distances(g, 1)[0])
        # Diameter is the longest finite distance; no edges means zero.
        assert core.diameter(core.WeightedDigraph(3, {})) == 0
