"""Acceptance suite: one test per checklist criterion, with a PASS/FAIL line.

Each test prints its verdict before asserting so the summary is visible
even when an assertion fails. Two assertions are known to miss their
stated targets and are kept faithful rather than loosened:

* criterion 4 expects n/(2n-1) for saturated derangements on complete
  graphs, but the max-concurrent-flow optimum is n/(2n-2) (a legal flow
  achieving it and a matching cut certificate exist; see the test body);
* criterion 7 expects a >= 1.2x throughput gap at the 20 MB operating
  point, which requires transport-level burst effects that a fluid
  simulator deliberately does not model (measured gap is ~1.02x).
"""

import json
import math
import random
import time

import pytest
from click.testing import CliRunner

from rdcn import analytics, core, oracle, sim, topology
from rdcn.cli import main as cli_main
from rdcn.demand import permutation_demand, random_permutation_demand, uniform_demand

from conftest import build_fabric, complete_digraph, directed_cycle, random_schedule_graph

US = 1e-6
MB = 8e6
GBPS = 1e9


def report(num, ok, detail):
    print(f"\n[criterion {num}] {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


class TestCriterion1Table:
    def test_design_table_exact(self):
        t0 = time.time()
        rows = {}
        for degree in (2, 4, 16):
            rows[degree] = analytics.report_for_degree(
                degree, 16, 2, 100 * US, 0.1, 400 * GBPS
            )
        theta_ok = (
            rows[2].theta == 0.125
            and rows[4].theta == 0.25
            and rows[16].theta == 0.5
        )
        buffer_ok = (
            rows[16].per_node_buffer_bits == 80 * MB
            and rows[4].per_node_buffer_bits == 20 * MB
        )
        delay16 = rows[16].max_delay_seconds
        delay4 = rows[4].max_delay_seconds
        delay_ok = delay16 == pytest.approx(1600 * US) and delay4 <= 850 * US
        delay_value_ok = delay4 == pytest.approx(800 * US)
        elapsed = time.time() - t0
        ok = theta_ok and buffer_ok and delay_ok and delay_value_ok and elapsed < 1.0
        report(
            1,
            ok,
            f"theta (0.125/0.25/0.5), buffers (20/80 MB), delay d=4 "
            f"{delay4 / US:.0f}us <= 850us, d=16 {delay16 / US:.0f}us, "
            f"{elapsed:.3f}s",
        )
        assert ok

    def test_cli_table_matches(self):
        runner = CliRunner()
        result = runner.invoke(cli_main, ["table2"], catch_exceptions=False)
        assert result.exit_code == 0
        rows = {
            line.split(",")[0]: line.split(",")
            for line in result.output.strip().splitlines()[1:]
        }
        assert rows["static"][2] == "0.125"
        assert rows["complete"][2] == "0.5"
        assert rows["balanced"][2] == "0.25"
        assert rows["balanced"][4] == "20.0"
        assert rows["complete"][4] == "80.0"


class TestCriterion2DegreeSolver:
    def test_lambert_solver(self):
        t0 = time.time()
        degree = analytics.optimal_degree_delay(16, 2, 100 * US, 850 * US)
        rng = random.Random(424242)
        worst = 0.0
        for _ in range(5000):
            x = rng.uniform(-1 / math.e + 1e-12, 1e4)
            w = analytics.lambert_w("principal", x)
            worst = max(worst, abs(w * math.exp(w) - x) / max(1.0, abs(x)))
        for _ in range(5000):
            x = rng.uniform(-1 / math.e + 1e-12, -1e-9)
            w = analytics.lambert_w("minus-one", x)
            worst = max(worst, abs(w * math.exp(w) - x) / max(1.0, abs(x)))
        elapsed = time.time() - t0
        ok = degree == 4 and worst <= 1e-12 and elapsed < 1.0
        report(
            2,
            ok,
            f"degree(16,2,100us,850us)={degree}, worst residual {worst:.2e} "
            f"over 10^4 points, {elapsed:.3f}s",
        )
        assert ok


class TestCriterion3Equivalence:
    def test_temporal_equals_emulated(self):
        t0 = time.time()
        rng = random.Random(2026)
        worst = 0.0
        checked = 0
        for _ in range(50):
            nt = rng.randint(3, 6)
            nu = rng.randint(1, 2)
            gamma = rng.randint(1, 3)
            tax = rng.choice([0.0, 0.1])
            g = random_schedule_graph(rng, nt, nu, gamma, reconfig=tax)
            simple = core.simple_emulated_graph(g)
            demands = [
                random_permutation_demand(nt, 1.0, seed=rng.randint(0, 10**6)),
                random_permutation_demand(nt, 1.0, seed=rng.randint(0, 10**6)),
                uniform_demand(nt, 1.0),
            ]
            for dm in demands:
                temporal = oracle.temporal_max_flow(g, dm, hop_cap=nt - 1)
                static = oracle.max_concurrent_flow(simple, dm, path_len_cap=nt - 1)
                worst = max(worst, abs(temporal.theta - static.theta))
                for res in (temporal, static):  # soundness along the way
                    if not math.isnan(res.arl):
                        assert res.theta <= res.bound + 1e-6
                checked += 1
        elapsed = time.time() - t0
        ok = worst <= 1e-6 and elapsed < 300
        report(
            3,
            ok,
            f"{checked} instance/demand pairs, worst |theta_t - theta_e| "
            f"= {worst:.2e}, {elapsed:.1f}s",
        )
        assert ok


class TestCriterion4CompleteGraphThroughput:
    def test_saturated_derangement_on_complete_graphs(self):
        # Stated target: n/(2n-1). The max-concurrent-flow optimum is
        # n/(2n-2): the flow sending c on the direct edge and splitting
        # the rest over the n-2 two-hop relays is legal and achieves it,
        # and summing the per-node outgoing capacity constraints proves
        # no legal flow does better. n = 2 decides the discrepancy: a
        # swap demand routes fully on direct edges (theta = 1 = n/(2n-2)
        # exactly), yet the target formula would claim 2/3. The assertion
        # keeps the stated target; the measured value documents the gap.
        measured = {}
        for n in (4, 5, 6):
            g = complete_digraph(n)
            dm = permutation_demand(
                tuple((u + 1) % n for u in range(n)), oracle.node_capacities(g)
            )
            res = oracle.max_concurrent_flow(g, dm)
            assert res.theta <= res.bound + 1e-6
            measured[n] = res.theta
        detail = ", ".join(
            f"K{n}: measured {measured[n]:.6f} vs target {n / (2 * n - 1):.6f} "
            f"(= n/(2n-2) is {n / (2 * n - 2):.6f})"
            for n in (4, 5, 6)
        )
        ok = all(abs(measured[n] - n / (2 * n - 1)) <= 1e-6 for n in (4, 5, 6))
        report(4, ok, detail)
        assert ok


class TestCriterion5BoundSoundness:
    def test_bound_holds_and_worst_cycle_is_exact(self):
        rng = random.Random(77)
        sound = True
        for _ in range(20):
            nt = rng.randint(3, 6)
            g = random_schedule_graph(rng, nt, rng.randint(1, 2), rng.randint(1, 3))
            dm = random_permutation_demand(nt, 1.0, seed=rng.randint(0, 10**6))
            res = oracle.max_concurrent_flow(
                core.simple_emulated_graph(g), dm, path_len_cap=nt - 1
            )
            if not math.isnan(res.arl):
                sound = sound and res.theta <= res.bound + 1e-6
        worst = oracle.worst_case_permutation(directed_cycle(4))
        cycle_ok = (
            abs(worst.theta - 1 / 3) <= 1e-9 and worst.permutation == (3, 0, 1, 2)
        )
        ok = sound and cycle_ok
        report(
            5,
            ok,
            f"theta <= capacity bound on randomized runs; 4-cycle worst "
            f"permutation theta = {worst.theta:.9f} (target 1/3)",
        )
        assert ok


class TestCriterion6Topology:
    def test_generation_pipeline(self):
        g = topology.debruijn_digraph(16, 4)
        diam = core.diameter(g.to_weighted())
        matchings = topology.decompose_matchings(g)
        bijective = all(sorted(m) == list(range(16)) for m in matchings)
        union_ok = topology.schedule_edge_multiset([matchings]) == g.edge_multiset()
        schedules = topology.assign_to_switches(matchings, 2, seed=0)
        gamma_ok = len(schedules) == 2 and all(len(s) == 2 for s in schedules)
        peg = core.build_periodic_graph(16, 2, 100 * US, 0.0, schedules, 1.0)
        realized = {}
        for t in range(peg.gamma):
            for edge, cap in peg.edges_at(t).items():
                realized[edge] = realized.get(edge, 0) + round(cap)
        round_trip_ok = realized == dict(g.edge_multiset())
        ok = diam == 2 and len(matchings) == 4 and bijective and union_ok \
            and gamma_ok and round_trip_ok
        report(
            6,
            ok,
            f"deBruijn(16,4): diameter {diam}, 4 bijective matchings, union "
            f"identity {union_ok}, gamma=2 {gamma_ok}, round trip {round_trip_ok}",
        )
        assert ok


class TestCriterion7SimTrend:
    def test_buffer_throughput_trend(self):
        # Part 1 target: the degree-4 schedule beats the complete graph by
        # at least 1.2x at a 20 MB per-node buffer, load 0.25, averaged
        # over 5 seeds. In this fluid model the complete graph's working
        # set at that load (~22 MB) barely exceeds the buffer, so the
        # honest gap is a few percent, far from 1.2x; packet/transport
        # burst effects are out of scope. The assertion keeps the target.
        t0 = time.time()
        util = {}
        for degree in (4, 16):
            vals = []
            for seed in range(5):
                cfg = sim.SimConfig(
                    graph=build_fabric(16, 2, degree),
                    buffer_bits=int(20 * MB),
                    routing="valiant",
                    demand="permutation",
                    load=0.25,
                    duration_slots=600,
                    seed=seed,
                )
                vals.append(sim.run_sim(cfg).downlink_utilization)
            util[degree] = sum(vals) / len(vals)
        ratio = util[4] / util[16]
        part1_ok = ratio >= 1.2

        cfg = sim.SimConfig(
            graph=build_fabric(16, 2, 16),
            buffer_bits=int(80 * MB),
            routing="valiant",
            demand="permutation",
            load=0.5,
            duration_slots=600,
            seed=0,
        )
        res = sim.run_sim(cfg)
        part2_ok = abs(res.downlink_utilization - 0.5) <= 0.05
        elapsed = time.time() - t0
        ok = part1_ok and part2_ok and elapsed < 300
        report(
            7,
            ok,
            f"d=4 {util[4]:.4f} vs complete {util[16]:.4f} at 20 MB "
            f"(ratio {ratio:.2f}, target >= 1.2); complete at 80 MB, load 0.5: "
            f"{res.downlink_utilization:.4f} (target 0.5 +/- 0.05); {elapsed:.0f}s",
        )
        assert ok


class TestCriterion8Conservation:
    def test_every_slot_conserves_and_respects_buffer(self):
        # The engine checks both invariants every slot and raises on any
        # breach; a run under drop pressure plus the final exact identity
        # exercises them end to end.
        outcomes = []
        for degree, buffer_mb, load in ((4, 2, 0.4), (16, 10, 0.5)):
            cfg = sim.SimConfig(
                graph=build_fabric(16, 2, degree),
                buffer_bits=int(buffer_mb * MB),
                load=load,
                duration_slots=200,
                seed=3,
            )
            res = sim.run_sim(cfg)
            exact = (
                res.offered_bits
                == res.delivered_bits
                + res.dropped_bits
                + res.queued_bits
                + res.inflight_bits
            )
            outcomes.append(
                exact and res.dropped_bits > 0
                and res.occupancy_max_bits <= cfg.buffer_bits
            )
        ok = all(outcomes)
        report(
            8,
            ok,
            "delivered+dropped+queued+inflight == offered exactly and "
            "occupancy <= B in every slot, under forced drops",
        )
        assert ok


class TestCriterion9Determinism:
    def test_seeded_cli_outputs_byte_identical(self, tmp_path, monkeypatch):
        runner = CliRunner()
        outputs = []
        for run in range(2):
            out_dir = tmp_path / f"run{run}"
            out_dir.mkdir()
            monkeypatch.chdir(out_dir)  # identical relative paths per run
            chunks = []
            for args in (
                ["gen-schedule", "--kind", "debruijn", "--nt", "16", "--nu", "2",
                 "--degree", "4", "--seed", "11", "--out", "schedule.json"],
                ["analyze", "--schedule", "schedule.json"],
                ["oracle", "--schedule", "schedule.json", "--demand",
                 "permutation", "--seed", "4", "--path-cap", "2"],
                ["design", "--nt", "16", "--nu", "2", "--delta-us", "100",
                 "--delta-r-us", "10", "--cap-gbps", "400", "--buffer-mb", "20",
                 "--seed", "3"],
                ["table2"],
            ):
                result = runner.invoke(cli_main, args, catch_exceptions=False)
                assert result.exit_code == 0, result.output
                chunks.append(result.output)
            chunks.append((out_dir / "schedule.json").read_text())
            cfg = {
                "schedule": "schedule.json",
                "buffer_mb": 10,
                "demand": "permutation",
                "load": 0.2,
                "duration_slots": 60,
                "seed": 5,
            }
            (out_dir / "sim.json").write_text(json.dumps(cfg), encoding="utf-8")
            result = runner.invoke(
                cli_main, ["simulate", "--config", "sim.json"],
                catch_exceptions=False,
            )
            assert result.exit_code == 0
            chunks.append(result.output)
            outputs.append("\x00".join(chunks))
        ok = outputs[0] == outputs[1]
        report(9, ok, "gen/analyze/oracle/design/table2/simulate byte-identical")
        assert ok
