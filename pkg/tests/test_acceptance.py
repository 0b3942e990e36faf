"""Acceptance gate: eight behavioral criteria, one printed line each.

Every test emits exactly one `criterion N: PASS/FAIL` line (outside
pytest's capture, so the gate reads the same in any output mode) and
asserts at the stated tolerance.  Wall-clock bounds are enforced where
a criterion carries one.
"""

import random
import time
from contextlib import contextmanager

import pytest

from hpqc import cli, verify
from hpqc.allocator import SessionMode
from hpqc.errors import BudgetExhausted
from hpqc.geometry import (
    CellCoord,
    LatticeDims,
    Region,
    RegionKind,
    interior_cells,
)
from hpqc.report import event_digest
from hpqc.resources import OperationsBudget, consume_ops
from hpqc.scenario import build_mainframe, execute_scenario, load_scenario
from hpqc.stabilizer import (
    GraphAdjacency,
    PauliBasis,
    StabilizerTableau,
    cut_rank,
    lattice_graph,
    lattice_vertex_index,
)
from hpqc.verify import bundled_scenario_path

SEED = 20260816


@contextmanager
def criterion(capsys, number, label):
    try:
        yield
    except BaseException:
        with capsys.disabled():
            print(f"criterion {number}: FAIL - {label}", flush=True)
        raise
    else:
        with capsys.disabled():
            print(f"criterion {number}: PASS - {label}", flush=True)


def test_criterion_1_machine_arithmetic_exact(capsys):
    with criterion(capsys, 1, "full-machine arithmetic, exact integers, < 1 s"):
        started = time.perf_counter()

        # one logical footprint costs exactly 3000 chips
        assert cli.main(["estimate", "--width", "20", "--depth", "40"]) == 0
        # one user region: 1250 logical qubits at 50 x 25 tiles
        assert cli.main(["estimate", "--width", "1000", "--depth", "1000"]) == 0
        # the whole machine
        assert cli.main(["estimate", "--width", "4000", "--depth", "500000"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert "chips=3000" in out
        assert "logical=1" in out
        assert "chips=3750000" in out
        assert "logical=1250" in out
        assert "chips=7500000000" in out
        assert "logical=2500000" in out
        assert out.count("approximate=false") == 3
        assert (1000 // 20) * (1000 // 40) == 50 * 25 == 1250

        outcome = execute_scenario(
            load_scenario(bundled_scenario_path("paper_fig2"))
        )
        assert outcome.ok, outcome.failures
        flat = outcome.flat
        assert flat["machine.width"] == "4000"
        assert flat["machine.depth"] == "500000"
        assert flat["machine.cells"] == "2000000000"
        assert flat["resources.total_chips"] == "7500000000"
        assert flat["resources.total_logical_qubits"] == "2500000"
        assert flat["resources.user_count"] == "1000"
        assert flat["resources.chips_per_user_region"] == "3750000"
        assert flat["resources.logical_per_user_region"] == "1250"

        elapsed = time.perf_counter() - started
        assert elapsed < 1.0, f"took {elapsed:.3f}s"


def test_criterion_2_severing_theorem_all_subregions(capsys):
    with criterion(capsys, 2, "boundary severing drops every tested cut to exactly 0"):
        started = time.perf_counter()
        rng = random.Random(SEED)
        tested = 0
        for dims in (LatticeDims(4, 4, 1), LatticeDims(3, 3, 2)):
            graph = lattice_graph(dims)
            for w in range(3, dims.width + 1):
                for d in range(3, dims.depth + 1):
                    for x0 in range(dims.width - w + 1):
                        for y0 in range(dims.depth - d + 1):
                            region = Region(
                                region_id=f"sub-{x0}-{y0}-{w}x{d}",
                                kind=RegionKind.USER,
                                origin=CellCoord(x0, y0, 0),
                                dims=LatticeDims(w, d, dims.layers),
                            )
                            tableau = StabilizerTableau.from_graph(
                                graph, rng=random.Random(rng.getrandbits(32))
                            )
                            tableau.measure_region_boundary(region, dims=dims)
                            interior = [
                                lattice_vertex_index(dims, c)
                                for c in interior_cells(region)
                            ]
                            assert interior, "sub-region must have an interior"
                            assert tableau.entanglement_entropy(interior) == 0
                            tested += 1
        assert tested == 10
        elapsed = time.perf_counter() - started
        assert elapsed < 10.0, f"took {elapsed:.3f}s"


def test_criterion_3_oracle_equivalence_200_graphs(capsys):
    with criterion(capsys, 3, "tableau outcomes match the statevector oracle"):
        assert verify.ORACLE_TOLERANCE == 1e-10
        result = verify.check_oracle_equivalence(trials=200, seed=SEED)
        assert result.count >= 200
        assert result.passed, result.detail


def test_criterion_4_cut_rank_identity_500_pairs(capsys):
    with criterion(capsys, 4, "entropy equals GF(2) cut rank, exact"):
        rng = random.Random(SEED + 4)
        for _ in range(500):
            n = rng.randint(1, 12)
            edges = [
                (u, v)
                for u in range(n)
                for v in range(u + 1, n)
                if rng.random() < 0.4
            ]
            graph = GraphAdjacency.from_edges(n, edges)
            tableau = StabilizerTableau.from_graph(graph)
            subset = [v for v in range(n) if rng.random() < 0.5]
            assert tableau.entanglement_entropy(subset) == cut_rank(graph, subset)


def test_criterion_5_retained_link_sharing(capsys):
    with criterion(capsys, 5, "brokered cut stays >= 1, fully severed cut is 0"):
        scenario = load_scenario(bundled_scenario_path("two_users_bell"))
        outcome = execute_scenario(scenario)
        assert outcome.ok, outcome.failures
        assert int(outcome.flat["session.alice.entanglement"]) >= 1
        assert int(outcome.flat["session.bob.entanglement"]) >= 1

        # same build, but both users sever completely with nothing brokered
        machine = build_mainframe(scenario.config, scenario.config.seed)
        a = machine.admit("alice", SessionMode.SECURE, 4)
        b = machine.admit("bob", SessionMode.SECURE, 4)
        machine.allocate(a.session_id)
        machine.allocate(b.session_id)
        machine.sever(a.session_id)
        machine.sever(b.session_id)
        assert machine.session_entanglement(a.session_id) == 0
        assert machine.session_entanglement(b.session_id) == 0


def test_criterion_6_ledger_fuzz_10000_events(capsys):
    with criterion(capsys, 6, "10,000-event fuzz: no violations, deterministic replay"):
        machine, violations, applied = verify.run_ledger_fuzz(
            events=10_000, seed=SEED
        )
        assert applied == 10_000
        assert violations == []
        replay, replay_violations, _ = verify.run_ledger_fuzz(
            events=10_000, seed=SEED
        )
        assert replay_violations == []
        assert machine.event_log_lines() == replay.event_log_lines()
        assert event_digest(machine.event_log_lines()) == event_digest(
            replay.event_log_lines()
        )


def test_criterion_7_protocol_roundtrip_and_purity(capsys):
    with criterion(capsys, 7, "codec round-trip, descriptor purity, cross-mode parity"):
        roundtrip = verify.check_codec_roundtrip(trials=1000, seed=SEED + 7)
        assert roundtrip.count >= 1000
        assert roundtrip.passed, roundtrip.detail

        purity = verify.check_descriptor_purity(trials=50, seed=SEED + 8)
        assert purity.passed, purity.detail

        cross = verify.check_cross_mode_equivalence(trials=50, seed=SEED + 9)
        assert cross.count >= 50
        assert cross.passed, cross.detail


def test_criterion_8_budget_accounting(capsys):
    with criterion(capsys, 8, "ops cross-sum holds, refusal lands exactly at 10^16"):
        outcome = execute_scenario(
            load_scenario(bundled_scenario_path("two_users_bell"))
        )
        machine = outcome.mainframe
        total = 0
        for line in machine.event_log_lines():
            details = line.split(",", 4)[4]
            for item in details.split(";"):
                if item.startswith("cells="):
                    total += int(item.split("=", 1)[1])
        assert total == machine.budget.consumed_ops > 0

        budget = OperationsBudget()
        assert budget.total_ops == 10**16
        budget = consume_ops(budget, 10**16 - 1)
        budget = consume_ops(budget, 1)  # lands exactly on the boundary
        assert budget.consumed_ops == 10**16
        with pytest.raises(BudgetExhausted):
            consume_ops(budget, 1)  # first op past the boundary is refused
        assert budget.consumed_ops == 10**16
