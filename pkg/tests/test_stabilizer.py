import random

import pytest

from hpqc.errors import AlreadyMeasured, InvalidQubit, SimulationCapExceeded
from hpqc.geometry import CellCoord, LatticeDims, Region, RegionKind
from hpqc.stabilizer import (
    GraphAdjacency,
    PauliBasis,
    StabilizerTableau,
    cut_rank,
    lattice_graph,
    lattice_vertex_index,
)


def bell_graph():
    return GraphAdjacency.from_edges(2, [(0, 1)])


def line_graph(n):
    return GraphAdjacency.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def test_adjacency_validation():
    with pytest.raises(ValueError):
        GraphAdjacency(2, (0b10, 0b00))  # asymmetric
    with pytest.raises(ValueError):
        GraphAdjacency(1, (0b1,))  # self loop
    g = bell_graph()
    assert g.neighbors(0) == [1]
    assert g.edge_count() == 1


def test_from_edge_list_text():
    g = GraphAdjacency.from_edge_list_text("# comment\n0 1\n1 2\n")
    assert g.vertex_count == 3
    assert g.edges() == [(0, 1), (1, 2)]
    with pytest.raises(ValueError):
        GraphAdjacency.from_edge_list_text("0 zero\n")


def test_without_vertex_edges():
    g = line_graph(3).without_vertex_edges(1)
    assert g.edges() == []
    assert g.vertex_count == 3


def test_lattice_graph_is_six_connected():
    dims = LatticeDims(3, 3, 2)
    g = lattice_graph(dims)
    assert g.vertex_count == 18
    # corner touches 3 neighbors, the central cell of a layer touches 5
    corner = lattice_vertex_index(dims, CellCoord(0, 0, 0))
    center = lattice_vertex_index(dims, CellCoord(1, 1, 0))
    assert len(g.neighbors(corner)) == 3
    assert len(g.neighbors(center)) == 5


def test_lattice_graph_respects_cap():
    with pytest.raises(SimulationCapExceeded):
        lattice_graph(LatticeDims(100, 100), sim_cap=4096)


def test_plus_state_measurements():
    single = GraphAdjacency.from_edges(1, [])
    t = StabilizerTableau.from_graph(single)
    outcome, deterministic = t.measure(0, PauliBasis.X)
    assert (outcome, deterministic) == (+1, True)  # |+> is the X eigenstate

    t = StabilizerTableau.from_graph(single, signs=[-1])
    assert t.measure(0, PauliBasis.X) == (-1, True)

    t = StabilizerTableau.from_graph(single, rng=random.Random(3))
    outcome, deterministic = t.measure(0, PauliBasis.Z)
    assert not deterministic
    # once collapsed, the same question answers itself
    assert t.measure(0, PauliBasis.Z) == (outcome, True)


def test_measure_rejects_bad_qubit():
    t = StabilizerTableau.from_graph(bell_graph())
    with pytest.raises(InvalidQubit):
        t.measure(2, PauliBasis.Z)


def test_bell_pair_correlations():
    # X0 X1 and Z0 Z1 stabilize CZ|++>; measuring X on one side pins
    # the product, so x0*z1 correlations show up as determinism of the
    # second measurement basis in the right pairing.
    t = StabilizerTableau.from_graph(bell_graph(), rng=random.Random(1))
    m0, det0 = t.measure(0, PauliBasis.X)
    assert not det0
    m1, det1 = t.measure(1, PauliBasis.Z)
    assert det1 and m1 == m0  # K_0 = X_0 Z_1 forces agreement


def test_entropy_of_graph_states():
    t = StabilizerTableau.from_graph(bell_graph())
    assert t.entanglement_entropy([0]) == 1
    assert t.entanglement_entropy([0, 1]) == 0
    assert t.entanglement_entropy([]) == 0
    assert not t.is_disentangled(0)

    chain = StabilizerTableau.from_graph(line_graph(4))
    assert chain.entanglement_entropy([0, 1]) == 1
    assert chain.entanglement_entropy([0, 2]) == 2


def test_measurement_destroys_entanglement():
    t = StabilizerTableau.from_graph(bell_graph(), rng=random.Random(2))
    t.measure(1, PauliBasis.Z)
    assert t.is_disentangled(0)
    assert t.entanglement_entropy([0]) == 0


def test_cut_rank_matches_entropy_on_small_cases():
    rng = random.Random(13)
    for _ in range(100):
        n = rng.randint(1, 9)
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)
                 if rng.random() < 0.5]
        g = GraphAdjacency.from_edges(n, edges)
        t = StabilizerTableau.from_graph(g)
        subset = [v for v in range(n) if rng.random() < 0.5]
        assert t.entanglement_entropy(subset) == cut_rank(g, subset)


def test_cz_creates_and_removes_edges():
    two = GraphAdjacency.from_edges(2, [])
    t = StabilizerTableau.from_graph(two)
    t.cz(0, 1)
    want = StabilizerTableau.from_graph(bell_graph())
    assert t.canonical_form() == want.canonical_form()
    t.cz(0, 1)  # CZ is self-inverse
    assert t.canonical_form() == StabilizerTableau.from_graph(two).canonical_form()
    with pytest.raises(InvalidQubit):
        t.cz(0, 0)


def test_apply_pauli_flips_signs():
    t = StabilizerTableau.from_graph(bell_graph())
    # Z_0 anticommutes with K_0 = X_0 Z_1 only
    t.apply_pauli(0, 0b01)
    assert t.signs == [1, 0]
    t.apply_pauli(0, 0b01)
    assert t.signs == [0, 0]


def test_add_plus_qubits_extends_by_identity():
    t = StabilizerTableau.from_graph(bell_graph())
    new = t.add_plus_qubits(2)
    assert new == [2, 3]
    assert t.n == 4
    assert t.entanglement_entropy([2]) == 0
    t.check_invariants()


def test_canonical_form_ignores_generator_presentation():
    t1 = StabilizerTableau.from_graph(line_graph(3))
    t2 = StabilizerTableau.from_graph(line_graph(3))
    t2._row_mult(0, 1)  # same group, different generating set
    assert t1.canonical_form() == t2.canonical_form()


def test_canonical_form_distinguishes_signs():
    t1 = StabilizerTableau.from_graph(bell_graph())
    t2 = StabilizerTableau.from_graph(bell_graph(), signs=[-1, +1])
    assert t1.canonical_form() != t2.canonical_form()


def test_random_walk_keeps_invariants():
    rng = random.Random(31)
    for _ in range(25):
        n = rng.randint(2, 7)
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)
                 if rng.random() < 0.4]
        g = GraphAdjacency.from_edges(n, edges)
        t = StabilizerTableau.from_graph(g, rng=rng, validate=True)
        for _ in range(3 * n):
            op = rng.randrange(3)
            if op == 0:
                t.measure(rng.randrange(n), rng.choice(
                    (PauliBasis.X, PauliBasis.Y, PauliBasis.Z)))
            elif op == 1:
                a, b = rng.sample(range(n), 2)
                t.cz(a, b)
            else:
                t.apply_pauli(rng.getrandbits(n), rng.getrandbits(n))
        t.check_invariants()  # measure/cz/apply_pauli preserve the group structure


def test_measure_region_boundary_rejects_repeats_atomically():
    dims = LatticeDims(4, 4)
    t = StabilizerTableau.from_graph(lattice_graph(dims), rng=random.Random(5))
    region = Region("r", RegionKind.USER, CellCoord(0, 0, 0), LatticeDims(3, 3))
    record = t.measure_region_boundary(region, dims=dims)
    assert len(record) == 8
    before = len(t.record)
    with pytest.raises(AlreadyMeasured):
        t.measure_region_boundary(region, dims=dims)
    assert len(t.record) == before  # nothing executed on refusal


def test_measure_region_boundary_needs_a_mapping():
    t = StabilizerTableau.from_graph(lattice_graph(LatticeDims(3, 3)))
    region = Region("r", RegionKind.USER, CellCoord(0, 0, 0), LatticeDims(3, 3))
    with pytest.raises(ValueError):
        t.measure_region_boundary(region)


def test_ancilla_bases_simulate_as_stabilizer_measurements():
    # |A> and |Y> consumption records the basis but measures Y/Z
    assert PauliBasis.ANCILLA_A.simulated is PauliBasis.Y
    assert PauliBasis.ANCILLA_Y.simulated is PauliBasis.Z
    assert PauliBasis.ANCILLA_A.consumes_ancilla
    assert not PauliBasis.X.consumes_ancilla

    t = StabilizerTableau.from_graph(bell_graph(), rng=random.Random(7))
    outcome, _ = t.measure(0, PauliBasis.ANCILLA_A)
    assert outcome in (-1, +1)
    assert t.record.events[-1].basis is PauliBasis.ANCILLA_A
