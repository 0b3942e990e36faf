"""Statevector cross-checks for the tableau engine.

The dense simulator is an independent implementation (numpy vectors, no
shared code with the bitset tableau), so agreement on every probability
is strong evidence both are right.
"""

import math
import random

import numpy as np
import pytest

from hpqc import oracle
from hpqc.errors import OracleCapExceeded
from hpqc.stabilizer import GraphAdjacency, PauliBasis, StabilizerTableau

TOL = 1e-10


def bell_graph():
    return GraphAdjacency.from_edges(2, [(0, 1)])


def test_oracle_state_amplitudes():
    state = oracle.oracle_state(bell_graph())
    # CZ|++> = (|00> + |01> + |10> - |11>) / 2
    want = np.array([0.5, 0.5, 0.5, -0.5])
    assert np.allclose(state, want, atol=TOL)


def test_oracle_state_with_signs():
    # a -1 eigenvalue on K_0 = X_0 Z_1 equals Z_0 applied to the state;
    # qubit 0 is bit 0, so indices 1 and 3 flip sign
    state = oracle.oracle_state(bell_graph(), signs=[-1, +1])
    want = np.array([0.5, -0.5, 0.5, 0.5])
    assert np.allclose(state, want, atol=TOL)


def test_oracle_cap():
    big = GraphAdjacency.from_edges(15, [])
    with pytest.raises(OracleCapExceeded):
        oracle.oracle_state(big)


def test_single_qubit_probabilities():
    plus = oracle.oracle_state(GraphAdjacency.from_edges(1, []))
    px = oracle.measure_probabilities(plus, 1, 0, PauliBasis.X)
    pz = oracle.measure_probabilities(plus, 1, 0, PauliBasis.Z)
    assert abs(px[0] - 1.0) < TOL
    assert abs(pz[0] - 0.5) < TOL and abs(pz[1] - 0.5) < TOL


def test_projection_renormalizes():
    state = oracle.oracle_state(bell_graph())
    projected = oracle.project(state, 2, 0, PauliBasis.Z, +1)
    assert abs(np.linalg.norm(projected) - 1.0) < TOL
    # qubit 0 collapsed to |0>: amplitudes with bit 0 set vanish
    assert abs(projected[1]) < TOL and abs(projected[3]) < TOL


def test_projection_rejects_impossible_outcome():
    plus = oracle.oracle_state(GraphAdjacency.from_edges(1, []))
    with pytest.raises(ValueError):
        oracle.project(plus, 1, 0, PauliBasis.X, -1)


def test_entropy_of_bell_state_is_one_bit():
    state = oracle.oracle_state(bell_graph())
    assert abs(oracle.entanglement_entropy_bits(state, 2, [0]) - 1.0) < 1e-9
    assert abs(oracle.entanglement_entropy_bits(state, 2, [0, 1])) < 1e-9


def test_apply_cz_matches_graph_construction():
    base = oracle.oracle_state(GraphAdjacency.from_edges(2, []))
    built = oracle.apply_cz(base, 2, 0, 1)
    assert np.allclose(built, oracle.oracle_state(bell_graph()), atol=TOL)


def _random_graph(rng, n_max=8):
    n = rng.randint(2, n_max)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.4]
    return GraphAdjacency.from_edges(n, edges)


def test_tableau_oracle_equivalence_walk():
    # every tableau outcome must sit at oracle probability 1 (deterministic)
    # or exactly 1/2 (random), stepping the oracle by projection
    rng = random.Random(101)
    bases = (PauliBasis.X, PauliBasis.Y, PauliBasis.Z)
    for trial in range(60):
        graph = _random_graph(rng)
        n = graph.vertex_count
        signs = [rng.choice((1, -1)) for _ in range(n)] if trial % 2 else None
        tableau = StabilizerTableau.from_graph(
            graph, signs=signs, rng=random.Random(rng.getrandbits(32)))
        state = oracle.oracle_state(graph, signs=signs)
        for _ in range(rng.randint(1, 2 * n)):
            q, basis = rng.randrange(n), rng.choice(bases)
            p_plus, p_minus = oracle.measure_probabilities(state, n, q, basis)
            outcome, deterministic = tableau.measure(q, basis)
            got = p_plus if outcome == +1 else p_minus
            if deterministic:
                assert abs(got - 1.0) <= TOL
            else:
                assert abs(p_plus - 0.5) <= TOL and abs(p_minus - 0.5) <= TOL
            state = oracle.project(state, n, q, basis, outcome)


def test_entropy_agreement_with_tableau():
    rng = random.Random(7)
    for _ in range(40):
        graph = _random_graph(rng, n_max=7)
        n = graph.vertex_count
        tableau = StabilizerTableau.from_graph(graph)
        state = oracle.oracle_state(graph)
        subset = [v for v in range(n) if rng.random() < 0.5]
        got = oracle.entanglement_entropy_bits(state, n, subset)
        want = tableau.entanglement_entropy(subset)
        assert abs(got - want) < 1e-8  # stabilizer-state entropy is an integer


def test_expectation_of_stabilizers_is_one():
    graph = GraphAdjacency.from_edges(3, [(0, 1), (1, 2)])
    state = oracle.oracle_state(graph)
    # K_1 = X_1 Z_0 Z_2
    assert abs(oracle.expectation(state, 3, 0b010, 0b101) - 1.0) < TOL
    # Z_0 alone is not in the group: expectation 0
    assert abs(oracle.expectation(state, 3, 0, 0b001)) < TOL


def test_oracle_measured_preparation():
    # recorded measurement events replay inside the oracle construction
    graph = bell_graph()
    tableau = StabilizerTableau.from_graph(graph, rng=random.Random(3))
    outcome, _ = tableau.measure(0, PauliBasis.Z)
    state = oracle.oracle_state(graph, measurements=list(tableau.record))
    probs = oracle.measure_probabilities(state, 2, 0, PauliBasis.Z)
    idx = 0 if outcome == +1 else 1
    assert abs(probs[idx] - 1.0) < TOL
