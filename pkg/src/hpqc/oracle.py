"""Brute-force statevector reference for small graph states.

Independent of the tableau code on purpose: it builds states as dense
numpy vectors (qubit v is bit v, least significant first) and computes
measurement distributions and entanglement from the amplitudes.  Capped
at 14 qubits (16384 amplitudes) so the cross-checks stay fast.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import OracleCapExceeded
from .stabilizer import GraphAdjacency, MeasurementEvent, PauliBasis

ORACLE_QUBIT_CAP = 14


def _parity(values: np.ndarray) -> np.ndarray:
    """Bitwise parity of each entry (entries < 2**16)."""
    v = values.copy()
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return v & 1


def oracle_state(
    graph: GraphAdjacency,
    signs: list[int] | None = None,
    measurements: Iterable[MeasurementEvent] | None = None,
) -> np.ndarray:
    """Statevector of the graph state: H^n then CZ per edge, then the
    optional Z corrections for -1 generator signs, then projection onto
    the recorded outcome of each measurement event in order."""
    n = graph.vertex_count
    if n > ORACLE_QUBIT_CAP:
        raise OracleCapExceeded(f"{n} qubits exceed the oracle cap {ORACLE_QUBIT_CAP}")
    dim = 1 << n
    state = np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)
    basis = np.arange(dim)
    for u, v in graph.edges():
        both = ((basis >> u) & 1) & ((basis >> v) & 1)
        state[both == 1] *= -1.0
    if signs is not None:
        for v, s in enumerate(signs):
            if s == -1:
                flip = (basis >> v) & 1
                state[flip == 1] *= -1.0
    if measurements is not None:
        for event in measurements:
            state = project(state, n, event.qubit, event.basis, event.outcome)
    return state


def apply_pauli(state: np.ndarray, n: int, x: int, z: int) -> np.ndarray:
    """Apply the Hermitian Pauli with X-support x and Z-support z (Y on the
    overlap): P|b> = i^{|Y|} (-1)^{popcount(b & z)} |b xor x>."""
    dim = 1 << n
    basis = np.arange(dim)
    out = np.zeros_like(state)
    phase = 1j ** ((x & z).bit_count() % 4)
    signs = 1.0 - 2.0 * _parity(basis & z)
    out[basis ^ x] = phase * signs * state[basis]
    return out


def pauli_matrix_action(state: np.ndarray, n: int, qubit: int, basis: PauliBasis) -> np.ndarray:
    sim = basis.simulated
    if sim is PauliBasis.X:
        return apply_pauli(state, n, 1 << qubit, 0)
    if sim is PauliBasis.Z:
        return apply_pauli(state, n, 0, 1 << qubit)
    return apply_pauli(state, n, 1 << qubit, 1 << qubit)


def measure_probabilities(state: np.ndarray, n: int, qubit: int, basis: PauliBasis) -> tuple[float, float]:
    """(p_plus, p_minus) for a single-qubit Pauli measurement."""
    acted = pauli_matrix_action(state, n, qubit, basis)
    plus = 0.5 * (state + acted)
    minus = 0.5 * (state - acted)
    return float(np.vdot(plus, plus).real), float(np.vdot(minus, minus).real)


def project(state: np.ndarray, n: int, qubit: int, basis: PauliBasis, outcome: int) -> np.ndarray:
    """Normalized post-measurement state for the given +/-1 outcome."""
    acted = pauli_matrix_action(state, n, qubit, basis)
    proj = 0.5 * (state + outcome * acted)
    norm = np.linalg.norm(proj)
    if norm < 1e-12:
        raise ValueError("projection onto a zero-probability outcome")
    return proj / norm


def expectation(state: np.ndarray, n: int, x: int, z: int) -> float:
    """Real expectation value of the Pauli (x|z)."""
    return float(np.vdot(state, apply_pauli(state, n, x, z)).real)


def apply_cz(state: np.ndarray, n: int, a: int, b: int) -> np.ndarray:
    """Controlled-phase between qubits a and b."""
    basis = np.arange(1 << n)
    out = state.copy()
    both = ((basis >> a) & 1) & ((basis >> b) & 1)
    out[both == 1] *= -1.0
    return out


def entanglement_entropy_bits(state: np.ndarray, n: int, subset: list[int]) -> float:
    """Von Neumann entropy (base 2) of the reduced state on `subset`.

    For stabilizer states this is an integer up to numerical noise.
    """
    inside = sorted(subset)
    outside = [q for q in range(n) if q not in set(inside)]
    dim_a = 1 << len(inside)
    dim_b = 1 << len(outside)
    psi = np.zeros((dim_a, dim_b), dtype=np.complex128)
    for b in range(1 << n):
        ia = 0
        for pos, q in enumerate(inside):
            ia |= ((b >> q) & 1) << pos
        ib = 0
        for pos, q in enumerate(outside):
            ib |= ((b >> q) & 1) << pos
        psi[ia, ib] = state[b]
    sv = np.linalg.svd(psi, compute_uv=False)
    probs = sv ** 2
    probs = probs[probs > 1e-12]
    return float(-(probs * np.log2(probs)).sum())
