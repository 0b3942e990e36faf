"""Stabilizer simulation of graph states on small lattices.

The tableau keeps one generator row per qubit as a pair of int bitsets
(X part, Z part) plus a sign bit, so a state on n qubits is n rows of
2n + 1 bits.  Measurement follows the standard update: a Pauli that
anticommutes with some generator yields a coin-flip outcome and a row
replacement; one that commutes with every generator lies in the group
(up to sign) and the outcome is the sign of the matching product.

Bipartite entanglement of a stabilizer state is integral and equals
|A| - dim(S_A), with S_A the subgroup supported inside A; for unmeasured
graph states it coincides with the GF(2) rank of the adjacency block
across the cut (cut rank), which the test-suites use as an independent
oracle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from . import gf2
from .errors import AlreadyMeasured, InvalidQubit, SimulationCapExceeded
from .geometry import CellCoord, LatticeDims, Region, boundary_ring

DEFAULT_SIMULATION_CAP = 4096


class PauliBasis(str, Enum):
    """Measurement bases; the ancilla bases are accounting stand-ins.

    ANCILLA_A and ANCILLA_Y consume one distilled ancilla each and are
    executed as Y and Z respectively at desk scale (non-Clifford rotations
    are outside the tableau formalism); results carry a flag instead.
    """

    X = "X"
    Y = "Y"
    Z = "Z"
    ANCILLA_A = "A"
    ANCILLA_Y = "T"

    @property
    def simulated(self) -> "PauliBasis":
        if self is PauliBasis.ANCILLA_A:
            return PauliBasis.Y
        if self is PauliBasis.ANCILLA_Y:
            return PauliBasis.Z
        return self

    @property
    def consumes_ancilla(self) -> bool:
        return self in (PauliBasis.ANCILLA_A, PauliBasis.ANCILLA_Y)


@dataclass(frozen=True)
class GraphAdjacency:
    """Simple graph as symmetric GF(2) adjacency rows (int bitsets)."""

    vertex_count: int
    rows: tuple[int, ...]
    coords: tuple[CellCoord, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.rows) != self.vertex_count:
            raise ValueError("one adjacency row per vertex required")
        for v, row in enumerate(self.rows):
            if row >> self.vertex_count:
                raise ValueError(f"row {v} has bits beyond vertex count")
            if (row >> v) & 1:
                raise ValueError(f"self-loop on vertex {v}")
        for v, row in enumerate(self.rows):
            for u in _bits(row):
                if not (self.rows[u] >> v) & 1:
                    raise ValueError(f"edge {v}-{u} is not symmetric")

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        edges: Iterable[tuple[int, int]],
        coords: tuple[CellCoord, ...] | None = None,
    ) -> "GraphAdjacency":
        rows = [0] * vertex_count
        for u, v in edges:
            if u == v or not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise ValueError(f"bad edge ({u}, {v})")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(vertex_count, tuple(rows), coords)

    def neighbors(self, v: int) -> list[int]:
        return list(_bits(self.rows[v]))

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.vertex_count) for v in _bits(self.rows[u]) if u < v]

    def without_vertex_edges(self, v: int) -> "GraphAdjacency":
        """Same vertex set with v isolated (its edges deleted)."""
        rows = list(self.rows)
        for u in _bits(rows[v]):
            rows[u] &= ~(1 << v)
        rows[v] = 0
        return GraphAdjacency(self.vertex_count, tuple(rows), self.coords)

    @classmethod
    def from_edge_list_text(cls, text: str, vertex_count: int | None = None) -> "GraphAdjacency":
        """Parse a plain-text edge list, one `u v` pair per line, zero-based.

        Blank lines and `#` comments are ignored; vertex count defaults to
        max index + 1.
        """
        edges: list[tuple[int, int]] = []
        top = -1
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"expected two vertex indices, got {raw!r}")
            u, v = int(parts[0]), int(parts[1])
            top = max(top, u, v)
            edges.append((u, v))
        n = vertex_count if vertex_count is not None else top + 1
        return cls.from_edges(n, edges)


def _bits(value: int) -> Iterable[int]:
    while value:
        low = value & -value
        yield low.bit_length() - 1
        value ^= low


def lattice_vertex_index(dims: LatticeDims, cell: CellCoord) -> int:
    """Row-major vertex index of a cell: (z * depth + y) * width + x."""
    if not dims.contains(cell):
        raise InvalidQubit(f"cell {cell} outside lattice {dims}")
    return (cell.z * dims.depth + cell.y) * dims.width + cell.x


def lattice_graph(dims: LatticeDims, sim_cap: int = DEFAULT_SIMULATION_CAP) -> GraphAdjacency:
    """6-connected cubic lattice graph, one vertex per unit cell.

    Desk-scale stand-in for the topological lattice: the severing and
    sharing claims verified here are graph-state generic, so a single
    qubit per cell preserves the physics at tractable sizes.
    """
    if dims.cell_count > sim_cap:
        raise SimulationCapExceeded(
            f"{dims.cell_count} cells exceed the simulation cap {sim_cap}"
        )
    n = dims.cell_count
    rows = [0] * n
    coords: list[CellCoord] = [CellCoord(0, 0, 0)] * n
    for z in range(dims.layers):
        for y in range(dims.depth):
            for x in range(dims.width):
                v = (z * dims.depth + y) * dims.width + x
                coords[v] = CellCoord(x, y, z)
                if x + 1 < dims.width:
                    u = v + 1
                    rows[v] |= 1 << u
                    rows[u] |= 1 << v
                if y + 1 < dims.depth:
                    u = v + dims.width
                    rows[v] |= 1 << u
                    rows[u] |= 1 << v
                if z + 1 < dims.layers:
                    u = v + dims.width * dims.depth
                    rows[v] |= 1 << u
                    rows[u] |= 1 << v
    return GraphAdjacency(n, tuple(rows), tuple(coords))


@dataclass(frozen=True)
class MeasurementEvent:
    qubit: int
    basis: PauliBasis
    outcome: int  # +1 or -1
    deterministic: bool
    nonclifford_consumed: bool = False


@dataclass
class MeasurementRecord:
    """Ordered classical record of measurement events."""

    events: list[MeasurementEvent] = field(default_factory=list)

    def append(self, event: MeasurementEvent) -> None:
        self.events.append(event)

    def outcomes(self) -> list[int]:
        return [e.outcome for e in self.events]

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __getitem__(self, i):
        return self.events[i]


class StabilizerTableau:
    """n commuting, independent generator rows with sign bits.

    Rows mutate in place; a tableau is single-threaded.  All random
    outcomes come from the per-tableau seeded generator, so a run is
    fully reproducible from its seed.
    """

    def __init__(
        self,
        n: int,
        xs: list[int],
        zs: list[int],
        signs: list[int],
        rng: random.Random | None = None,
        validate: bool = False,
    ):
        self.n = n
        self.xs = xs
        self.zs = zs
        self.signs = signs  # 0 -> +1, 1 -> -1
        self.measured: set[int] = set()
        self.record = MeasurementRecord()
        self.rng = rng if rng is not None else random.Random(0)
        self._validate = validate
        if validate:
            self.check_invariants()

    # -- construction --------------------------------------------------

    @classmethod
    def from_graph(
        cls,
        graph: GraphAdjacency,
        signs: Sequence[int] | None = None,
        rng: random.Random | None = None,
        validate: bool = False,
    ) -> "StabilizerTableau":
        """Graph-state tableau: generator v is X_v Z_{N(v)} with the given sign.

        `signs` entries are +1/-1 per vertex (default all +1).
        """
        n = graph.vertex_count
        xs = [1 << v for v in range(n)]
        zs = list(graph.rows)
        if signs is None:
            bits = [0] * n
        else:
            if len(signs) != n:
                raise ValueError("one sign per vertex required")
            bits = [0 if s == +1 else 1 for s in signs]
        return cls(n, xs, zs, bits, rng=rng, validate=validate)

    def copy(self) -> "StabilizerTableau":
        dup = StabilizerTableau(
            self.n, list(self.xs), list(self.zs), list(self.signs),
            rng=random.Random(), validate=False,
        )
        dup.rng.setstate(self.rng.getstate())
        dup.measured = set(self.measured)
        dup.record = MeasurementRecord(list(self.record.events))
        dup._validate = self._validate
        return dup

    # -- internals ------------------------------------------------------

    def _phase_quarter_turns(self, x1: int, z1: int, x2: int, z2: int) -> int:
        """i-exponent (mod 4) accumulated when multiplying Pauli 1 by Pauli 2."""
        mask = (1 << self.n) - 1
        nx1, nz1, nx2, nz2 = x1 ^ mask, z1 ^ mask, x2 ^ mask, z2 ^ mask
        plus = (x1 & nz1 & x2 & z2) | (nx1 & z1 & x2 & nz2) | (x1 & z1 & nx2 & z2)
        minus = (x1 & nz1 & nx2 & z2) | (nx1 & z1 & x2 & z2) | (x1 & z1 & x2 & nz2)
        return (plus.bit_count() - minus.bit_count()) % 4

    def _row_mult(self, h: int, i: int) -> None:
        """Row h <- row h * row i (generator product, sign tracked)."""
        turns = (
            2 * self.signs[h]
            + 2 * self.signs[i]
            + self._phase_quarter_turns(self.xs[h], self.zs[h], self.xs[i], self.zs[i])
        ) % 4
        assert turns in (0, 2), "product of commuting Hermitian Paulis must be +/-1"
        self.signs[h] = turns // 2
        self.xs[h] ^= self.xs[i]
        self.zs[h] ^= self.zs[i]

    def _anticommutes(self, row: int, x: int, z: int) -> bool:
        return ((self.xs[row] & z).bit_count() + (self.zs[row] & x).bit_count()) % 2 == 1

    def _pauli_bits(self, qubit: int, basis: PauliBasis) -> tuple[int, int]:
        bit = 1 << qubit
        sim = basis.simulated
        if sim is PauliBasis.X:
            return bit, 0
        if sim is PauliBasis.Z:
            return 0, bit
        return bit, bit  # Y

    # -- operations -----------------------------------------------------

    def measure(self, qubit: int, basis: PauliBasis) -> tuple[int, bool]:
        """Measure one qubit; returns (outcome, deterministic).

        Re-measuring a qubit is allowed and follows the updated state (a
        repeated Z measurement is deterministic with the same outcome).
        """
        if not (0 <= qubit < self.n):
            raise InvalidQubit(f"qubit {qubit} out of range [0, {self.n})")
        x, z = self._pauli_bits(qubit, basis)
        anti = [i for i in range(self.n) if self._anticommutes(i, x, z)]
        if anti:
            p = anti[0]
            for i in anti[1:]:
                self._row_mult(i, p)
            coin = self.rng.getrandbits(1)
            self.xs[p] = x
            self.zs[p] = z
            self.signs[p] = coin
            outcome = +1 if coin == 0 else -1
            deterministic = False
        else:
            outcome = self._determined_sign(x, z)
            deterministic = True
        self.measured.add(qubit)
        self.record.append(
            MeasurementEvent(qubit, basis, outcome, deterministic, basis.consumes_ancilla)
        )
        if self._validate:
            self.check_invariants()
        return outcome, deterministic

    def _determined_sign(self, x: int, z: int) -> int:
        """Sign of the Pauli (x|z) inside the stabilizer group."""
        vectors = [self.xs[i] | (self.zs[i] << self.n) for i in range(self.n)]
        mask = gf2.decompose(vectors, x | (z << self.n))
        assert mask is not None, "a commuting Pauli must lie in the group"
        px, pz, turns = 0, 0, 0
        for i in _bits(mask):
            turns = (turns + 2 * self.signs[i]
                     + self._phase_quarter_turns(px, pz, self.xs[i], self.zs[i])) % 4
            px ^= self.xs[i]
            pz ^= self.zs[i]
        assert (px, pz) == (x, z)
        assert turns in (0, 2)
        return +1 if turns == 0 else -1

    def measure_region_boundary(
        self, region: Region, cell_to_qubit: dict[CellCoord, int] | None = None,
        dims: LatticeDims | None = None,
    ) -> MeasurementRecord:
        """Z-measure every boundary-ring cell of the region, in ring order.

        The mapping is either an explicit cell->qubit dict or the row-major
        lattice indexing for `dims`.  Raises AlreadyMeasured (before any
        measurement happens) if a target qubit was measured before.
        """
        ring = boundary_ring(region)
        if cell_to_qubit is not None:
            qubits = [cell_to_qubit[c] for c in ring]
        elif dims is not None:
            qubits = [lattice_vertex_index(dims, c) for c in ring]
        else:
            raise ValueError("either cell_to_qubit or dims is required")
        already = [q for q in qubits if q in self.measured]
        if already:
            raise AlreadyMeasured(
                f"{len(already)} boundary qubits already measured (first: {already[0]})"
            )
        start = len(self.record)
        for q in qubits:
            self.measure(q, PauliBasis.Z)
        return MeasurementRecord(self.record.events[start:])

    def entanglement_entropy(self, subset: Iterable[int]) -> int:
        """Bipartite entanglement (in bits) of `subset` versus the rest.

        |A| - dim(S_A) for the subgroup S_A supported inside A, obtained by
        GF(2) elimination of the generator rows restricted to the
        complement's columns: dim(S_A) = n - rank(rows restricted to B).
        """
        mask_a = 0
        for q in subset:
            if not (0 <= q < self.n):
                raise InvalidQubit(f"qubit {q} out of range [0, {self.n})")
            mask_a |= 1 << q
        size_a = mask_a.bit_count()
        mask_b = ((1 << self.n) - 1) ^ mask_a
        restricted = [
            (self.xs[i] & mask_b) | ((self.zs[i] & mask_b) << self.n)
            for i in range(self.n)
        ]
        rank_b = gf2.rank(restricted)
        return size_a - (self.n - rank_b)

    def is_disentangled(self, qubit: int) -> bool:
        """True iff the qubit carries no entanglement with the rest."""
        if not (0 <= qubit < self.n):
            raise InvalidQubit(f"qubit {qubit} out of range [0, {self.n})")
        return self.entanglement_entropy([qubit]) == 0

    # -- gates needed by the protocol layer ------------------------------

    def add_plus_qubits(self, count: int) -> list[int]:
        """Append fresh |+> qubits (generator X each); returns their indices."""
        new = list(range(self.n, self.n + count))
        self.n += count
        for q in new:
            self.xs.append(1 << q)
            self.zs.append(0)
            self.signs.append(0)
        if self._validate:
            self.check_invariants()
        return new

    def cz(self, a: int, b: int) -> None:
        """Controlled-phase conjugation of every generator."""
        if a == b or not (0 <= a < self.n and 0 <= b < self.n):
            raise InvalidQubit(f"bad CZ pair ({a}, {b})")
        for i in range(self.n):
            xa = (self.xs[i] >> a) & 1
            xb = (self.xs[i] >> b) & 1
            za = (self.zs[i] >> a) & 1
            zb = (self.zs[i] >> b) & 1
            self.signs[i] ^= xa & xb & (za ^ zb)
            if xa:
                self.zs[i] ^= 1 << b
            if xb:
                self.zs[i] ^= 1 << a
        if self._validate:
            self.check_invariants()

    def apply_pauli(self, x: int, z: int) -> None:
        """Apply the Pauli operator (x|z) to the state: flips the sign of
        every generator it anticommutes with."""
        for i in range(self.n):
            if self._anticommutes(i, x, z):
                self.signs[i] ^= 1

    # -- canonical form and invariants -----------------------------------

    def canonical_form(self) -> tuple[tuple[int, int, int], ...]:
        """Reduced row echelon form over GF(2), column order X_0..X_{n-1},
        Z_0..Z_{n-1}, signs tracked; a canonical state fingerprint."""
        dup = self.copy()
        row = 0
        for col in range(2 * self.n):
            def bit(i: int) -> int:
                if col < self.n:
                    return (dup.xs[i] >> col) & 1
                return (dup.zs[i] >> (col - self.n)) & 1

            pivot = next((i for i in range(row, self.n) if bit(i)), None)
            if pivot is None:
                continue
            dup.xs[row], dup.xs[pivot] = dup.xs[pivot], dup.xs[row]
            dup.zs[row], dup.zs[pivot] = dup.zs[pivot], dup.zs[row]
            dup.signs[row], dup.signs[pivot] = dup.signs[pivot], dup.signs[row]
            for i in range(self.n):
                if i != row and bit(i):
                    dup._row_mult(i, row)
            row += 1
            if row == self.n:
                break
        return tuple((dup.xs[i], dup.zs[i], dup.signs[i]) for i in range(self.n))

    def check_invariants(self) -> None:
        """Assert full rank and pairwise commutation of the generators."""
        vectors = [self.xs[i] | (self.zs[i] << self.n) for i in range(self.n)]
        if gf2.rank(vectors) != self.n:
            raise AssertionError("generator rows are not independent over GF(2)")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self._anticommutes(i, self.xs[j], self.zs[j]):
                    raise AssertionError(f"generators {i} and {j} anticommute")


def graph_state_tableau(
    graph: GraphAdjacency,
    signs: Sequence[int] | None = None,
    rng: random.Random | None = None,
    validate: bool = False,
) -> StabilizerTableau:
    """Tableau of the graph state with optional generator signs."""
    return StabilizerTableau.from_graph(graph, signs=signs, rng=rng, validate=validate)


def cut_rank(graph: GraphAdjacency, subset: Iterable[int]) -> int:
    """GF(2) rank of the adjacency block between subset and complement.

    For an unmeasured graph state this equals the entanglement entropy
    across the cut; the test-suites exploit the identity as an oracle.
    """
    mask_a = 0
    for v in subset:
        if not (0 <= v < graph.vertex_count):
            raise InvalidQubit(f"vertex {v} out of range [0, {graph.vertex_count})")
        mask_a |= 1 << v
    mask_b = ((1 << graph.vertex_count) - 1) ^ mask_a
    return gf2.rank(graph.rows[v] & mask_b for v in _bits(mask_a))
