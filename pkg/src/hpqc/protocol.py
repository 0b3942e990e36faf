"""User/mainframe interaction protocols and their wire formats.

Three line-oriented formats, all UTF-8 with LF endings and canonical
decimal fields (no leading zeros, no whitespace), so that encode and
decode are exact inverses byte for byte:

  measurement stream   header `HPQC-MS 1`, records `x,y,z,B`
  eigenvalue record    header `HPQC-ER 1`, records `g,s` (s is + or -)
  stream descriptor    header `HPQC-SD 1`, one region line
                       `origin_x,origin_y,w,d,layers`

Instruction coordinates are region-local (the user addresses cells of
their own allotment; placement inside the machine is the allocator's
business).  The descriptor deliberately carries nothing derived from
any instruction stream: its bytes are a pure function of the region
geometry, which is what makes the routed photon stream independent of
the user's algorithm.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import (
    CapExceeded,
    MalformedHeader,
    MalformedRecord,
    UnknownBasisCode,
)
from .geometry import CellCoord, LatticeDims, Region
from .stabilizer import (
    DEFAULT_SIMULATION_CAP,
    GraphAdjacency,
    PauliBasis,
    StabilizerTableau,
    lattice_vertex_index,
)

if TYPE_CHECKING:
    from .allocator import Mainframe, UserSession

MS_HEADER = "HPQC-MS 1"
ER_HEADER = "HPQC-ER 1"
SD_HEADER = "HPQC-SD 1"

_DECIMAL = r"(?:0|[1-9][0-9]*)"
_MS_LINE = re.compile(rf"^({_DECIMAL}),({_DECIMAL}),({_DECIMAL}),([^,\s]+)$")
_ER_LINE = re.compile(rf"^({_DECIMAL}),([^,\s]+)$")
_BASIS_CODES = {b.value: b for b in PauliBasis}


@dataclass(frozen=True)
class MeasurementInstruction:
    """One cell measurement request, region-local coordinates."""

    cell: CellCoord
    basis: PauliBasis


def encode_stream(instructions: Iterable[MeasurementInstruction]) -> bytes:
    lines = [MS_HEADER]
    for inst in instructions:
        lines.append(f"{inst.cell.x},{inst.cell.y},{inst.cell.z},{inst.basis.value}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _split_lines(data: bytes, header: str) -> list[str]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedHeader(f"stream is not valid UTF-8: {exc}") from exc
    if not text.endswith("\n"):
        raise MalformedRecord("stream does not end with LF", line=text.count("\n") + 1)
    lines = text.split("\n")[:-1]
    if not lines or lines[0] != header:
        got = lines[0] if lines else ""
        raise MalformedHeader(f"expected header {header!r}, got {got!r}")
    return lines[1:]


def decode_stream(data: bytes) -> list[MeasurementInstruction]:
    """Strict inverse of encode_stream; rejects non-canonical bytes."""
    instructions: list[MeasurementInstruction] = []
    for offset, line in enumerate(_split_lines(data, MS_HEADER)):
        lineno = offset + 2
        match = _MS_LINE.match(line)
        if match is None:
            raise MalformedRecord(
                f"expected `x,y,z,B` with canonical decimals, got {line!r}", line=lineno
            )
        code = match.group(4)
        basis = _BASIS_CODES.get(code)
        if basis is None:
            raise UnknownBasisCode(f"unknown basis code {code!r}", line=lineno)
        cell = CellCoord(int(match.group(1)), int(match.group(2)), int(match.group(3)))
        instructions.append(MeasurementInstruction(cell, basis))
    return instructions


@dataclass(frozen=True)
class EigenvalueRecord:
    """Signs of the prepared lattice generators, one per region cell.

    Generator indices are region-local, row-major within each layer,
    layers in ascending order; this is the only classical data a secure
    session ever receives from the machine.
    """

    entries: tuple[tuple[int, int], ...]  # (generator index, sign in {+1, -1})

    def __post_init__(self) -> None:
        for g, s in self.entries:
            if g < 0 or s not in (+1, -1):
                raise ValueError(f"bad record entry ({g}, {s})")

    def sign(self, generator: int) -> int:
        for g, s in self.entries:
            if g == generator:
                return s
        return +1

    def signs_by_index(self) -> dict[int, int]:
        return {g: s for g, s in self.entries}


def encode_record(record: EigenvalueRecord) -> bytes:
    lines = [ER_HEADER]
    for g, s in record.entries:
        lines.append(f"{g},{'+' if s == +1 else '-'}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def decode_record(data: bytes) -> EigenvalueRecord:
    entries: list[tuple[int, int]] = []
    for offset, line in enumerate(_split_lines(data, ER_HEADER)):
        lineno = offset + 2
        match = _ER_LINE.match(line)
        if match is None:
            raise MalformedRecord(
                f"expected `g,s` with canonical decimal index, got {line!r}", line=lineno
            )
        token = match.group(2)
        if token not in ("+", "-"):
            raise MalformedRecord(f"sign must be + or -, got {token!r}", line=lineno)
        entries.append((int(match.group(1)), +1 if token == "+" else -1))
    return EigenvalueRecord(tuple(entries))


@dataclass(frozen=True)
class PhotonStreamDescriptor:
    """Routing plan for a secure session's photon stream.

    The emission order is row-major per layer, a pure function of the
    region; session identity and the eigenvalue-record reference are
    bookkeeping fields that never reach the serialized form.
    """

    session_id: str
    region: Region
    record_ref: str

    @property
    def layer_order(self) -> tuple[int, ...]:
        return tuple(range(self.region.dims.layers))

    def emission_order(self) -> list[CellCoord]:
        """Region-local cell order, row-major within each layer."""
        dims = self.region.dims
        return [
            CellCoord(x, y, z)
            for z in range(dims.layers)
            for y in range(dims.depth)
            for x in range(dims.width)
        ]

    def serialize(self) -> bytes:
        dims = self.region.dims
        line = (
            f"{self.region.origin.x},{self.region.origin.y},"
            f"{dims.width},{dims.depth},{dims.layers}"
        )
        return f"{SD_HEADER}\n{line}\n".encode("utf-8")


def region_local_index(region: Region, local_cell: CellCoord) -> int:
    """Row-major generator index of a region-local cell."""
    dims = region.dims
    if not (local_cell.x < dims.width and local_cell.y < dims.depth and local_cell.z < dims.layers):
        raise ValueError(f"{local_cell} outside region dims {dims}")
    return (local_cell.z * dims.depth + local_cell.y) * dims.width + local_cell.x


def record_for_region(
    global_signs: Sequence[int], region: Region, dims: LatticeDims
) -> EigenvalueRecord:
    """Restrict the machine-wide sign assignment to one region.

    Entries are indexed region-locally so the user can interpret them
    without knowing where their allotment sits in the machine.
    """
    entries: list[tuple[int, int]] = []
    for z in range(region.dims.layers):
        for y in range(region.origin.y, region.y_end):
            for x in range(region.origin.x, region.x_end):
                local = CellCoord(x - region.origin.x, y - region.origin.y, z)
                global_cell = CellCoord(x, y, region.origin.z + z)
                sign = global_signs[lattice_vertex_index(dims, global_cell)]
                entries.append((region_local_index(region, local), sign))
    return EigenvalueRecord(tuple(entries))


def prepare_with_random_eigenvalues(
    graph: GraphAdjacency, seed: int
) -> tuple[StabilizerTableau, EigenvalueRecord]:
    """Prepared-lattice model: each generator sign is a fair coin.

    The same seeded source then drives all measurement randomness, so a
    whole run is reproducible from one integer.
    """
    rng = random.Random(seed)
    signs = [+1 if rng.getrandbits(1) == 0 else -1 for _ in range(graph.vertex_count)]
    tableau = StabilizerTableau.from_graph(graph, signs=signs, rng=rng)
    record = EigenvalueRecord(tuple((v, signs[v]) for v in range(graph.vertex_count)))
    return tableau, record


def sign_correction(record_signs: dict[int, int], generator: int, basis: PauliBasis) -> int:
    """Outcome correction factor from the eigenvalue record.

    A -1 prepared sign at a cell is a Z byproduct on that qubit; it flips
    measured X and Y outcomes there and leaves Z outcomes alone.  Applying
    the factor makes results read as if the lattice were prepared all-plus,
    which is why the record must be transmitted at all.
    """
    if basis.simulated in (PauliBasis.X, PauliBasis.Y) and record_signs.get(generator, +1) == -1:
        return -1
    return +1


def run_trusted_session(
    mainframe: "Mainframe", session: "UserSession | str", instructions: Sequence[MeasurementInstruction]
):
    """Execute a classical instruction stream mainframe-side.

    Only the outcome list comes back; all quantum state stays with the
    machine.
    """
    return mainframe.run_stream(_session_id(session), instructions, secure=False)


def run_secure_session(
    mainframe: "Mainframe", session: "UserSession | str", instructions: Sequence[MeasurementInstruction]
):
    """Execute the same stream against the user-held (severed) partition.

    Requires the session's photon-stream descriptor to have been issued;
    measurement semantics and accounting match the trusted path exactly,
    but no instruction or outcome crosses back to the machine's log.
    """
    return mainframe.run_stream(_session_id(session), instructions, secure=True)


def _session_id(session: "UserSession | str") -> str:
    return session if isinstance(session, str) else session.session_id


@dataclass(frozen=True)
class EveModel:
    """Eavesdropper that entangles one probe qubit per tapped cell.

    Tapped cells are tableau qubit indices; each probe is a fresh |+>
    qubit attached with a controlled-phase link, the strongest structural
    intrusion expressible in the stabilizer formalism.
    """

    tapped: tuple[int, ...]


def eve_tap(
    tableau: StabilizerTableau, eve: EveModel, sim_cap: int = DEFAULT_SIMULATION_CAP
) -> list[int]:
    """Attach eve's probes; returns the probe qubit indices.

    The probes are new qubits, so lattice indices are unchanged.
    """
    if tableau.n + len(eve.tapped) > sim_cap:
        raise CapExceeded(
            f"{tableau.n} qubits + {len(eve.tapped)} probes exceed the cap {sim_cap}"
        )
    for cell in eve.tapped:
        if not (0 <= cell < tableau.n):
            raise ValueError(f"tapped cell {cell} out of range")
    probes = tableau.add_plus_qubits(len(eve.tapped))
    for cell, probe in zip(eve.tapped, probes):
        tableau.cz(cell, probe)
    return probes


def eve_probe_outcomes(tableau: StabilizerTableau, probes: Sequence[int]) -> list[int]:
    """Eve reads each probe in X, the only record she ever obtains."""
    return [tableau.measure(p, PauliBasis.X)[0] for p in probes]
