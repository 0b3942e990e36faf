"""Multi-tenant mainframe: session lifecycle, slot allocation, severing,
persistence across logoff, Bell brokering, and operations accounting.

Allocation granularity is whole user-region slots arranged in two
columns flanking a central scratch strip.  All mutations run on one
logical command stream per machine and append to a line-oriented event
log, so a run is replayable and its report is byte-stable for a fixed
(scenario, seed).

At desk scale (whole lattice within the simulation cap) every measured
cell is executed on a stabilizer tableau and the severing/sharing
postconditions are asserted; above the cap the same bookkeeping runs
on geometry and counts alone, and instruction streams are refused.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .errors import (
    AncillaBudgetExceeded,
    CapacityExceeded,
    InvalidState,
    MainframeNotReady,
    NoCorridorAvailable,
    OutOfRegion,
    SimulationCapExceeded,
    UnknownHandle,
)
from .geometry import (
    CellCoord,
    LatticeDims,
    PartitionLayout,
    Region,
    RegionKind,
    boundary_ring,
    tile_count,
    validate_layout,
)
from .protocol import (
    EigenvalueRecord,
    MeasurementInstruction,
    PhotonStreamDescriptor,
    prepare_with_random_eigenvalues,
    record_for_region,
    region_local_index,
    sign_correction,
)
from .resources import (
    AncillaDemand,
    ChipCostModel,
    FeasibilityReport,
    OperationsBudget,
    consume_ops,
    scratch_feasibility,
)
from .stabilizer import (
    DEFAULT_SIMULATION_CAP,
    PauliBasis,
    StabilizerTableau,
    lattice_graph,
    lattice_vertex_index,
)


class SessionMode(str, Enum):
    TRUSTED = "trusted"
    SECURE = "secure"


class SessionState(str, Enum):
    ADMITTED = "admitted"
    ALLOCATED = "allocated"
    SEVERED = "severed"
    RUNNING = "running"
    PERSISTED_LOGOFF = "persisted_logoff"
    CLOSED = "closed"


# Reattachment binds a persisted region to a fresh Admitted session, so
# PersistedLogoff and Closed are terminal for the session object itself.
LEGAL_TRANSITIONS: dict[SessionState, frozenset[SessionState]] = {
    SessionState.ADMITTED: frozenset({SessionState.ALLOCATED}),
    SessionState.ALLOCATED: frozenset(
        {SessionState.ALLOCATED, SessionState.SEVERED, SessionState.RUNNING}
    ),
    SessionState.SEVERED: frozenset(
        {SessionState.SEVERED, SessionState.RUNNING,
         SessionState.PERSISTED_LOGOFF, SessionState.CLOSED}
    ),
    SessionState.RUNNING: frozenset(
        {SessionState.RUNNING, SessionState.PERSISTED_LOGOFF, SessionState.CLOSED}
    ),
    SessionState.PERSISTED_LOGOFF: frozenset(),
    SessionState.CLOSED: frozenset(),
}


@dataclass
class UserSession:
    """One tenant job and everything bound to it."""

    session_id: str
    user_id: str
    mode: SessionMode
    state: SessionState
    requested_logical_qubits: int
    ancilla_budget_a: int = 0
    ancilla_budget_y: int = 0
    ancilla_used_a: int = 0
    ancilla_used_y: int = 0
    ops_consumed: int = 0
    region: Region | None = None
    slot_ids: tuple[str, ...] = ()
    record: EigenvalueRecord | None = None
    descriptor_issued: bool = False
    boundary_severed: bool = False
    retained_cells: tuple[CellCoord, ...] = ()
    measured_cells: set[CellCoord] = field(default_factory=set)
    stored_logical_qubits: int | None = None
    outcomes: list[int] = field(default_factory=list)
    deterministic_flags: list[bool] = field(default_factory=list)

    @property
    def ancilla_remaining_a(self) -> int:
        return self.ancilla_budget_a - self.ancilla_used_a

    @property
    def ancilla_remaining_y(self) -> int:
        return self.ancilla_budget_y - self.ancilla_used_y


@dataclass(frozen=True)
class PersistenceRecord:
    """A severed region kept alive (identity-measured) across logoff."""

    handle: str
    session_id: str
    region: Region
    slot_ids: tuple[str, ...]
    stored_logical_qubits: int
    maintenance_cost_per_layer: int  # cells per layer = region footprint
    created_at_layer: int
    eigen_record: EigenvalueRecord | None
    measured_cells: frozenset[CellCoord]
    retained_cells: tuple[CellCoord, ...]


@dataclass(frozen=True)
class SlotInfo:
    slot_id: str
    column: int
    row: int
    region: Region


@dataclass(frozen=True)
class StreamRunResult:
    """Corrected outcomes and accounting for one executed stream."""

    outcomes: tuple[int, ...]
    deterministic: tuple[bool, ...]
    nonclifford: tuple[bool, ...]
    ops_consumed: int


@dataclass(frozen=True)
class BellBrokerResult:
    corridor: Region
    retained: dict[str, CellCoord]
    mates: dict[str, CellCoord]
    cells_measured: int


@dataclass(frozen=True)
class EventLine:
    """One event-log entry; the wire form is `layer,seq,kind,session_id,details`."""

    layer: int
    seq: int
    kind: str
    session_id: str
    details: tuple[tuple[str, str], ...]

    def format(self) -> str:
        body = ";".join(f"{k}={v}" for k, v in self.details) or "-"
        return f"{self.layer},{self.seq},{self.kind},{self.session_id},{body}"


def _clean_token(value: object) -> str:
    text = str(value)
    if any(ch in text for ch in ",;\n"):
        raise ValueError(f"event token {text!r} contains reserved characters")
    return text


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


class Mainframe:
    """One machine instance; all mutations are serialized by the caller."""

    def __init__(
        self,
        layout: PartitionLayout | None,
        model: ChipCostModel | None = None,
        budget: OperationsBudget | None = None,
        seed: int = 0,
        sim_cap: int = DEFAULT_SIMULATION_CAP,
        enable_tableau: bool | None = None,
    ):
        self.layout = layout
        self.model = model if model is not None else ChipCostModel()
        self.budget = budget if budget is not None else OperationsBudget()
        self.seed = seed
        self.sim_cap = sim_cap
        self.layout_violations = validate_layout(layout) if layout is not None else []
        self.current_layer = 0
        self.sessions: dict[str, UserSession] = {}
        self.persistence: dict[str, PersistenceRecord] = {}
        self.closed_persistence: dict[str, PersistenceRecord] = {}
        self.corridors: list[Region] = []
        self.events: list[EventLine] = []
        self._seq = 0
        self._session_counter = 0
        self._handle_counter = 0
        self._corridor_counter = 0

        self.slots: list[SlotInfo] = []
        self.slot_status: dict[str, tuple[str, str]] = {}  # slot_id -> (state, ref)
        if layout is not None:
            columns = sorted({r.origin.x for r in layout.user_regions()})
            ordered = sorted(layout.user_regions(), key=lambda r: (r.origin.x, r.origin.y))
            rows_seen: dict[int, int] = {}
            for region in ordered:
                col = columns.index(region.origin.x)
                row = rows_seen.get(col, 0)
                rows_seen[col] = row + 1
                info = SlotInfo(region.region_id, col, row, region)
                self.slots.append(info)
                self.slot_status[info.slot_id] = ("free", "")

        self.tableau: StabilizerTableau | None = None
        self.global_signs: list[int] | None = None
        if layout is not None:
            cells = layout.global_dims.cell_count
            wanted = enable_tableau if enable_tableau is not None else cells <= sim_cap
            if wanted:
                # raises SimulationCapExceeded when explicitly forced past the cap
                graph = lattice_graph(layout.global_dims, sim_cap=sim_cap)
                self.tableau, record = prepare_with_random_eigenvalues(graph, seed)
                self.global_signs = [s for _, s in record.entries]

    # -- plumbing ---------------------------------------------------------

    @property
    def dims(self) -> LatticeDims:
        assert self.layout is not None
        return self.layout.global_dims

    def _log(self, kind: str, session_id: str, **details: object) -> None:
        self._seq += 1
        items = tuple(
            (k, _clean_token(v)) for k, v in sorted(details.items())
        )
        self.events.append(
            EventLine(self.current_layer, self._seq, _clean_token(kind),
                      _clean_token(session_id), items)
        )

    def event_log_lines(self) -> list[str]:
        return [e.format() for e in self.events]

    def _consume(self, count: int) -> None:
        self.budget = consume_ops(self.budget, count)

    def _session(self, session_id: str) -> UserSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownHandle(f"unknown session {session_id!r}")
        return session

    def _transition(self, session: UserSession, new_state: SessionState) -> None:
        if new_state not in LEGAL_TRANSITIONS[session.state]:
            raise InvalidState(
                f"session {session.session_id} cannot move "
                f"{session.state.value} -> {new_state.value}"
            )
        session.state = new_state

    def _require_desk_scale(self, what: str) -> StabilizerTableau:
        if self.tableau is None:
            raise SimulationCapExceeded(
                f"{what} requires the desk-scale tableau; this machine has "
                f"{self.dims.cell_count} cells and the cap is {self.sim_cap} "
                "(geometry and resource events still work)"
            )
        return self.tableau

    def _qubit(self, cell: CellCoord) -> int:
        return lattice_vertex_index(self.dims, cell)

    def _measure_z_cells(self, session: UserSession | None, cells: Sequence[CellCoord]) -> int:
        """Z-measure cells (desk) or count them (geometry); returns count."""
        executed = 0
        if self.tableau is not None:
            for cell in cells:
                qubit = self._qubit(cell)
                if qubit in self.tableau.measured:
                    continue
                self.tableau.measure(qubit, PauliBasis.Z)
                executed += 1
                if session is not None:
                    session.measured_cells.add(cell)
        else:
            for cell in cells:
                if session is not None and cell in session.measured_cells:
                    continue
                executed += 1
                if session is not None:
                    session.measured_cells.add(cell)
        return executed

    def session_entanglement(self, session_id: str) -> int | None:
        """Entanglement between the session's region and the rest (desk only)."""
        session = self._session(session_id)
        if self.tableau is None or session.region is None:
            return None
        qubits = [self._qubit(c) for c in session.region.cells()]
        return self.tableau.entanglement_entropy(qubits)

    # -- session lifecycle -------------------------------------------------

    def admit(
        self,
        user_id: str,
        mode: SessionMode,
        requested_logical_qubits: int,
        ancilla_a: int = 0,
        ancilla_y: int = 0,
    ) -> UserSession:
        """Open a session; no resources bound yet.  Multiple concurrent
        sessions per user are allowed."""
        if self.layout is None:
            raise MainframeNotReady("no partition layout configured")
        if self.layout_violations:
            first = self.layout_violations[0]
            raise MainframeNotReady(f"layout invalid: {first.message}")
        if requested_logical_qubits < 0 or min(ancilla_a, ancilla_y) < 0:
            raise ValueError("requested counts must be non-negative")
        self._session_counter += 1
        session = UserSession(
            session_id=f"s{self._session_counter:04d}",
            user_id=user_id,
            mode=mode,
            state=SessionState.ADMITTED,
            requested_logical_qubits=requested_logical_qubits,
            ancilla_budget_a=ancilla_a,
            ancilla_budget_y=ancilla_y,
        )
        self.sessions[session.session_id] = session
        self._log("admit", session.session_id, user=user_id, mode=mode.value,
                  logical=requested_logical_qubits)
        return session

    def slot_capacity(self) -> int:
        """Logical qubits per slot under the configured footprint."""
        assert self.slots, "layout has no user slots"
        return tile_count(self.slots[0].region.dims, self.model.footprint)

    def _column_slots(self, column: int) -> list[SlotInfo]:
        return sorted(
            (s for s in self.slots if s.column == column), key=lambda s: s.row
        )

    def _bind_slots(self, session: UserSession, picked: list[SlotInfo]) -> Region:
        picked = sorted(picked, key=lambda s: s.row)
        for info in picked:
            self.slot_status[info.slot_id] = ("session", session.session_id)
        first = picked[0].region
        dims = LatticeDims(
            first.dims.width,
            sum(s.region.dims.depth for s in picked),
            first.dims.layers,
        )
        region = Region(
            region_id=f"alloc-{session.session_id}",
            kind=RegionKind.USER,
            origin=first.origin,
            dims=dims,
        )
        session.slot_ids = tuple(s.slot_id for s in picked)
        session.region = region
        if self.global_signs is not None:
            session.record = record_for_region(self.global_signs, region, self.dims)
        return region

    def allocate(self, session_id: str, requested_logical_qubits: int | None = None) -> Region:
        """Bind the smallest contiguous run of free slots in one column.

        Tie-break is lowest column index, then lowest row (depth) index,
        so allocation order is reproducible.
        """
        session = self._session(session_id)
        if session.state is not SessionState.ADMITTED:
            raise InvalidState(
                f"allocate needs an admitted session, got {session.state.value}"
            )
        request = (
            requested_logical_qubits
            if requested_logical_qubits is not None
            else session.requested_logical_qubits
        )
        capacity = self.slot_capacity()
        needed = max(1, _ceil_div(max(request, 0), capacity))
        columns = sorted({s.column for s in self.slots})
        picked: list[SlotInfo] | None = None
        for column in columns:
            slots = self._column_slots(column)
            for start in range(0, len(slots) - needed + 1):
                run = slots[start : start + needed]
                if all(self.slot_status[s.slot_id][0] == "free" for s in run):
                    picked = run
                    break
            if picked:
                break
        if not picked:
            raise CapacityExceeded(
                f"no contiguous run of {needed} free slots "
                f"({request} logical qubits at {capacity} per slot)"
            )
        region = self._bind_slots(session, picked)
        self._transition(session, SessionState.ALLOCATED)
        self._log(
            "allocate", session.session_id,
            slots=len(picked), slot_ids="|".join(s.slot_id for s in picked),
            region=_region_token(region),
        )
        return region

    def sever(self, session_id: str) -> list[CellCoord]:
        """Z-measure the region's boundary ring, skipping retained links.

        Returns the executed plan in ring order.  With no retained links
        the region must come out fully disentangled at desk scale.
        """
        session = self._session(session_id)
        if session.state is not SessionState.ALLOCATED:
            raise InvalidState(
                f"sever needs an allocated session, got {session.state.value}"
            )
        assert session.region is not None
        retained = set(session.retained_cells)
        plan = [c for c in boundary_ring(session.region) if c not in retained]
        executed = self._measure_z_cells(session, plan)
        self._consume(executed)
        session.ops_consumed += executed
        session.boundary_severed = True
        self._transition(session, SessionState.SEVERED)
        self._log("sever", session.session_id, cells=executed,
                  retained=len(retained))
        if self.tableau is not None:
            entanglement = self.session_entanglement(session_id)
            if not retained:
                assert entanglement == 0, (
                    f"severed region still entangled (S={entanglement})"
                )
            else:
                assert entanglement is not None and entanglement >= 1, (
                    "retained link lost during severing"
                )
        return plan

    def grow(self, session_id: str, extra_logical_qubits: int) -> Region:
        """Extend the region by whole adjacent slots in the same column.

        Prefers the next-lower row, then the next-higher; re-severs the
        combined boundary if the session had severed before.
        """
        session = self._session(session_id)
        if session.state not in (
            SessionState.RUNNING, SessionState.ALLOCATED, SessionState.SEVERED
        ):
            raise InvalidState(
                f"grow needs a live allocated session, got {session.state.value}"
            )
        assert session.region is not None
        if extra_logical_qubits < 1:
            raise ValueError("extra_logical_qubits must be >= 1")
        capacity = self.slot_capacity()
        needed = _ceil_div(extra_logical_qubits, capacity)
        owned = [s for s in self.slots if s.slot_id in session.slot_ids]
        column = owned[0].column
        col_slots = self._column_slots(column)
        by_row = {s.row: s for s in col_slots}
        low = min(s.row for s in owned)
        high = max(s.row for s in owned)
        picks: list[SlotInfo] = []
        lo, hi = low, high
        for _ in range(needed):
            below = by_row.get(lo - 1)
            above = by_row.get(hi + 1)
            if below is not None and self.slot_status[below.slot_id][0] == "free":
                picks.append(below)
                lo -= 1
            elif above is not None and self.slot_status[above.slot_id][0] == "free":
                picks.append(above)
                hi += 1
            else:
                raise CapacityExceeded(
                    f"no free slot adjacent to rows [{lo}, {hi}] in column {column}"
                )
        all_slots = owned + picks
        region = self._bind_slots(session, all_slots)
        executed = 0
        if session.boundary_severed:
            retained = set(session.retained_cells)
            plan = [c for c in boundary_ring(region) if c not in retained]
            executed = self._measure_z_cells(session, plan)
            self._consume(executed)
            session.ops_consumed += executed
            if self.tableau is not None and not retained:
                entanglement = self.session_entanglement(session_id)
                assert entanglement == 0, (
                    f"re-severed grown region still entangled (S={entanglement})"
                )
        self._transition(session, session.state)  # legal self-loop only
        self._log("grow", session.session_id, slots=len(picks),
                  slot_ids="|".join(s.slot_id for s in picks),
                  region=_region_token(region), cells=executed)
        return region

    def logoff(self, session_id: str, persist: bool) -> PersistenceRecord | None:
        """Close out a session: wipe the region or persist it for later.

        Wiping Z-measures every not-yet-measured region cell; persisting
        creates a handle whose region keeps costing maintenance every
        layer until reattached.
        """
        session = self._session(session_id)
        if session.state not in (SessionState.RUNNING, SessionState.SEVERED):
            raise InvalidState(
                f"logoff needs a running or severed session, got {session.state.value}"
            )
        assert session.region is not None
        if persist:
            self._handle_counter += 1
            handle = f"h{self._handle_counter:04d}"
            if self.tableau is not None:
                measured = frozenset(
                    c for c in session.region.cells()
                    if self._qubit(c) in self.tableau.measured
                )
            else:
                measured = frozenset(session.measured_cells)
            record = PersistenceRecord(
                handle=handle,
                session_id=session.session_id,
                region=session.region,
                slot_ids=session.slot_ids,
                stored_logical_qubits=tile_count(session.region.dims, self.model.footprint),
                maintenance_cost_per_layer=session.region.dims.footprint_cells,
                created_at_layer=self.current_layer,
                eigen_record=session.record,
                measured_cells=measured,
                retained_cells=session.retained_cells,
            )
            self.persistence[handle] = record
            for slot_id in session.slot_ids:
                self.slot_status[slot_id] = ("persisted", handle)
            self._transition(session, SessionState.PERSISTED_LOGOFF)
            self._log("logoff", session.session_id, persist="true", handle=handle,
                      cells=0, stored=record.stored_logical_qubits)
            return record
        wipe_cells = list(session.region.cells())
        executed = self._measure_z_cells(session, wipe_cells)
        self._consume(executed)
        session.ops_consumed += executed
        for slot_id in session.slot_ids:
            self.slot_status[slot_id] = ("free", "")
        self._transition(session, SessionState.CLOSED)
        self._log("logoff", session.session_id, persist="false", cells=executed)
        return None

    def reattach(self, handle: str, session_id: str) -> Region:
        """Bind a persisted region to a fresh admitted session.

        First caller wins; the handle is closed afterward and maintenance
        stops accruing.
        """
        record = self.persistence.get(handle)
        if record is None:
            raise UnknownHandle(f"unknown or already-claimed handle {handle!r}")
        session = self._session(session_id)
        if session.state is not SessionState.ADMITTED:
            raise InvalidState(
                f"reattach needs an admitted session, got {session.state.value}"
            )
        del self.persistence[handle]
        self.closed_persistence[handle] = record
        for slot_id in record.slot_ids:
            self.slot_status[slot_id] = ("session", session.session_id)
        session.slot_ids = record.slot_ids
        session.region = record.region
        session.record = record.eigen_record
        session.measured_cells = set(record.measured_cells)
        session.retained_cells = record.retained_cells
        session.boundary_severed = True  # persisted regions stay severed
        session.stored_logical_qubits = record.stored_logical_qubits
        self._transition(session, SessionState.ALLOCATED)
        self._log("reattach", session.session_id, handle=handle,
                  stored=record.stored_logical_qubits,
                  region=_region_token(record.region))
        return record.region

    # -- sharing -----------------------------------------------------------

    def _scratch(self) -> Region:
        assert self.layout is not None
        scratches = self.layout.scratch_regions()
        if not scratches:
            raise NoCorridorAvailable("layout has no scratch region")
        return scratches[0]

    def _corridor_for(self, a: Region, b: Region) -> Region:
        scratch = self._scratch()
        y0 = min(a.origin.y, b.origin.y)
        y1 = max(a.y_end, b.y_end)
        self._corridor_counter += 1
        return Region(
            region_id=f"corridor-{self._corridor_counter:04d}",
            kind=RegionKind.CORRIDOR,
            origin=CellCoord(scratch.origin.x, y0, 0),
            dims=LatticeDims(scratch.dims.width, y1 - y0, scratch.dims.layers),
        )

    def _link_cells(self, region: Region, corridor: Region) -> tuple[CellCoord, CellCoord]:
        """(retained cell inside region, mate cell inside corridor)."""
        if region.x_end <= corridor.origin.x:  # region left of scratch
            rx, mx = region.x_end - 1, corridor.origin.x
        else:  # region right of scratch
            rx, mx = region.origin.x, corridor.x_end - 1
        y = corridor.origin.y + 1 if corridor.dims.depth >= 3 else corridor.origin.y
        y = max(region.origin.y, min(y, region.y_end - 1))
        return CellCoord(rx, y, 0), CellCoord(mx, y, 0)

    def bell_broker(self, session_a: str, session_b: str) -> BellBrokerResult:
        """Open a scratch corridor and keep one boundary link per side.

        Must run before either boundary is severed (an already-measured
        edge cannot carry the shared pair); the subsequent sever skips
        the retained cells so the link survives.
        """
        if session_a == session_b:
            raise ValueError("bell_broker needs two distinct sessions")
        sa, sb = self._session(session_a), self._session(session_b)
        for s in (sa, sb):
            if s.state not in (SessionState.ALLOCATED, SessionState.RUNNING):
                raise InvalidState(
                    f"session {s.session_id} is {s.state.value}; brokering "
                    "needs allocated or running sessions"
                )
            if s.boundary_severed:
                raise InvalidState(
                    f"session {s.session_id} already severed its boundary; "
                    "a retained link must be designated before severing"
                )
        assert sa.region is not None and sb.region is not None
        corridor = self._corridor_for(sa.region, sb.region)
        scratch = self._scratch()
        if not scratch.encloses(corridor):
            raise NoCorridorAvailable("corridor does not fit inside scratch")
        for existing in self.corridors:
            if corridor.overlaps(existing):
                raise NoCorridorAvailable(
                    f"corridor overlaps existing {existing.region_id}"
                )
        retained_a, mate_a = self._link_cells(sa.region, corridor)
        retained_b, mate_b = self._link_cells(sb.region, corridor)
        mates = {mate_a, mate_b}
        plan = [c for c in boundary_ring(corridor) if c not in mates]
        executed = self._measure_z_cells(None, plan)
        self._consume(executed)
        self.corridors.append(corridor)
        sa.retained_cells = sa.retained_cells + (retained_a,)
        sb.retained_cells = sb.retained_cells + (retained_b,)
        self._log("bell", sa.session_id, peer=sb.session_id,
                  corridor=_region_token(corridor), cells=executed)
        if self.tableau is not None:
            ent_a = self.session_entanglement(session_a)
            ent_b = self.session_entanglement(session_b)
            assert ent_a is not None and ent_a >= 1, "cut A lost entanglement"
            assert ent_b is not None and ent_b >= 1, "cut B lost entanglement"
        return BellBrokerResult(
            corridor=corridor,
            retained={sa.session_id: retained_a, sb.session_id: retained_b},
            mates={sa.session_id: mate_a, sb.session_id: mate_b},
            cells_measured=executed,
        )

    # -- time and scratch ----------------------------------------------------

    def advance_layers(self, count: int) -> None:
        """Advance simulated time; live persisted regions pay maintenance.

        Keeping a persisted region alive means identity-measuring every
        cell of its footprint once per layer.
        """
        if count < 0:
            raise ValueError("count must be non-negative")
        self.current_layer += count
        self._log("advance", "-", layers=count)
        for handle in sorted(self.persistence):
            record = self.persistence[handle]
            cost = count * record.maintenance_cost_per_layer
            self._consume(cost)
            self._log("maintain", record.session_id, handle=handle, cells=cost)

    def scratch_feasibility(self, demand: AncillaDemand) -> FeasibilityReport:
        """One layer of scratch throughput versus the demanded rates."""
        assert self.layout is not None
        per_layer = sum(r.dims.footprint_cells for r in self.layout.scratch_regions())
        return scratch_feasibility(per_layer, demand)

    # -- protocol execution ---------------------------------------------------

    def descriptor(self, session_id: str) -> PhotonStreamDescriptor:
        """Photon routing descriptor; a pure function of the region."""
        session = self._session(session_id)
        if session.state not in (
            SessionState.ALLOCATED, SessionState.SEVERED, SessionState.RUNNING
        ):
            raise InvalidState(
                f"descriptor needs an allocated session, got {session.state.value}"
            )
        assert session.region is not None
        session.descriptor_issued = True
        self._log("descriptor", session.session_id)
        return PhotonStreamDescriptor(
            session_id=session.session_id,
            region=session.region,
            record_ref=f"er-{session.session_id}",
        )

    def run_stream(
        self,
        session_id: str,
        instructions: Sequence[MeasurementInstruction],
        secure: bool,
    ) -> StreamRunResult:
        """Execute one measurement stream with all-or-nothing validation.

        Coordinates are region-local.  Outcomes are sign-corrected with
        the session's eigenvalue record, so results read as if the
        lattice had been prepared all-plus.  Exactly one budget operation
        is charged per instruction.
        """
        session = self._session(session_id)
        if session.state not in (
            SessionState.ALLOCATED, SessionState.SEVERED, SessionState.RUNNING
        ):
            raise InvalidState(
                f"stream needs an allocated session, got {session.state.value}"
            )
        if secure:
            if not session.boundary_severed:
                raise InvalidState("secure execution requires a severed boundary")
            if not session.descriptor_issued:
                raise InvalidState("secure execution requires an issued descriptor")
        tableau = self._require_desk_scale("stream execution")
        assert session.region is not None and session.record is not None
        dims = session.region.dims
        for index, inst in enumerate(instructions):
            c = inst.cell
            if not (c.x < dims.width and c.y < dims.depth and c.z < dims.layers):
                raise OutOfRegion(
                    f"instruction {index}: cell {c} outside region {dims} "
                    "(coordinates are region-local); nothing was executed"
                )
        need_a = sum(1 for i in instructions if i.basis is PauliBasis.ANCILLA_A)
        need_y = sum(1 for i in instructions if i.basis is PauliBasis.ANCILLA_Y)
        if need_a > session.ancilla_remaining_a:
            raise AncillaBudgetExceeded(
                f"stream needs {need_a} |A> ancillae, "
                f"{session.ancilla_remaining_a} left; nothing was executed"
            )
        if need_y > session.ancilla_remaining_y:
            raise AncillaBudgetExceeded(
                f"stream needs {need_y} |Y> ancillae, "
                f"{session.ancilla_remaining_y} left; nothing was executed"
            )
        self._consume(len(instructions))  # refuses before anything runs
        signs = session.record.signs_by_index()
        origin = session.region.origin
        outcomes: list[int] = []
        deterministic: list[bool] = []
        nonclifford: list[bool] = []
        for inst in instructions:
            local = inst.cell
            global_cell = CellCoord(
                origin.x + local.x, origin.y + local.y, origin.z + local.z
            )
            raw, det = tableau.measure(self._qubit(global_cell), inst.basis)
            generator = region_local_index(session.region, local)
            outcomes.append(raw * sign_correction(signs, generator, inst.basis))
            deterministic.append(det)
            nonclifford.append(inst.basis.consumes_ancilla)
        session.ancilla_used_a += need_a
        session.ancilla_used_y += need_y
        session.ops_consumed += len(instructions)
        session.outcomes.extend(outcomes)
        session.deterministic_flags.extend(deterministic)
        self._transition(session, SessionState.RUNNING)
        self._log(
            "run_secure" if secure else "run_trusted", session.session_id,
            cells=len(instructions), ancilla_a=need_a, ancilla_y=need_y,
        )
        return StreamRunResult(
            outcomes=tuple(outcomes),
            deterministic=tuple(deterministic),
            nonclifford=tuple(nonclifford),
            ops_consumed=len(instructions),
        )

    # -- queries ---------------------------------------------------------------

    def slot_summary(self) -> dict[str, int]:
        counts = {"total": len(self.slots), "free": 0, "occupied": 0, "persisted": 0}
        for state, _ in self.slot_status.values():
            key = {"free": "free", "session": "occupied", "persisted": "persisted"}[state]
            counts[key] += 1
        return counts


def _region_token(region: Region) -> str:
    d = region.dims
    return f"{region.origin.x}:{region.origin.y}:{d.width}x{d.depth}x{d.layers}"
