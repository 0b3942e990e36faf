"""Request and response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

BasisCode = Literal["X", "Y", "Z", "A", "T"]


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorBody(BaseModel):
    error: str
    detail: str


class EstimateRequest(BaseModel):
    width: int = Field(ge=1)
    depth: int = Field(ge=1)
    footprint_width: int = Field(default=20, ge=1)
    footprint_depth: int = Field(default=40, ge=1)
    chips_per_logical: int = Field(default=3000, ge=1)


class EstimateResponse(BaseModel):
    cells: int
    chips: int
    approximate: bool
    logical_qubits: int


class MainframeCreateRequest(BaseModel):
    user_count: int = Field(ge=1)
    region_width: int = Field(ge=1)
    region_depth: int = Field(ge=1)
    layers: int = Field(default=1, ge=1)
    scratch_width_in_user_regions: int = Field(default=2, ge=1)
    users_per_column: Optional[int] = Field(default=None, ge=1)
    footprint_width: int = Field(default=20, ge=1)
    footprint_depth: int = Field(default=40, ge=1)
    chips_per_logical: int = Field(default=3000, ge=1)
    total_ops: int = Field(default=10**16, ge=1)
    seed: int = 0
    enable_tableau: Optional[bool] = None


class MainframeInfo(BaseModel):
    mainframe_id: str
    width: int
    depth: int
    layers: int
    cells: int
    desk_scale: bool  # True when a live tableau backs the lattice
    slots_total: int
    slots_free: int
    slots_occupied: int
    slots_persisted: int
    current_layer: int
    budget_total_ops: int
    budget_consumed_ops: int


class RegionModel(BaseModel):
    x: int
    y: int
    z: int
    width: int
    depth: int
    layers: int


class CellModel(BaseModel):
    x: int
    y: int
    z: int = 0


class AdmitRequest(BaseModel):
    user_id: str
    mode: Literal["trusted", "secure"]
    logical_qubits: int = Field(ge=0)
    ancilla_a: int = Field(default=0, ge=0)
    ancilla_y: int = Field(default=0, ge=0)


class SessionInfo(BaseModel):
    session_id: str
    user_id: str
    mode: str
    state: str
    slot_ids: list[str]
    region: Optional[RegionModel]
    boundary_severed: bool
    ops_consumed: int
    ancilla_used_a: int
    ancilla_used_y: int
    outcome_count: int
    entanglement: Optional[int]  # None beyond desk scale or after close


class AllocateRequest(BaseModel):
    logical_qubits: Optional[int] = Field(default=None, ge=0)


class SeverResponse(BaseModel):
    session: SessionInfo
    cells_planned: int


class GrowRequest(BaseModel):
    extra_logical_qubits: int = Field(ge=1)


class LogoffRequest(BaseModel):
    persist: bool


class LogoffResponse(BaseModel):
    session: SessionInfo
    handle: Optional[str]
    stored_logical_qubits: Optional[int]


class ReattachRequest(BaseModel):
    handle: str


class BellRequest(BaseModel):
    session_a: str
    session_b: str


class BellResponse(BaseModel):
    corridor: RegionModel
    retained: dict[str, CellModel]
    mates: dict[str, CellModel]
    cells_measured: int


class AdvanceRequest(BaseModel):
    layers: int = Field(ge=0)


class InstructionModel(BaseModel):
    x: int = Field(ge=0)
    y: int = Field(ge=0)
    z: int = Field(default=0, ge=0)
    basis: BasisCode


class StreamRequest(BaseModel):
    # exactly one of `instructions` (structured) or `stream_text` (wire format)
    instructions: Optional[list[InstructionModel]] = None
    stream_text: Optional[str] = None
    secure: Optional[bool] = None  # default: follow the session mode


class StreamResponse(BaseModel):
    outcomes: list[int]
    deterministic: list[bool]
    nonclifford: list[bool]
    ops_consumed: int


class DescriptorResponse(BaseModel):
    descriptor: str
    emission_cells: int


class FeasibilityResponse(BaseModel):
    scratch_cells_per_layer: int
    demand_cells_per_layer: int
    feasible: bool
    max_rate_a: int
    max_rate_y: int
    utilization: float


class EventLogResponse(BaseModel):
    lines: list[str]
    digest: str


class ScenarioRunRequest(BaseModel):
    # exactly one of `scenario` (inline document) or `name` (bundled)
    scenario: Optional[dict] = None
    name: Optional[str] = None
    seed: Optional[int] = None
    format: Literal["machine", "text"] = "machine"


class ScenarioRunResponse(BaseModel):
    ok: bool
    failures: list[str]
    report: str


class VerifyRequest(BaseModel):
    suite: Literal["stabilizer", "allocator", "protocol", "all"] = "all"
    trials: int = Field(default=100, ge=0)
    seed: int = 0


class CheckModel(BaseModel):
    suite: str
    name: str
    passed: bool
    count: int
    detail: str


class VerifyResponse(BaseModel):
    ok: bool
    checks: list[CheckModel]
