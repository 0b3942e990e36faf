"""Machine-scale resource arithmetic: chips, logical capacity, operations.

All counts are exact Python integers (chip totals reach 7.5e9); chip
counts for footprints that do not divide the region evenly are rounded
up and flagged approximate rather than silently truncated.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import BudgetExhausted
from .geometry import (
    LatticeDims,
    LogicalFootprint,
    PartitionLayout,
    Region,
    RegionKind,
    tile_count,
)

DEFAULT_CHIPS_PER_LOGICAL = 3000
DEFAULT_TOTAL_OPS = 10**16


@dataclass(frozen=True)
class ChipCostModel:
    """Chips needed per logical qubit and the cell footprint of one."""

    chips_per_logical: int = DEFAULT_CHIPS_PER_LOGICAL
    footprint: LogicalFootprint = field(default_factory=LogicalFootprint)

    def __post_init__(self) -> None:
        if self.chips_per_logical < 1:
            raise ValueError("chips_per_logical must be >= 1")
        if self.footprint.area < 1:
            raise ValueError("footprint area must be >= 1")


@dataclass(frozen=True)
class ChipEstimate:
    """Chip count for one footprint, with the rounding flag."""

    chips: int
    approximate: bool


def chip_estimate(dims: LatticeDims, model: ChipCostModel | None = None) -> ChipEstimate:
    """Chips to prepare a width x depth footprint: cells / footprint_area
    logical sites at chips_per_logical each, exact integer arithmetic.

    Rounds up and flags approximate when the footprint area does not
    divide cells * chips_per_logical evenly.
    """
    model = model if model is not None else ChipCostModel()
    cells = dims.footprint_cells
    numerator = cells * model.chips_per_logical
    area = model.footprint.area
    quotient, remainder = divmod(numerator, area)
    if remainder == 0:
        return ChipEstimate(chips=quotient, approximate=False)
    return ChipEstimate(chips=quotient + 1, approximate=True)


def chips_for_region(dims: LatticeDims, model: ChipCostModel | None = None) -> int:
    """Chip count alone; see chip_estimate for the rounding flag."""
    return chip_estimate(dims, model).chips


def logical_capacity(dims: LatticeDims, model: ChipCostModel | None = None) -> int:
    """Whole logical-qubit tiles that fit the footprint (partial tiles drop)."""
    model = model if model is not None else ChipCostModel()
    return tile_count(dims, model.footprint)


@dataclass(frozen=True)
class OperationsBudget:
    """Topological-protection budget: one operation = one cell measured."""

    total_ops: int = DEFAULT_TOTAL_OPS
    consumed_ops: int = 0

    def __post_init__(self) -> None:
        if self.total_ops < 0 or self.consumed_ops < 0:
            raise ValueError("operation counts must be non-negative")
        if self.consumed_ops > self.total_ops:
            raise ValueError("consumed_ops exceeds total_ops")

    @property
    def remaining_ops(self) -> int:
        return self.total_ops - self.consumed_ops


def consume_ops(budget: OperationsBudget, cells_measured: int) -> OperationsBudget:
    """Account for measured cells; refuses (budget unchanged) on overdraw."""
    if cells_measured < 0:
        raise ValueError("cells_measured must be non-negative")
    if budget.consumed_ops + cells_measured > budget.total_ops:
        raise BudgetExhausted(
            f"consuming {cells_measured} ops would exceed the "
            f"{budget.total_ops} total ({budget.consumed_ops} already used)"
        )
    return replace(budget, consumed_ops=budget.consumed_ops + cells_measured)


@dataclass(frozen=True)
class RegionResourceLine:
    """Per-region row of a machine resource report."""

    region_id: str
    kind: RegionKind
    width: int
    depth: int
    chips: int
    approximate: bool
    logical_qubits: int


@dataclass(frozen=True)
class ResourceReport:
    """Whole-machine resource summary plus per-region breakdown."""

    global_dims: LatticeDims
    total_chips: int
    total_logical_qubits: int
    user_count: int
    user_chips: int
    user_logical_qubits: int
    scratch_chips: int
    scratch_logical_qubits: int
    approximate: bool
    budget: OperationsBudget
    regions: tuple[RegionResourceLine, ...]

    def to_dict(self) -> dict:
        return {
            "global": {
                "width": self.global_dims.width,
                "depth": self.global_dims.depth,
                "layers": self.global_dims.layers,
            },
            "total_chips": self.total_chips,
            "total_logical_qubits": self.total_logical_qubits,
            "user_count": self.user_count,
            "user_chips": self.user_chips,
            "user_logical_qubits": self.user_logical_qubits,
            "scratch_chips": self.scratch_chips,
            "scratch_logical_qubits": self.scratch_logical_qubits,
            "approximate": self.approximate,
            "budget": {
                "total_ops": self.budget.total_ops,
                "consumed_ops": self.budget.consumed_ops,
            },
            "regions": [
                {
                    "id": line.region_id,
                    "kind": line.kind.value,
                    "width": line.width,
                    "depth": line.depth,
                    "chips": line.chips,
                    "approximate": line.approximate,
                    "logical_qubits": line.logical_qubits,
                }
                for line in self.regions
            ],
        }


def _region_line(region: Region, model: ChipCostModel) -> RegionResourceLine:
    estimate = chip_estimate(region.dims, model)
    try:
        capacity = logical_capacity(region.dims, model)
    except Exception:
        capacity = 0  # region smaller than one logical footprint
    return RegionResourceLine(
        region_id=region.region_id,
        kind=region.kind,
        width=region.dims.width,
        depth=region.dims.depth,
        chips=estimate.chips,
        approximate=estimate.approximate,
        logical_qubits=capacity,
    )


def mainframe_report(
    layout: PartitionLayout,
    model: ChipCostModel | None = None,
    budget: OperationsBudget | None = None,
) -> ResourceReport:
    """Aggregate chips and logical capacity over a partition layout.

    An empty layout (no regions) yields an all-zero report.  For layouts
    that tile the machine exactly, the per-region chip counts sum to the
    chip count of the global footprint.
    """
    model = model if model is not None else ChipCostModel()
    budget = budget if budget is not None else OperationsBudget()
    lines = tuple(_region_line(r, model) for r in layout.regions)
    user_lines = [l for l in lines if l.kind is RegionKind.USER]
    scratch_lines = [l for l in lines if l.kind is RegionKind.SCRATCH]
    total_chips = sum(l.chips for l in lines)
    total_logical = sum(l.logical_qubits for l in lines)
    return ResourceReport(
        global_dims=layout.global_dims,
        total_chips=total_chips,
        total_logical_qubits=total_logical,
        user_count=len(user_lines),
        user_chips=sum(l.chips for l in user_lines),
        user_logical_qubits=sum(l.logical_qubits for l in user_lines),
        scratch_chips=sum(l.chips for l in scratch_lines),
        scratch_logical_qubits=sum(l.logical_qubits for l in scratch_lines),
        approximate=any(l.approximate for l in lines),
        budget=budget,
        regions=lines,
    )


DEFAULT_DISTILL_VOLUME = 50_000  # 50 x 20 x 50 cells per distilled ancilla


@dataclass(frozen=True)
class AncillaDemand:
    """Per-layer demand for distilled ancilla states.

    Distillation happens in scratch space; each ancilla occupies a block
    of scratch cells (its distillation volume) for the layer it is made
    in, so per-layer throughput is bounded by scratch footprint area.
    The default volumes are stated placeholders, configurable and echoed
    as assumptions in every report.
    """

    rate_a: int = 0
    rate_y: int = 0
    distill_volume_a: int = DEFAULT_DISTILL_VOLUME
    distill_volume_y: int = DEFAULT_DISTILL_VOLUME

    def __post_init__(self) -> None:
        if min(self.rate_a, self.rate_y) < 0:
            raise ValueError("rates must be non-negative")
        if min(self.distill_volume_a, self.distill_volume_y) < 1:
            raise ValueError("distillation volumes must be >= 1")

    @property
    def cells_per_layer(self) -> int:
        return self.rate_a * self.distill_volume_a + self.rate_y * self.distill_volume_y


@dataclass(frozen=True)
class FeasibilityReport:
    """Scratch distillation throughput versus demanded ancilla rates."""

    scratch_cells_per_layer: int
    demand_cells_per_layer: int
    feasible: bool
    max_rate_a: int  # ancillae per layer if all scratch went to |A>
    max_rate_y: int

    @property
    def utilization(self) -> float:
        if self.scratch_cells_per_layer == 0:
            return 0.0 if self.demand_cells_per_layer == 0 else float("inf")
        return self.demand_cells_per_layer / self.scratch_cells_per_layer


def scratch_feasibility(
    scratch_cells_per_layer: int, demand: AncillaDemand
) -> FeasibilityReport:
    """Deterministic arithmetic check of one layer of distillation load."""
    needed = demand.cells_per_layer
    return FeasibilityReport(
        scratch_cells_per_layer=scratch_cells_per_layer,
        demand_cells_per_layer=needed,
        feasible=needed <= scratch_cells_per_layer,
        max_rate_a=scratch_cells_per_layer // demand.distill_volume_a,
        max_rate_y=scratch_cells_per_layer // demand.distill_volume_y,
    )
