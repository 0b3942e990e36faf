"""Integer geometry of the global cluster lattice.

Cells, rectangular regions, boundary rings, logical-qubit tiling and the
two-column user/scratch partition layout.  All coordinates are zero-based,
row-major, origin at the lattice corner.  The z axis is simulated time and
defaults to a single layer for geometry operations; partitioning happens in
the x-y footprint only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from .errors import FootprintTooLarge, LayoutInfeasible


@dataclass(frozen=True, order=True)
class CellCoord:
    """A unit-cell index (x = column, y = row, z = layer)."""

    x: int
    y: int
    z: int = 0

    def __post_init__(self) -> None:
        if self.x < 0 or self.y < 0 or self.z < 0:
            raise ValueError(f"cell components must be non-negative: {self}")


@dataclass(frozen=True)
class LatticeDims:
    """Extent of a lattice or region, in unit cells."""

    width: int
    depth: int
    layers: int = 1

    def __post_init__(self) -> None:
        if self.width < 1 or self.depth < 1 or self.layers < 1:
            raise ValueError(f"dims must each be >= 1: {self}")

    @property
    def footprint_cells(self) -> int:
        """Cells per layer (x-y cross-section)."""
        return self.width * self.depth

    @property
    def cell_count(self) -> int:
        """Total cells; Python ints never overflow at mainframe scale."""
        return self.width * self.depth * self.layers

    def contains(self, cell: CellCoord) -> bool:
        return cell.x < self.width and cell.y < self.depth and cell.z < self.layers


class RegionKind(str, Enum):
    USER = "user"
    SCRATCH = "scratch"
    CORRIDOR = "corridor"
    UNASSIGNED = "unassigned"


@dataclass(frozen=True)
class LogicalFootprint:
    """Footprint of one logical qubit in cells."""

    width: int = 20
    depth: int = 40

    def __post_init__(self) -> None:
        if self.width < 1 or self.depth < 1:
            raise ValueError(f"footprint dims must each be >= 1: {self}")

    @property
    def area(self) -> int:
        return self.width * self.depth


@dataclass(frozen=True)
class Region:
    """An axis-aligned rectangular block of the lattice."""

    region_id: str
    kind: RegionKind
    origin: CellCoord
    dims: LatticeDims

    @property
    def x_end(self) -> int:
        return self.origin.x + self.dims.width

    @property
    def y_end(self) -> int:
        return self.origin.y + self.dims.depth

    @property
    def z_end(self) -> int:
        return self.origin.z + self.dims.layers

    def contains(self, cell: CellCoord) -> bool:
        return (
            self.origin.x <= cell.x < self.x_end
            and self.origin.y <= cell.y < self.y_end
            and self.origin.z <= cell.z < self.z_end
        )

    def fits_within(self, dims: LatticeDims) -> bool:
        return self.x_end <= dims.width and self.y_end <= dims.depth and self.z_end <= dims.layers

    def encloses(self, other: "Region") -> bool:
        return (
            self.origin.x <= other.origin.x
            and other.x_end <= self.x_end
            and self.origin.y <= other.origin.y
            and other.y_end <= self.y_end
            and self.origin.z <= other.origin.z
            and other.z_end <= self.z_end
        )

    def overlaps(self, other: "Region") -> bool:
        return (
            self.origin.x < other.x_end
            and other.origin.x < self.x_end
            and self.origin.y < other.y_end
            and other.origin.y < self.y_end
            and self.origin.z < other.z_end
            and other.origin.z < self.z_end
        )

    def cells(self) -> Iterator[CellCoord]:
        """All cells, z-major then row-major."""
        for z in range(self.origin.z, self.z_end):
            for y in range(self.origin.y, self.y_end):
                for x in range(self.origin.x, self.x_end):
                    yield CellCoord(x, y, z)


def region_cell_count(region: Region) -> int:
    """Footprint cells per layer (width x depth)."""
    return region.dims.footprint_cells


def boundary_ring(region: Region) -> list[CellCoord]:
    """Cells whose 4-neighborhood in the x-y plane leaves the region.

    Returned in deterministic order: layer-major, then row-major within a
    layer.  Per layer the count is 2w + 2d - 4 when w, d >= 2; degenerate
    strips (w == 1 or d == 1) are all boundary.
    """
    ring: list[CellCoord] = []
    x0, y0 = region.origin.x, region.origin.y
    x1, y1 = region.x_end, region.y_end
    for z in range(region.origin.z, region.z_end):
        for y in range(y0, y1):
            if y == y0 or y == y1 - 1:
                ring.extend(CellCoord(x, y, z) for x in range(x0, x1))
            else:
                ring.append(CellCoord(x0, y, z))
                if x1 - 1 != x0:
                    ring.append(CellCoord(x1 - 1, y, z))
    return ring


def interior_cells(region: Region) -> list[CellCoord]:
    """Region cells not on the boundary ring."""
    cells: list[CellCoord] = []
    for z in range(region.origin.z, region.z_end):
        for y in range(region.origin.y + 1, region.y_end - 1):
            for x in range(region.origin.x + 1, region.x_end - 1):
                cells.append(CellCoord(x, y, z))
    return cells


def tile_logical_qubits(
    region: Region, footprint: LogicalFootprint
) -> tuple[int, list[Region]]:
    """Tile the region footprint with whole logical-qubit tiles, row-major.

    Returns the tile count floor(w/fw) * floor(d/fd) and the tile regions;
    partial tiles are discarded.
    """
    if footprint.width > region.dims.width or footprint.depth > region.dims.depth:
        raise FootprintTooLarge(
            f"footprint {footprint.width}x{footprint.depth} exceeds region "
            f"{region.dims.width}x{region.dims.depth}"
        )
    across = region.dims.width // footprint.width
    down = region.dims.depth // footprint.depth
    tiles: list[Region] = []
    for row in range(down):
        for col in range(across):
            tiles.append(
                Region(
                    region_id=f"{region.region_id}-tile-{row * across + col}",
                    kind=region.kind,
                    origin=CellCoord(
                        region.origin.x + col * footprint.width,
                        region.origin.y + row * footprint.depth,
                        region.origin.z,
                    ),
                    dims=LatticeDims(footprint.width, footprint.depth, region.dims.layers),
                )
            )
    return across * down, tiles


def tile_count(dims: LatticeDims, footprint: LogicalFootprint) -> int:
    """Tile count without materializing tile regions (mainframe scale)."""
    if footprint.width > dims.width or footprint.depth > dims.depth:
        raise FootprintTooLarge(
            f"footprint {footprint.width}x{footprint.depth} exceeds {dims.width}x{dims.depth}"
        )
    return (dims.width // footprint.width) * (dims.depth // footprint.depth)


@dataclass(frozen=True)
class LayoutViolation:
    """One violated layout invariant; violations are data, not errors."""

    kind: str  # overlap | out_of_bounds | coverage_gap | scratch_adjacency | duplicate_id
    region_ids: tuple[str, ...]
    message: str


@dataclass(frozen=True)
class PartitionLayout:
    """The global user/scratch partition map."""

    global_dims: LatticeDims
    regions: tuple[Region, ...]
    user_columns: int = 2
    users_per_column: int = 0

    def user_regions(self) -> list[Region]:
        return [r for r in self.regions if r.kind is RegionKind.USER]

    def scratch_regions(self) -> list[Region]:
        return [r for r in self.regions if r.kind is RegionKind.SCRATCH]

    def region_by_id(self, region_id: str) -> Region:
        for r in self.regions:
            if r.region_id == region_id:
                return r
        raise KeyError(region_id)

    def to_dict(self) -> dict:
        """Machine-readable layout document."""
        return {
            "global": {
                "width": self.global_dims.width,
                "depth": self.global_dims.depth,
                "layers": self.global_dims.layers,
            },
            "regions": [
                {
                    "id": r.region_id,
                    "kind": r.kind.value,
                    "origin": {"x": r.origin.x, "y": r.origin.y, "z": r.origin.z},
                    "dims": {
                        "width": r.dims.width,
                        "depth": r.dims.depth,
                        "layers": r.dims.layers,
                    },
                }
                for r in self.regions
            ],
        }


def build_layout(
    user_count: int,
    user_region: LatticeDims,
    scratch_width_in_user_regions: int = 2,
    users_per_column: int | None = None,
    layers: int = 1,
) -> PartitionLayout:
    """Construct the two-column layout: user columns on the left and right
    edges, a central scratch strip spanning the full depth.

    Global width = (2 + scratch_width) * user_region.width and global depth
    = users_per_column * user_region.depth (default user_count // 2).
    """
    if users_per_column is None:
        users_per_column = user_count // 2
    if users_per_column < 1:
        raise LayoutInfeasible(f"users_per_column must be >= 1, got {users_per_column}")
    if user_count % 2 != 0 or user_count % users_per_column != 0:
        raise LayoutInfeasible(
            f"user_count {user_count} must be even and divisible by users_per_column "
            f"{users_per_column}"
        )
    if user_count != 2 * users_per_column:
        raise LayoutInfeasible(
            f"two-column layout needs user_count == 2 * users_per_column, got "
            f"{user_count} != 2 * {users_per_column}"
        )
    if scratch_width_in_user_regions < 1:
        raise LayoutInfeasible("scratch width must be >= 1 user region")

    uw, ud = user_region.width, user_region.depth
    scratch_w = scratch_width_in_user_regions * uw
    global_dims = LatticeDims((2 + scratch_width_in_user_regions) * uw,
                              users_per_column * ud, layers)

    regions: list[Region] = []
    for col, x0 in ((0, 0), (1, uw + scratch_w)):
        for row in range(users_per_column):
            regions.append(
                Region(
                    region_id=f"user-c{col}-r{row}",
                    kind=RegionKind.USER,
                    origin=CellCoord(x0, row * ud, 0),
                    dims=LatticeDims(uw, ud, layers),
                )
            )
    regions.append(
        Region(
            region_id="scratch",
            kind=RegionKind.SCRATCH,
            origin=CellCoord(uw, 0, 0),
            dims=LatticeDims(scratch_w, global_dims.depth, layers),
        )
    )
    layout = PartitionLayout(
        global_dims=global_dims,
        regions=tuple(regions),
        user_columns=2,
        users_per_column=users_per_column,
    )
    violations = validate_layout(layout)
    if violations:
        raise LayoutInfeasible("; ".join(v.message for v in violations))
    return layout


def _shares_full_edge(user: Region, scratch: Region) -> bool:
    """True when one full side of `user` lies against `scratch`."""
    if user.origin.z != scratch.origin.z or user.z_end != scratch.z_end:
        return False
    y_covered = scratch.origin.y <= user.origin.y and user.y_end <= scratch.y_end
    if y_covered and (user.x_end == scratch.origin.x or scratch.x_end == user.origin.x):
        return True
    x_covered = scratch.origin.x <= user.origin.x and user.x_end <= scratch.x_end
    if x_covered and (user.y_end == scratch.origin.y or scratch.y_end == user.origin.y):
        return True
    return False


def validate_layout(layout: PartitionLayout) -> list[LayoutViolation]:
    """Report every violated layout invariant; empty list iff the layout is valid."""
    violations: list[LayoutViolation] = []
    regions = layout.regions

    seen: dict[str, Region] = {}
    for r in regions:
        if r.region_id in seen:
            violations.append(
                LayoutViolation(
                    "duplicate_id",
                    (r.region_id,),
                    f"region_id {r.region_id!r} appears more than once",
                )
            )
        seen[r.region_id] = r

    for r in regions:
        if not r.fits_within(layout.global_dims):
            violations.append(
                LayoutViolation(
                    "out_of_bounds",
                    (r.region_id,),
                    f"region {r.region_id} exceeds the global lattice",
                )
            )

    for i, a in enumerate(regions):
        for b in regions[i + 1:]:
            if a.overlaps(b):
                violations.append(
                    LayoutViolation(
                        "overlap",
                        (a.region_id, b.region_id),
                        f"regions {a.region_id} and {b.region_id} overlap",
                    )
                )

    # With no overlaps, exact coverage reduces to a cell-count identity.
    covered = sum(r.dims.cell_count for r in regions)
    total = layout.global_dims.cell_count
    if not any(v.kind == "overlap" for v in violations) and covered != total:
        violations.append(
            LayoutViolation(
                "coverage_gap",
                tuple(r.region_id for r in regions),
                f"regions cover {covered} of {total} cells",
            )
        )

    scratch = layout.scratch_regions()
    for r in layout.user_regions():
        if not any(_shares_full_edge(r, s) for s in scratch):
            violations.append(
                LayoutViolation(
                    "scratch_adjacency",
                    (r.region_id,),
                    f"user region {r.region_id} shares no full edge with scratch",
                )
            )
    return violations
