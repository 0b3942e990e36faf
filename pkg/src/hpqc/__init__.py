"""Desk-scale simulator of a multi-tenant topological-cluster mainframe."""

from .allocator import (
    BellBrokerResult,
    Mainframe,
    PersistenceRecord,
    SessionMode,
    SessionState,
    StreamRunResult,
    UserSession,
)
from .errors import HpqcError
from .geometry import (
    CellCoord,
    LatticeDims,
    LogicalFootprint,
    PartitionLayout,
    Region,
    RegionKind,
    build_layout,
    validate_layout,
)
from .protocol import (
    EigenvalueRecord,
    MeasurementInstruction,
    PhotonStreamDescriptor,
    decode_record,
    decode_stream,
    encode_record,
    encode_stream,
)
from .resources import (
    AncillaDemand,
    ChipCostModel,
    ChipEstimate,
    OperationsBudget,
    chip_estimate,
    logical_capacity,
    mainframe_report,
)
from .scenario import Scenario, execute_scenario, load_scenario, parse_scenario
from .stabilizer import (
    GraphAdjacency,
    PauliBasis,
    StabilizerTableau,
    cut_rank,
    lattice_graph,
)

__version__ = "0.1.0"

__all__ = [
    "AncillaDemand",
    "BellBrokerResult",
    "CellCoord",
    "ChipCostModel",
    "ChipEstimate",
    "EigenvalueRecord",
    "GraphAdjacency",
    "HpqcError",
    "LatticeDims",
    "LogicalFootprint",
    "Mainframe",
    "MeasurementInstruction",
    "OperationsBudget",
    "PartitionLayout",
    "PauliBasis",
    "PersistenceRecord",
    "PhotonStreamDescriptor",
    "Region",
    "RegionKind",
    "Scenario",
    "SessionMode",
    "SessionState",
    "StabilizerTableau",
    "StreamRunResult",
    "UserSession",
    "build_layout",
    "chip_estimate",
    "cut_rank",
    "decode_record",
    "decode_stream",
    "encode_record",
    "encode_stream",
    "execute_scenario",
    "lattice_graph",
    "load_scenario",
    "logical_capacity",
    "mainframe_report",
    "parse_scenario",
    "validate_layout",
]
