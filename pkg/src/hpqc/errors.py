"""Exception hierarchy for the hpqc package.

Every domain error derives from HpqcError and carries a stable ``code``
used by the wire formats, the scenario runner and the HTTP service.
"""

from __future__ import annotations


class HpqcError(Exception):
    """Base class for all hpqc domain errors."""

    code = "error"


# -- geometry ---------------------------------------------------------------

class FootprintTooLarge(HpqcError):
    code = "FootprintTooLarge"


class LayoutInfeasible(HpqcError):
    code = "LayoutInfeasible"


# -- stabilizer core --------------------------------------------------------

class SimulationCapExceeded(HpqcError):
    code = "SimulationCapExceeded"


class InvalidQubit(HpqcError):
    code = "InvalidQubit"


class AlreadyMeasured(HpqcError):
    code = "AlreadyMeasured"


class OracleCapExceeded(HpqcError):
    code = "OracleCapExceeded"


# -- resources --------------------------------------------------------------

class BudgetExhausted(HpqcError):
    code = "BudgetExhausted"


# -- allocator --------------------------------------------------------------

class MainframeNotReady(HpqcError):
    code = "MainframeNotReady"


class CapacityExceeded(HpqcError):
    code = "CapacityExceeded"


class InvalidState(HpqcError):
    code = "InvalidState"


class UnknownHandle(HpqcError):
    code = "UnknownHandle"


class NoCorridorAvailable(HpqcError):
    code = "NoCorridorAvailable"


# -- session protocol -------------------------------------------------------

class MalformedHeader(HpqcError):
    code = "MalformedHeader"


class MalformedRecord(HpqcError):
    code = "MalformedRecord"

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


class UnknownBasisCode(HpqcError):
    code = "UnknownBasisCode"

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


class OutOfRegion(HpqcError):
    code = "OutOfRegion"


class AncillaBudgetExceeded(HpqcError):
    code = "AncillaBudgetExceeded"


class CapExceeded(HpqcError):
    code = "CapExceeded"


# -- scenarios --------------------------------------------------------------

class ScenarioError(HpqcError):
    """Malformed or inconsistent scenario input (maps to exit code 2)."""

    code = "ScenarioError"

    def __init__(self, message: str, event_index: int | None = None):
        if event_index is not None:
            message = f"event {event_index}: {message}"
        super().__init__(message)
        self.event_index = event_index


class ScenarioFailure(HpqcError):
    """A valid scenario whose execution failed an expectation (exit code 1)."""

    code = "ScenarioFailure"

    def __init__(self, message: str, event_index: int | None = None):
        if event_index is not None:
            message = f"event {event_index}: {message}"
        super().__init__(message)
        self.event_index = event_index
