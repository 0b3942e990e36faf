"""Declarative scenarios: a JSON document drives one mainframe run.

Schema (JSON is the concrete syntax for the normative key set):

  {
    "name": str,
    "config": {
      "user_count": int, "user_region": {"width": int, "depth": int},
      "scratch_width_in_user_regions": int, "users_per_column": int,
      "layers": int, "footprint": {"width": int, "depth": int},
      "chips_per_logical": int, "budget_total_ops": int,
      "seed": int (mandatory), "sim_cap": int, "enable_tableau": bool|null
    },
    "events": [ {"kind": ..., ...fields, "expect_error": code?} ],
    "checks": [ {"key": report key, "equals": value} | {"key": ..., "min": number} ]
  }

Event kinds: admit, allocate, sever, stream, grow, bell, logoff,
reattach, advance_layers.  Events name sessions by scenario aliases;
an alias must be introduced by an earlier admit.  Structural problems
(unknown kind, undefined alias, bad field) are scenario errors; a
mismatch between an event's declared expectation and what the machine
did is a scenario failure.  Secure-mode sessions get their photon
stream descriptor issued automatically before their first stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .allocator import Mainframe, SessionMode
from .errors import HpqcError, ScenarioError, ScenarioFailure
from .geometry import LatticeDims, LogicalFootprint, build_layout
from .protocol import MeasurementInstruction, decode_stream
from .report import mainframe_flat_report, render_machine, render_text
from .resources import ChipCostModel, OperationsBudget
from .stabilizer import DEFAULT_SIMULATION_CAP, PauliBasis
from .geometry import CellCoord

EVENT_KINDS = (
    "admit", "allocate", "sever", "stream", "grow", "bell",
    "logoff", "reattach", "advance_layers",
)


@dataclass(frozen=True)
class ScenarioConfig:
    user_count: int
    user_region: LatticeDims
    scratch_width_in_user_regions: int = 2
    users_per_column: int | None = None
    layers: int = 1
    footprint: LogicalFootprint = field(default_factory=LogicalFootprint)
    chips_per_logical: int = 3000
    budget_total_ops: int = 10**16
    seed: int = 0
    sim_cap: int = DEFAULT_SIMULATION_CAP
    enable_tableau: bool | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    config: ScenarioConfig
    events: tuple[dict, ...]
    checks: tuple[dict, ...]
    base_dir: Path | None = None


@dataclass
class RunOutcome:
    """Everything one scenario run produced."""

    scenario: Scenario
    seed: int
    mainframe: Mainframe
    flat: dict[str, str]
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures

    def machine_report(self) -> str:
        return render_machine(self.flat)

    def text_report(self) -> str:
        title = f"scenario {self.scenario.name} (seed {self.seed})"
        return render_text(self.mainframe, self.flat, title)


def _require(doc: dict, key: str, kinds: type | tuple, where: str, index: int | None = None):
    if key not in doc:
        raise ScenarioError(f"{where}: missing required key {key!r}", event_index=index)
    value = doc[key]
    if not isinstance(value, kinds) or isinstance(value, bool) and kinds is int:
        raise ScenarioError(
            f"{where}: key {key!r} has wrong type {type(value).__name__}",
            event_index=index,
        )
    return value


def _dims(doc: dict, where: str) -> tuple[int, int]:
    width = _require(doc, "width", int, where)
    depth = _require(doc, "depth", int, where)
    return width, depth


_NAME_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-")


def _name(doc: dict, key: str, where: str, index: int | None = None) -> str:
    value = _require(doc, key, str, where, index)
    if not value or not set(value) <= _NAME_OK:
        raise ScenarioError(
            f"{where}: {key!r} must be a nonempty [A-Za-z0-9_-] name, got {value!r}",
            event_index=index,
        )
    return value


def parse_scenario(doc: object, base_dir: Path | None = None) -> Scenario:
    """Validate the document shape and all event references."""
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    name = _name(doc, "name", "scenario")
    raw_config = _require(doc, "config", dict, "scenario")
    uw, ud = _dims(_require(raw_config, "user_region", dict, "config"), "config.user_region")
    footprint_doc = raw_config.get("footprint", {"width": 20, "depth": 40})
    if not isinstance(footprint_doc, dict):
        raise ScenarioError("config.footprint must be an object")
    fw, fd = _dims(footprint_doc, "config.footprint")
    seed = _require(raw_config, "seed", int, "config")
    enable = raw_config.get("enable_tableau")
    if enable is not None and not isinstance(enable, bool):
        raise ScenarioError("config.enable_tableau must be true, false, or null")
    layers = raw_config.get("layers", 1)
    config = ScenarioConfig(
        user_count=_require(raw_config, "user_count", int, "config"),
        user_region=LatticeDims(uw, ud, layers),
        scratch_width_in_user_regions=raw_config.get("scratch_width_in_user_regions", 2),
        users_per_column=raw_config.get("users_per_column"),
        layers=layers,
        footprint=LogicalFootprint(fw, fd),
        chips_per_logical=raw_config.get("chips_per_logical", 3000),
        budget_total_ops=raw_config.get("budget_total_ops", 10**16),
        seed=seed,
        sim_cap=raw_config.get("sim_cap", DEFAULT_SIMULATION_CAP),
        enable_tableau=enable,
    )

    events = doc.get("events", [])
    if not isinstance(events, list):
        raise ScenarioError("scenario events must be a list")
    sessions: set[str] = set()
    handles: set[str] = set()
    for index, event in enumerate(events):
        if not isinstance(event, dict):
            raise ScenarioError(f"event {index} must be an object", event_index=index)
        kind = _require(event, "kind", str, f"event {index}", index)
        if kind not in EVENT_KINDS:
            raise ScenarioError(
                f"event {index}: unknown kind {kind!r}", event_index=index
            )
        expect = event.get("expect_error")
        if expect is not None and not isinstance(expect, str):
            raise ScenarioError(
                f"event {index}: expect_error must be an error code string",
                event_index=index,
            )
        if kind == "admit":
            alias = _name(event, "session", f"event {index}", index)
            if alias in sessions:
                raise ScenarioError(
                    f"event {index}: session alias {alias!r} already admitted",
                    event_index=index,
                )
            _name(event, "user", f"event {index}", index)
            mode = _require(event, "mode", str, f"event {index}", index)
            if mode not in (m.value for m in SessionMode):
                raise ScenarioError(
                    f"event {index}: mode must be trusted or secure, got {mode!r}",
                    event_index=index,
                )
            _require(event, "logical_qubits", int, f"event {index}", index)
            sessions.add(alias)
        elif kind in ("allocate", "sever"):
            alias = _name(event, "session", f"event {index}", index)
            if alias not in sessions:
                raise ScenarioError(
                    f"event {index}: undefined session {alias!r}", event_index=index
                )
        elif kind == "stream":
            alias = _name(event, "session", f"event {index}", index)
            if alias not in sessions:
                raise ScenarioError(
                    f"event {index}: undefined session {alias!r}", event_index=index
                )
            has_inline = "instructions" in event
            has_path = "path" in event
            if has_inline == has_path:
                raise ScenarioError(
                    f"event {index}: stream needs exactly one of instructions/path",
                    event_index=index,
                )
            if has_inline and not isinstance(event["instructions"], list):
                raise ScenarioError(
                    f"event {index}: instructions must be a list", event_index=index
                )
        elif kind == "grow":
            alias = _name(event, "session", f"event {index}", index)
            if alias not in sessions:
                raise ScenarioError(
                    f"event {index}: undefined session {alias!r}", event_index=index
                )
            _require(event, "extra_logical_qubits", int, f"event {index}", index)
        elif kind == "bell":
            for key in ("a", "b"):
                alias = _name(event, key, f"event {index}", index)
                if alias not in sessions:
                    raise ScenarioError(
                        f"event {index}: undefined session {alias!r}", event_index=index
                    )
        elif kind == "logoff":
            alias = _name(event, "session", f"event {index}", index)
            if alias not in sessions:
                raise ScenarioError(
                    f"event {index}: undefined session {alias!r}", event_index=index
                )
            persist = _require(event, "persist", bool, f"event {index}", index)
            if persist:
                handle = event.get("handle_as")
                if handle is not None:
                    if not isinstance(handle, str) or not set(handle) <= _NAME_OK:
                        raise ScenarioError(
                            f"event {index}: handle_as must be a [A-Za-z0-9_-] name",
                            event_index=index,
                        )
                    handles.add(handle)
        elif kind == "reattach":
            alias = _name(event, "session", f"event {index}", index)
            if alias not in sessions:
                raise ScenarioError(
                    f"event {index}: undefined session {alias!r}", event_index=index
                )
            handle = _name(event, "handle", f"event {index}", index)
            if handle not in handles:
                raise ScenarioError(
                    f"event {index}: undefined handle alias {handle!r}",
                    event_index=index,
                )
        elif kind == "advance_layers":
            _require(event, "count", int, f"event {index}", index)

    checks = doc.get("checks", [])
    if not isinstance(checks, list):
        raise ScenarioError("scenario checks must be a list")
    for i, check in enumerate(checks):
        if not isinstance(check, dict) or "key" not in check:
            raise ScenarioError(f"check {i} must be an object with a 'key'")
        if ("equals" in check) == ("min" in check):
            raise ScenarioError(f"check {i} needs exactly one of equals/min")

    return Scenario(
        name=name,
        config=config,
        events=tuple(events),
        checks=tuple(checks),
        base_dir=base_dir,
    )


def load_scenario(path: str | Path) -> Scenario:
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario file is not valid JSON: {exc}") from exc
    return parse_scenario(doc, base_dir=p.parent)


def _parse_instructions(event: dict, scenario: Scenario, index: int) -> list[MeasurementInstruction]:
    if "path" in event:
        rel = event["path"]
        base = scenario.base_dir if scenario.base_dir is not None else Path(".")
        try:
            data = (base / rel).read_bytes()
        except OSError as exc:
            raise ScenarioError(
                f"event {index}: cannot read stream file {rel!r}: {exc}",
                event_index=index,
            ) from exc
        try:
            return decode_stream(data)
        except HpqcError as exc:
            raise ScenarioError(
                f"event {index}: stream file {rel!r}: {exc}", event_index=index
            ) from exc
    codes = {b.value: b for b in PauliBasis}
    out: list[MeasurementInstruction] = []
    for j, item in enumerate(event["instructions"]):
        if (
            not isinstance(item, list) or len(item) != 4
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in item[:3])
            or item[3] not in codes
        ):
            raise ScenarioError(
                f"event {index}: instruction {j} must be [x, y, z, basis], "
                f"got {item!r}",
                event_index=index,
            )
        out.append(
            MeasurementInstruction(CellCoord(item[0], item[1], item[2]), codes[item[3]])
        )
    return out


def build_mainframe(config: ScenarioConfig, seed: int) -> Mainframe:
    layout = build_layout(
        config.user_count,
        config.user_region,
        scratch_width_in_user_regions=config.scratch_width_in_user_regions,
        users_per_column=config.users_per_column,
        layers=config.layers,
    )
    return Mainframe(
        layout,
        model=ChipCostModel(config.chips_per_logical, config.footprint),
        budget=OperationsBudget(total_ops=config.budget_total_ops),
        seed=seed,
        sim_cap=config.sim_cap,
        enable_tableau=config.enable_tableau,
    )


def execute_scenario(scenario: Scenario, seed_override: int | None = None) -> RunOutcome:
    """Run the event script and evaluate checks.

    Raises ScenarioFailure when an event outcome contradicts the script
    (unexpected error, or an expected error that did not happen); failed
    checks are collected in the outcome instead of raising so the report
    still renders.
    """
    seed = seed_override if seed_override is not None else scenario.config.seed
    try:
        mainframe = build_mainframe(scenario.config, seed)
    except HpqcError as exc:
        raise ScenarioError(f"mainframe configuration failed: {exc}") from exc

    aliases: dict[str, str] = {}
    handles: dict[str, str] = {}
    failures: list[str] = []

    for index, event in enumerate(scenario.events):
        kind = event["kind"]
        expect = event.get("expect_error")
        try:
            if kind == "admit":
                session = mainframe.admit(
                    event["user"],
                    SessionMode(event["mode"]),
                    event["logical_qubits"],
                    ancilla_a=event.get("ancilla_a", 0),
                    ancilla_y=event.get("ancilla_y", 0),
                )
                aliases[event["session"]] = session.session_id
            elif kind == "allocate":
                mainframe.allocate(
                    aliases[event["session"]], event.get("logical_qubits")
                )
            elif kind == "sever":
                mainframe.sever(aliases[event["session"]])
            elif kind == "stream":
                instructions = _parse_instructions(event, scenario, index)
                sid = aliases[event["session"]]
                secure = mainframe.sessions[sid].mode is SessionMode.SECURE
                if secure and not mainframe.sessions[sid].descriptor_issued:
                    mainframe.descriptor(sid)
                mainframe.run_stream(sid, instructions, secure=secure)
            elif kind == "grow":
                mainframe.grow(
                    aliases[event["session"]], event["extra_logical_qubits"]
                )
            elif kind == "bell":
                mainframe.bell_broker(aliases[event["a"]], aliases[event["b"]])
            elif kind == "logoff":
                record = mainframe.logoff(
                    aliases[event["session"]], persist=event["persist"]
                )
                if record is not None and "handle_as" in event:
                    handles[event["handle_as"]] = record.handle
            elif kind == "reattach":
                handle = handles.get(event["handle"])
                if handle is None:
                    raise ScenarioError(
                        f"event {index}: handle alias {event['handle']!r} was "
                        "never produced by a persisting logoff",
                        event_index=index,
                    )
                mainframe.reattach(handle, aliases[event["session"]])
            elif kind == "advance_layers":
                mainframe.advance_layers(event["count"])
        except ScenarioError:
            raise
        except HpqcError as exc:
            if expect is not None and exc.code == expect:
                continue
            raise ScenarioFailure(
                f"event {index} ({kind}): unexpected {exc.code}: {exc}",
                event_index=index,
            ) from exc
        else:
            if expect is not None:
                raise ScenarioFailure(
                    f"event {index} ({kind}): expected error {expect!r} "
                    "but the event succeeded",
                    event_index=index,
                )

    flat = mainframe_flat_report(mainframe, aliases=aliases)
    flat["scenario.name"] = scenario.name
    flat["scenario.seed"] = str(seed)
    flat["scenario.events"] = str(len(scenario.events))

    for i, check in enumerate(scenario.checks):
        key = check["key"]
        actual = flat.get(key)
        if "equals" in check:
            op, expected = "equals", str(check["equals"])
            passed = actual is not None and actual == expected
        else:
            op, expected = "min", str(check["min"])
            try:
                passed = actual is not None and float(actual) >= float(expected)
            except ValueError:
                passed = False
        flat[f"check.{i}.key"] = key
        flat[f"check.{i}.op"] = op
        flat[f"check.{i}.expected"] = expected
        flat[f"check.{i}.actual"] = actual if actual is not None else "(missing)"
        flat[f"check.{i}.result"] = "pass" if passed else "fail"
        if not passed:
            failures.append(
                f"check {i}: {key} {op} {expected}, actual "
                f"{actual if actual is not None else '(missing)'}"
            )

    return RunOutcome(
        scenario=scenario,
        seed=seed,
        mainframe=mainframe,
        flat=flat,
        failures=failures,
    )
