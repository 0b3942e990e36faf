"""Run reports: a flat machine format and a human text rendering.

The machine format is one `key=value` per line, keys sorted
lexicographically, LF endings, so two runs diff cleanly and golden
tests can compare bytes.  Every configured assumption appears in the
report; nothing defaults silently.
"""

from __future__ import annotations

import hashlib
from typing import Mapping

from .allocator import Mainframe, SessionState
from .resources import AncillaDemand, mainframe_report


def event_digest(lines: list[str]) -> str:
    """SHA-256 over the event log text (LF-joined, LF-terminated)."""
    text = "".join(line + "\n" for line in lines)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def outcomes_signs(outcomes: list[int]) -> str:
    return "".join("+" if o > 0 else "-" for o in outcomes)


def mainframe_flat_report(
    mainframe: Mainframe, aliases: Mapping[str, str] | None = None
) -> dict[str, str]:
    """Flatten one machine's full state into report keys.

    `aliases` maps report names to session ids; without it sessions
    report under their machine-assigned ids.
    """
    flat: dict[str, str] = {}
    assert mainframe.layout is not None
    dims = mainframe.layout.global_dims
    flat["machine.width"] = str(dims.width)
    flat["machine.depth"] = str(dims.depth)
    flat["machine.layers"] = str(dims.layers)
    flat["machine.cells"] = str(dims.cell_count)
    flat["machine.desk_scale"] = "true" if mainframe.tableau is not None else "false"
    flat["machine.layer"] = str(mainframe.current_layer)

    resources = mainframe_report(mainframe.layout, mainframe.model, mainframe.budget)
    flat["resources.total_chips"] = str(resources.total_chips)
    flat["resources.total_logical_qubits"] = str(resources.total_logical_qubits)
    flat["resources.user_count"] = str(resources.user_count)
    flat["resources.user_chips"] = str(resources.user_chips)
    flat["resources.user_logical_qubits"] = str(resources.user_logical_qubits)
    flat["resources.scratch_chips"] = str(resources.scratch_chips)
    flat["resources.scratch_logical_qubits"] = str(resources.scratch_logical_qubits)
    flat["resources.approximate"] = "true" if resources.approximate else "false"
    if resources.user_count:
        flat["resources.chips_per_user_region"] = str(
            resources.user_chips // resources.user_count
        )
        flat["resources.logical_per_user_region"] = str(
            resources.user_logical_qubits // resources.user_count
        )

    flat["budget.total_ops"] = str(mainframe.budget.total_ops)
    flat["budget.consumed_ops"] = str(mainframe.budget.consumed_ops)
    flat["budget.remaining_ops"] = str(mainframe.budget.remaining_ops)

    slots = mainframe.slot_summary()
    flat["ledger.slots_total"] = str(slots["total"])
    flat["ledger.slots_free"] = str(slots["free"])
    flat["ledger.slots_occupied"] = str(slots["occupied"])
    flat["ledger.slots_persisted"] = str(slots["persisted"])
    flat["ledger.corridors"] = str(len(mainframe.corridors))
    flat["ledger.persisted_live"] = str(len(mainframe.persistence))
    flat["ledger.persisted_closed"] = str(len(mainframe.closed_persistence))

    lines = mainframe.event_log_lines()
    flat["events.count"] = str(len(lines))
    flat["events.digest"] = event_digest(lines)

    demand_defaults = AncillaDemand()
    flat["assumptions.one_qubit_per_cell"] = "true"
    flat["assumptions.eigenvalue_distribution"] = "uniform"
    flat["assumptions.chips_per_logical"] = str(mainframe.model.chips_per_logical)
    flat["assumptions.footprint"] = (
        f"{mainframe.model.footprint.width}x{mainframe.model.footprint.depth}"
    )
    flat["assumptions.budget_total_ops"] = str(mainframe.budget.total_ops)
    flat["assumptions.distill_volume_a"] = str(demand_defaults.distill_volume_a)
    flat["assumptions.distill_volume_y"] = str(demand_defaults.distill_volume_y)
    flat["assumptions.sim_cap"] = str(mainframe.sim_cap)
    flat["assumptions.seed"] = str(mainframe.seed)

    names = dict(aliases) if aliases else {
        sid: sid for sid in mainframe.sessions
    }
    for name in sorted(names):
        session = mainframe.sessions[names[name]]
        prefix = f"session.{name}"
        flat[f"{prefix}.id"] = session.session_id
        flat[f"{prefix}.user"] = session.user_id
        flat[f"{prefix}.mode"] = session.mode.value
        flat[f"{prefix}.state"] = session.state.value
        flat[f"{prefix}.slots"] = str(len(session.slot_ids))
        if session.region is not None:
            d = session.region.dims
            flat[f"{prefix}.region"] = (
                f"{session.region.origin.x}:{session.region.origin.y}:"
                f"{d.width}x{d.depth}x{d.layers}"
            )
        flat[f"{prefix}.ops_consumed"] = str(session.ops_consumed)
        flat[f"{prefix}.ancilla_used_a"] = str(session.ancilla_used_a)
        flat[f"{prefix}.ancilla_used_y"] = str(session.ancilla_used_y)
        flat[f"{prefix}.outcome_count"] = str(len(session.outcomes))
        signs = outcomes_signs(session.outcomes)
        flat[f"{prefix}.outcomes"] = signs if signs else "-"
        flat[f"{prefix}.outcomes_digest"] = hashlib.sha256(
            signs.encode("ascii")
        ).hexdigest()
        if session.stored_logical_qubits is not None:
            flat[f"{prefix}.stored_logical_qubits"] = str(session.stored_logical_qubits)
        if (
            mainframe.tableau is not None
            and session.region is not None
            and session.state is not SessionState.CLOSED
        ):
            flat[f"{prefix}.entanglement"] = str(
                mainframe.session_entanglement(names[name])
            )
    return flat


def render_machine(flat: Mapping[str, str]) -> str:
    lines = []
    for key in sorted(flat):
        value = flat[key]
        if "\n" in value or "=" in value:
            raise ValueError(f"report value for {key!r} contains reserved characters")
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"


MAX_MAP_ROWS = 40


def partition_map(mainframe: Mainframe) -> str:
    """ASCII slot-resolution map: columns flank the scratch strip.

    `.` free slot, `U` occupied, `P` persisted, `S` scratch.
    """
    if not mainframe.slots:
        return "(no user slots)\n"
    columns = sorted({s.column for s in mainframe.slots})
    rows = max(s.row for s in mainframe.slots) + 1
    grid: dict[tuple[int, int], str] = {}
    for slot in mainframe.slots:
        state = mainframe.slot_status[slot.slot_id][0]
        grid[(slot.column, slot.row)] = {
            "free": ".", "session": "U", "persisted": "P"
        }[state]
    out = []
    shown = min(rows, MAX_MAP_ROWS)
    for row in range(shown):
        cells = [grid.get((col, row), " ") for col in columns]
        # scratch strip sits between the two slot columns
        out.append(" S ".join(cells) if len(cells) > 1 else f"{cells[0]} S")
    if rows > shown:
        out.append(f"... ({rows - shown} more rows)")
    return "\n".join(out) + "\n"


def render_text(mainframe: Mainframe, flat: Mapping[str, str], title: str) -> str:
    parts = [title, "=" * len(title), ""]
    parts.append("Machine")
    parts.append(
        f"  lattice {flat['machine.width']} x {flat['machine.depth']} x "
        f"{flat['machine.layers']} cells={flat['machine.cells']} "
        f"desk_scale={flat['machine.desk_scale']}"
    )
    parts.append("")
    parts.append("Resources")
    parts.append(f"  total chips            {flat['resources.total_chips']}")
    parts.append(f"  total logical qubits   {flat['resources.total_logical_qubits']}")
    parts.append(f"  user regions           {flat['resources.user_count']}")
    if "resources.chips_per_user_region" in flat:
        parts.append(f"  chips per user region  {flat['resources.chips_per_user_region']}")
        parts.append(f"  logical per region     {flat['resources.logical_per_user_region']}")
    parts.append(f"  scratch chips          {flat['resources.scratch_chips']}")
    parts.append("")
    parts.append("Budget")
    parts.append(
        f"  ops {flat['budget.consumed_ops']} consumed of {flat['budget.total_ops']}"
    )
    parts.append("")
    parts.append("Ledger")
    parts.append(
        f"  slots total={flat['ledger.slots_total']} free={flat['ledger.slots_free']} "
        f"occupied={flat['ledger.slots_occupied']} persisted={flat['ledger.slots_persisted']}"
    )
    parts.append(f"  corridors={flat['ledger.corridors']} events={flat['events.count']}")
    parts.append("")
    sessions = sorted(
        {k.split(".")[1] for k in flat if k.startswith("session.")}
    )
    if sessions:
        parts.append("Sessions")
        for name in sessions:
            p = f"session.{name}"
            line = (
                f"  {name}: state={flat[f'{p}.state']} mode={flat[f'{p}.mode']} "
                f"slots={flat[f'{p}.slots']} ops={flat[f'{p}.ops_consumed']} "
                f"outcomes={flat[f'{p}.outcome_count']}"
            )
            if f"{p}.entanglement" in flat:
                line += f" entanglement={flat[f'{p}.entanglement']}"
            parts.append(line)
        parts.append("")
    parts.append("Partition map (. free, U occupied, P persisted, S scratch)")
    parts.append(partition_map(mainframe).rstrip("\n"))
    parts.append("")
    parts.append("Assumptions")
    for key in sorted(flat):
        if key.startswith("assumptions."):
            parts.append(f"  {key.removeprefix('assumptions.')} = {flat[key]}")
    checks = sorted(k for k in flat if k.startswith("check."))
    if checks:
        parts.append("")
        parts.append("Checks")
        indices = sorted({k.split(".")[1] for k in checks}, key=int)
        for i in indices:
            parts.append(
                f"  [{flat[f'check.{i}.result']}] {flat[f'check.{i}.key']} "
                f"{flat[f'check.{i}.op']} {flat[f'check.{i}.expected']} "
                f"(actual {flat[f'check.{i}.actual']})"
            )
    parts.append("")
    return "\n".join(parts)
