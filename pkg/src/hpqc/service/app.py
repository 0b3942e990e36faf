"""HTTP service exposing the mainframe simulator.

State is an in-memory registry of mainframes, one lock each; every
handler body runs under its machine's lock so concurrent clients see a
serial event log.  Domain errors map onto 400/404/409 with a stable
``error`` code in the body.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass

from fastapi import FastAPI, Response
from fastapi.responses import JSONResponse

from .. import __version__, verify
from ..allocator import Mainframe, SessionMode, UserSession
from ..errors import HpqcError, ScenarioError, UnknownHandle
from ..geometry import CellCoord, LatticeDims, LogicalFootprint, Region, build_layout
from ..protocol import MeasurementInstruction, decode_stream
from ..report import event_digest
from ..resources import AncillaDemand, ChipCostModel, OperationsBudget, chip_estimate
from ..scenario import execute_scenario, load_scenario, parse_scenario
from ..stabilizer import PauliBasis
from . import schemas

# codes not listed here answer 400
_CONFLICT = {
    "InvalidState", "CapacityExceeded", "NoCorridorAvailable", "AlreadyMeasured",
    "BudgetExhausted", "AncillaBudgetExceeded", "MainframeNotReady",
}


def _status_for(code: str) -> int:
    if code == "UnknownHandle":
        return 404
    if code in _CONFLICT:
        return 409
    return 400


@dataclass
class _Entry:
    mainframe: Mainframe
    lock: threading.Lock


class MainframeStore:
    def __init__(self) -> None:
        self._entries: dict[str, _Entry] = {}
        self._registry_lock = threading.Lock()
        self._counter = 0

    def add(self, mainframe: Mainframe) -> str:
        with self._registry_lock:
            self._counter += 1
            mid = f"m{self._counter:04d}"
            self._entries[mid] = _Entry(mainframe, threading.Lock())
            return mid

    def ids(self) -> list[str]:
        with self._registry_lock:
            return sorted(self._entries)

    def drop(self, mid: str) -> None:
        with self._registry_lock:
            if mid not in self._entries:
                raise UnknownHandle(f"unknown mainframe {mid!r}")
            del self._entries[mid]

    @contextmanager
    def locked(self, mid: str):
        with self._registry_lock:
            entry = self._entries.get(mid)
        if entry is None:
            raise UnknownHandle(f"unknown mainframe {mid!r}")
        with entry.lock:
            yield entry.mainframe


def _region_model(region: Region | None) -> schemas.RegionModel | None:
    if region is None:
        return None
    return schemas.RegionModel(
        x=region.origin.x, y=region.origin.y, z=region.origin.z,
        width=region.dims.width, depth=region.dims.depth,
        layers=region.dims.layers,
    )


def _cell_model(cell: CellCoord) -> schemas.CellModel:
    return schemas.CellModel(x=cell.x, y=cell.y, z=cell.z)


def _session_info(mainframe: Mainframe, session: UserSession) -> schemas.SessionInfo:
    entanglement = None
    if mainframe.tableau is not None and session.region is not None:
        try:
            entanglement = mainframe.session_entanglement(session.session_id)
        except HpqcError:
            entanglement = None
    return schemas.SessionInfo(
        session_id=session.session_id,
        user_id=session.user_id,
        mode=session.mode.value,
        state=session.state.value,
        slot_ids=list(session.slot_ids),
        region=_region_model(session.region),
        boundary_severed=session.boundary_severed,
        ops_consumed=session.ops_consumed,
        ancilla_used_a=session.ancilla_used_a,
        ancilla_used_y=session.ancilla_used_y,
        outcome_count=len(session.outcomes),
        entanglement=entanglement,
    )


def _mainframe_info(mid: str, mainframe: Mainframe) -> schemas.MainframeInfo:
    dims = mainframe.dims
    slots = mainframe.slot_summary()
    return schemas.MainframeInfo(
        mainframe_id=mid,
        width=dims.width,
        depth=dims.depth,
        layers=dims.layers,
        cells=dims.cell_count,
        desk_scale=mainframe.tableau is not None,
        slots_total=slots["total"],
        slots_free=slots["free"],
        slots_occupied=slots["occupied"],
        slots_persisted=slots["persisted"],
        current_layer=mainframe.current_layer,
        budget_total_ops=mainframe.budget.total_ops,
        budget_consumed_ops=mainframe.budget.consumed_ops,
    )


def _parse_stream_request(body: schemas.StreamRequest) -> list[MeasurementInstruction]:
    has_list = body.instructions is not None
    has_text = body.stream_text is not None
    if has_list == has_text:
        raise ScenarioError("provide exactly one of instructions or stream_text")
    if has_text:
        return decode_stream(body.stream_text.encode("utf-8"))
    return [
        MeasurementInstruction(CellCoord(i.x, i.y, i.z), PauliBasis(i.basis))
        for i in body.instructions
    ]


def create_app() -> FastAPI:
    app = FastAPI(title="hpqc mainframe service", version=__version__)
    store = MainframeStore()
    app.state.store = store

    @app.exception_handler(HpqcError)
    async def domain_error(request, exc: HpqcError):
        return JSONResponse(
            status_code=_status_for(exc.code),
            content=schemas.ErrorBody(error=exc.code, detail=str(exc)).model_dump(),
        )

    @app.exception_handler(ValueError)
    async def value_error(request, exc: ValueError):
        return JSONResponse(
            status_code=400,
            content=schemas.ErrorBody(error="ValueError", detail=str(exc)).model_dump(),
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/estimate", response_model=schemas.EstimateResponse)
    def estimate(body: schemas.EstimateRequest):
        dims = LatticeDims(body.width, body.depth)
        model = ChipCostModel(
            body.chips_per_logical,
            LogicalFootprint(body.footprint_width, body.footprint_depth),
        )
        est = chip_estimate(dims, model)
        # whole tiles only; an estimate never raises on an oversized footprint
        logical = (dims.width // model.footprint.width) * (
            dims.depth // model.footprint.depth
        )
        return schemas.EstimateResponse(
            cells=dims.footprint_cells,
            chips=est.chips,
            approximate=est.approximate,
            logical_qubits=logical,
        )

    @app.post("/verify", response_model=schemas.VerifyResponse)
    def run_verify(body: schemas.VerifyRequest):
        checks = verify.run_suites(body.suite, body.trials, body.seed)
        return schemas.VerifyResponse(
            ok=all(c.passed for c in checks),
            checks=[
                schemas.CheckModel(
                    suite=c.suite, name=c.name, passed=c.passed,
                    count=c.count, detail=c.detail,
                )
                for c in checks
            ],
        )

    @app.post("/scenarios/run", response_model=schemas.ScenarioRunResponse)
    def run_scenario(body: schemas.ScenarioRunRequest):
        if (body.scenario is None) == (body.name is None):
            raise ScenarioError("provide exactly one of scenario or name")
        if body.name is not None:
            path = verify.bundled_scenario_path(body.name)
            if not path.is_file():
                raise UnknownHandle(f"no bundled scenario named {body.name!r}")
            scenario = load_scenario(path)
        else:
            scenario = parse_scenario(body.scenario)
        outcome = execute_scenario(scenario, seed_override=body.seed)
        report = (
            outcome.machine_report() if body.format == "machine"
            else outcome.text_report()
        )
        return schemas.ScenarioRunResponse(
            ok=outcome.ok, failures=list(outcome.failures), report=report
        )

    @app.post("/mainframes", response_model=schemas.MainframeInfo, status_code=201)
    def create_mainframe(body: schemas.MainframeCreateRequest):
        layout = build_layout(
            body.user_count,
            LatticeDims(body.region_width, body.region_depth),
            scratch_width_in_user_regions=body.scratch_width_in_user_regions,
            users_per_column=body.users_per_column,
            layers=body.layers,
        )
        mainframe = Mainframe(
            layout,
            model=ChipCostModel(
                body.chips_per_logical,
                LogicalFootprint(body.footprint_width, body.footprint_depth),
            ),
            budget=OperationsBudget(total_ops=body.total_ops),
            seed=body.seed,
            enable_tableau=body.enable_tableau,
        )
        mid = store.add(mainframe)
        return _mainframe_info(mid, mainframe)

    @app.get("/mainframes", response_model=list[schemas.MainframeInfo])
    def list_mainframes():
        infos = []
        for mid in store.ids():
            with store.locked(mid) as mainframe:
                infos.append(_mainframe_info(mid, mainframe))
        return infos

    @app.get("/mainframes/{mid}", response_model=schemas.MainframeInfo)
    def get_mainframe(mid: str):
        with store.locked(mid) as mainframe:
            return _mainframe_info(mid, mainframe)

    @app.delete("/mainframes/{mid}", status_code=204)
    def delete_mainframe(mid: str):
        store.drop(mid)
        return Response(status_code=204)

    @app.get("/mainframes/{mid}/report")
    def mainframe_report_route(mid: str, format: str = "machine"):
        from ..report import mainframe_flat_report, render_machine, render_text

        with store.locked(mid) as mainframe:
            flat = mainframe_flat_report(mainframe)
            if format == "text":
                text = render_text(mainframe, flat, f"mainframe {mid}")
            else:
                text = render_machine(flat)
        return Response(content=text, media_type="text/plain; charset=utf-8")

    @app.get("/mainframes/{mid}/layout")
    def layout_document(mid: str):
        with store.locked(mid) as mainframe:
            return mainframe.layout.to_dict()

    @app.get("/mainframes/{mid}/events", response_model=schemas.EventLogResponse)
    def event_log(mid: str):
        with store.locked(mid) as mainframe:
            lines = mainframe.event_log_lines()
        return schemas.EventLogResponse(lines=lines, digest=event_digest(lines))

    @app.get("/mainframes/{mid}/feasibility", response_model=schemas.FeasibilityResponse)
    def feasibility(mid: str, rate_a: int = 0, rate_y: int = 0,
                    distill_volume_a: int = 50_000, distill_volume_y: int = 50_000):
        demand = AncillaDemand(rate_a, rate_y, distill_volume_a, distill_volume_y)
        with store.locked(mid) as mainframe:
            report = mainframe.scratch_feasibility(demand)
        return schemas.FeasibilityResponse(
            scratch_cells_per_layer=report.scratch_cells_per_layer,
            demand_cells_per_layer=report.demand_cells_per_layer,
            feasible=report.feasible,
            max_rate_a=report.max_rate_a,
            max_rate_y=report.max_rate_y,
            utilization=report.utilization,
        )

    @app.post("/mainframes/{mid}/sessions", response_model=schemas.SessionInfo,
              status_code=201)
    def admit(mid: str, body: schemas.AdmitRequest):
        with store.locked(mid) as mainframe:
            session = mainframe.admit(
                body.user_id, SessionMode(body.mode), body.logical_qubits,
                ancilla_a=body.ancilla_a, ancilla_y=body.ancilla_y,
            )
            return _session_info(mainframe, session)

    @app.get("/mainframes/{mid}/sessions/{sid}", response_model=schemas.SessionInfo)
    def session_info(mid: str, sid: str):
        with store.locked(mid) as mainframe:
            return _session_info(mainframe, mainframe._session(sid))

    @app.post("/mainframes/{mid}/sessions/{sid}/allocate",
              response_model=schemas.SessionInfo)
    def allocate(mid: str, sid: str, body: schemas.AllocateRequest):
        with store.locked(mid) as mainframe:
            mainframe.allocate(sid, body.logical_qubits)
            return _session_info(mainframe, mainframe._session(sid))

    @app.post("/mainframes/{mid}/sessions/{sid}/sever",
              response_model=schemas.SeverResponse)
    def sever(mid: str, sid: str):
        with store.locked(mid) as mainframe:
            plan = mainframe.sever(sid)
            return schemas.SeverResponse(
                session=_session_info(mainframe, mainframe._session(sid)),
                cells_planned=len(plan),
            )

    @app.post("/mainframes/{mid}/sessions/{sid}/grow",
              response_model=schemas.SessionInfo)
    def grow(mid: str, sid: str, body: schemas.GrowRequest):
        with store.locked(mid) as mainframe:
            mainframe.grow(sid, body.extra_logical_qubits)
            return _session_info(mainframe, mainframe._session(sid))

    @app.post("/mainframes/{mid}/sessions/{sid}/logoff",
              response_model=schemas.LogoffResponse)
    def logoff(mid: str, sid: str, body: schemas.LogoffRequest):
        with store.locked(mid) as mainframe:
            record = mainframe.logoff(sid, persist=body.persist)
            return schemas.LogoffResponse(
                session=_session_info(mainframe, mainframe._session(sid)),
                handle=record.handle if record else None,
                stored_logical_qubits=record.stored_logical_qubits if record else None,
            )

    @app.post("/mainframes/{mid}/sessions/{sid}/reattach",
              response_model=schemas.SessionInfo)
    def reattach(mid: str, sid: str, body: schemas.ReattachRequest):
        with store.locked(mid) as mainframe:
            mainframe.reattach(body.handle, sid)
            return _session_info(mainframe, mainframe._session(sid))

    @app.post("/mainframes/{mid}/sessions/{sid}/stream",
              response_model=schemas.StreamResponse)
    def stream(mid: str, sid: str, body: schemas.StreamRequest):
        instructions = _parse_stream_request(body)
        with store.locked(mid) as mainframe:
            session = mainframe._session(sid)
            secure = (
                body.secure if body.secure is not None
                else session.mode is SessionMode.SECURE
            )
            result = mainframe.run_stream(sid, instructions, secure=secure)
        return schemas.StreamResponse(
            outcomes=list(result.outcomes),
            deterministic=list(result.deterministic),
            nonclifford=list(result.nonclifford),
            ops_consumed=result.ops_consumed,
        )

    @app.post("/mainframes/{mid}/sessions/{sid}/descriptor",
              response_model=schemas.DescriptorResponse)
    def descriptor(mid: str, sid: str):
        with store.locked(mid) as mainframe:
            desc = mainframe.descriptor(sid)
        return schemas.DescriptorResponse(
            descriptor=desc.serialize().decode("utf-8"),
            emission_cells=len(desc.emission_order()),
        )

    @app.post("/mainframes/{mid}/bell", response_model=schemas.BellResponse)
    def bell(mid: str, body: schemas.BellRequest):
        with store.locked(mid) as mainframe:
            result = mainframe.bell_broker(body.session_a, body.session_b)
        return schemas.BellResponse(
            corridor=_region_model(result.corridor),
            retained={k: _cell_model(v) for k, v in result.retained.items()},
            mates={k: _cell_model(v) for k, v in result.mates.items()},
            cells_measured=result.cells_measured,
        )

    @app.post("/mainframes/{mid}/advance", response_model=schemas.MainframeInfo)
    def advance(mid: str, body: schemas.AdvanceRequest):
        with store.locked(mid) as mainframe:
            mainframe.advance_layers(body.layers)
            return _mainframe_info(mid, mainframe)

    return app


app = create_app()

if __name__ == "__main__":
    import uvicorn

    uvicorn.run("hpqc.service.app:app", host="127.0.0.1", port=8000)
