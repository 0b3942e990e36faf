"""HTTP surface: status codes, error mapping, request validation."""

import re

import pytest
from fastapi.testclient import TestClient

import hpqc
from hpqc.service import create_app

DESK = {
    "user_count": 2,
    "region_width": 4,
    "region_depth": 4,
    "users_per_column": 1,
    "footprint_width": 2,
    "footprint_depth": 2,
    "seed": 7,
}


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


def make_desk(client, **overrides):
    payload = dict(DESK)
    payload.update(overrides)
    response = client.post("/mainframes", json=payload)
    assert response.status_code == 201, response.text
    return response.json()


def admit(client, mid, mode="trusted", qubits=4, user="ann"):
    response = client.post(
        f"/mainframes/{mid}/sessions",
        json={"user_id": user, "mode": mode, "logical_qubits": qubits},
    )
    assert response.status_code == 201, response.text
    return response.json()


def test_health_reports_package_version(client):
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["version"] == hpqc.__version__


def test_estimate_exact_division(client):
    response = client.post("/estimate", json={"width": 1000, "depth": 1000})
    body = response.json()
    assert response.status_code == 200
    assert body["chips"] == 3_750_000
    assert body["approximate"] is False
    assert body["logical_qubits"] == 1250
    assert body["cells"] == 1_000_000


def test_estimate_rounds_up_and_flags(client):
    response = client.post(
        "/estimate",
        json={"width": 9, "depth": 10, "footprint_width": 2,
              "footprint_depth": 2, "chips_per_logical": 1},
    )
    body = response.json()
    assert body["approximate"] is True
    assert body["chips"] == 23


def test_estimate_never_rejects_oversized_footprints(client):
    response = client.post("/estimate", json={"width": 3, "depth": 3})
    assert response.status_code == 200
    assert response.json()["logical_qubits"] == 0


def test_estimate_validates_field_ranges(client):
    response = client.post("/estimate", json={"width": 0, "depth": 5})
    assert response.status_code == 422


def test_create_get_list_delete_mainframe(client):
    info = make_desk(client)
    mid = info["mainframe_id"]
    assert info["cells"] == 64
    assert info["desk_scale"] is True
    assert info["slots_total"] > 0
    assert info["slots_free"] == info["slots_total"]

    assert client.get(f"/mainframes/{mid}").json() == info
    assert mid in [m["mainframe_id"] for m in client.get("/mainframes").json()]

    assert client.delete(f"/mainframes/{mid}").status_code == 204
    assert client.get(f"/mainframes/{mid}").status_code == 404


def test_unknown_mainframe_maps_to_404(client):
    response = client.get("/mainframes/m9999")
    assert response.status_code == 404
    assert response.json()["error"] == "UnknownHandle"


def test_admit_allocate_stream_happy_path(client):
    mid = make_desk(client)["mainframe_id"]
    session = admit(client, mid)
    sid = session["session_id"]
    assert session["state"] == "admitted"

    allocated = client.post(f"/mainframes/{mid}/sessions/{sid}/allocate", json={})
    assert allocated.status_code == 200
    assert allocated.json()["state"] == "allocated"
    assert allocated.json()["region"] is not None

    streamed = client.post(
        f"/mainframes/{mid}/sessions/{sid}/stream",
        json={"instructions": [{"x": 1, "y": 1, "basis": "Z"}]},
    )
    assert streamed.status_code == 200
    body = streamed.json()
    assert body["outcomes"] in ([1], [-1])
    assert body["ops_consumed"] == 1

    fetched = client.get(f"/mainframes/{mid}/sessions/{sid}").json()
    assert fetched["state"] == "running"
    assert fetched["outcome_count"] == 1


def test_stream_accepts_wire_format_text(client):
    mid = make_desk(client)["mainframe_id"]
    sid = admit(client, mid)["session_id"]
    client.post(f"/mainframes/{mid}/sessions/{sid}/allocate", json={})
    response = client.post(
        f"/mainframes/{mid}/sessions/{sid}/stream",
        json={"stream_text": "HPQC-MS 1\n1,1,0,Z\n2,1,0,X\n"},
    )
    assert response.status_code == 200
    assert len(response.json()["outcomes"]) == 2


def test_stream_requires_exactly_one_source(client):
    mid = make_desk(client)["mainframe_id"]
    sid = admit(client, mid)["session_id"]
    client.post(f"/mainframes/{mid}/sessions/{sid}/allocate", json={})
    for payload in (
        {},
        {"stream_text": "HPQC-MS 1\n", "instructions": []},
    ):
        response = client.post(
            f"/mainframes/{mid}/sessions/{sid}/stream", json=payload
        )
        assert response.status_code == 400
        assert "exactly one" in response.json()["detail"]


def test_malformed_wire_text_maps_to_400(client):
    mid = make_desk(client)["mainframe_id"]
    sid = admit(client, mid)["session_id"]
    client.post(f"/mainframes/{mid}/sessions/{sid}/allocate", json={})
    response = client.post(
        f"/mainframes/{mid}/sessions/{sid}/stream",
        json={"stream_text": "HPQC-MS 1\n01,2,0,Z\n"},
    )
    assert response.status_code == 400
    assert response.json()["error"] == "MalformedRecord"


def test_state_violation_maps_to_409(client):
    mid = make_desk(client)["mainframe_id"]
    sid = admit(client, mid)["session_id"]
    response = client.post(
        f"/mainframes/{mid}/sessions/{sid}/stream",
        json={"instructions": [{"x": 0, "y": 0, "basis": "Z"}]},
    )
    assert response.status_code == 409
    assert response.json()["error"] == "InvalidState"


def test_secure_session_requires_descriptor_before_streaming(client):
    mid = make_desk(client)["mainframe_id"]
    sid = admit(client, mid, mode="secure")["session_id"]
    client.post(f"/mainframes/{mid}/sessions/{sid}/allocate", json={})
    severed = client.post(f"/mainframes/{mid}/sessions/{sid}/sever")
    assert severed.status_code == 200
    assert severed.json()["session"]["boundary_severed"] is True
    assert severed.json()["cells_planned"] > 0

    blocked = client.post(
        f"/mainframes/{mid}/sessions/{sid}/stream",
        json={"instructions": [{"x": 1, "y": 1, "basis": "Z"}]},
    )
    assert blocked.status_code == 409

    issued = client.post(f"/mainframes/{mid}/sessions/{sid}/descriptor")
    assert issued.status_code == 200
    assert issued.json()["descriptor"].startswith("HPQC-SD 1\n")
    assert issued.json()["emission_cells"] > 0

    allowed = client.post(
        f"/mainframes/{mid}/sessions/{sid}/stream",
        json={"instructions": [{"x": 1, "y": 1, "basis": "Z"}]},
    )
    assert allowed.status_code == 200


def test_grow_logoff_reattach_round_trip(client):
    mid = make_desk(client)["mainframe_id"]
    sid = admit(client, mid)["session_id"]
    client.post(f"/mainframes/{mid}/sessions/{sid}/allocate", json={})
    client.post(
        f"/mainframes/{mid}/sessions/{sid}/stream",
        json={"instructions": [{"x": 1, "y": 1, "basis": "Z"}]},
    )
    logged = client.post(
        f"/mainframes/{mid}/sessions/{sid}/logoff", json={"persist": True}
    )
    assert logged.status_code == 200
    handle = logged.json()["handle"]
    assert handle is not None
    assert logged.json()["stored_logical_qubits"] == 4
    assert logged.json()["session"]["state"] == "persisted_logoff"

    sid2 = admit(client, mid, user="ann-back")["session_id"]
    reattached = client.post(
        f"/mainframes/{mid}/sessions/{sid2}/reattach", json={"handle": handle}
    )
    assert reattached.status_code == 200
    assert reattached.json()["state"] == "allocated"

    # the handle is single use
    sid3 = admit(client, mid, user="imposter")["session_id"]
    reuse = client.post(
        f"/mainframes/{mid}/sessions/{sid3}/reattach", json={"handle": handle}
    )
    assert reuse.status_code == 404


def test_grow_endpoint_extends_the_region(client):
    mid = make_desk(client, user_count=4, users_per_column=2)["mainframe_id"]
    sid = admit(client, mid)["session_id"]
    before = client.post(
        f"/mainframes/{mid}/sessions/{sid}/allocate", json={}
    ).json()["region"]
    grown = client.post(
        f"/mainframes/{mid}/sessions/{sid}/grow",
        json={"extra_logical_qubits": 4},
    )
    assert grown.status_code == 200
    after = grown.json()["region"]
    assert after["depth"] == before["depth"] * 2


def test_bell_endpoint_returns_corridor_and_mates(client):
    mid = make_desk(client)["mainframe_id"]
    sid_a = admit(client, mid, mode="secure", user="alice")["session_id"]
    sid_b = admit(client, mid, mode="secure", user="bob")["session_id"]
    client.post(f"/mainframes/{mid}/sessions/{sid_a}/allocate", json={})
    client.post(f"/mainframes/{mid}/sessions/{sid_b}/allocate", json={})
    response = client.post(
        f"/mainframes/{mid}/bell",
        json={"session_a": sid_a, "session_b": sid_b},
    )
    assert response.status_code == 200
    body = response.json()
    assert set(body["retained"]) == {sid_a, sid_b}
    assert set(body["mates"]) == {sid_a, sid_b}
    assert body["corridor"]["width"] > 0
    assert body["cells_measured"] > 0


def test_bell_with_missing_session_maps_to_404(client):
    mid = make_desk(client)["mainframe_id"]
    sid_a = admit(client, mid, user="alice")["session_id"]
    client.post(f"/mainframes/{mid}/sessions/{sid_a}/allocate", json={})
    response = client.post(
        f"/mainframes/{mid}/bell",
        json={"session_a": sid_a, "session_b": "s9999"},
    )
    assert response.status_code == 404


def test_advance_increments_layer_clock(client):
    mid = make_desk(client)["mainframe_id"]
    response = client.post(f"/mainframes/{mid}/advance", json={"layers": 3})
    assert response.status_code == 200
    assert response.json()["current_layer"] == 3


def test_report_machine_and_text_formats(client):
    mid = make_desk(client)["mainframe_id"]
    machine = client.get(f"/mainframes/{mid}/report")
    assert machine.status_code == 200
    assert machine.headers["content-type"].startswith("text/plain")
    assert "machine.cells=64" in machine.text.splitlines()

    text = client.get(f"/mainframes/{mid}/report", params={"format": "text"})
    assert text.status_code == 200
    assert f"mainframe {mid}" in text.text


def test_layout_document_endpoint(client):
    mid = make_desk(client)["mainframe_id"]
    response = client.get(f"/mainframes/{mid}/layout")
    assert response.status_code == 200
    doc = response.json()
    assert doc["global"] == {"width": 16, "depth": 4, "layers": 1}
    assert {r["kind"] for r in doc["regions"]} == {"user", "scratch"}
    assert all(
        set(r) == {"id", "kind", "origin", "dims"} for r in doc["regions"]
    )


def test_event_log_lines_and_digest(client):
    mid = make_desk(client)["mainframe_id"]
    sid = admit(client, mid)["session_id"]
    client.post(f"/mainframes/{mid}/sessions/{sid}/allocate", json={})
    response = client.get(f"/mainframes/{mid}/events")
    assert response.status_code == 200
    body = response.json()
    assert len(body["lines"]) == 2
    assert body["lines"][0].startswith("0,1,admit,")
    assert re.fullmatch(r"[0-9a-f]{64}", body["digest"])


def test_feasibility_endpoint_reads_query_params(client):
    mid = make_desk(client)["mainframe_id"]
    response = client.get(
        f"/mainframes/{mid}/feasibility",
        params={"rate_a": 0, "rate_y": 0},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["feasible"] is True
    assert body["demand_cells_per_layer"] == 0
    assert body["scratch_cells_per_layer"] > 0


def test_scenario_run_by_bundled_name(client):
    response = client.post(
        "/scenarios/run", json={"name": "two_users_bell"}
    )
    assert response.status_code == 200
    body = response.json()
    assert body["ok"] is True
    assert body["failures"] == []
    assert "scenario.name=two_users_bell" in body["report"].splitlines()


def test_scenario_run_inline_document(client):
    doc = {
        "name": "inline",
        "config": {
            "user_count": 2,
            "user_region": {"width": 4, "depth": 4},
            "users_per_column": 1,
            "footprint": {"width": 2, "depth": 2},
            "seed": 3,
        },
        "events": [
            {"kind": "admit", "session": "a", "user": "ann",
             "mode": "trusted", "logical_qubits": 4},
            {"kind": "allocate", "session": "a"},
        ],
        "checks": [{"key": "ledger.slots_occupied", "min": 1}],
    }
    response = client.post(
        "/scenarios/run", json={"scenario": doc, "format": "text"}
    )
    assert response.status_code == 200
    assert response.json()["ok"] is True
    assert "scenario inline" in response.json()["report"]


def test_scenario_run_unknown_bundled_name_is_404(client):
    response = client.post("/scenarios/run", json={"name": "no-such-thing"})
    assert response.status_code == 404


def test_scenario_run_requires_exactly_one_source(client):
    assert client.post("/scenarios/run", json={}).status_code == 400
    both = {"name": "two_users_bell", "scenario": {"name": "x"}}
    assert client.post("/scenarios/run", json=both).status_code == 400


def test_scenario_failure_reported_in_body_not_status(client):
    doc = {
        "name": "failing-check",
        "config": {
            "user_count": 2,
            "user_region": {"width": 4, "depth": 4},
            "users_per_column": 1,
            "footprint": {"width": 2, "depth": 2},
            "seed": 3,
        },
        "events": [],
        "checks": [{"key": "machine.cells", "equals": 1}],
    }
    response = client.post("/scenarios/run", json={"scenario": doc})
    assert response.status_code == 200
    assert response.json()["ok"] is False
    assert len(response.json()["failures"]) == 1


def test_verify_endpoint_runs_checks(client):
    response = client.post(
        "/verify", json={"suite": "protocol", "trials": 2, "seed": 5}
    )
    assert response.status_code == 200
    body = response.json()
    assert body["ok"] is True
    assert len(body["checks"]) >= 5
    assert all(c["suite"] == "protocol" for c in body["checks"])


def test_verify_zero_trials_is_vacuous_with_warning(client):
    response = client.post("/verify", json={"suite": "allocator", "trials": 0})
    body = response.json()
    assert response.status_code == 200
    assert body["ok"] is True
    assert body["checks"][0]["count"] == 0
    assert "warning" in body["checks"][0]["detail"]


def test_verify_rejects_unknown_suite(client):
    response = client.post("/verify", json={"suite": "everything"})
    assert response.status_code == 422


def test_budget_exhaustion_maps_to_409(client):
    mid = make_desk(client, total_ops=1)["mainframe_id"]
    sid = admit(client, mid)["session_id"]
    client.post(f"/mainframes/{mid}/sessions/{sid}/allocate", json={})
    response = client.post(
        f"/mainframes/{mid}/sessions/{sid}/stream",
        json={"instructions": [{"x": 1, "y": 1, "basis": "Z"},
                               {"x": 2, "y": 1, "basis": "Z"}]},
    )
    assert response.status_code == 409
    assert response.json()["error"] == "BudgetExhausted"


def test_out_of_region_instruction_maps_to_400(client):
    mid = make_desk(client)["mainframe_id"]
    sid = admit(client, mid)["session_id"]
    client.post(f"/mainframes/{mid}/sessions/{sid}/allocate", json={})
    response = client.post(
        f"/mainframes/{mid}/sessions/{sid}/stream",
        json={"instructions": [{"x": 99, "y": 0, "basis": "Z"}]},
    )
    assert response.status_code == 400
    assert response.json()["error"] == "OutOfRegion"
