"""Command line front end.

Exit codes: 0 success, 1 a scenario or verification failed, 2 malformed
input (bad arguments, unreadable or inconsistent scenario files).  The
HPQC_SEED environment variable supplies the default seed.  With
--server the command is forwarded to a running service instead of
executing in-process; output and exit codes stay the same.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

from .errors import HpqcError, ScenarioError, ScenarioFailure
from .geometry import LatticeDims, LogicalFootprint
from .resources import ChipCostModel, chip_estimate
from .scenario import execute_scenario, load_scenario
from .verify import SUITES, bundled_scenario_path, run_suites

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_MALFORMED = 2

_FOOTPRINT = re.compile(r"^([1-9][0-9]*)x([1-9][0-9]*)$")


def _env_seed() -> int | None:
    raw = os.environ.get("HPQC_SEED")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"hpqc: HPQC_SEED must be an integer, got {raw!r}")


def _parse_footprint(text: str) -> LogicalFootprint:
    m = _FOOTPRINT.match(text)
    if not m:
        raise ValueError(f"footprint must look like 20x40, got {text!r}")
    return LogicalFootprint(int(m.group(1)), int(m.group(2)))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hpqc",
        description="Multi-tenant topological-cluster mainframe simulator",
    )
    parser.add_argument(
        "--server", metavar="URL", default=None,
        help="forward the command to a running service at URL",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="chip and capacity arithmetic")
    est.add_argument("--width", type=int, required=True)
    est.add_argument("--depth", type=int, required=True)
    est.add_argument("--footprint", default="20x40", metavar="WxD")
    est.add_argument("--chips-per-logical", type=int, default=3000)

    run = sub.add_parser("run", help="execute a scenario file")
    run.add_argument("scenario", help="path to a scenario, or a bundled name")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument(
        "--format", choices=("text", "machine"), default="text",
        help="report flavor printed on success (default text)",
    )
    run.add_argument(
        "--report", metavar="PATH", default=None,
        help="also write the machine report to PATH",
    )

    ver = sub.add_parser("verify", help="run property suites")
    ver.add_argument("--suite", choices=SUITES + ("all",), default="all")
    ver.add_argument("--trials", type=int, default=200)
    ver.add_argument("--seed", type=int, default=None)

    srv = sub.add_parser("serve", help="start the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)

    return parser


# -- local execution ---------------------------------------------------------

def _cmd_estimate(args: argparse.Namespace) -> int:
    try:
        footprint = _parse_footprint(args.footprint)
        dims = LatticeDims(args.width, args.depth)
        model = ChipCostModel(args.chips_per_logical, footprint)
    except ValueError as exc:
        print(f"hpqc: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    est = chip_estimate(dims, model)
    logical = (dims.width // footprint.width) * (dims.depth // footprint.depth)
    print(f"cells={dims.footprint_cells}")
    print(f"chips={est.chips}")
    print(f"approximate={'true' if est.approximate else 'false'}")
    print(f"logical={logical}")
    return EXIT_OK


def _resolve_scenario(ref: str) -> Path:
    path = Path(ref)
    if path.is_file():
        return path
    if "/" not in ref and not ref.endswith(".json"):
        bundled = bundled_scenario_path(ref)
        if bundled.is_file():
            return bundled
    raise ScenarioError(f"scenario file not found: {ref}")


def _cmd_run(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _env_seed()
    try:
        scenario = load_scenario(_resolve_scenario(args.scenario))
        outcome = execute_scenario(scenario, seed_override=seed)
    except ScenarioFailure as exc:
        print(f"hpqc: scenario failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except ScenarioError as exc:
        print(f"hpqc: malformed scenario: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except HpqcError as exc:
        print(f"hpqc: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    if args.report:
        Path(args.report).write_text(outcome.machine_report(), encoding="utf-8")
    print(outcome.text_report() if args.format == "text" else outcome.machine_report())
    if not outcome.ok:
        for failure in outcome.failures:
            print(f"hpqc: check failed: {failure}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else (_env_seed() or 0)
    if args.trials < 0:
        print("hpqc: --trials must be >= 0", file=sys.stderr)
        return EXIT_MALFORMED
    checks = run_suites(args.suite, args.trials, seed)
    for check in checks:
        print(check.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_FAILED if failed else EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


# -- thin client -------------------------------------------------------------

def _post(server: str, route: str, payload: dict):
    import httpx

    response = httpx.post(server.rstrip("/") + route, json=payload, timeout=600.0)
    return response


def _remote_estimate(args: argparse.Namespace) -> int:
    try:
        footprint = _parse_footprint(args.footprint)
    except ValueError as exc:
        print(f"hpqc: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    response = _post(args.server, "/estimate", {
        "width": args.width, "depth": args.depth,
        "footprint_width": footprint.width, "footprint_depth": footprint.depth,
        "chips_per_logical": args.chips_per_logical,
    })
    if response.status_code != 200:
        print(f"hpqc: server rejected estimate: {response.text}", file=sys.stderr)
        return EXIT_MALFORMED
    body = response.json()
    for key, label in (
        ("cells", "cells"), ("chips", "chips"),
        ("approximate", "approximate"), ("logical_qubits", "logical"),
    ):
        value = body[key]
        if isinstance(value, bool):
            value = "true" if value else "false"
        print(f"{label}={value}")
    return EXIT_OK


def _remote_run(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _env_seed()
    try:
        path = _resolve_scenario(args.scenario)
        doc = json.loads(path.read_text(encoding="utf-8"))
    except ScenarioError as exc:
        print(f"hpqc: malformed scenario: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (OSError, json.JSONDecodeError) as exc:
        print(f"hpqc: malformed scenario: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    response = _post(args.server, "/scenarios/run", {
        "scenario": doc, "seed": seed, "format": args.format,
    })
    if response.status_code != 200:
        body = response.json()
        code = body.get("error", "")
        print(f"hpqc: {code}: {body.get('detail', response.text)}", file=sys.stderr)
        return EXIT_MALFORMED if code == "ScenarioError" else EXIT_FAILED
    body = response.json()
    if args.report:
        Path(args.report).write_text(body["report"], encoding="utf-8")
    print(body["report"])
    if not body["ok"]:
        for failure in body["failures"]:
            print(f"hpqc: check failed: {failure}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def _remote_verify(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else (_env_seed() or 0)
    response = _post(args.server, "/verify", {
        "suite": args.suite, "trials": args.trials, "seed": seed,
    })
    if response.status_code != 200:
        print(f"hpqc: server rejected verify: {response.text}", file=sys.stderr)
        return EXIT_MALFORMED
    body = response.json()
    for check in body["checks"]:
        status = "pass" if check["passed"] else "FAIL"
        extra = f" ({check['detail']})" if check["detail"] else ""
        print(f"[{status}] {check['suite']}.{check['name']}: "
              f"{check['count']} checks{extra}")
    return EXIT_OK if body["ok"] else EXIT_FAILED


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.server and args.command in ("estimate", "run", "verify"):
        import httpx

        handler = {
            "estimate": _remote_estimate, "run": _remote_run,
            "verify": _remote_verify,
        }[args.command]
        try:
            return handler(args)
        except httpx.HTTPError as exc:
            print(f"hpqc: cannot reach server: {exc}", file=sys.stderr)
            return EXIT_MALFORMED
    handler = {
        "estimate": _cmd_estimate, "run": _cmd_run,
        "verify": _cmd_verify, "serve": _cmd_serve,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
