"""Command line front end.

Every subcommand is a thin client over the HTTP service: the scene file
is parsed locally (so malformed input fails fast with exit code 3), the
request is sent to the FastAPI app, and the JSON response is printed to
stdout in canonical form.  By default the app runs in-process through an
ASGI transport; ``--server`` points the same requests at a remote
instance started with ``qgi serve``.

Exit codes:
    0  success
    1  validation violations reported
    2  degenerate geometry (or other geometric refusal by the service)
    3  unreadable scene, parse error, or schema error
    4  invariance broken during fuzzing
    70 transport failure or unexpected service response
"""

from __future__ import annotations

import argparse
import asyncio
import math
import os
import sys
from pathlib import Path

import httpx

from ._version import VERSION
from .errors import ParseError, SchemaError
from .fuzz import MoveKind
from .scene import canonical_dumps, parse_scene
from .service import create_app
from .svg import atomic_write_text

__all__ = ["main"]

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_DEGENERATE = 2
EXIT_PARSE = 3
EXIT_BROKEN = 4
EXIT_TRANSPORT = 70

_TOLERANCE_ENV = "QGI_TOLERANCE"


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_scene_payload(path_str: str) -> dict:
    """Read and locally validate a scene file; SystemExit(3) on bad input."""
    path = Path(path_str)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise SystemExit(_fail(EXIT_PARSE, f"cannot read {path}: {exc}"))
    try:
        doc = parse_scene(raw)
    except (ParseError, SchemaError) as exc:
        raise SystemExit(_fail(EXIT_PARSE, f"{path}: {exc}"))
    override = os.environ.get(_TOLERANCE_ENV)
    if override is not None:
        try:
            tol = float(override)
        except ValueError:
            raise SystemExit(
                _fail(EXIT_PARSE, f"{_TOLERANCE_ENV} is not a number: {override!r}")
            )
        if not math.isfinite(tol) or tol <= 0.0:
            raise SystemExit(
                _fail(EXIT_PARSE, f"{_TOLERANCE_ENV} must be a positive finite number")
            )
        doc = doc.model_copy(update={"tolerance": tol})
    return doc.model_dump(mode="json")


def _post(args: argparse.Namespace, path: str, payload: dict) -> tuple[int, dict]:
    """POST to the service, remotely or in-process; (status, body)."""
    try:
        if getattr(args, "server", None):
            with httpx.Client(base_url=args.server, timeout=300.0) as client:
                response = client.post(path, json=payload)
        else:

            async def _call() -> httpx.Response:
                transport = httpx.ASGITransport(app=create_app())
                async with httpx.AsyncClient(
                    transport=transport, base_url="http://qgi"
                ) as client:
                    return await client.post(path, json=payload)

            response = asyncio.run(_call())
        body = response.json()
    except (httpx.HTTPError, ValueError) as exc:
        raise SystemExit(_fail(EXIT_TRANSPORT, f"service request failed: {exc}"))
    return response.status_code, body


def _handle_error_status(status: int, body: dict) -> int:
    """Map a non-200 service response to a diagnostic and an exit code."""
    kind = body.get("kind")
    message = body.get("message")
    if kind is None and "detail" in body:
        # request-body validation error from the framework itself
        kind = "schema"
        detail = body["detail"]
        if isinstance(detail, list):
            message = "; ".join(str(item.get("msg", item)) for item in detail[:3])
        else:
            message = str(detail)
    kind = kind or "unexpected"
    message = message or canonical_dumps(body)
    code = {
        "degenerate": EXIT_DEGENERATE,
        "no-admissible-move": EXIT_DEGENERATE,
        "not-time-ordered": EXIT_DEGENERATE,
        "schema": EXIT_PARSE,
    }.get(kind)
    if code is None:
        code = EXIT_PARSE if status in (400, 422) else EXIT_TRANSPORT
    return _fail(code, f"{kind}: {message}")


def _emit(body: dict) -> None:
    sys.stdout.write(canonical_dumps(body) + "\n")


def cmd_validate(args: argparse.Namespace) -> int:
    payload = {"scene": _load_scene_payload(args.scene)}
    status, body = _post(args, "/validate", payload)
    if status != 200:
        return _handle_error_status(status, body)
    _emit(body)
    return EXIT_OK if body["ok"] else EXIT_VIOLATIONS


def cmd_invariants(args: argparse.Namespace) -> int:
    payload: dict = {"scene": _load_scene_payload(args.scene)}
    if args.axis != "all":
        payload["axes"] = [int(args.axis)]
    if args.pregeneric is not None:
        payload["pregeneric_seed"] = args.pregeneric
    status, body = _post(args, "/invariants", payload)
    if status != 200:
        return _handle_error_status(status, body)
    _emit(body)
    return EXIT_OK if body["validation"]["ok"] else EXIT_VIOLATIONS


def cmd_fuzz(args: argparse.Namespace) -> int:
    payload: dict = {
        "scene": _load_scene_payload(args.scene),
        "steps": args.steps,
        "seed": args.seed,
    }
    if args.moves is not None:
        payload["moves"] = args.moves.split(",")
    if args.adversarial:
        payload["adversarial"] = True
    status, body = _post(args, "/fuzz", payload)
    if status != 200:
        return _handle_error_status(status, body)
    _emit(body)
    if "broken" in body:
        return EXIT_BROKEN
    if "validation" in body:
        return EXIT_VIOLATIONS
    return EXIT_OK


def cmd_diagram(args: argparse.Namespace) -> int:
    payload = {"scene": _load_scene_payload(args.scene), "plane": args.plane}
    status, body = _post(args, "/diagram", payload)
    if status != 200:
        return _handle_error_status(status, body)
    atomic_write_text(Path(args.out), body["svg"])
    _emit({"out": args.out, "plane": body["plane"]})
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgi",
        description="Validate scenes and compute their topological invariants.",
    )
    parser.add_argument("--version", action="version", version=f"qgi {VERSION}")
    remote = argparse.ArgumentParser(add_help=False)
    remote.add_argument(
        "--server",
        metavar="URL",
        default=None,
        help="base URL of a running service (default: run in-process)",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser(
        "validate", parents=[remote], help="check a scene and report violations"
    )
    s.add_argument("scene", help="path to a scene JSON file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser(
        "invariants", parents=[remote], help="compute the invariant report"
    )
    s.add_argument("scene", help="path to a scene JSON file")
    s.add_argument(
        "--axis",
        choices=["0", "1", "2", "3", "all"],
        default="all",
        help="restrict surface linking to one axis (default: all)",
    )
    s.add_argument(
        "--pregeneric",
        type=int,
        metavar="SEED",
        default=None,
        help="apply a seeded generic spatial rotation before computing",
    )
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser(
        "fuzz", parents=[remote], help="apply random admissible moves and recheck"
    )
    s.add_argument("scene", help="path to a scene JSON file")
    s.add_argument("--steps", type=int, required=True, help="number of moves to try")
    s.add_argument("--seed", type=int, required=True, help="run seed")
    s.add_argument(
        "--moves",
        metavar="LIST",
        default=None,
        help="comma-separated move kinds (default: all): "
        + ",".join(k.value for k in MoveKind),
    )
    s.add_argument(
        "--adversarial",
        action="store_true",
        help="inflate proposal sizes so the checker rejects more steps",
    )
    s.set_defaults(func=cmd_fuzz)

    s = sub.add_parser(
        "diagram", parents=[remote], help="render a projected diagram to SVG"
    )
    s.add_argument("scene", help="path to a scene JSON file")
    s.add_argument(
        "--plane", type=int, choices=[1, 2, 3], required=True, help="projection plane"
    )
    s.add_argument("--out", required=True, help="output SVG path (written atomically)")
    s.set_defaults(func=cmd_diagram)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    s.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
