"""FastAPI application wrapping the library.

The service is stateless: every request carries its scene.  Geometry
problems map to structured error bodies rather than tracebacks, with
one exception code per failure family so clients can branch without
string matching.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .._version import VERSION
from ..errors import (
    DegenerateGeometry,
    InvarianceBroken,
    NoAdmissibleMove,
    NotTimeOrdered,
    SchemaError,
)
from ..fuzz import fuzz
from ..geom4 import Plane
from ..report import ALL_AXES, invariant_report
from ..scene import pregeneric, scene_from_document, validate_scene
from ..svg import render_svg
from . import schemas

__all__ = ["create_app"]


def _provenance(**extra) -> dict:
    out = {"version": VERSION}
    out.update({k: v for k, v in extra.items() if v is not None})
    return out


def create_app() -> FastAPI:
    app = FastAPI(title="qgi", version=VERSION)

    @app.exception_handler(SchemaError)
    async def _schema(request: Request, exc: SchemaError):
        body = schemas.ErrorBody(kind="schema", error=type(exc).__name__, message=str(exc))
        return JSONResponse(status_code=422, content=body.model_dump())

    @app.exception_handler(NoAdmissibleMove)
    async def _starved(request: Request, exc: NoAdmissibleMove):
        body = schemas.ErrorBody(
            kind="no-admissible-move", error=type(exc).__name__, message=str(exc)
        )
        return JSONResponse(status_code=409, content=body.model_dump())

    @app.exception_handler(NotTimeOrdered)
    async def _unordered(request: Request, exc: NotTimeOrdered):
        body = schemas.ErrorBody(
            kind="not-time-ordered", error=type(exc).__name__, message=str(exc)
        )
        return JSONResponse(status_code=409, content=body.model_dump())

    @app.exception_handler(DegenerateGeometry)
    async def _degenerate(request: Request, exc: DegenerateGeometry):
        body = schemas.ErrorBody(
            kind="degenerate", error=type(exc).__name__, message=str(exc)
        )
        return JSONResponse(status_code=409, content=body.model_dump())

    @app.get("/health", response_model=schemas.HealthResponse)
    async def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=VERSION)

    @app.post("/validate", response_model=schemas.ValidateResponse,
              response_model_exclude_none=True)
    async def validate(request: schemas.ValidateRequest) -> schemas.ValidateResponse:
        scene = scene_from_document(request.scene)
        report = validate_scene(scene)
        return schemas.ValidateResponse(
            ok=report.ok,
            violations=[schemas.ViolationModel(**v.to_dict()) for v in report.violations],
            provenance=schemas.ProvenanceModel(**_provenance()),
        )

    @app.post("/invariants", response_model=schemas.InvariantsResponse,
              response_model_exclude_none=True)
    async def invariants(request: schemas.InvariantsRequest) -> schemas.InvariantsResponse:
        scene = scene_from_document(request.scene)
        if request.pregeneric_seed is not None:
            scene = pregeneric(scene, request.pregeneric_seed)
        axes = ALL_AXES if request.axes is None else tuple(dict.fromkeys(request.axes))
        report = invariant_report(scene, axes=axes)
        report["provenance"] = _provenance(pregeneric_seed=request.pregeneric_seed)
        return schemas.InvariantsResponse(**report)

    @app.post("/fuzz", response_model=schemas.FuzzResponse,
              response_model_exclude_none=True)
    async def run_fuzz(request: schemas.FuzzRequest) -> schemas.FuzzResponse:
        scene = scene_from_document(request.scene)
        provenance = schemas.ProvenanceModel(**_provenance(seed=request.seed))
        report = validate_scene(scene)
        if not report.ok:
            return schemas.FuzzResponse(
                validation=schemas.ValidationModel(
                    ok=False,
                    violations=[
                        schemas.ViolationModel(**v.to_dict()) for v in report.violations
                    ],
                ),
                provenance=provenance,
            )
        try:
            summary = fuzz(
                scene,
                request.steps,
                request.seed,
                kinds=request.moves,
                adversarial=request.adversarial,
            )
        except InvarianceBroken as exc:
            return schemas.FuzzResponse(
                broken=schemas.StepReportModel(**exc.report.to_dict()),
                provenance=provenance,
            )
        return schemas.FuzzResponse(
            summary=schemas.FuzzSummaryModel(**summary.to_dict()),
            provenance=provenance,
        )

    @app.post("/diagram", response_model=schemas.DiagramResponse)
    async def diagram(request: schemas.DiagramRequest) -> schemas.DiagramResponse:
        scene = scene_from_document(request.scene)
        svg = render_svg(scene, Plane(request.plane))
        return schemas.DiagramResponse(plane=request.plane, svg=svg)

    return app
