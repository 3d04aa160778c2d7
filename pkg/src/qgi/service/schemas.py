"""Request and response bodies for the HTTP service.

Every endpoint takes the scene inline, so a request is self-contained
and the service holds no state between calls.
"""

from __future__ import annotations

from typing import Annotated, Any

from pydantic import BaseModel, ConfigDict, Field

from ..fuzz import MoveKind
from ..scene import SceneDocument

_CONFIG = ConfigDict(extra="forbid")

AxisIndex = Annotated[int, Field(ge=0, le=3)]


class ValidateRequest(BaseModel):
    model_config = _CONFIG

    scene: SceneDocument


class InvariantsRequest(BaseModel):
    model_config = _CONFIG

    scene: SceneDocument
    axes: list[AxisIndex] | None = Field(
        default=None, description="subset of 0..3; all when omitted"
    )
    pregeneric_seed: int | None = Field(default=None, ge=0)


class FuzzRequest(BaseModel):
    model_config = _CONFIG

    scene: SceneDocument
    steps: int = Field(ge=1, le=100_000)
    seed: int = Field(ge=0)
    moves: list[MoveKind] | None = None
    adversarial: bool = False


class DiagramRequest(BaseModel):
    model_config = _CONFIG

    scene: SceneDocument
    plane: int = Field(ge=1, le=3)


class ViolationModel(BaseModel):
    code: str
    objects: list[str]
    message: str
    data: dict[str, Any] = Field(default_factory=dict)


class ValidationModel(BaseModel):
    ok: bool
    violations: list[ViolationModel]


class ProvenanceModel(BaseModel):
    version: str
    seed: int | None = None
    pregeneric_seed: int | None = None


class PiercingCountModel(BaseModel):
    value: int
    exactness: str
    lower_bound: int | None = None


class ValidateResponse(BaseModel):
    ok: bool
    violations: list[ViolationModel]
    provenance: ProvenanceModel


class InvariantsResponse(BaseModel):
    sk: int | None = None
    sk_invariant: bool | None = None
    lk_surface: dict[str, dict[str, int]] | None = None
    nu_S: dict[str, PiercingCountModel] | None = None
    nu_R: dict[str, int] | None = None
    validation: ValidationModel
    provenance: ProvenanceModel


class MoveModel(BaseModel):
    kind: str
    target: str | None
    params: dict[str, Any]


class StepViolationModel(BaseModel):
    kind: str
    detail: str
    invariant: str | None = None
    before: Any = None
    after: Any = None


class StepReportModel(BaseModel):
    move: MoveModel | None
    violations: list[StepViolationModel]


class SkippedStepModel(BaseModel):
    step: int
    move: MoveModel
    violations: list[str]


class FuzzSummaryModel(BaseModel):
    accepted: int
    invariants: dict[str, Any]
    requested: int
    seed: int
    skipped: list[SkippedStepModel]


class FuzzResponse(BaseModel):
    summary: FuzzSummaryModel | None = None
    broken: StepReportModel | None = None
    validation: ValidationModel | None = None
    provenance: ProvenanceModel


class DiagramResponse(BaseModel):
    plane: int
    svg: str


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorBody(BaseModel):
    kind: str
    error: str
    message: str
