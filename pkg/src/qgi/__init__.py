"""Piecewise-linear time-like hyperlinks in R x R^3 and their invariants.

The package computes four integer invariants of a scene: the
hyperlinking number of a time-ordered pair of hyperlinks, the linking
number between a loop and a closed or bounded surface, the piercing
number of a hyperlink through a surface, and the confinement number of
a framed hyperlink in a compact region.  Scenes are validated against
the time-like and genericity conditions before anything is computed,
and a fuzzing harness checks that the invariants survive random
admissible deformations.
"""

from ._version import VERSION as __version__
from .diagram import (
    Crossing,
    Diagram,
    build_diagram,
    crossing_sign,
    gauss_linking_number,
    linking_number,
)
from .errors import (
    DegenerateDiagram,
    DegenerateGeometry,
    InvarianceBroken,
    NoAdmissibleMove,
    NotTimeOrdered,
    ParseError,
    QgiError,
    SchemaError,
)
from .framing import (
    FramedHyperlink,
    Node,
    Region3,
    confinement_number,
    point_in_region,
    validate_frame,
    validate_region,
)
from .fuzz import Move, MoveKind, apply_move, check_step, fuzz, generate_move
from .geom4 import (
    Axis,
    Hyperlink,
    Loop,
    Plane,
    TimeOrderedPair,
    ValidationReport,
    Violation,
    validate_timelike,
    validate_time_ordered_pair,
)
from .hyperlink import hyperlinking_number, total_hyperlinking_number
from .report import invariant_report, invariant_values
from .scene import (
    Scene,
    SceneDocument,
    canonical_dumps,
    load_scene,
    parse_scene,
    pregeneric,
    scene_from_document,
    serialize_scene,
    validate_scene,
)
from .surface import (
    PiercingCount,
    Surface4,
    hyperlink_surface_linking_number,
    piercing_count,
    surface_linking_number,
    validate_surface,
)
from .svg import export_svg, render_svg

__all__ = [
    "__version__",
    "Axis",
    "Crossing",
    "DegenerateDiagram",
    "DegenerateGeometry",
    "Diagram",
    "FramedHyperlink",
    "Hyperlink",
    "InvarianceBroken",
    "Loop",
    "Move",
    "MoveKind",
    "NoAdmissibleMove",
    "Node",
    "NotTimeOrdered",
    "ParseError",
    "PiercingCount",
    "Plane",
    "QgiError",
    "Region3",
    "Scene",
    "SceneDocument",
    "SchemaError",
    "Surface4",
    "TimeOrderedPair",
    "ValidationReport",
    "Violation",
    "apply_move",
    "build_diagram",
    "canonical_dumps",
    "check_step",
    "confinement_number",
    "crossing_sign",
    "export_svg",
    "fuzz",
    "gauss_linking_number",
    "generate_move",
    "hyperlink_surface_linking_number",
    "hyperlinking_number",
    "invariant_report",
    "invariant_values",
    "linking_number",
    "load_scene",
    "parse_scene",
    "piercing_count",
    "point_in_region",
    "pregeneric",
    "render_svg",
    "scene_from_document",
    "serialize_scene",
    "surface_linking_number",
    "total_hyperlinking_number",
    "validate_frame",
    "validate_region",
    "validate_scene",
    "validate_surface",
    "validate_time_ordered_pair",
    "validate_timelike",
]
