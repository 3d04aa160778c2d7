"""Scene documents and whole-scene validation.

A scene is the unit of input for the CLI and the service: a matter
hyperlink (optionally framed with nodes), a geometric hyperlink, closed
or bounded surfaces in R x R^3, and compact regions in the x0 = 0 time
slice.  This module owns the JSON interchange format (parse, canonical
serialize) and the cross-object validation that the per-object modules
cannot see: time-ordering between the pieces, 4D clearance between
loops and surfaces, and slice disjointness for regions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from . import _geom
from .errors import ParseError, SchemaError
from .framing import (
    FramedHyperlink,
    Node,
    Region3,
    point_in_region,
    region_slice_violations,
    validate_frame,
    validate_region,
)
from .geom4 import (
    Hyperlink,
    Loop,
    Order,
    TimeOrderedPair,
    ValidationReport,
    time_order,
    validate_timelike,
)
from .surface import Surface4, validate_surface

__all__ = [
    "SceneDocument",
    "LoopRecord",
    "PlainLoopRecord",
    "NodeRecord",
    "SurfaceRecord",
    "RegionRecord",
    "Scene",
    "parse_scene",
    "scene_from_document",
    "document_from_scene",
    "load_scene",
    "canonical_dumps",
    "serialize_scene",
    "validate_scene",
    "loop_mesh_clearance",
    "pregeneric",
    "pair_order_map",
    "surface_order_map",
    "node_containment_map",
]


Vertex4 = tuple[float, float, float, float]
Vertex3 = tuple[float, float, float]
Triangle = tuple[int, int, int]

_MODEL_CONFIG = ConfigDict(extra="forbid", allow_inf_nan=False)


class NodeRecord(BaseModel):
    """Half-twist marker on a loop edge, addressed by (edge, u)."""

    model_config = _MODEL_CONFIG

    edge: int = Field(ge=0)
    u: float = Field(gt=0.0, lt=1.0)
    sign: Literal[-1, 1]


class PlainLoopRecord(BaseModel):
    """Loop record without node decorations (geometric components)."""

    model_config = _MODEL_CONFIG

    id: str = Field(min_length=1)
    vertices: list[Vertex4] = Field(min_length=3)

    @model_validator(mode="after")
    def _no_closing_duplicate(self):
        # Loops close implicitly; a repeated first vertex is the classic
        # off-by-one and is rejected rather than silently collapsed.
        if self.vertices[0] == self.vertices[-1]:
            raise ValueError(
                f"loop {self.id!r}: last vertex repeats the first; "
                "loops close implicitly, drop the duplicate"
            )
        return self


class LoopRecord(PlainLoopRecord):
    """Loop record with optional node decorations (matter components)."""

    nodes: list[NodeRecord] = Field(default_factory=list)

    @model_validator(mode="after")
    def _nodes_in_range(self):
        for node in self.nodes:
            if node.edge >= len(self.vertices):
                raise ValueError(
                    f"loop {self.id!r}: node edge {node.edge} out of range "
                    f"for {len(self.vertices)} edges"
                )
        return self


class SurfaceRecord(BaseModel):
    model_config = _MODEL_CONFIG

    id: str = Field(min_length=1)
    vertices: list[Vertex4] = Field(min_length=3)
    triangles: list[Triangle] = Field(min_length=1)

    @model_validator(mode="after")
    def _indices_in_range(self):
        n = len(self.vertices)
        for tri in self.triangles:
            if min(tri) < 0 or max(tri) >= n:
                raise ValueError(
                    f"surface {self.id!r}: triangle {tri} references a vertex "
                    f"outside 0..{n - 1}"
                )
        return self


class RegionRecord(BaseModel):
    """Region mesh in the time slice: vertices carry exactly 3 coordinates."""

    model_config = _MODEL_CONFIG

    id: str = Field(min_length=1)
    vertices: list[Vertex3] = Field(min_length=3)
    triangles: list[Triangle] = Field(min_length=1)

    @model_validator(mode="after")
    def _indices_in_range(self):
        n = len(self.vertices)
        for tri in self.triangles:
            if min(tri) < 0 or max(tri) >= n:
                raise ValueError(
                    f"region {self.id!r}: triangle {tri} references a vertex "
                    f"outside 0..{n - 1}"
                )
        return self


class SceneDocument(BaseModel):
    """Validated shape of a scene JSON file."""

    model_config = _MODEL_CONFIG

    tolerance: float = Field(default=1e-9, gt=0.0)
    matter_hyperlink: list[LoopRecord] = Field(default_factory=list)
    geometric_hyperlink: list[PlainLoopRecord] = Field(default_factory=list)
    surfaces: list[SurfaceRecord] = Field(default_factory=list)
    regions: list[RegionRecord] = Field(default_factory=list)

    @model_validator(mode="after")
    def _unique_ids(self):
        seen: set[str] = set()
        for rec in (*self.matter_hyperlink, *self.geometric_hyperlink):
            if rec.id in seen:
                raise ValueError(f"duplicate loop id {rec.id!r}")
            seen.add(rec.id)
        for label, records in (("surface", self.surfaces), ("region", self.regions)):
            ids: set[str] = set()
            for rec in records:
                if rec.id in ids:
                    raise ValueError(f"duplicate {label} id {rec.id!r}")
                ids.add(rec.id)
        return self


def _schema_message(err: ValidationError) -> str:
    parts = []
    for item in err.errors()[:5]:
        loc = ".".join(str(p) for p in item["loc"]) or "document"
        parts.append(f"{loc}: {item['msg']}")
    more = err.error_count() - len(parts)
    if more > 0:
        parts.append(f"and {more} more")
    return "; ".join(parts)


def parse_scene(data: bytes | str) -> SceneDocument:
    """Parse scene JSON into a validated document.

    Raises ParseError (with line/column) for malformed text and
    SchemaError for well-formed JSON of the wrong shape.  Non-finite
    numbers are a schema error: every coordinate must be a real number.
    """
    if isinstance(data, (bytes, bytearray)):
        try:
            text = bytes(data).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"scene is not valid UTF-8: {exc}") from exc
    else:
        text = data
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno, col=exc.colno,
        ) from exc
    try:
        return SceneDocument.model_validate(raw)
    except ValidationError as exc:
        raise SchemaError(_schema_message(exc)) from exc


@dataclass(frozen=True)
class Scene:
    """Runtime scene: geometry objects built from a document."""

    tolerance: float
    matter: Hyperlink
    geometric: Hyperlink
    nodes: tuple[Node, ...]
    surfaces: tuple[Surface4, ...]
    regions: tuple[Region3, ...]

    def loops(self) -> tuple[Loop, ...]:
        return tuple(self.matter.loops) + tuple(self.geometric.loops)

    def framed(self) -> FramedHyperlink:
        return FramedHyperlink(self.matter, self.nodes)

    def pair(self) -> TimeOrderedPair:
        return TimeOrderedPair(self.matter, self.geometric)

    def surface(self, id: str) -> Surface4:
        for s in self.surfaces:
            if s.id == id:
                return s
        raise KeyError(id)

    def region(self, id: str) -> Region3:
        for r in self.regions:
            if r.id == id:
                return r
        raise KeyError(id)

    def replace_loop(self, loop: Loop) -> "Scene":
        """New scene with the same-id loop swapped out."""
        if any(l.id == loop.id for l in self.matter):
            matter = Hyperlink(loop if l.id == loop.id else l for l in self.matter)
            return replace(self, matter=matter)
        geometric = Hyperlink(loop if l.id == loop.id else l for l in self.geometric)
        return replace(self, geometric=geometric)


def scene_from_document(doc: SceneDocument) -> Scene:
    try:
        matter = Hyperlink(Loop(rec.id, rec.vertices) for rec in doc.matter_hyperlink)
        geometric = Hyperlink(
            Loop(rec.id, rec.vertices) for rec in doc.geometric_hyperlink
        )
        nodes = tuple(
            Node(rec.id, n.edge, n.u, n.sign)
            for rec in doc.matter_hyperlink
            for n in rec.nodes
        )
        FramedHyperlink(matter, nodes)
        surfaces = tuple(
            Surface4(rec.id, rec.vertices, rec.triangles) for rec in doc.surfaces
        )
        regions = tuple(
            Region3(rec.id, rec.vertices, rec.triangles) for rec in doc.regions
        )
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    return Scene(
        tolerance=doc.tolerance,
        matter=matter,
        geometric=geometric,
        nodes=nodes,
        surfaces=surfaces,
        regions=regions,
    )


def document_from_scene(scene: Scene) -> SceneDocument:
    def rows(arr: np.ndarray) -> list[tuple]:
        return [tuple(float(x) for x in row) for row in np.asarray(arr)]

    def tris(arr: np.ndarray) -> list[tuple]:
        return [tuple(int(x) for x in row) for row in np.asarray(arr)]

    matter = []
    for loop in scene.matter:
        nodes = [
            NodeRecord(edge=n.edge, u=n.u, sign=n.sign)
            for n in scene.nodes
            if n.loop_id == loop.id
        ]
        matter.append(
            LoopRecord(id=loop.id, vertices=rows(loop.vertices), nodes=nodes)
        )
    return SceneDocument(
        tolerance=scene.tolerance,
        matter_hyperlink=matter,
        geometric_hyperlink=[
            PlainLoopRecord(id=l.id, vertices=rows(l.vertices)) for l in scene.geometric
        ],
        surfaces=[
            SurfaceRecord(id=s.id, vertices=rows(s.vertices), triangles=tris(s.triangles))
            for s in scene.surfaces
        ],
        regions=[
            RegionRecord(id=r.id, vertices=rows(r.vertices), triangles=tris(r.triangles))
            for r in scene.regions
        ],
    )


def load_scene(data: bytes | str) -> Scene:
    return scene_from_document(parse_scene(data))


# ---------------------------------------------------------------------------
# canonical serialization


def canonical_dumps(value) -> str:
    """Serialize to JSON with sorted keys, no whitespace, and floats at 17
    significant digits.  Equal values always produce identical bytes."""
    out: list[str] = []
    _write_canonical(value, out)
    return "".join(out)


def _write_canonical(value, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif isinstance(value, bool | np.bool_):
        out.append("true" if value else "false")
    elif isinstance(value, int | np.integer):
        out.append(str(int(value)))
    elif isinstance(value, float | np.floating):
        f = float(value)
        if f != f or f in (float("inf"), float("-inf")):
            raise ValueError("non-finite number is not serializable")
        out.append("%.17g" % f)
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if not isinstance(key, str):
                raise TypeError(f"object keys must be strings, got {type(key).__name__}")
            if i:
                out.append(",")
            out.append(json.dumps(key))
            out.append(":")
            _write_canonical(value[key], out)
        out.append("}")
    elif isinstance(value, list | tuple):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _write_canonical(item, out)
        out.append("]")
    elif isinstance(value, np.ndarray):
        _write_canonical(value.tolist(), out)
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def serialize_scene(scene: Scene | SceneDocument) -> str:
    doc = scene if isinstance(scene, SceneDocument) else document_from_scene(scene)
    return canonical_dumps(doc.model_dump(mode="python"))


# ---------------------------------------------------------------------------
# whole-scene validation


def _boundary_loops(surfaces) -> list[Loop]:
    loops: list[Loop] = []
    for surface in surfaces:
        loops.extend(surface.boundary_loops())
    return loops


def loop_mesh_clearance(loop: Loop, vertices4, triangles, margin: float) -> float:
    """Minimum 4D distance between a loop and a triangle mesh.

    Exact below ``margin``; pairs whose bounding boxes are separated by
    more than the margin are pruned and only lower-bound the result.
    """
    pts = loop.vertices
    starts = pts
    ends = np.roll(pts, -1, axis=0)
    tri_pts = np.asarray(vertices4, dtype=np.float64)[np.asarray(triangles)]  # (t, 3, 4)
    tri_lo = tri_pts.min(axis=1)
    tri_hi = tri_pts.max(axis=1)
    best = np.inf
    for e in range(len(pts)):
        seg_lo = np.minimum(starts[e], ends[e]) - margin
        seg_hi = np.maximum(starts[e], ends[e]) + margin
        hits = np.nonzero(
            np.all(tri_lo <= seg_hi, axis=1) & np.all(tri_hi >= seg_lo, axis=1)
        )[0]
        for t in hits:
            d = _geom.segment_triangle_distance_nd(
                starts[e], ends[e], tri_pts[t, 0], tri_pts[t, 1], tri_pts[t, 2]
            )
            best = min(best, d)
    return best


def validate_scene(scene: Scene) -> ValidationReport:
    """Validate every object and every cross-object requirement.

    Covers: per-surface and per-region mesh checks, time-likeness of the
    union hyperlink (matter, geometric, and the boundary loops of every
    bounded surface), strict time-ordering of matter against geometric
    components and of every loop against every bounded surface, 4D
    loop-surface clearance, region disjointness from the loops' time-zero
    slice crossings, and node frame consistency.
    """
    tol = scene.tolerance
    report = ValidationReport()

    clean_surfaces = []
    for surface in scene.surfaces:
        r = validate_surface(surface, tol)
        report.extend(r)
        if r.ok:
            clean_surfaces.append(surface)
    clean_regions = []
    for region in scene.regions:
        r = validate_region(region, tol)
        report.extend(r)
        if r.ok:
            clean_regions.append(region)

    try:
        union = Hyperlink(
            list(scene.matter) + list(scene.geometric) + _boundary_loops(clean_surfaces)
        )
    except ValueError as exc:
        report.add("structure", [], str(exc))
        return report
    report.extend(validate_timelike(union, tol))

    for m in scene.matter:
        for g in scene.geometric:
            if time_order(m, g, tol) is Order.INCOMPARABLE:
                report.add(
                    "incomparable", [m.id, g.id],
                    f"loops {m.id!r} and {g.id!r} overlap in time; "
                    "their pairing is not deformation-stable",
                )

    for surface in clean_surfaces:
        if surface.is_closed:
            continue
        ext = surface.tau_extent()
        for loop in scene.loops():
            if time_order(loop, ext, tol) is Order.INCOMPARABLE:
                report.add(
                    "surface-order", [loop.id, surface.id],
                    f"loop {loop.id!r} overlaps bounded surface {surface.id!r} "
                    "in time; their linking is not deformation-stable",
                )

    for surface in clean_surfaces:
        for loop in scene.loops():
            d = loop_mesh_clearance(loop, surface.vertices, surface.triangles, tol)
            if d <= tol:
                report.add(
                    "surface-overlap", [loop.id, surface.id],
                    f"loop {loop.id!r} passes within tolerance of surface "
                    f"{surface.id!r} in R x R^3 (distance {d:.3g})",
                )

    for region in clean_regions:
        for hyperlink in (scene.matter, scene.geometric):
            for loop_id, message in region_slice_violations(hyperlink, region, tol):
                report.add("slice-overlap", [loop_id, region.id], message)

    report.extend(validate_frame(scene.framed(), clean_regions, tol))
    return report


def pregeneric(scene: Scene, seed: int) -> Scene:
    """Apply a seeded random spatial rotation about the origin to every
    object in the scene.  Time coordinates are untouched, so orderings,
    invariants, and validity are preserved while axis-aligned projection
    degeneracies are broken."""
    rot = _geom.rotation_from_seed(seed)

    def spin4(vertices: np.ndarray) -> np.ndarray:
        out = np.array(vertices, dtype=np.float64)
        out[:, 1:4] = out[:, 1:4] @ rot.T
        return out

    matter = Hyperlink(l.with_vertices(spin4(l.vertices)) for l in scene.matter)
    geometric = Hyperlink(l.with_vertices(spin4(l.vertices)) for l in scene.geometric)
    surfaces = tuple(s.with_vertices(spin4(s.vertices)) for s in scene.surfaces)
    regions = tuple(
        r.with_vertices(np.asarray(r.vertices) @ rot.T) for r in scene.regions
    )
    return replace(
        scene, matter=matter, geometric=geometric, surfaces=surfaces, regions=regions
    )


# ---------------------------------------------------------------------------
# ordering and containment maps diffed by the deformation checker


def pair_order_map(scene: Scene, tol: float | None = None) -> dict[tuple[str, str], Order]:
    tol = scene.tolerance if tol is None else tol
    return {
        (m.id, g.id): time_order(m, g, tol)
        for m in scene.matter
        for g in scene.geometric
    }


def surface_order_map(scene: Scene, tol: float | None = None) -> dict[tuple[str, str], Order]:
    """Before/After relation of every loop against every bounded surface."""
    tol = scene.tolerance if tol is None else tol
    out: dict[tuple[str, str], Order] = {}
    for surface in scene.surfaces:
        if surface.is_closed:
            continue
        ext = surface.tau_extent()
        for loop in scene.loops():
            out[(loop.id, surface.id)] = time_order(loop, ext, tol)
    return out


def node_containment_map(scene: Scene, tol: float | None = None) -> dict[tuple[int, str], str]:
    """Containment verdict of every node in every region, keyed by the
    node's position in the scene's node tuple (stable across moves)."""
    tol = scene.tolerance if tol is None else tol
    framed = scene.framed()
    out: dict[tuple[int, str], str] = {}
    for i, node in enumerate(framed.nodes):
        p = framed.hyperlink.loop(node.loop_id).spatial_at(node.edge, node.u)
        for region in scene.regions:
            out[(i, region.id)] = point_in_region(p, region, tol)
    return out
