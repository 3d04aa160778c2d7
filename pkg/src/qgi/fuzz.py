"""Randomized admissible deformations and the per-step checker.

The four invariants are claimed stable under deformations that keep the
scene time-like, keep every time-ordering relation, and keep nodes on
their side of each region boundary.  This module discretizes such
deformations into single moves, samples moves whose magnitudes sit
inside conservative clearance bounds, and re-validates everything after
each move.  The sampler only makes acceptance likely; the checker is
the authority, and a rejected move is logged and skipped.  An accepted
move that changes an invariant is the one outcome that must never
happen.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import _geom
from .errors import DegenerateGeometry, InvarianceBroken, NoAdmissibleMove, QgiError
from .framing import Node
from .geom4 import Hyperlink, Loop
from .report import invariant_values
from .scene import (
    Scene,
    node_containment_map,
    pair_order_map,
    surface_order_map,
    validate_scene,
)

__all__ = [
    "MoveKind",
    "Move",
    "StepViolation",
    "StepReport",
    "SkippedStep",
    "FuzzSummary",
    "TIME_LIKE_LOST",
    "ORDERING_FLIPPED",
    "SURFACE_BOUNDARY_ORDER_LOST",
    "NODE_CROSSED_BOUNDARY",
    "INVARIANT_CHANGED",
    "generate_move",
    "apply_move",
    "check_step",
    "fuzz",
]


class MoveKind(str, Enum):
    SPATIAL_RIGID = "SpatialRigid"
    TIME_TRANSLATE_COMPONENT = "TimeTranslateComponent"
    VERTEX_JITTER = "VertexJitter"
    EDGE_SUBDIVIDE = "EdgeSubdivide"
    NODE_SLIDE = "NodeSlide"
    REGION_RIGID = "RegionRigid"


@dataclass(frozen=True)
class Move:
    kind: MoveKind
    target: str | None
    params: dict

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "target": self.target,
            "params": self.params,
        }


TIME_LIKE_LOST = "TimeLikeLost"
ORDERING_FLIPPED = "OrderingFlipped"
SURFACE_BOUNDARY_ORDER_LOST = "SurfaceBoundaryOrderLost"
NODE_CROSSED_BOUNDARY = "NodeCrossedBoundary"
INVARIANT_CHANGED = "InvariantChanged"


@dataclass(frozen=True)
class StepViolation:
    kind: str
    detail: str
    invariant: str | None = None
    before: object = None
    after: object = None

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "detail": self.detail}
        if self.invariant is not None:
            out["invariant"] = self.invariant
            out["before"] = self.before
            out["after"] = self.after
        return out


@dataclass(frozen=True)
class StepReport:
    move: Move | None
    violations: tuple[StepViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "move": None if self.move is None else self.move.to_dict(),
            "violations": [v.to_dict() for v in self.violations],
        }


@dataclass(frozen=True)
class SkippedStep:
    step: int
    move: Move
    violation_kinds: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "move": self.move.to_dict(),
            "violations": list(self.violation_kinds),
        }


@dataclass(frozen=True)
class FuzzSummary:
    requested: int
    accepted: int
    skipped: tuple[SkippedStep, ...]
    invariants: dict
    seed: int

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "invariants": self.invariants,
            "requested": self.requested,
            "seed": self.seed,
            "skipped": [s.to_dict() for s in self.skipped],
        }


# ---------------------------------------------------------------------------
# clearance estimates used to size move magnitudes


def _polyline_pair_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Minimum distance between two closed polylines (any dimension)."""
    a0 = a[:, None, :]
    a1 = np.roll(a, -1, axis=0)[:, None, :]
    b0 = b[None, :, :]
    b1 = np.roll(b, -1, axis=0)[None, :, :]
    return float(_geom.segseg_distance(a0, a1, b0, b1).min())


def _self_clearance(pts: np.ndarray) -> float:
    """Minimum distance between non-adjacent edges of one closed polyline."""
    n = len(pts)
    if n < 4:
        return np.inf
    starts = pts
    ends = np.roll(pts, -1, axis=0)
    d = _geom.segseg_distance(
        starts[:, None, :], ends[:, None, :], starts[None, :, :], ends[None, :, :]
    )
    i = np.arange(n)
    diff = (i[:, None] - i[None, :]) % n
    adjacent = (diff == 0) | (diff == 1) | (diff == n - 1)
    d = np.where(adjacent, np.inf, d)
    return float(d.min())


def _extent_gap(e1, e2) -> float:
    return max(0.0, e2.lo - e1.hi, e1.lo - e2.hi)


def _other_loops(scene: Scene, loop_id: str) -> list[Loop]:
    others = [l for l in scene.loops() if l.id != loop_id]
    for surface in scene.surfaces:
        others.extend(surface.boundary_loops())
    return others


def _region_mesh4(region) -> np.ndarray:
    verts = np.asarray(region.vertices)
    return np.hstack([np.zeros((len(verts), 1)), verts])


def _time_clearance(scene: Scene, loop: Loop, tol: float) -> float:
    """Largest time shift of one loop that provably keeps every time
    relation: pair orderings, bounded-surface orderings, crossing time
    separations, and the loop's height over region slices."""
    from .hyperlink import timed_crossings
    from .geom4 import Plane
    from .framing import point_in_region

    ext = loop.tau_extent()
    best = np.inf
    opposite = scene.geometric if any(l.id == loop.id for l in scene.matter) else scene.matter
    for other in opposite:
        best = min(best, _extent_gap(ext, other.tau_extent()))
    for surface in scene.surfaces:
        if surface.is_closed:
            # no ordering constraint, but the loop must not sweep through
            # the surface while shifting
            best = min(
                best,
                _loop_clearance_to_mesh(loop, surface.vertices, surface.triangles, best),
            )
        else:
            best = min(best, _extent_gap(ext, surface.tau_extent()))
    for other in _other_loops(scene, loop.id):
        for plane in Plane:
            try:
                for tc in timed_crossings(loop, other, plane, tol):
                    best = min(best, abs(tc.x0_first - tc.x0_second))
            except DegenerateGeometry:
                return 0.0
    for region in scene.regions:
        mesh4 = _region_mesh4(region)
        best = min(best, _loop_clearance_to_mesh(loop, mesh4, region.triangles, best))
        for v in loop.vertices:
            if point_in_region(v[1:4], region, tol) != "outside":
                best = min(best, abs(float(v[0])))
    return float(best)


def _loop_clearance_to_mesh(loop: Loop, vertices4, triangles, cap: float) -> float:
    from .scene import loop_mesh_clearance

    margin = cap if np.isfinite(cap) else float(np.ptp(loop.vertices)) + 1.0
    return loop_mesh_clearance(loop, vertices4, triangles, margin)


def _spatial_clearance(scene: Scene, loop: Loop) -> float:
    """Smallest distance whose halving keeps the loop embedded and away
    from everything else when one vertex moves."""
    best = _self_clearance(loop.spatial())
    for other in scene.loops():
        if other.id == loop.id:
            continue
        best = min(best, _polyline_pair_distance(loop.spatial(), other.spatial()))
    for surface in scene.surfaces:
        best = min(
            best, _loop_clearance_to_mesh(loop, surface.vertices, surface.triangles, best)
        )
    for region in scene.regions:
        best = min(
            best, _loop_clearance_to_mesh(loop, _region_mesh4(region), region.triangles, best)
        )
    return float(best)


def _node_clearance(scene: Scene, position: np.ndarray) -> float:
    best = np.inf
    for region in scene.regions:
        best = min(
            best, _geom.point_mesh_distance(position, np.asarray(region.vertices), region.triangles)
        )
    return float(best)


def _region_clearance(scene: Scene, region) -> float:
    """How far the region mesh may move without reaching a node or a
    loop's slice crossing."""
    from .framing import slice_crossing_points

    framed = scene.framed()
    verts = np.asarray(region.vertices)
    best = np.inf
    for node in framed.nodes:
        p = framed.hyperlink.loop(node.loop_id).spatial_at(node.edge, node.u)
        best = min(best, _geom.point_mesh_distance(p, verts, region.triangles))
    for loop in scene.loops():
        for p in slice_crossing_points(loop, scene.tolerance):
            best = min(best, _geom.point_mesh_distance(p, verts, region.triangles))
        # a time shift is not in play here, but the mesh must also stay
        # off the loop's 4D track
        best = min(best, _loop_clearance_to_mesh(loop, _region_mesh4(region), region.triangles, best))
    return float(best)


# ---------------------------------------------------------------------------
# move generation and application


_ALL_KINDS = tuple(MoveKind)


def _applicable_kinds(scene: Scene, kinds) -> list[MoveKind]:
    wanted = [MoveKind(k) for k in (kinds if kinds is not None else _ALL_KINDS)]
    out = []
    for kind in wanted:
        if kind in (MoveKind.TIME_TRANSLATE_COMPONENT, MoveKind.VERTEX_JITTER,
                    MoveKind.EDGE_SUBDIVIDE) and not scene.loops():
            continue
        if kind is MoveKind.NODE_SLIDE and not scene.nodes:
            continue
        if kind is MoveKind.REGION_RIGID and not scene.regions:
            continue
        out.append(kind)
    return out


def generate_move(scene: Scene, seed, kinds=None, adversarial: bool = False) -> Move:
    """Sample one move, deterministically in (scene, seed).

    Magnitudes are bounded by conservative clearance estimates so the
    move is expected (not guaranteed) to be admissible.  With
    ``adversarial`` the bounds are inflated so the checker sees genuine
    violations.  Raises NoAdmissibleMove when every applicable kind is
    clearance-starved.
    """
    rng = np.random.default_rng(seed)
    tol = scene.tolerance
    inflate = 40.0 if adversarial else 1.0
    candidates = _applicable_kinds(scene, kinds)
    loops = scene.loops()
    while candidates:
        kind = candidates[int(rng.integers(len(candidates)))]
        if kind is MoveKind.SPATIAL_RIGID:
            axis = rng.normal(size=3)
            while np.linalg.norm(axis) < 1e-6:
                axis = rng.normal(size=3)
            return Move(kind, None, {
                "axis": [float(x) for x in axis],
                "angle": float(rng.uniform(0.0, 2.0 * np.pi)),
                "translate": [float(x) for x in rng.uniform(-1.0, 1.0, size=3)],
            })
        if kind is MoveKind.EDGE_SUBDIVIDE:
            loop = loops[int(rng.integers(len(loops)))]
            edges = [
                e for e in range(loop.n)
                if not any(
                    n.loop_id == loop.id and n.edge == e and abs(n.u - 0.5) <= 1e-9
                    for n in scene.nodes
                )
            ]
            if edges:
                return Move(kind, loop.id, {"edge": int(edges[int(rng.integers(len(edges)))])})
        if kind is MoveKind.TIME_TRANSLATE_COMPONENT:
            loop = loops[int(rng.integers(len(loops)))]
            bound = _time_clearance(scene, loop, tol) / 2.0
            if bound > 4.0 * tol:
                shift = float(rng.uniform(-bound, bound)) * inflate
                return Move(kind, loop.id, {"shift": shift})
        if kind is MoveKind.VERTEX_JITTER:
            loop = loops[int(rng.integers(len(loops)))]
            bound = min(
                _spatial_clearance(scene, loop), _time_clearance(scene, loop, tol)
            ) / 4.0
            if bound > 4.0 * tol:
                delta = rng.normal(size=4)
                delta *= rng.uniform(0.2, 1.0) * bound * inflate / np.linalg.norm(delta)
                vertex = int(rng.integers(loop.n))
                return Move(kind, loop.id, {
                    "vertex": vertex, "delta": [float(x) for x in delta],
                })
        if kind is MoveKind.NODE_SLIDE:
            index = int(rng.integers(len(scene.nodes)))
            node = scene.nodes[index]
            loop = scene.matter.loop(node.loop_id)
            a = loop.spatial_at(node.edge, 0.0)
            b = loop.spatial_at(node.edge, 1.0)
            edge_len = float(np.linalg.norm(b - a))
            position = loop.spatial_at(node.edge, node.u)
            bound = _node_clearance(scene, position) / 2.0
            if edge_len > 0 and bound > 4.0 * tol:
                du = min(bound * inflate / edge_len, 0.45)
                lo = max(0.01, node.u - du)
                hi = min(0.99, node.u + du)
                if hi > lo:
                    return Move(kind, node.loop_id, {
                        "node": index, "u": float(rng.uniform(lo, hi)),
                    })
        if kind is MoveKind.REGION_RIGID:
            region = scene.regions[int(rng.integers(len(scene.regions)))]
            bound = _region_clearance(scene, region) / 2.0
            if bound > 4.0 * tol:
                verts = np.asarray(region.vertices)
                center = verts.mean(axis=0)
                radius = float(np.linalg.norm(verts - center, axis=1).max())
                axis = rng.normal(size=3)
                while np.linalg.norm(axis) < 1e-6:
                    axis = rng.normal(size=3)
                angle = float(rng.uniform(-0.5, 0.5)) * bound * inflate / max(radius, 1e-9)
                shift = rng.normal(size=3)
                shift *= rng.uniform(0.0, 0.5) * bound * inflate / np.linalg.norm(shift)
                return Move(kind, region.id, {
                    "axis": [float(x) for x in axis],
                    "angle": angle,
                    "center": [float(x) for x in center],
                    "translate": [float(x) for x in shift],
                })
        candidates.remove(kind)
    raise NoAdmissibleMove("every applicable move kind is clearance-starved")


def _remap_nodes_for_subdivision(nodes, loop_id: str, edge: int):
    out = []
    for node in nodes:
        if node.loop_id != loop_id:
            out.append(node)
        elif node.edge > edge:
            out.append(Node(node.loop_id, node.edge + 1, node.u, node.sign))
        elif node.edge == edge:
            if node.u < 0.5:
                out.append(Node(node.loop_id, edge, 2.0 * node.u, node.sign))
            else:
                out.append(Node(node.loop_id, edge + 1, 2.0 * node.u - 1.0, node.sign))
        else:
            out.append(node)
    return tuple(out)


def apply_move(scene: Scene, move: Move) -> Scene:
    """Apply a move to a scene, returning a new scene.

    Pure: the input scene is never modified.  Applying a move performs
    no admissibility checking; that is check_step's job.
    """
    kind = MoveKind(move.kind)
    if kind is MoveKind.SPATIAL_RIGID:
        rot = _geom.rotation_axis_angle(move.params["axis"], move.params["angle"])
        shift = np.asarray(move.params["translate"], dtype=np.float64)

        def move4(vertices):
            out = np.array(vertices, dtype=np.float64)
            out[:, 1:4] = out[:, 1:4] @ rot.T + shift
            return out

        return replace(
            scene,
            matter=Hyperlink(l.with_vertices(move4(l.vertices)) for l in scene.matter),
            geometric=Hyperlink(l.with_vertices(move4(l.vertices)) for l in scene.geometric),
            surfaces=tuple(s.with_vertices(move4(s.vertices)) for s in scene.surfaces),
            regions=tuple(
                r.with_vertices(np.asarray(r.vertices) @ rot.T + shift)
                for r in scene.regions
            ),
        )
    if kind is MoveKind.TIME_TRANSLATE_COMPONENT:
        loop = _find_loop(scene, move.target)
        vertices = np.array(loop.vertices)
        vertices[:, 0] += move.params["shift"]
        return scene.replace_loop(loop.with_vertices(vertices))
    if kind is MoveKind.VERTEX_JITTER:
        loop = _find_loop(scene, move.target)
        vertices = np.array(loop.vertices)
        vertices[move.params["vertex"] % loop.n] += np.asarray(move.params["delta"])
        return scene.replace_loop(loop.with_vertices(vertices))
    if kind is MoveKind.EDGE_SUBDIVIDE:
        loop = _find_loop(scene, move.target)
        edge = move.params["edge"] % loop.n
        nodes = _remap_nodes_for_subdivision(scene.nodes, loop.id, edge)
        return replace(scene.replace_loop(loop.subdivided(edge)), nodes=nodes)
    if kind is MoveKind.NODE_SLIDE:
        index = move.params["node"]
        node = scene.nodes[index]
        nodes = list(scene.nodes)
        nodes[index] = Node(node.loop_id, node.edge, float(move.params["u"]), node.sign)
        return replace(scene, nodes=tuple(nodes))
    if kind is MoveKind.REGION_RIGID:
        rot = _geom.rotation_axis_angle(move.params["axis"], move.params["angle"])
        center = np.asarray(move.params["center"], dtype=np.float64)
        shift = np.asarray(move.params["translate"], dtype=np.float64)
        regions = tuple(
            r.with_vertices((np.asarray(r.vertices) - center) @ rot.T + center + shift)
            if r.id == move.target else r
            for r in scene.regions
        )
        return replace(scene, regions=regions)
    raise ValueError(f"unknown move kind {move.kind!r}")


def _find_loop(scene: Scene, loop_id: str) -> Loop:
    for loop in scene.loops():
        if loop.id == loop_id:
            return loop
    raise KeyError(loop_id)


# ---------------------------------------------------------------------------
# step checking


_CODE_TO_KIND = {
    "incomparable": ORDERING_FLIPPED,
    "surface-order": SURFACE_BOUNDARY_ORDER_LOST,
    "node-boundary": NODE_CROSSED_BOUNDARY,
}


def _flatten(values: dict, prefix: str = "") -> dict:
    out = {}
    for key, value in values.items():
        name = f"{prefix}.{key}" if prefix else str(key)
        if isinstance(value, dict):
            out.update(_flatten(value, name))
        else:
            out[name] = value
    return out


def check_step(
    before: Scene,
    after: Scene,
    move: Move | None = None,
    tol: float | None = None,
    before_values: dict | None = None,
) -> StepReport:
    """Compare two scenes one move apart and report every admissibility
    failure and every invariant change.

    The after scene is fully re-validated; on top of that, the matter
    against geometric order matrix, every loop's relation to every
    bounded surface, and every node's containment in every region must
    be identical.  Only when all of that holds are the invariants
    recomputed and compared, so an InvariantChanged entry always means
    an admissible move changed an invariant.
    """
    tol = after.tolerance if tol is None else tol
    violations: list[StepViolation] = []
    validation = validate_scene(after)
    for v in validation.violations:
        violations.append(
            StepViolation(_CODE_TO_KIND.get(v.code, TIME_LIKE_LOST), f"{v.code}: {v.message}")
        )
    if validation.ok:
        pairs_before = pair_order_map(before, tol)
        pairs_after = pair_order_map(after, tol)
        for key in sorted(pairs_before):
            if pairs_before[key] != pairs_after.get(key):
                violations.append(StepViolation(
                    ORDERING_FLIPPED,
                    f"loops {key[0]!r} and {key[1]!r} changed order: "
                    f"{pairs_before[key].value} -> {pairs_after[key].value}",
                ))
        surf_before = surface_order_map(before, tol)
        surf_after = surface_order_map(after, tol)
        for key in sorted(surf_before):
            if surf_before[key] != surf_after.get(key):
                violations.append(StepViolation(
                    SURFACE_BOUNDARY_ORDER_LOST,
                    f"loop {key[0]!r} changed order against bounded surface "
                    f"{key[1]!r}: {surf_before[key].value} -> {surf_after[key].value}",
                ))
        nodes_before = node_containment_map(before, tol)
        nodes_after = node_containment_map(after, tol)
        for key in sorted(nodes_before):
            if nodes_before[key] != nodes_after.get(key):
                violations.append(StepViolation(
                    NODE_CROSSED_BOUNDARY,
                    f"node {key[0]} changed containment in region {key[1]!r}: "
                    f"{nodes_before[key]} -> {nodes_after[key]}",
                ))
    if validation.ok and not violations:
        base = before_values if before_values is not None else invariant_values(before, tol=tol)
        try:
            now = invariant_values(after, tol=tol)
        except DegenerateGeometry as exc:
            violations.append(StepViolation(
                TIME_LIKE_LOST, f"degenerate geometry while recomputing invariants: {exc}"
            ))
        else:
            flat_base = _flatten(base)
            flat_now = _flatten(now)
            for name in sorted(set(flat_base) | set(flat_now)):
                if flat_base.get(name) != flat_now.get(name):
                    violations.append(StepViolation(
                        INVARIANT_CHANGED,
                        f"{name} changed: {flat_base.get(name)!r} -> {flat_now.get(name)!r}",
                        invariant=name,
                        before=flat_base.get(name),
                        after=flat_now.get(name),
                    ))
    return StepReport(move, tuple(violations))


def fuzz(
    scene: Scene,
    n_steps: int,
    seed: int,
    kinds=None,
    adversarial: bool = False,
) -> FuzzSummary:
    """Drive a scene through n_steps sampled moves.

    Inadmissible moves are skipped and recorded.  Raises InvarianceBroken
    the moment an admissible move changes any invariant; (scene, n_steps,
    seed) fully determine the run.
    """
    validation = validate_scene(scene)
    if not validation.ok:
        raise QgiError(
            "fuzzing needs a valid scene; found "
            + ", ".join(sorted(validation.codes()))
        )
    baseline = invariant_values(scene)
    current = scene
    accepted = 0
    skipped: list[SkippedStep] = []
    for step in range(n_steps):
        move = generate_move(current, [seed, step], kinds=kinds, adversarial=adversarial)
        after = apply_move(current, move)
        report = check_step(current, after, move=move, before_values=baseline)
        if report.ok:
            current = after
            accepted += 1
            continue
        # check_step only compares invariants on steps that pass every
        # admissibility test, so any change here is the real failure
        if any(v.kind == INVARIANT_CHANGED for v in report.violations):
            raise InvarianceBroken(report=report)
        skipped.append(SkippedStep(step, move, tuple(sorted(report.kinds()))))
    return FuzzSummary(
        requested=n_steps,
        accepted=accepted,
        skipped=tuple(skipped),
        invariants=baseline,
        seed=seed,
    )
