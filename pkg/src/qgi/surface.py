"""Oriented triangle surfaces in R x R^3 and their loop invariants.

A surface is an oriented 2-manifold mesh with 4D vertices.  Projecting
along one of the four axes sends it to an oriented surface in 3-space,
where a generic loop crosses it in finitely many transversal piercings.
Each piercing carries two signs:

* ``sgn``: whether the loop tangent agrees with the projected surface
  normal, corrected by ``AXIS_ORIENTATION`` so that all four projections
  measure against the same orientation of the ambient 4-space;
* ``ht``: which side of the piercing the dropped coordinate puts the
  loop on: +1 when the loop passes above the surface in the dropped
  coordinate (later in time under axis 0, larger x_k under axis k).
  The same rule for all four axes is what makes the four projected
  sums agree on closed surfaces; a sheared-sphere probe pins it down.

The loop-surface linking number is the sum of ``sgn * ht``.  For closed
surfaces it is independent of the axis; time-ordering only matters when
the surface has boundary.

The piercing count machinery works under axis 0: piercings split the
loop into arcs alternating between the projected interior and exterior,
each arc carrying the time range the loop sweeps while traversing it.
An interior arc whose time range does not cover the surface's full time
extent can be withdrawn without ever touching the surface (time slides
it past); repeating this until only spanning arcs remain gives the
minimal transversal piercing count for closed surfaces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _geom, _mesh
from .errors import (
    BoundaryGraze,
    EdgeGraze,
    HeightTie,
    NonSeparatingProjection,
    NotTimeOrdered,
    TangentIntersection,
)
from .geom4 import (
    AXIS_ORIENTATION,
    Axis,
    Hyperlink,
    Loop,
    Order,
    TauExtent,
    ValidationReport,
    project,
    tau_extent_of,
    time_order,
)

INTERIOR = "interior"
EXTERIOR = "exterior"


class Surface4:
    """Oriented triangle mesh with vertices in R x R^3.

    Triangles are vertex-index triples; their cyclic order fixes the
    orientation.  The mesh may be disconnected and may have boundary.
    """

    __slots__ = ("id", "vertices", "triangles", "_boundary_edges", "_boundary_cycles")

    def __init__(self, id: str, vertices, triangles) -> None:
        verts = _geom.as_points(vertices, 4).copy()
        verts.flags.writeable = False
        tri = np.asarray(triangles, dtype=np.int64)
        if tri.ndim != 2 or tri.shape[1] != 3 or tri.shape[0] < 1:
            raise ValueError(f"expected a (t, 3) triangle array, got shape {tri.shape}")
        if tri.min() < 0 or tri.max() >= verts.shape[0]:
            raise ValueError("triangle index out of range")
        tri = tri.copy()
        tri.flags.writeable = False
        object.__setattr__(self, "id", str(id))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "triangles", tri)
        object.__setattr__(self, "_boundary_edges", None)
        object.__setattr__(self, "_boundary_cycles", None)

    def __setattr__(self, name, value):
        raise AttributeError("Surface4 is immutable")

    def __repr__(self) -> str:
        kind = "closed" if self.is_closed else "bounded"
        return f"Surface4({self.id!r}, {self.vertices.shape[0]} vertices, " \
               f"{self.triangles.shape[0]} triangles, {kind})"

    def with_vertices(self, vertices) -> "Surface4":
        return Surface4(self.id, vertices, self.triangles)

    @property
    def boundary_edge_set(self) -> frozenset:
        cached = self._boundary_edges
        if cached is None:
            edges = _mesh.boundary_directed_edges(self.triangles)
            cached = frozenset((min(a, b), max(a, b)) for a, b in edges)
            object.__setattr__(self, "_boundary_edges", cached)
        return cached

    @property
    def is_closed(self) -> bool:
        return not self.boundary_edge_set

    def boundary_cycles(self) -> list[tuple[int, ...]]:
        cached = self._boundary_cycles
        if cached is None:
            cycles, problems = _mesh.chain_boundary(self.triangles)
            if problems:
                raise ValueError(f"boundary of surface {self.id!r} does not chain: {problems[0]}")
            cached = cycles
            object.__setattr__(self, "_boundary_cycles", cached)
        return list(cached)

    def boundary_loops(self) -> list[Loop]:
        """Boundary components as loops, inheriting the orientation the
        triangles induce on their boundary edges."""
        return [
            Loop(f"{self.id}:boundary:{k}", self.vertices[list(cycle)])
            for k, cycle in enumerate(self.boundary_cycles())
        ]

    def tau_extent(self) -> TauExtent:
        t = self.vertices[:, 0]
        return TauExtent(float(t.min()), float(t.max()))

    def projected(self, axis: Axis) -> np.ndarray:
        return project(self.vertices, axis)

    def dropped(self, axis: Axis) -> np.ndarray:
        return self.vertices[:, int(Axis(axis))]

    def connected_components(self) -> list["Surface4"]:
        groups = _mesh.vertex_components(self.vertices.shape[0], self.triangles)
        if len(groups) == 1:
            return [self]
        out = []
        for k, tris in enumerate(groups):
            sub = self.triangles[tris]
            used = np.unique(sub)
            remap = {int(v): i for i, v in enumerate(used)}
            new_tri = np.vectorize(remap.get)(sub)
            out.append(Surface4(f"{self.id}#{k}", self.vertices[used], new_tri))
        return out


def validate_surface(surface: Surface4, tol: float = 1e-9) -> ValidationReport:
    """Mesh structure, orientation, boundary chaining, non-degenerate
    triangles, and embeddedness of the spatial projection."""
    report = ValidationReport()
    for problem in _mesh.topology_problems(surface.triangles):
        report.add("surface-mesh", [surface.id], problem)
    _, chain_problems = _mesh.chain_boundary(surface.triangles)
    for problem in chain_problems:
        report.add("surface-mesh", [surface.id], problem)

    v = surface.vertices
    tri = surface.triangles
    a, b, c = v[tri[:, 0]], v[tri[:, 1]], v[tri[:, 2]]
    u1 = b - a
    u2 = c - a
    g11 = np.sum(u1 * u1, axis=1)
    g22 = np.sum(u2 * u2, axis=1)
    g12 = np.sum(u1 * u2, axis=1)
    area = np.sqrt(np.maximum(g11 * g22 - g12 * g12, 0.0))
    longest = np.sqrt(np.maximum(g11, g22))
    thin = area <= tol * np.maximum(longest, 1.0)
    for t_idx in np.nonzero(thin)[0]:
        report.add(
            "surface-mesh", [surface.id],
            f"triangle {int(t_idx)} is degenerate (height below tolerance)",
            triangle=int(t_idx),
        )
    if not report.ok:
        return report

    _projected_embedding_violations(surface, tol, report)
    return report


def _projected_embedding_violations(surface: Surface4, tol: float, report: ValidationReport) -> None:
    """The spatial projection must be an embedded surface: non-adjacent
    triangles stay apart, and triangles sharing a vertex or an edge do
    not fold onto each other."""
    pts = surface.projected(Axis.A0)
    for message, pair in _geom.mesh_embedding_problems(pts, surface.triangles, tol):
        report.add("surface-embedding", [surface.id], "projected " + message, triangles=pair)


# ---------------------------------------------------------------------------
# piercings


@dataclass(frozen=True)
class Piercing:
    """One transversal crossing of a loop through a projected surface."""

    axis: Axis
    loop_edge: int
    loop_u: float
    triangle: int
    point: tuple[float, float, float]
    sgn: int
    ht: int
    loop_drop: float     # dropped coordinate of the loop at the crossing
    surface_drop: float  # dropped coordinate of the surface at the crossing

    @property
    def eps(self) -> int:
        return self.sgn * self.ht

    def param(self) -> tuple[int, float]:
        return (self.loop_edge, self.loop_u)


def piercings(loop: Loop, surface: Surface4, axis: Axis, tol: float = 1e-9) -> list[Piercing]:
    """All transversal piercings of the loop through the projected
    surface, in loop parameter order.

    Refuses, rather than guesses at, every contact that is not a clean
    transversal crossing: loop vertices or whole edges within tolerance
    of a triangle, crossings within tolerance of a mesh edge (boundary or
    interior), and crossings where the dropped coordinate ties.
    """
    axis = Axis(axis)
    V = surface.projected(axis)
    drop_v = surface.dropped(axis)
    tri = surface.triangles
    P = project(loop.vertices, axis)
    drop_l = loop.vertices[:, int(axis)]
    starts, ends = _geom.cyclic_pairs(P)
    d_starts = drop_l
    d_ends = np.roll(drop_l, -1)

    A, B, C = V[tri[:, 0]], V[tri[:, 1]], V[tri[:, 2]]
    N = np.cross(B - A, C - A)
    n_norm = np.linalg.norm(N, axis=1)
    edge_len = np.maximum.reduce(
        [
            np.linalg.norm(B - A, axis=1),
            np.linalg.norm(C - B, axis=1),
            np.linalg.norm(A - C, axis=1),
        ]
    )
    usable = n_norm > tol * np.maximum(edge_len, 1.0)

    # bounding-box prefilter
    tri_lo = np.minimum.reduce([A, B, C]) - tol
    tri_hi = np.maximum.reduce([A, B, C]) + tol
    edge_lo = np.minimum(starts, ends) - tol
    edge_hi = np.maximum(starts, ends) + tol
    overlap = np.all(edge_lo[:, None, :] <= tri_hi[None, :, :], axis=2) & np.all(
        edge_hi[:, None, :] >= tri_lo[None, :, :], axis=2
    )

    orient = AXIS_ORIENTATION[axis]
    found: list[Piercing] = []
    for e_idx, t_idx in np.argwhere(overlap):
        e_idx, t_idx = int(e_idx), int(t_idx)
        a_pt, b_pt = starts[e_idx], ends[e_idx]
        ta, tb, tc = A[t_idx], B[t_idx], C[t_idx]
        if not usable[t_idx]:
            if _geom.segment_triangle_distance(a_pt, b_pt, ta, tb, tc) <= tol:
                raise TangentIntersection(
                    f"loop {loop.id!r} touches a degenerate projected triangle "
                    f"{t_idx} of surface {surface.id!r} under axis {int(axis)}"
                )
            continue
        n_hat = N[t_idx] / n_norm[t_idx]
        sa = float(n_hat @ (a_pt - ta))
        sb = float(n_hat @ (b_pt - ta))
        if abs(sa) <= tol or abs(sb) <= tol:
            if _geom.segment_triangle_distance(a_pt, b_pt, ta, tb, tc) <= tol:
                raise TangentIntersection(
                    f"loop {loop.id!r} touches surface {surface.id!r} at or along "
                    f"triangle {t_idx} under axis {int(axis)} (no transversal crossing)"
                )
            continue
        if sa * sb > 0:
            continue
        t_par = sa / (sa - sb)
        x = a_pt + t_par * (b_pt - a_pt)
        lam = _geom.barycentric(x, ta, tb, tc)
        heights = _geom.triangle_edge_heights(ta, tb, tc)
        margins = lam * heights
        min_margin = float(margins.min())
        if min_margin <= -tol:
            continue
        if min_margin <= tol:
            grazed = [k for k in range(3) if margins[k] <= tol]
            mesh_edges = [
                tuple(sorted((int(tri[t_idx][(k + 1) % 3]), int(tri[t_idx][(k + 2) % 3]))))
                for k in grazed
            ]
            if any(me in surface.boundary_edge_set for me in mesh_edges):
                raise BoundaryGraze(
                    f"loop {loop.id!r} pierces surface {surface.id!r} within tolerance "
                    f"of its boundary (triangle {t_idx}, axis {int(axis)})"
                )
            raise EdgeGraze(
                f"loop {loop.id!r} pierces surface {surface.id!r} within tolerance of "
                f"an interior mesh edge (triangle {t_idx}, axis {int(axis)})"
            )
        sgn = int(np.sign(sb - sa)) * int(orient)
        surf_drop = float(lam @ drop_v[tri[t_idx]])
        loop_drop = float(d_starts[e_idx] + t_par * (d_ends[e_idx] - d_starts[e_idx]))
        diff = surf_drop - loop_drop
        if abs(diff) <= tol:
            raise HeightTie(
                f"loop {loop.id!r} and surface {surface.id!r} sit at the same dropped "
                f"coordinate ({surf_drop:.6g}) at a piercing under axis {int(axis)}"
            )
        ht = 1 if diff < 0 else -1
        found.append(
            Piercing(
                axis=axis,
                loop_edge=e_idx,
                loop_u=float(t_par),
                triangle=t_idx,
                point=(float(x[0]), float(x[1]), float(x[2])),
                sgn=sgn,
                ht=ht,
                loop_drop=loop_drop,
                surface_drop=surf_drop,
            )
        )
    found.sort(key=Piercing.param)
    return found


def surface_linking_number(loop: Loop, surface: Surface4, axis: Axis, tol: float = 1e-9) -> int:
    """Signed piercing sum of one loop through the projected surface.

    Axis-independent for closed surfaces; for surfaces with boundary the
    caller is responsible for time-ordering, without which the value is
    not deformation-stable.
    """
    return sum(p.eps for p in piercings(loop, surface, axis, tol))


def hyperlink_surface_linking_number(
    hyperlink: Hyperlink, surface: Surface4, axis: Axis, tol: float = 1e-9
) -> int:
    """Sum of loop-surface linking numbers over the hyperlink components.

    When the surface has boundary, every component loop must be strictly
    time-ordered against the surface's full time extent.
    """
    if not surface.is_closed:
        ext = surface.tau_extent()
        for loop in hyperlink:
            if time_order(loop, ext, tol) is Order.INCOMPARABLE:
                raise NotTimeOrdered(
                    f"loop {loop.id!r} overlaps surface {surface.id!r} in time; "
                    "its linking with a bounded surface is not an invariant"
                )
    return sum(surface_linking_number(loop, surface, axis, tol) for loop in hyperlink)


# ---------------------------------------------------------------------------
# piercing sequences and arc withdrawal


@dataclass(frozen=True)
class Arc:
    """Piece of a loop between consecutive piercings (cyclically):
    ``start`` and ``end`` index into the owning sequence's piercings.
    ``tau_lo``/``tau_hi`` bound the time the loop sweeps along the arc;
    they are None on exterior arcs created by merging during withdrawal."""

    kind: str
    start: int
    end: int
    tau_lo: float | None
    tau_hi: float | None


@dataclass(frozen=True)
class PiercingSequence:
    loop_id: str
    surface_id: str
    piercings: tuple[Piercing, ...]
    arcs: tuple[Arc, ...]

    def interior_arcs(self) -> list[Arc]:
        return [a for a in self.arcs if a.kind == INTERIOR]


def _arc_param_points(loop: Loop, p_from: Piercing, p_to: Piercing) -> list[tuple[int, float]]:
    """Loop parameters visited walking forward from one piercing to the
    next: both piercings plus every vertex passed in between.  (edge, 0.0)
    addresses the vertex at the start of that edge."""
    n = loop.n
    start = (p_from.loop_edge, p_from.loop_u)
    end = (p_to.loop_edge, p_to.loop_u)
    out = [start]
    if start < end:
        out.extend((e, 0.0) for e in range(start[0] + 1, end[0] + 1))
    else:
        out.extend((e, 0.0) for e in range(start[0] + 1, n))
        out.extend((e, 0.0) for e in range(0, end[0] + 1))
    out.append(end)
    return out


def _arc_tau_range(loop: Loop, p_from: Piercing, p_to: Piercing) -> tuple[float, float]:
    times = [loop.x0_at(e, u) for e, u in _arc_param_points(loop, p_from, p_to)]
    return (min(times), max(times))


def _arc_midpoint(loop: Loop, p_from: Piercing, p_to: Piercing) -> np.ndarray:
    pts = [loop.spatial_at(e, u) for e, u in _arc_param_points(loop, p_from, p_to)]
    pts = np.asarray(pts)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    total = float(seg.sum())
    if total <= 0.0:
        return pts[0]
    target = total / 2.0
    acc = 0.0
    for k, length in enumerate(seg):
        if acc + length >= target:
            t = (target - acc) / length if length > 0 else 0.0
            return pts[k] + t * (pts[k + 1] - pts[k])
        acc += length
    return pts[-1]


def piercing_sequence(loop: Loop, surface: Surface4, tol: float = 1e-9) -> PiercingSequence:
    """Cyclic sequence of time-projection piercings with the arcs between
    them classified as interior or exterior.

    The surface must be closed and connected so that containment is
    meaningful.  Classification is done twice over: each arc midpoint is
    tested against the projected solid, and the results must alternate
    around the loop; disagreement raises NonSeparatingProjection.
    """
    if not surface.is_closed:
        raise ValueError(f"surface {surface.id!r} has boundary; piercing sequences need a closed surface")
    pier = piercings(loop, surface, Axis.A0, tol)
    if not pier:
        return PiercingSequence(loop.id, surface.id, (), ())

    V3 = surface.projected(Axis.A0)
    arcs = []
    m = len(pier)
    for i in range(m):
        p_from = pier[i]
        p_to = pier[(i + 1) % m]
        mid = _arc_midpoint(loop, p_from, p_to)
        side = _geom.point_in_mesh(mid, V3, surface.triangles, tol)
        if side == _geom.ON_BOUNDARY:
            raise TangentIntersection(
                f"arc midpoint of loop {loop.id!r} touches the projected surface "
                f"{surface.id!r}"
            )
        lo, hi = _arc_tau_range(loop, p_from, p_to)
        arcs.append(
            Arc(
                kind=INTERIOR if side == _geom.INSIDE else EXTERIOR,
                start=i,
                end=(i + 1) % m,
                tau_lo=lo,
                tau_hi=hi,
            )
        )
    kinds = [a.kind for a in arcs]
    if m % 2 == 1 or any(kinds[i] == kinds[(i + 1) % m] for i in range(m)):
        raise NonSeparatingProjection(
            f"arc classification of loop {loop.id!r} against surface {surface.id!r} "
            f"does not alternate; the projected surface does not separate the loop "
            f"cleanly (kinds: {kinds})"
        )
    return PiercingSequence(loop.id, surface.id, tuple(pier), tuple(arcs))


def withdraw_removable_arcs(seq: PiercingSequence, extent: TauExtent) -> PiercingSequence:
    """Delete interior arcs that can slide out of the surface's time
    extent, merging their neighbours, until only spanning arcs remain.

    An interior arc is removable exactly when its time range does not
    cover [extent.lo, extent.hi]: the loop can then be deformed, moving
    only in time, so that the whole arc happens strictly before or after
    the surface and the two piercings cancel.  Comparisons are exact
    float comparisons; the extent endpoints are attained at vertices.
    """
    pier = list(seq.piercings)
    arcs = list(seq.arcs)
    while True:
        target = None
        for idx, arc in enumerate(arcs):
            if arc.kind != INTERIOR:
                continue
            assert arc.tau_lo is not None and arc.tau_hi is not None
            if arc.tau_lo > extent.lo or arc.tau_hi < extent.hi:
                target = idx
                break
        if target is None:
            break
        if len(arcs) == 2:
            # last interior arc and its exterior partner: everything cancels
            pier = []
            arcs = []
            break
        arc = arcs[target]
        prev_idx = (target - 1) % len(arcs)
        next_idx = (target + 1) % len(arcs)
        merged = Arc(
            kind=EXTERIOR,
            start=arcs[prev_idx].start,
            end=arcs[next_idx].end,
            tau_lo=None,
            tau_hi=None,
        )
        drop = {arc.start, arc.end}
        keep_arcs = [a for k, a in enumerate(arcs) if k not in {prev_idx, target, next_idx}]
        keep_arcs.append(merged)
        keep_pier = [p for k, p in enumerate(pier) if k not in drop]
        # reindex arc endpoints against the surviving piercings
        old_to_new = {}
        new_i = 0
        for k in range(len(pier)):
            if k in drop:
                continue
            old_to_new[k] = new_i
            new_i += 1
        arcs = [
            Arc(a.kind, old_to_new[a.start], old_to_new[a.end], a.tau_lo, a.tau_hi)
            for a in keep_arcs
        ]
        arcs.sort(key=lambda a: a.start)
        pier = keep_pier
    return PiercingSequence(seq.loop_id, seq.surface_id, tuple(pier), tuple(arcs))


@dataclass(frozen=True)
class PiercingCount:
    value: int
    exactness: str              # "exact" | "lower-bound"
    lower_bound: int | None = None

    def to_dict(self) -> dict:
        out = {"value": self.value, "exactness": self.exactness}
        if self.lower_bound is not None:
            out["lower_bound"] = self.lower_bound
        return out


def piercing_count(hyperlink: Hyperlink, surface: Surface4, tol: float = 1e-9) -> PiercingCount:
    """Minimal transversal piercing count of a hyperlink through a surface.

    For closed surfaces, arc withdrawal reaches the minimum and the count
    is exact, summed over surface components and hyperlink loops.  For
    surfaces with boundary the representative's raw count is returned
    with exactness "lower-bound", alongside |linking| which the true
    minimum can never go below.
    """
    if surface.is_closed:
        total = 0
        for comp in surface.connected_components():
            ext = comp.tau_extent()
            for loop in hyperlink:
                seq = piercing_sequence(loop, comp, tol)
                reduced = withdraw_removable_arcs(seq, ext)
                total += len(reduced.piercings)
        return PiercingCount(total, "exact")
    ext = surface.tau_extent()
    for loop in hyperlink:
        if time_order(loop, ext, tol) is Order.INCOMPARABLE:
            raise NotTimeOrdered(
                f"loop {loop.id!r} overlaps surface {surface.id!r} in time; "
                "piercing counts over a bounded surface need time-ordering"
            )
    total = sum(len(piercings(loop, surface, Axis.A0, tol)) for loop in hyperlink)
    bound = abs(hyperlink_surface_linking_number(hyperlink, surface, Axis.A0, tol))
    return PiercingCount(total, "lower-bound", lower_bound=bound)
