"""Planar crossing diagrams of spatial links.

A link here is a list of closed 3D polylines (the spatial projections of
hyperlink components).  Projecting along one spatial coordinate gives a
2D diagram; at each transversal double point the strand with the larger
dropped coordinate is *over*, and the crossing sign is +1 exactly when
(over tangent, under tangent) is a positively oriented 2D frame.

Everything a diagram cannot answer robustly is refused: collapsed edges,
tangencies and near-misses inside tolerance, crossings within tolerance
of a vertex, equal-height crossings, and triple points all raise
``DegenerateDiagram`` (or are reported as degeneracy records by
``scan_plane``, which collects instead of raising so that validation can
list every problem at once).

``linking_number`` sums the sign over *all* crossings between the two
components, which comes out as twice the conventional linking number;
``gauss_linking_number`` is the conventional one, computed without any
projection from exact solid angles, and is used as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _geom
from .errors import DegenerateDiagram, NumericalInstability, ParallelTangents
from .geom4 import PLANE_COLUMNS, PLANE_DROPPED, Plane


@dataclass(frozen=True)
class StrandRef:
    """A point on the projected link: strand index, edge index, and the
    parameter along that edge."""

    strand: int
    edge: int
    u: float

    def key(self) -> tuple:
        return (self.strand, self.edge, self.u)


@dataclass(frozen=True)
class Crossing:
    plane: Plane
    point: tuple[float, float]
    over: StrandRef
    under: StrandRef
    eps: int

    @property
    def inter_component(self) -> bool:
        return self.over.strand != self.under.strand

    def ref_for(self, strand: int) -> StrandRef:
        if self.over.strand == self.under.strand:
            raise ValueError("ref_for is ambiguous on a self-crossing")
        if self.over.strand == strand:
            return self.over
        if self.under.strand == strand:
            return self.under
        raise KeyError(f"crossing does not involve strand {strand}")

    def sort_key(self) -> tuple:
        return tuple(sorted([self.over.key(), self.under.key()]))


@dataclass(frozen=True)
class Diagram:
    plane: Plane
    strands: tuple[np.ndarray, ...]      # projected 2D polylines
    dropped: tuple[np.ndarray, ...]      # dropped coordinate per vertex
    names: tuple[str, ...]
    crossings: tuple[Crossing, ...]

    def crossings_between(self, i: int, j: int) -> list[Crossing]:
        out = []
        for c in self.crossings:
            s = {c.over.strand, c.under.strand}
            if s == {i, j}:
                out.append(c)
        return out


def crossing_sign(over_tangent, under_tangent, tol: float = 1e-9) -> int:
    """Sign of a crossing from the two 2D tangent directions.

    +1 exactly when the under tangent sits counterclockwise of the over
    tangent, i.e. over (1, 0) against under (0, 1) is positive.
    """
    o = np.asarray(over_tangent, dtype=np.float64)
    u = np.asarray(under_tangent, dtype=np.float64)
    o = o / np.linalg.norm(o)
    u = u / np.linalg.norm(u)
    c = o[0] * u[1] - o[1] * u[0]
    if abs(c) <= tol:
        raise ParallelTangents(f"tangents are parallel within tolerance (|cross| = {abs(c):.3e})")
    return 1 if c > 0 else -1


def scan_plane(polylines3, plane: Plane, tol: float = 1e-9):
    """Find every crossing of the projected link on one plane.

    Returns ``(crossings, degeneracies)`` where degeneracies is a list of
    ``(kind, strand_indices, detail)`` records.  A non-empty degeneracy
    list means the crossing list is incomplete or unreliable; strict
    callers should treat it as fatal.
    """
    plane = Plane(plane)
    cols = list(PLANE_COLUMNS[plane])
    drop = PLANE_DROPPED[plane]
    polys = [np.asarray(p, dtype=np.float64) for p in polylines3]
    projected = [p[:, cols] for p in polys]
    heights = [p[:, drop] for p in polys]

    degeneracies: list[tuple[str, tuple[int, ...], str]] = []
    crossings: list[Crossing] = []
    if not projected:
        return crossings, degeneracies

    starts, ends, strand_of, edge_of, sizes = _edge_table2(projected)
    lengths = np.linalg.norm(ends - starts, axis=1)
    collapsed = np.nonzero(lengths <= tol)[0]
    for k in collapsed:
        degeneracies.append(
            (
                "collapsed-edge",
                (int(strand_of[k]),),
                f"edge {int(edge_of[k])} of strand {int(strand_of[k])} projects to a point",
            )
        )
    if collapsed.size:
        return [], degeneracies

    # fold-back of adjacent edges in the projection
    for s_idx, pts in enumerate(projected):
        prev = np.roll(pts, 1, axis=0)
        nxt = np.roll(pts, -1, axis=0)
        fold = np.minimum(
            _geom.point_segment_distance(nxt, prev, pts),
            _geom.point_segment_distance(prev, pts, nxt),
        )
        for i in np.nonzero(fold <= tol)[0]:
            degeneracies.append(
                (
                    "tangency",
                    (s_idx,),
                    f"strand {s_idx} folds back on itself at projected vertex {int(i)}",
                )
            )

    E = starts.shape[0]
    ii, jj = np.triu_indices(E, 1)
    same = strand_of[ii] == strand_of[jj]
    gap = (edge_of[jj] - edge_of[ii]) % sizes[strand_of[ii]]
    adjacent = same & ((gap == 1) | (gap == sizes[strand_of[ii]] - 1))
    keep = ~adjacent
    ii, jj = ii[keep], jj[keep]

    d1 = ends[ii] - starts[ii]
    d2 = ends[jj] - starts[jj]
    r = starts[jj] - starts[ii]
    denom = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    sin_theta = denom / (lengths[ii] * lengths[jj])
    parallel = np.abs(sin_theta) <= tol

    with np.errstate(divide="ignore", invalid="ignore"):
        safe = np.where(parallel, 1.0, denom)
        s = (r[:, 0] * d2[:, 1] - r[:, 1] * d2[:, 0]) / safe
        t = (r[:, 0] * d1[:, 1] - r[:, 1] * d1[:, 0]) / safe
    properly = ~parallel & (s > 0.0) & (s < 1.0) & (t > 0.0) & (t < 1.0)

    # near-misses: pairs that do not properly cross but pass within tol
    suspects = np.nonzero(~properly)[0]
    if suspects.size:
        d2d = _geom.segseg_distance(
            starts[ii[suspects]], ends[ii[suspects]],
            starts[jj[suspects]], ends[jj[suspects]],
        )
        for k, dist in zip(suspects[d2d <= tol], d2d[d2d <= tol]):
            a, b = int(strand_of[ii[k]]), int(strand_of[jj[k]])
            degeneracies.append(
                (
                    "tangency",
                    tuple(sorted({a, b})),
                    f"strands {a} and {b} pass within tolerance without a "
                    f"transversal crossing (distance {float(dist):.3e})",
                )
            )

    hits = np.nonzero(properly)[0]
    all_vertices = np.vstack(projected)
    points = []
    for k in hits:
        ei, ej = int(ii[k]), int(jj[k])
        sk_, tk = float(s[k]), float(t[k])
        x = starts[ei] + sk_ * d1[k]
        h1 = heights[strand_of[ei]][edge_of[ei]]
        h1b = heights[strand_of[ei]][(edge_of[ei] + 1) % sizes[strand_of[ei]]]
        h2 = heights[strand_of[ej]][edge_of[ej]]
        h2b = heights[strand_of[ej]][(edge_of[ej] + 1) % sizes[strand_of[ej]]]
        hi = h1 + sk_ * (h1b - h1)
        hj = h2 + tk * (h2b - h2)
        a, b = int(strand_of[ei]), int(strand_of[ej])

        vdist = np.linalg.norm(all_vertices - x, axis=1).min()
        if vdist <= tol:
            degeneracies.append(
                (
                    "vertex-crossing",
                    tuple(sorted({a, b})),
                    f"crossing of strands {a} and {b} lies within tolerance of a vertex "
                    f"(distance {float(vdist):.3e})",
                )
            )
            continue
        if abs(hi - hj) <= tol:
            degeneracies.append(
                (
                    "height-tie",
                    tuple(sorted({a, b})),
                    f"strands {a} and {b} cross at equal dropped coordinate "
                    f"(difference {abs(hi - hj):.3e}); no over strand",
                )
            )
            continue

        ref_i = StrandRef(a, int(edge_of[ei]), sk_)
        ref_j = StrandRef(b, int(edge_of[ej]), tk)
        if hi > hj:
            over, under = ref_i, ref_j
            eps = 1 if denom[k] > 0 else -1
        else:
            over, under = ref_j, ref_i
            eps = 1 if -denom[k] > 0 else -1
        crossings.append(
            Crossing(plane, (float(x[0]), float(x[1])), over, under, eps)
        )
        points.append(x)

    if len(points) >= 2:
        pts = np.asarray(points)
        pi, pj = np.triu_indices(len(points), 1)
        close = np.nonzero(np.linalg.norm(pts[pi] - pts[pj], axis=1) <= tol)[0]
        for k in close:
            ca, cb = crossings[int(pi[k])], crossings[int(pj[k])]
            involved = {ca.over.strand, ca.under.strand, cb.over.strand, cb.under.strand}
            degeneracies.append(
                (
                    "triple-point",
                    tuple(sorted(involved)),
                    "two crossings coincide within tolerance (triple point)",
                )
            )

    crossings.sort(key=Crossing.sort_key)
    degeneracies.sort()
    return crossings, degeneracies


def _edge_table2(projected: list[np.ndarray]):
    starts, ends, strand_of, edge_of, sizes = [], [], [], [], []
    for idx, pts in enumerate(projected):
        s, e = _geom.cyclic_pairs(pts)
        starts.append(s)
        ends.append(e)
        strand_of.append(np.full(len(pts), idx))
        edge_of.append(np.arange(len(pts)))
        sizes.append(len(pts))
    return (
        np.vstack(starts),
        np.vstack(ends),
        np.concatenate(strand_of),
        np.concatenate(edge_of),
        np.asarray(sizes),
    )


def build_diagram(polylines3, plane: Plane, tol: float = 1e-9, names=None) -> Diagram:
    """Strict diagram construction: any degeneracy raises."""
    plane = Plane(plane)
    crossings, degeneracies = scan_plane(polylines3, plane, tol)
    if degeneracies:
        kinds = sorted({d[0] for d in degeneracies})
        first = degeneracies[0][2]
        raise DegenerateDiagram(
            f"plane {int(plane)} projection is degenerate ({', '.join(kinds)}): {first}"
        )
    cols = list(PLANE_COLUMNS[plane])
    drop = PLANE_DROPPED[plane]
    polys = [np.asarray(p, dtype=np.float64) for p in polylines3]
    if names is None:
        names = [str(i) for i in range(len(polys))]
    return Diagram(
        plane=plane,
        strands=tuple(p[:, cols] for p in polys),
        dropped=tuple(p[:, drop] for p in polys),
        names=tuple(str(n) for n in names),
        crossings=tuple(crossings),
    )


def linking_number(a_pts, b_pts, plane: Plane, tol: float = 1e-9) -> int:
    """Signed sum over every crossing between the two components.

    Twice the conventional linking number; independent of the plane for
    any diagram that builds cleanly.
    """
    dia = build_diagram([np.asarray(a_pts), np.asarray(b_pts)], plane, tol)
    return sum(c.eps for c in dia.crossings if c.inter_component)


def gauss_linking_number(a_pts, b_pts, tol: float = 1e-9) -> int:
    """Conventional linking number of two disjoint closed 3D polylines.

    Sums the exact signed solid angle subtended by each pair of edges
    (one from each curve); the total is 4 pi times the linking number.
    No projection is involved, which makes this an independent oracle for
    the diagram counts.
    """
    a = np.asarray(a_pts, dtype=np.float64)
    b = np.asarray(b_pts, dtype=np.float64)
    p0, p1 = _geom.cyclic_pairs(a)
    q0, q1 = _geom.cyclic_pairs(b)

    sep = _geom.segseg_distance(p0[:, None, :], p1[:, None, :], q0[None, :, :], q1[None, :, :])
    if float(sep.min()) <= tol:
        raise NumericalInstability(
            f"curves pass within tolerance of each other (distance {float(sep.min()):.3e}); "
            "the solid-angle sum is unreliable"
        )

    r13 = q0[None, :, :] - p0[:, None, :]
    r14 = q1[None, :, :] - p0[:, None, :]
    r23 = q0[None, :, :] - p1[:, None, :]
    r24 = q1[None, :, :] - p1[:, None, :]

    def unit(v):
        n = np.linalg.norm(v, axis=-1, keepdims=True)
        return np.where(n > 1e-300, v / np.where(n > 1e-300, n, 1.0), 0.0)

    n1 = unit(np.cross(r13, r14))
    n2 = unit(np.cross(r14, r24))
    n3 = unit(np.cross(r24, r23))
    n4 = unit(np.cross(r23, r13))

    def dot(u, v):
        return np.clip(np.sum(u * v, axis=-1), -1.0, 1.0)

    star = (
        np.arcsin(dot(n1, n2))
        + np.arcsin(dot(n2, n3))
        + np.arcsin(dot(n3, n4))
        + np.arcsin(dot(n4, n1))
    )
    seg_a = (p1 - p0)[:, None, :]
    seg_b = (q1 - q0)[None, :, :]
    orient = np.sign(np.sum(np.cross(seg_b, seg_a) * r13, axis=-1))
    total = float(np.sum(star * orient)) / (4.0 * np.pi)
    k = round(total)
    if abs(total - k) > 1e-6:
        raise NumericalInstability(
            f"solid-angle sum {total:.9f} is not within 1e-6 of an integer"
        )
    return int(k)
