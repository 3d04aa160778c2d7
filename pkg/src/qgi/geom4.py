"""Points, loops and hyperlinks in R x R^3.

Coordinates are stored as (x0, x1, x2, x3) with x0 the time coordinate.
Four forgetful projections matter:

* axis 0 drops time and keeps the spatial triple (x1, x2, x3);
* axis k (k = 1, 2, 3) drops the spatial coordinate xk and keeps the
  remaining three in the cyclic order (x0, x{k+1}, x{k+2}), indices mod 3
  over the spatial coordinates.

``PROJECTION_COLUMNS`` records the storage order of each image and
``AXIS_ORIENTATION`` the parity of that order against the orientation
each image space carries, which is what makes signed piercing counts
agree across axes.

Inside the spatial triple, three further plane projections produce the
crossing diagrams: plane k drops xk and keeps (x{k+1}, x{k+2}) cyclically.
The dropped coordinate decides which strand of a crossing is over.

A hyperlink is *time-like* when

* distinct points of the link never share all three spatial
  coordinates (checked as 3D separation of the spatial projection), and
* two points sharing two spatial coordinates (a crossing on some plane
  diagram) never share the time coordinate.

Both conditions are verified within a global tolerance; configurations
within tolerance of failure are reported, never repaired.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum

import numpy as np

from . import _geom


class Axis(IntEnum):
    """The four forgetful projections of R x R^3 onto 3-space."""

    A0 = 0
    A1 = 1
    A2 = 2
    A3 = 3


PROJECTION_COLUMNS: dict[Axis, tuple[int, int, int]] = {
    Axis.A0: (1, 2, 3),
    Axis.A1: (0, 2, 3),
    Axis.A2: (0, 3, 1),
    Axis.A3: (0, 1, 2),
}

# Parity of PROJECTION_COLUMNS against the orientation of each image
# space.  Axis 0 keeps the spatial orientation; the three spatial drops
# carry the opposite parity relative to their stored column order.
AXIS_ORIENTATION: dict[Axis, float] = {
    Axis.A0: 1.0,
    Axis.A1: -1.0,
    Axis.A2: -1.0,
    Axis.A3: -1.0,
}


class Plane(IntEnum):
    """Diagram planes inside the spatial triple; plane k drops xk."""

    P1 = 1
    P2 = 2
    P3 = 3


# Columns are indices into the spatial triple (x1, x2, x3) -> 0, 1, 2.
PLANE_COLUMNS: dict[Plane, tuple[int, int]] = {
    Plane.P1: (1, 2),
    Plane.P2: (2, 0),
    Plane.P3: (0, 1),
}
PLANE_DROPPED: dict[Plane, int] = {Plane.P1: 0, Plane.P2: 1, Plane.P3: 2}


def project(points: np.ndarray, axis: Axis) -> np.ndarray:
    """Apply one of the four forgetful projections to (n, 4) points."""
    pts = np.asarray(points, dtype=np.float64)
    return pts[..., list(PROJECTION_COLUMNS[Axis(axis)])]


@dataclass(frozen=True)
class TauExtent:
    lo: float
    hi: float


class Order(Enum):
    BEFORE = "before"
    AFTER = "after"
    INCOMPARABLE = "incomparable"


class Loop:
    """Closed piecewise-linear loop in R x R^3.

    ``vertices`` holds one row per vertex; the closing edge from the last
    row back to the first is implicit, so no vertex is repeated.  Edge i
    runs from vertex i to vertex (i + 1) mod n, and a point on it is
    addressed by the pair (edge, u) with u in [0, 1].
    """

    __slots__ = ("id", "vertices")

    def __init__(self, id: str, vertices) -> None:
        arr = _geom.as_points(vertices, 4).copy()
        arr.flags.writeable = False
        object.__setattr__(self, "id", str(id))
        object.__setattr__(self, "vertices", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Loop is immutable")

    def __repr__(self) -> str:
        return f"Loop({self.id!r}, {self.n} vertices)"

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    def spatial(self) -> np.ndarray:
        return self.vertices[:, 1:4]

    def times(self) -> np.ndarray:
        return self.vertices[:, 0]

    def tau_extent(self) -> TauExtent:
        t = self.vertices[:, 0]
        return TauExtent(float(t.min()), float(t.max()))

    def point_at(self, edge: int, u: float) -> np.ndarray:
        a = self.vertices[edge % self.n]
        b = self.vertices[(edge + 1) % self.n]
        return a + (b - a) * u

    def spatial_at(self, edge: int, u: float) -> np.ndarray:
        return self.point_at(edge, u)[1:4]

    def x0_at(self, edge: int, u: float) -> float:
        a = self.vertices[edge % self.n, 0]
        b = self.vertices[(edge + 1) % self.n, 0]
        return float(a + (b - a) * u)

    def with_vertices(self, vertices) -> "Loop":
        return Loop(self.id, vertices)

    def subdivided(self, edge: int) -> "Loop":
        """Insert the midpoint of an edge; the point set is unchanged."""
        edge = edge % self.n
        a = self.vertices[edge]
        b = self.vertices[(edge + 1) % self.n]
        mid = 0.5 * (a + b)
        new = np.insert(self.vertices, edge + 1, mid, axis=0)
        return Loop(self.id, new)

    def reversed(self) -> "Loop":
        """Same point set traversed the other way round."""
        return Loop(self.id, self.vertices[::-1])


class Hyperlink:
    """Disjoint union of loops, with unique component ids."""

    __slots__ = ("loops", "_by_id", "validated")

    def __init__(self, loops) -> None:
        loops = tuple(loops)
        by_id = {}
        for loop in loops:
            if loop.id in by_id:
                raise ValueError(f"duplicate loop id {loop.id!r}")
            by_id[loop.id] = loop
        object.__setattr__(self, "loops", loops)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "validated", False)

    def __setattr__(self, name, value):
        if name == "validated":
            object.__setattr__(self, name, value)
            return
        raise AttributeError("Hyperlink is immutable")

    def __iter__(self):
        return iter(self.loops)

    def __len__(self) -> int:
        return len(self.loops)

    def loop(self, id: str) -> Loop:
        return self._by_id[id]

    def spatial_polylines(self) -> list[np.ndarray]:
        return [l.spatial() for l in self.loops]

    def tau_extent(self) -> TauExtent:
        if not self.loops:
            raise ValueError("empty hyperlink has no time extent")
        ext = [l.tau_extent() for l in self.loops]
        return TauExtent(min(e.lo for e in ext), max(e.hi for e in ext))


def tau_extent_of(obj) -> TauExtent:
    """Time extent of a loop, hyperlink, surface, extent, or (n, 4) array."""
    if isinstance(obj, TauExtent):
        return obj
    if hasattr(obj, "tau_extent"):
        ext = obj.tau_extent
        return ext() if callable(ext) else ext
    arr = np.asarray(obj, dtype=np.float64)
    t = arr[..., 0]
    return TauExtent(float(t.min()), float(t.max()))


def time_order(a, b, tol: float = 1e-9) -> Order:
    """Strict order of two time extents.

    A gap smaller than the tolerance cannot be certified and counts as
    incomparable, same as genuine overlap.
    """
    ea = tau_extent_of(a)
    eb = tau_extent_of(b)
    if eb.lo - ea.hi > tol:
        return Order.BEFORE
    if ea.lo - eb.hi > tol:
        return Order.AFTER
    return Order.INCOMPARABLE


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    code: str
    objects: tuple[str, ...]
    message: str
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "objects": list(self.objects),
            "message": self.message,
            "data": dict(self.data),
        }


class ValidationReport:
    """Ordered, deduplicated collection of violations."""

    def __init__(self, violations=()):
        self._violations: list[Violation] = list(violations)

    def add(self, code: str, objects, message: str, **data) -> None:
        self._violations.append(Violation(code, tuple(str(o) for o in objects), message, data))

    def extend(self, other: "ValidationReport") -> None:
        self._violations.extend(other._violations)

    @property
    def violations(self) -> list[Violation]:
        return sorted(self._violations, key=lambda v: (v.code, v.objects, v.message))

    @property
    def ok(self) -> bool:
        return not self._violations

    def codes(self) -> set[str]:
        return {v.code for v in self._violations}

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}

    def __repr__(self) -> str:
        return f"ValidationReport(ok={self.ok}, n={len(self._violations)})"


def validate_loop(loop: Loop, tol: float = 1e-9) -> ValidationReport:
    """Structural checks for a single loop: enough vertices, no collapsed
    edges, and a 4D embedding without self-contact."""
    report = ValidationReport()
    if loop.n < 3:
        report.add("structure", [loop.id], f"loop needs at least 3 vertices, has {loop.n}")
        return report
    s, e = _geom.cyclic_pairs(loop.vertices)
    lengths4 = np.linalg.norm(e - s, axis=1)
    for i in np.nonzero(lengths4 <= tol)[0]:
        report.add("structure", [loop.id], f"edge {int(i)} has zero length", edge=int(i))
    if not report.ok:
        return report

    v = loop.vertices
    prev = np.roll(v, 1, axis=0)
    nxt = np.roll(v, -1, axis=0)
    fold = np.minimum(
        _geom.point_segment_distance(nxt, prev, v),
        _geom.point_segment_distance(prev, v, nxt),
    )
    for i in np.nonzero(fold <= tol)[0]:
        report.add(
            "embedding", [loop.id],
            f"edges around vertex {int(i)} fold back onto each other", vertex=int(i),
        )

    n = loop.n
    if n >= 4:
        ii, jj = np.triu_indices(n, 1)
        gap = (jj - ii) % n
        keep = (gap != 1) & (gap != n - 1)
        ii, jj = ii[keep], jj[keep]
        d = _geom.segseg_distance(s[ii], e[ii], s[jj], e[jj])
        bad = np.nonzero(d <= tol)[0]
        if bad.size:
            k = int(bad[np.argmin(d[bad])])
            report.add(
                "embedding", [loop.id],
                f"loop touches itself (edges {int(ii[k])} and {int(jj[k])}, "
                f"distance {float(d[k]):.3e})",
                edges=[int(ii[k]), int(jj[k])], distance=float(d[k]),
            )
    return report


def _spatial_separation_violations(loops: list[Loop], tol: float, report: ValidationReport) -> None:
    """Distinct points of the union must never share all three spatial
    coordinates: per-loop spatial embedding plus pairwise separation."""
    for loop in loops:
        s3, e3 = _geom.cyclic_pairs(loop.spatial())
        lengths3 = np.linalg.norm(e3 - s3, axis=1)
        for i in np.nonzero(lengths3 <= tol)[0]:
            report.add(
                "spatial-overlap", [loop.id],
                f"edge {int(i)} collapses in the spatial projection", edge=int(i),
            )
        v = loop.spatial()
        prev = np.roll(v, 1, axis=0)
        nxt = np.roll(v, -1, axis=0)
        fold = np.minimum(
            _geom.point_segment_distance(nxt, prev, v),
            _geom.point_segment_distance(prev, v, nxt),
        )
        for i in np.nonzero(fold <= tol)[0]:
            report.add(
                "spatial-overlap", [loop.id],
                f"spatial projection folds back at vertex {int(i)}", vertex=int(i),
            )

    starts, ends, loop_of, edge_of, sizes = _edge_table([l.spatial() for l in loops])
    if starts.shape[0] < 2:
        return
    ii, jj = np.triu_indices(starts.shape[0], 1)
    same = loop_of[ii] == loop_of[jj]
    n_i = sizes[loop_of[ii]]
    gap = (edge_of[jj] - edge_of[ii]) % n_i
    adjacent = same & ((gap == 1) | (gap == n_i - 1))
    keep = ~adjacent & ~(same & (gap == 0))
    ii, jj = ii[keep], jj[keep]
    d = _geom.segseg_distance(starts[ii], ends[ii], starts[jj], ends[jj])
    bad = d <= tol
    if not bad.any():
        return
    seen = set()
    order = np.argsort(d)
    for k in order:
        if not bad[k]:
            continue
        a, b = int(loop_of[ii[k]]), int(loop_of[jj[k]])
        key = (min(a, b), max(a, b))
        if key in seen:
            continue
        seen.add(key)
        la, lb = loops[a], loops[b]
        which = "itself" if a == b else f"loop {lb.id!r}"
        report.add(
            "spatial-overlap", sorted({la.id, lb.id}),
            f"spatial projection of loop {la.id!r} touches {which} "
            f"(distance {float(d[k]):.3e})",
            distance=float(d[k]),
        )


def _edge_table(polylines: list[np.ndarray]):
    starts, ends, loop_of, edge_of = [], [], [], []
    sizes = []
    for idx, pts in enumerate(polylines):
        s, e = _geom.cyclic_pairs(pts)
        starts.append(s)
        ends.append(e)
        loop_of.append(np.full(len(pts), idx))
        edge_of.append(np.arange(len(pts)))
        sizes.append(len(pts))
    return (
        np.vstack(starts),
        np.vstack(ends),
        np.concatenate(loop_of),
        np.concatenate(edge_of),
        np.asarray(sizes),
    )


def _pairwise_4d_violations(loops: list[Loop], tol: float, report: ValidationReport) -> None:
    if len(loops) < 2:
        return
    starts, ends, loop_of, _, _ = _edge_table([l.vertices for l in loops])
    ii, jj = np.triu_indices(starts.shape[0], 1)
    cross = loop_of[ii] != loop_of[jj]
    ii, jj = ii[cross], jj[cross]
    if not ii.size:
        return
    d = _geom.segseg_distance(starts[ii], ends[ii], starts[jj], ends[jj])
    bad = d <= tol
    if not bad.any():
        return
    seen = set()
    for k in np.argsort(d):
        if not bad[k]:
            continue
        a, b = int(loop_of[ii[k]]), int(loop_of[jj[k]])
        key = (min(a, b), max(a, b))
        if key in seen:
            continue
        seen.add(key)
        report.add(
            "embedding", sorted({loops[a].id, loops[b].id}),
            f"loops {loops[a].id!r} and {loops[b].id!r} touch in R x R^3 "
            f"(distance {float(d[k]):.3e})",
            distance=float(d[k]),
        )


def validate_timelike(hyperlink: Hyperlink, tol: float = 1e-9) -> ValidationReport:
    """Full time-likeness validation of a hyperlink.

    Checks, in order: per-loop structure and 4D embedding, pairwise 4D
    disjointness, spatial separation of the projected link, and time
    separation at every crossing of the three plane diagrams.  Projection
    degeneracies found while scanning diagrams (tangencies, crossings at
    vertices, triple points) are reported as ``not-generic``: no crossing
    list, and hence no time check, is robust there.

    Sets ``hyperlink.validated`` when the report is clean.
    """
    from . import diagram as _diagram  # deferred: diagram imports this module

    report = ValidationReport()
    clean: list[Loop] = []
    for loop in hyperlink.loops:
        r = validate_loop(loop, tol)
        report.extend(r)
        if r.ok:
            clean.append(loop)

    if len(clean) >= 2:
        _pairwise_4d_violations(clean, tol, report)
    if clean:
        _spatial_separation_violations(clean, tol, report)

    if report.ok:
        polys = [l.spatial() for l in clean]
        names = [l.id for l in clean]
        for plane in Plane:
            crossings, degeneracies = _diagram.scan_plane(polys, plane, tol)
            for kind, strands, detail in degeneracies:
                report.add(
                    "not-generic",
                    sorted({names[s] for s in strands}),
                    f"plane {int(plane)}: {detail}",
                    plane=int(plane), kind=kind,
                )
            for c in crossings:
                la = clean[c.over.strand]
                lb = clean[c.under.strand]
                t_over = la.x0_at(c.over.edge, c.over.u)
                t_under = lb.x0_at(c.under.edge, c.under.u)
                if abs(t_over - t_under) <= tol:
                    report.add(
                        "time-tie", sorted({la.id, lb.id}),
                        f"plane {int(plane)}: strands cross at equal time "
                        f"{t_over:.6g} (difference {abs(t_over - t_under):.3e})",
                        plane=int(plane), time=float(t_over),
                    )

    hyperlink.validated = report.ok
    return report


@dataclass
class TimeOrderedPair:
    """A matter hyperlink and a geometric hyperlink whose components are
    pairwise comparable in time.  ``order`` maps (matter id, geometric id)
    to the matter loop's position and is filled in by validation."""

    matter: Hyperlink
    geometric: Hyperlink
    order: dict = field(default_factory=dict)

    def order_matrix(self) -> dict[str, dict[str, str]]:
        out: dict[str, dict[str, str]] = {}
        for (mid, gid), o in sorted(self.order.items()):
            out.setdefault(mid, {})[gid] = o.value
        return out


def validate_time_ordered_pair(pair: TimeOrderedPair, tol: float = 1e-9) -> ValidationReport:
    """Validate the union as one time-like hyperlink, then require every
    (matter, geometric) component pair to be strictly time-ordered."""
    union = Hyperlink(tuple(pair.matter.loops) + tuple(pair.geometric.loops))
    report = validate_timelike(union, tol)
    pair.order.clear()
    for m in pair.matter.loops:
        for g in pair.geometric.loops:
            o = time_order(m, g, tol)
            pair.order[(m.id, g.id)] = o
            if o is Order.INCOMPARABLE:
                report.add(
                    "incomparable", [m.id, g.id],
                    f"loops {m.id!r} and {g.id!r} overlap in time; "
                    "their pairing is not deformation-stable",
                )
    pair.matter.validated = pair.matter.validated or report.ok
    pair.geometric.validated = pair.geometric.validated or report.ok
    return report
