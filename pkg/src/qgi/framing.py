"""Framed hyperlinks, compact regions in the time-zero slice, and the
confinement number.

A frame decorates a loop's spatial projection with nodes: marked points
(edge index, parameter) carrying a common half-twist sign.  A region is
a closed triangle mesh in 3-space, read as the solid it bounds inside
the x0 = 0 slice.  The confinement number counts the nodes whose spatial
position falls inside a region; it only makes sense while no node sits
on a region boundary, so boundary contact is refused, never rounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _geom, _mesh
from .errors import NodeOnBoundary
from .geom4 import Hyperlink, Loop, ValidationReport

Containment = str  # one of _geom.INSIDE / OUTSIDE / ON_BOUNDARY
INSIDE = _geom.INSIDE
OUTSIDE = _geom.OUTSIDE
ON_BOUNDARY = _geom.ON_BOUNDARY


@dataclass(frozen=True)
class Node:
    """Half-twist marker on a loop's spatial projection: sits on edge
    ``edge`` at parameter ``u`` in (0, 1), with twist sign +1 or -1."""

    loop_id: str
    edge: int
    u: float
    sign: int


class Region3:
    """Closed oriented triangle mesh in 3-space bounding a compact solid
    in the x0 = 0 time slice.  May have several shell components."""

    __slots__ = ("id", "vertices", "triangles")

    def __init__(self, id: str, vertices, triangles) -> None:
        vertices = np.asarray(vertices, dtype=np.float64)
        if vertices.ndim != 2 or vertices.shape[1] != 3:
            raise ValueError(f"region {id!r}: vertices must be (n, 3), got {vertices.shape}")
        triangles = np.asarray(triangles, dtype=np.int64)
        if triangles.ndim != 2 or triangles.shape[1] != 3:
            raise ValueError(f"region {id!r}: triangles must be (t, 3), got {triangles.shape}")
        if triangles.size and (triangles.min() < 0 or triangles.max() >= len(vertices)):
            raise ValueError(f"region {id!r}: triangle index out of range")
        vertices.setflags(write=False)
        triangles.setflags(write=False)
        object.__setattr__(self, "id", str(id))
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "triangles", triangles)

    def __setattr__(self, name, value):
        raise AttributeError(f"Region3 is immutable (attempted to set {name!r})")

    def __repr__(self) -> str:
        return f"Region3({self.id!r}, {len(self.vertices)} vertices, {len(self.triangles)} triangles)"

    def with_vertices(self, vertices) -> "Region3":
        return Region3(self.id, vertices, self.triangles)

    def connected_components(self) -> list["Region3"]:
        groups = _mesh.vertex_components(len(self.vertices), self.triangles)
        if len(groups) <= 1:
            return [self]
        out = []
        for k, tri_idx in enumerate(groups):
            tris = self.triangles[tri_idx]
            used = np.unique(tris)
            remap = {int(v): i for i, v in enumerate(used)}
            new_tris = np.vectorize(remap.get)(tris)
            out.append(Region3(f"{self.id}#{k}", self.vertices[used], new_tris))
        return out


def validate_region(region: Region3, tol: float = 1e-9) -> ValidationReport:
    """A region mesh must be a closed, embedded, consistently oriented
    2-manifold with non-degenerate triangles."""
    report = ValidationReport()
    for problem in _mesh.topology_problems(region.triangles):
        report.add("region-mesh", [region.id], problem)
    boundary = _mesh.boundary_directed_edges(region.triangles)
    if boundary:
        report.add(
            "region-mesh", [region.id],
            f"mesh is not closed ({len(boundary)} boundary edges)",
        )

    v = region.vertices
    tri = region.triangles
    a, b, c = v[tri[:, 0]], v[tri[:, 1]], v[tri[:, 2]]
    area = np.linalg.norm(np.cross(b - a, c - a), axis=1)
    longest = np.sqrt(np.maximum(np.sum((b - a) ** 2, axis=1), np.sum((c - a) ** 2, axis=1)))
    for t_idx in np.nonzero(area <= tol * np.maximum(longest, 1.0))[0]:
        report.add(
            "region-mesh", [region.id],
            f"triangle {int(t_idx)} is degenerate (height below tolerance)",
            triangle=int(t_idx),
        )
    if not report.ok:
        return report

    for message, pair in _geom.mesh_embedding_problems(v, tri, tol):
        report.add("region-embedding", [region.id], message, triangles=pair)
    return report


def point_in_region(point, region: Region3, tol: float = 1e-9) -> Containment:
    """Classify a 3D point against the solid the region mesh bounds.

    A multi-shell region contains a point when any shell does; boundary
    contact with any shell wins over everything else.
    """
    verdicts = [
        _geom.point_in_mesh(point, comp.vertices, comp.triangles, tol)
        for comp in region.connected_components()
    ]
    if ON_BOUNDARY in verdicts:
        return ON_BOUNDARY
    if INSIDE in verdicts:
        return INSIDE
    return OUTSIDE


@dataclass(frozen=True)
class FramedHyperlink:
    """Hyperlink plus the node decorations of its component loops."""

    hyperlink: Hyperlink
    nodes: tuple[Node, ...]

    def __init__(self, hyperlink: Hyperlink, nodes=()) -> None:
        object.__setattr__(self, "hyperlink", hyperlink)
        object.__setattr__(self, "nodes", tuple(nodes))
        ids = {loop.id for loop in hyperlink}
        for node in self.nodes:
            if node.loop_id not in ids:
                raise ValueError(f"node references unknown loop {node.loop_id!r}")
            loop = hyperlink.loop(node.loop_id)
            if not 0 <= node.edge < loop.n:
                raise ValueError(
                    f"node on loop {node.loop_id!r}: edge {node.edge} out of range"
                )
            if not 0.0 < node.u < 1.0:
                raise ValueError(
                    f"node on loop {node.loop_id!r}: parameter {node.u} outside (0, 1)"
                )

    def nodes_of(self, loop_id: str) -> list[Node]:
        return [n for n in self.nodes if n.loop_id == loop_id]


def node_position(framed: FramedHyperlink, node: Node) -> np.ndarray:
    """Spatial (projected) position of a node."""
    return framed.hyperlink.loop(node.loop_id).spatial_at(node.edge, node.u)


def validate_frame(
    framed: FramedHyperlink, regions: list[Region3] = (), tol: float = 1e-9
) -> ValidationReport:
    """Frame minimality and placement rules.

    Every decorated loop must carry nodes of a single sign and an even
    count; no node may sit within tolerance of any region boundary.
    """
    report = ValidationReport()
    for loop in framed.hyperlink:
        nodes = framed.nodes_of(loop.id)
        if not nodes:
            continue
        signs = {n.sign for n in nodes}
        if len(signs) > 1:
            report.add(
                "node-sign", [loop.id],
                "nodes on one loop must share a single twist sign",
            )
        if len(nodes) % 2 != 0:
            report.add(
                "node-parity", [loop.id],
                f"node count must be even, got {len(nodes)}",
            )
    for node in framed.nodes:
        pos = node_position(framed, node)
        for region in regions:
            if _geom.point_mesh_distance(pos, region.vertices, region.triangles) <= tol:
                report.add(
                    "node-boundary", [node.loop_id, region.id],
                    f"node at edge {node.edge}, u={node.u:.6g} lies on the "
                    f"boundary of region {region.id!r}",
                )
    return report


def confinement_number(framed: FramedHyperlink, region: Region3, tol: float = 1e-9) -> int:
    """Count of the frame's nodes lying inside the region's solid.

    Boundary contact makes the count ill-defined and raises; loops
    without nodes contribute zero.
    """
    count = 0
    for node in framed.nodes:
        pos = node_position(framed, node)
        verdict = point_in_region(pos, region, tol)
        if verdict == ON_BOUNDARY:
            raise NodeOnBoundary(
                f"node on loop {node.loop_id!r} (edge {node.edge}, u={node.u:.6g}) "
                f"sits on the boundary of region {region.id!r}"
            )
        if verdict == INSIDE:
            count += 1
    return count


def slice_crossing_points(loop: Loop, tol: float = 1e-9) -> list[np.ndarray]:
    """Spatial points where the loop meets the x0 = 0 slice.

    Vertices within tolerance of the slice count as meetings; so does
    every transversal crossing along an edge.
    """
    out = []
    times = loop.times()
    spatial = loop.spatial()
    n = loop.n
    for k in range(n):
        t0, t1 = times[k], times[(k + 1) % n]
        if abs(t0) <= tol:
            out.append(spatial[k])
        if t0 * t1 < 0 and abs(t0) > tol and abs(t1) > tol:
            u = t0 / (t0 - t1)
            out.append(_geom.lerp(spatial[k], spatial[(k + 1) % n], u))
    return out


def region_slice_violations(
    hyperlink: Hyperlink, region: Region3, tol: float = 1e-9
) -> list[tuple[str, str]]:
    """(loop id, message) for loop points meeting the region's solid
    inside the x0 = 0 slice.  Downstream invariants assume hyperlinks
    stay clear of every region, so these are scene-level violations."""
    problems = []
    for loop in hyperlink:
        for pos in slice_crossing_points(loop, tol):
            verdict = point_in_region(pos, region, tol)
            if verdict != OUTSIDE:
                problems.append(
                    (
                        loop.id,
                        f"loop {loop.id!r} meets the x0=0 slice {verdict} "
                        f"region {region.id!r} at ({pos[0]:.6g}, {pos[1]:.6g}, {pos[2]:.6g})",
                    )
                )
    return problems
