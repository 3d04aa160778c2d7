"""Low-level vector kernels shared by the geometry modules.

Everything here works on plain float64 numpy arrays and is policy-free:
callers decide what a tolerance means.  Functions accept arbitrary
leading broadcast dimensions where noted.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateRay

_TINY = 1e-300


def as_points(values, dim: int) -> np.ndarray:
    """Coerce to a float64 (n, dim) array and reject non-finite entries."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise ValueError(f"expected an (n, {dim}) array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("coordinates must be finite")
    return arr


def lerp(a, b, t):
    return a + (np.asarray(b) - np.asarray(a)) * t


def cyclic_pairs(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Edge start/end arrays for a closed polyline (last edge wraps)."""
    return points, np.roll(points, -1, axis=0)


def rotation_from_seed(seed: int) -> np.ndarray:
    """Seeded uniform random rotation of R^3.

    A unit quaternion drawn from an isotropic Gaussian gives a rotation
    uniform in SO(3); the same seed always yields the same matrix.
    """
    rng = np.random.default_rng(seed)
    q = rng.normal(size=4)
    q = q / np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


# ---------------------------------------------------------------------------
# segment / segment


def segseg_distance(p0, p1, q0, q1) -> np.ndarray:
    """Minimum distance between segments [p0,p1] and [q0,q1].

    Inputs broadcast over leading axes; the last axis is the coordinate
    axis (any dimension).  Zero-length segments degrade gracefully to
    point distances.
    """
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    q0 = np.asarray(q0, dtype=np.float64)
    q1 = np.asarray(q1, dtype=np.float64)
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = np.sum(d1 * d1, axis=-1)
    e = np.sum(d2 * d2, axis=-1)
    b = np.sum(d1 * d2, axis=-1)
    c = np.sum(d1 * r, axis=-1)
    f = np.sum(d2 * r, axis=-1)
    denom = a * e - b * b
    s = np.where(denom > _TINY, (b * f - c * e) / np.maximum(denom, _TINY), 0.0)
    s = np.clip(s, 0.0, 1.0)
    # a zero-length second segment degrades to point-vs-segment: project
    # q0 onto [p0,p1] instead of keeping the parallel-case fallback s=0
    s = np.where(e <= _TINY, np.clip(-c / np.maximum(a, _TINY), 0.0, 1.0), s)
    t = np.where(e > _TINY, (b * s + f) / np.maximum(e, _TINY), 0.0)
    t_lo = t < 0.0
    t_hi = t > 1.0
    s = np.where(t_lo, np.clip(-c / np.maximum(a, _TINY), 0.0, 1.0), s)
    s = np.where(t_hi, np.clip((b - c) / np.maximum(a, _TINY), 0.0, 1.0), s)
    t = np.clip(t, 0.0, 1.0)
    diff = (p0 + s[..., None] * d1) - (q0 + t[..., None] * d2)
    return np.sqrt(np.sum(diff * diff, axis=-1))


def point_segment_distance(p, a, b) -> np.ndarray:
    """Distance from point(s) to segment(s); broadcasts like segseg_distance."""
    p = np.asarray(p, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    d = b - a
    dd = np.sum(d * d, axis=-1)
    t = np.where(dd > _TINY, np.sum((p - a) * d, axis=-1) / np.maximum(dd, _TINY), 0.0)
    t = np.clip(t, 0.0, 1.0)
    diff = p - (a + t[..., None] * d)
    return np.sqrt(np.sum(diff * diff, axis=-1))


# ---------------------------------------------------------------------------
# point / triangle

def point_triangles_distance(p, a, b, c) -> np.ndarray:
    """Distance from a 3D point to each triangle (a[i], b[i], c[i]).

    Vectorized closest-point-on-triangle with the usual seven Voronoi
    regions, applied in order so the first matching region wins.
    """
    p = np.asarray(p, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    n = a.shape[0]
    ab = b - a
    ac = c - a
    ap = p - a
    d1 = np.sum(ab * ap, axis=-1)
    d2 = np.sum(ac * ap, axis=-1)
    bp = p - b
    d3 = np.sum(ab * bp, axis=-1)
    d4 = np.sum(ac * bp, axis=-1)
    cp = p - c
    d5 = np.sum(ab * cp, axis=-1)
    d6 = np.sum(ac * cp, axis=-1)
    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4

    closest = np.empty_like(a)
    done = np.zeros(n, dtype=bool)

    def settle(mask, points):
        nonlocal done
        m = mask & ~done
        if m.any():
            closest[m] = points[m]
        done = done | mask

    settle((d1 <= 0) & (d2 <= 0), a)
    settle((d3 >= 0) & (d4 <= d3), b)
    with np.errstate(divide="ignore", invalid="ignore"):
        v_ab = np.where(np.abs(d1 - d3) > _TINY, d1 / (d1 - d3), 0.0)
    settle((vc <= 0) & (d1 >= 0) & (d3 <= 0), a + v_ab[:, None] * ab)
    settle((d6 >= 0) & (d5 <= d6), c)
    with np.errstate(divide="ignore", invalid="ignore"):
        w_ac = np.where(np.abs(d2 - d6) > _TINY, d2 / (d2 - d6), 0.0)
    settle((vb <= 0) & (d2 >= 0) & (d6 <= 0), a + w_ac[:, None] * ac)
    num = d4 - d3
    den = (d4 - d3) + (d5 - d6)
    with np.errstate(divide="ignore", invalid="ignore"):
        w_bc = np.where(np.abs(den) > _TINY, num / np.where(np.abs(den) > _TINY, den, 1.0), 0.0)
    settle((va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0), b + w_bc[:, None] * (c - b))
    total = va + vb + vc
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(np.abs(total) > _TINY, 1.0 / np.where(np.abs(total) > _TINY, total, 1.0), 0.0)
    v = vb * inv
    w = vc * inv
    settle(np.ones(n, dtype=bool), a + v[:, None] * ab + w[:, None] * ac)

    diff = p - closest
    return np.sqrt(np.sum(diff * diff, axis=-1))


def point_mesh_distance(p, vertices: np.ndarray, triangles: np.ndarray) -> float:
    tri = np.asarray(triangles)
    a = vertices[tri[:, 0]]
    b = vertices[tri[:, 1]]
    c = vertices[tri[:, 2]]
    return float(point_triangles_distance(p, a, b, c).min())


def barycentric(x, a, b, c) -> np.ndarray:
    """Barycentric coordinates of x with respect to triangle (a, b, c).

    x is assumed to lie in (or near) the triangle's plane; the in-plane
    component is what gets solved.
    """
    v0 = b - a
    v1 = c - a
    v2 = np.asarray(x, dtype=np.float64) - a
    d00 = float(np.dot(v0, v0))
    d01 = float(np.dot(v0, v1))
    d11 = float(np.dot(v1, v1))
    d20 = float(np.dot(v2, v0))
    d21 = float(np.dot(v2, v1))
    den = d00 * d11 - d01 * d01
    if abs(den) < _TINY:
        raise ValueError("degenerate triangle in barycentric solve")
    v = (d11 * d20 - d01 * d21) / den
    w = (d00 * d21 - d01 * d20) / den
    return np.array([1.0 - v - w, v, w])


def triangle_edge_heights(a, b, c) -> np.ndarray:
    """Height of each vertex over its opposite edge, ordered like the
    barycentric coordinates (a, b, c).

    A point with barycentric coordinate lam sits at in-plane distance
    lam[i] * height[i] from the edge opposite vertex i, which converts
    barycentric margins into length units.
    """
    n = np.cross(b - a, c - a)
    area2 = float(np.linalg.norm(n))
    opp = np.array(
        [
            np.linalg.norm(c - b),
            np.linalg.norm(a - c),
            np.linalg.norm(b - a),
        ]
    )
    opp = np.maximum(opp, _TINY)
    return area2 / opp


# ---------------------------------------------------------------------------
# segment / triangle

def segment_triangle_intersects(p0, p1, a, b, c) -> bool:
    """Does the segment cross the (closed) triangle?  Coplanar contact is
    left to distance-based callers; only transversal hits report True."""
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    n = np.cross(b - a, c - a)
    s0 = float(np.dot(n, p0 - a))
    s1 = float(np.dot(n, p1 - a))
    if s0 * s1 > 0.0:
        return False
    denom = s0 - s1
    if abs(denom) < _TINY:
        return False
    t = s0 / denom
    x = p0 + t * (p1 - p0)
    try:
        lam = barycentric(x, a, b, c)
    except ValueError:
        return False
    return bool((lam >= 0.0).all())


def segment_triangle_distance(p0, p1, a, b, c) -> float:
    if segment_triangle_intersects(p0, p1, a, b, c):
        return 0.0
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    seg_edges = min(
        float(segseg_distance(p0, p1, a, b)),
        float(segseg_distance(p0, p1, b, c)),
        float(segseg_distance(p0, p1, c, a)),
    )
    ends = min(
        float(point_triangles_distance(p0, np.asarray(a)[None], np.asarray(b)[None], np.asarray(c)[None])[0]),
        float(point_triangles_distance(p1, np.asarray(a)[None], np.asarray(b)[None], np.asarray(c)[None])[0]),
    )
    return min(seg_edges, ends)


# ---------------------------------------------------------------------------
# ray casting

# Fixed generic directions for parity rays.  Arbitrary but frozen so that
# containment answers are reproducible run to run.
_RAY_DIRECTIONS = np.array(
    [
        (0.8175462839, 0.4372918074, 0.3748350291),
        (-0.3918274051, 0.8642093175, 0.3151372902),
        (0.2089417365, -0.5173902846, 0.8299106317),
        (0.9402175538, -0.2273918460, -0.2532710948),
        (-0.6722800915, -0.5138842703, 0.5330229347),
        (0.1247803469, 0.3301792085, -0.9356291047),
        (-0.8563327210, 0.2193470158, -0.4674528391),
        (0.5412906734, 0.7126483920, -0.4461827530),
        (-0.2761030547, -0.9284163728, -0.2483901376),
        (0.7318264095, 0.0921837452, 0.6752291830),
        (-0.4509128376, 0.5723910284, -0.6851072934),
        (0.0632917458, -0.7431920563, -0.6661053892),
        (-0.9173028461, -0.3064827193, 0.2542910736),
        (0.3589201746, 0.1372910482, 0.9231748290),
        (-0.1923847560, 0.6427183920, 0.7415290863),
        (0.6034182957, -0.6273910846, 0.4922018374),
    ]
)
_RAY_DIRECTIONS = _RAY_DIRECTIONS / np.linalg.norm(_RAY_DIRECTIONS, axis=1, keepdims=True)

INSIDE = "inside"
OUTSIDE = "outside"
ON_BOUNDARY = "boundary"


def _ray_parity_once(origin, direction, a, b, c, tol: float):
    """One parity ray against a triangle soup.

    Returns (parity, clean).  A hit is unclean when it lands within tol
    of a triangle edge, within tol of the origin, or when a near-parallel
    triangle passes within tol of the ray; unclean rays must be retried.
    """
    e1 = b - a
    e2 = c - a
    n = np.cross(e1, e2)
    det = n @ direction
    norm_n = np.linalg.norm(n, axis=-1)
    parallel = np.abs(det) <= 1e-12 * np.maximum(norm_n, _TINY)

    if parallel.any():
        # A parallel triangle is only a problem when the ray passes close by.
        reach = np.linalg.norm(np.vstack([a, b, c]) - origin, axis=-1).max() * 4.0 + 1.0
        far = origin + direction * reach
        for idx in np.nonzero(parallel)[0]:
            if segment_triangle_distance(origin, far, a[idx], b[idx], c[idx]) <= tol:
                return 0, False

    keep = ~parallel
    if not keep.any():
        return 0, True
    a_k = a[keep]
    b_k = b[keep]
    c_k = c[keep]
    e1_k = e1[keep]
    e2_k = e2[keep]
    det_k = det[keep]

    tvec = origin - a_k
    pvec = np.cross(np.broadcast_to(direction, e2_k.shape), e2_k)
    det_mt = np.sum(e1_k * pvec, axis=-1)
    # det via the scalar triple product agrees with n.d up to sign convention
    usable = np.abs(det_mt) > _TINY
    inv = np.where(usable, 1.0 / np.where(usable, det_mt, 1.0), 0.0)
    u = np.sum(tvec * pvec, axis=-1) * inv
    qvec = np.cross(tvec, e1_k)
    v = np.sum(qvec * np.broadcast_to(direction, e1_k.shape), axis=-1) * inv
    t = np.sum(e2_k * qvec, axis=-1) * inv

    lam0 = 1.0 - u - v
    # distance margins from barycentric margins
    heights = np.stack(
        [
            np.linalg.norm(n[keep], axis=-1) / np.maximum(np.linalg.norm(c_k - b_k, axis=-1), _TINY),
            np.linalg.norm(n[keep], axis=-1) / np.maximum(np.linalg.norm(a_k - c_k, axis=-1), _TINY),
            np.linalg.norm(n[keep], axis=-1) / np.maximum(np.linalg.norm(b_k - a_k, axis=-1), _TINY),
        ],
        axis=-1,
    )
    lam = np.stack([lam0, u, v], axis=-1)
    margins = lam * heights

    # Anything within tol of a hit counts as "loose"; loose hits that are
    # not strictly clean force a retry rather than an arbitrary call.
    hit_loose = usable & (t > -tol) & (margins > -tol).all(axis=-1)
    if not hit_loose.any():
        return 0, True
    unclean = hit_loose & ((margins <= tol).any(axis=-1) | (t <= tol))
    if unclean.any():
        return 0, False
    return int(hit_loose.sum() % 2), True


def point_in_mesh(point, vertices: np.ndarray, triangles: np.ndarray, tol: float,
                  max_retries: int = 8) -> str:
    """Classify a point against a closed triangle mesh.

    Distance to the mesh decides ON_BOUNDARY first; otherwise parity of
    clean ray hits decides, retrying through a fixed direction list.
    Raises DegenerateRay when every allowed direction came back unclean.
    """
    point = np.asarray(point, dtype=np.float64)
    tri = np.asarray(triangles)
    a = vertices[tri[:, 0]]
    b = vertices[tri[:, 1]]
    c = vertices[tri[:, 2]]
    if float(point_triangles_distance(point, a, b, c).min()) <= tol:
        return ON_BOUNDARY
    for direction in _RAY_DIRECTIONS[:max_retries]:
        parity, clean = _ray_parity_once(point, direction, a, b, c, tol)
        if clean:
            return INSIDE if parity == 1 else OUTSIDE
    raise DegenerateRay(
        f"no clean containment ray for point {point.tolist()} after {max_retries} directions"
    )


# ---------------------------------------------------------------------------
# triangle-soup embeddedness

def _index_tri_distance(pts: np.ndarray, p: int, tri: list) -> float:
    return float(
        point_triangles_distance(pts[p], pts[tri[0]][None], pts[tri[1]][None], pts[tri[2]][None])[0]
    )


def _triangles_touch(pts: np.ndarray, ta, tb, shared: set, tol: float) -> bool:
    """Improper contact test for one triangle pair of a 3D mesh.

    ``shared`` holds the vertex indices the two triangles have in common;
    contact along a shared feature is proper and must not trip this.
    """
    ta = [int(v) for v in ta]
    tb = [int(v) for v in tb]
    if not shared:
        for k in range(3):
            if segment_triangle_distance(
                pts[ta[k]], pts[ta[(k + 1) % 3]], pts[tb[0]], pts[tb[1]], pts[tb[2]]
            ) <= tol:
                return True
            if segment_triangle_distance(
                pts[tb[k]], pts[tb[(k + 1) % 3]], pts[ta[0]], pts[ta[1]], pts[ta[2]]
            ) <= tol:
                return True
        return False
    if len(shared) == 1:
        # the edges opposite the shared vertex carry all improper contact
        ea = [k for k in ta if k not in shared]
        eb = [k for k in tb if k not in shared]
        if segment_triangle_distance(
            pts[ea[0]], pts[ea[1]], pts[tb[0]], pts[tb[1]], pts[tb[2]]
        ) <= tol:
            return True
        if segment_triangle_distance(
            pts[eb[0]], pts[eb[1]], pts[ta[0]], pts[ta[1]], pts[ta[2]]
        ) <= tol:
            return True
        return False
    # Shared edge.  Non-coplanar neighbours meet exactly along that edge,
    # which is proper; only a near-coplanar fold can overlap improperly.
    s1, s2 = sorted(shared)
    oa = [k for k in ta if k not in shared][0]
    ob = [k for k in tb if k not in shared][0]
    na = np.cross(pts[ta[1]] - pts[ta[0]], pts[ta[2]] - pts[ta[0]])
    nb = np.cross(pts[tb[1]] - pts[tb[0]], pts[tb[2]] - pts[tb[0]])
    na = na / max(np.linalg.norm(na), 1e-300)
    nb = nb / max(np.linalg.norm(nb), 1e-300)
    off_a = abs(float(nb @ (pts[oa] - pts[s1])))
    off_b = abs(float(na @ (pts[ob] - pts[s1])))
    if off_a > tol and off_b > tol:
        return False
    if _index_tri_distance(pts, oa, tb) <= tol:
        return True
    if _index_tri_distance(pts, ob, ta) <= tol:
        return True
    if float(segseg_distance(pts[oa], pts[s1], pts[ob], pts[s2])) <= tol:
        return True
    if float(segseg_distance(pts[oa], pts[s2], pts[ob], pts[s1])) <= tol:
        return True
    for s in (s1, s2):
        if float(point_segment_distance(pts[ob], pts[oa], pts[s])) <= tol:
            return True
        if float(point_segment_distance(pts[oa], pts[ob], pts[s])) <= tol:
            return True
    return False


def mesh_embedding_problems(points: np.ndarray, triangles: np.ndarray, tol: float):
    """Triangle pairs of a 3D mesh that touch beyond any shared feature.

    Yields (message, [i, j]) per offending pair.  Bounding boxes prune the
    quadratic scan; shared-vertex count picks the applicable contact test.
    """
    pts = np.asarray(points, dtype=np.float64)
    tri = np.asarray(triangles)
    T = tri.shape[0]
    corners = pts[tri]
    lo = corners.min(axis=1) - tol
    hi = corners.max(axis=1) + tol
    for i in range(T):
        near = np.nonzero(
            np.all(lo[i] <= hi[i + 1:], axis=1) & np.all(hi[i] >= lo[i + 1:], axis=1)
        )[0]
        for off in near:
            j = i + 1 + int(off)
            shared = set(map(int, tri[i])) & set(map(int, tri[j]))
            if len(shared) >= 3:
                yield f"triangles {i} and {j} coincide", [i, j]
                continue
            if _triangles_touch(pts, tri[i], tri[j], shared, tol):
                label = "edge" if len(shared) == 2 else "vertex" if shared else "nothing"
                yield (
                    f"triangles {i} and {j} touch beyond their shared {label}",
                    [i, j],
                )


def segment_triangle_distance_nd(p0, p1, a, b, c) -> float:
    """Distance between a segment and a triangle in any dimension.

    Convex problem: the minimum is either at the joint unconstrained
    least-squares solution (when feasible) or on a boundary feature,
    all of which the endpoint/edge checks cover.
    """
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    u = p1 - p0
    v1 = b - a
    v2 = c - a
    M = np.stack([u, -v1, -v2], axis=1)
    sol, *_ = np.linalg.lstsq(M, a - p0, rcond=None)
    t, l1, l2 = (float(x) for x in sol)
    best = np.inf
    if -1e-12 <= t <= 1 + 1e-12 and l1 >= -1e-12 and l2 >= -1e-12 and l1 + l2 <= 1 + 1e-12:
        pt_seg = p0 + min(max(t, 0.0), 1.0) * u
        pt_tri = a + l1 * v1 + l2 * v2
        best = float(np.linalg.norm(pt_seg - pt_tri))
    best = min(best, float(point_triangles_distance(p0, a[None], b[None], c[None])[0]))
    best = min(best, float(point_triangles_distance(p1, a[None], b[None], c[None])[0]))
    for q0, q1 in ((a, b), (b, c), (c, a)):
        best = min(best, float(segseg_distance(p0, p1, q0, q1)))
    return best


def rotation_axis_angle(axis, angle: float) -> np.ndarray:
    """Rotation matrix about a (not necessarily unit) 3-vector axis."""
    axis = np.asarray(axis, dtype=np.float64)
    n = np.linalg.norm(axis)
    if n == 0.0:
        return np.eye(3)
    x, y, z = axis / n
    k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)
