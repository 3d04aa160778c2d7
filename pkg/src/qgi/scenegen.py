"""Deterministic constructors for example loops, surfaces and regions.

Everything here is seed-driven and reproducible; the test suite leans on
these builders heavily and the README uses them for demo scenes.  All
constructors return validated-shape ingredients (loops, meshes) or whole
scenes; geometric genericity is achieved by seeded rotations rather than
ad-hoc nudging.
"""

from __future__ import annotations

import numpy as np

from . import _geom
from .geom4 import Loop
from .surface import Surface4


def rotation(seed: int) -> np.ndarray:
    return _geom.rotation_from_seed(seed)


def ngon_loop(
    id: str,
    center,
    u,
    v,
    radius: float,
    n: int,
    time: float,
    time_amplitude: float = 0.0,
    time_waves: int = 3,
    phase: float = 0.0,
    time_phase: float = 0.0,
) -> Loop:
    """Planar regular n-gon loop at a constant (or gently rippled) time.

    ``phase`` rotates where the vertices sit on the circle; ``time_phase``
    shifts the ripple along the circle, which moves the points where the
    loop crosses its mean time.
    """
    ts = np.linspace(0, 2 * np.pi, n, endpoint=False) + phase
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    spatial = np.asarray(center, dtype=np.float64) + radius * (
        np.outer(np.cos(ts), u) + np.outer(np.sin(ts), v)
    )
    times = np.full(n, float(time))
    if time_amplitude:
        times = times + time_amplitude * np.sin(time_waves * ts + time_phase)
    return Loop(id, np.column_stack([times, spatial]))


def transformed_loop(loop: Loop, R=None, translate=None, time_shift: float = 0.0) -> Loop:
    verts = loop.vertices.copy()
    if R is not None:
        verts[:, 1:4] = verts[:, 1:4] @ np.asarray(R).T
    if translate is not None:
        verts[:, 1:4] += np.asarray(translate, dtype=np.float64)
    verts[:, 0] += time_shift
    return Loop(loop.id, verts)


def hopf_loops(
    seed: int | None = 12345,
    matter_time: float = -1.0,
    geometric_time: float = 1.0,
    n: int = 28,
    radius: float = 1.0,
    matter_id: str = "m1",
    geometric_id: str = "g1",
) -> tuple[Loop, Loop]:
    """A linked pair of round loops: the second threads the first.

    With the default orientations the all-crossings linking sum is -2.
    ``seed=None`` keeps the axis-aligned (degenerate-diagram) placement;
    any integer seed applies a generic rotation to the spatial part.
    """
    e1 = np.array([1.0, 0.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0])
    e3 = np.array([0.0, 0.0, 1.0])
    a = ngon_loop(matter_id, np.zeros(3), e1, e2, radius, n, matter_time)
    b = ngon_loop(geometric_id, np.array([radius, 0.0, 0.0]), e1, e3, radius, n, geometric_time)
    if seed is not None:
        R = rotation(seed)
        a = transformed_loop(a, R=R)
        b = transformed_loop(b, R=R)
    return a, b


def cable_loops(
    seed: int = 777,
    matter_time: float = -1.0,
    geometric_time: float = 1.0,
    winds: int = 2,
    matter_id: str = "m1",
    geometric_id: str = "g1",
    time_amplitude: float = 0.0,
    time_waves: int = 3,
    time_phase: float = 0.0,
) -> tuple[Loop, Loop]:
    """A core circle and a loop winding ``winds`` times around it; the
    all-crossings linking sum is -2 * winds.

    A cable with ``winds >= 2`` crosses itself in projection, so its time
    must ripple (``time_amplitude > 0``) for the pair to be time-like.
    """
    e1 = np.array([1.0, 0.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0])
    core = ngon_loop(matter_id, np.zeros(3), e1, e2, 1.0, 24, matter_time)
    ts = np.linspace(0, 2 * np.pi, 28 * winds, endpoint=False)
    rho = 0.35
    spatial = np.stack(
        [
            (1.0 + rho * np.cos(winds * ts)) * np.cos(ts),
            (1.0 + rho * np.cos(winds * ts)) * np.sin(ts),
            rho * np.sin(winds * ts),
        ],
        axis=1,
    )
    times = np.full(len(ts), float(geometric_time))
    if time_amplitude:
        times = times + time_amplitude * np.sin(time_waves * ts + time_phase)
    cable = Loop(geometric_id, np.column_stack([times, spatial]))
    R = rotation(seed)
    return transformed_loop(core, R=R), transformed_loop(cable, R=R)


def fourier_loop(rng: np.random.Generator, n: int = 24, modes: int = 3, scale: float = 1.0) -> np.ndarray:
    """Random smooth closed spatial polyline from a few Fourier modes."""
    ts = np.linspace(0, 2 * np.pi, n, endpoint=False)
    pts = np.zeros((n, 3))
    for m in range(1, modes + 1):
        amp = scale / m
        a = rng.normal(scale=amp, size=3)
        b = rng.normal(scale=amp, size=3)
        pts += np.outer(np.cos(m * ts), a) + np.outer(np.sin(m * ts), b)
    return pts


# ---------------------------------------------------------------------------
# meshes


def octahedron() -> tuple[np.ndarray, np.ndarray]:
    verts = np.array(
        [
            [1.0, 0, 0], [-1, 0, 0],
            [0, 1, 0], [0, -1, 0],
            [0, 0, 1], [0, 0, -1],
        ]
    )
    tris = []
    for sx, ix in ((1, 0), (-1, 1)):
        for sy, iy in ((1, 2), (-1, 3)):
            for sz, iz in ((1, 4), (-1, 5)):
                tri = [ix, iy, iz]
                a, b, c = verts[tri]
                if np.linalg.det(np.stack([a, b, c])) < 0:
                    tri = [ix, iz, iy]
                tris.append(tri)
    return verts, np.asarray(tris)


def icosahedron() -> tuple[np.ndarray, np.ndarray]:
    phi = (1 + np.sqrt(5)) / 2
    verts = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=np.float64,
    )
    verts /= np.linalg.norm(verts[0])
    tris = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ]
    )
    # orient every face outward (positive determinant about the centre)
    out = []
    for tri in tris:
        a, b, c = verts[tri]
        out.append(tri if np.linalg.det(np.stack([a, b, c])) > 0 else tri[[0, 2, 1]])
    return verts, np.asarray(out)


def icosphere(subdivisions: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Unit sphere mesh: subdivided icosahedron, outward oriented.
    0 subdivisions: 20 triangles; each level quadruples that."""
    verts, tris = icosahedron()
    verts = list(map(np.asarray, verts))
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(i: int, j: int) -> int:
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                m = m / np.linalg.norm(m)
                cache[key] = len(verts)
                verts.append(m)
            return cache[key]

        next_tris = []
        for a, b, c in tris:
            ab = midpoint(a, b)
            bc = midpoint(b, c)
            ca = midpoint(c, a)
            next_tris.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]])
        tris = np.asarray(next_tris)
    return np.asarray(verts), tris


def sphere_surface(
    id: str,
    center=(0.0, 0.0, 0.0),
    radius: float = 1.0,
    subdivisions: int = 1,
    time: float = 0.0,
    time_shear=None,
) -> Surface4:
    """Closed sphere mesh; ``time_shear`` is an optional spatial direction
    d making the vertex times  time + d . (x - center)."""
    verts3, tris = icosphere(subdivisions)
    verts3 = np.asarray(center, dtype=np.float64) + radius * verts3
    times = np.full(len(verts3), float(time))
    if time_shear is not None:
        d = np.asarray(time_shear, dtype=np.float64)
        times = times + (verts3 - np.asarray(center)) @ d
    return Surface4(id, np.column_stack([times, verts3]), tris)


def disk_surface(
    id: str,
    center=(0.0, 0.0, 0.0),
    u=(1.0, 0.0, 0.0),
    v=(0.0, 1.0, 0.0),
    radius: float = 1.0,
    n_rim: int = 20,
    time: float = 0.0,
    time_amplitude: float = 0.0,
    phase: float = 0.0,
) -> Surface4:
    """Triangle fan over a planar polygon rim.  Rim orientation runs along
    u-to-v, so the induced boundary loop is the rim polygon in that order."""
    ts = np.linspace(0, 2 * np.pi, n_rim, endpoint=False) + phase
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    rim = center + radius * (np.outer(np.cos(ts), u) + np.outer(np.sin(ts), v))
    verts3 = np.vstack([center[None, :], rim])
    times = np.full(len(verts3), float(time))
    if time_amplitude:
        times[1:] += time_amplitude * np.sin(3 * ts)
    tris = np.array([[0, 1 + k, 1 + (k + 1) % n_rim] for k in range(n_rim)])
    return Surface4(id, np.column_stack([times, verts3]), tris)


def transformed_surface(surf: Surface4, R=None, translate=None, time_shift: float = 0.0) -> Surface4:
    verts = surf.vertices.copy()
    if R is not None:
        verts[:, 1:4] = verts[:, 1:4] @ np.asarray(R).T
    if translate is not None:
        verts[:, 1:4] += np.asarray(translate, dtype=np.float64)
    verts[:, 0] += time_shift
    return Surface4(surf.id, verts, surf.triangles)


def ball_region_mesh(
    center=(0.0, 0.0, 0.0), radius: float = 1.0, subdivisions: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    verts3, tris = icosphere(subdivisions)
    return np.asarray(center, dtype=np.float64) + radius * verts3, tris


# ---------------------------------------------------------------------------
# threaded loops for piercing scenarios


def spanning_loop(
    id: str,
    passages: int = 1,
    removable: int = 0,
    sphere_radius: float = 1.0,
    t_inside: float = 1.5,
    t_pocket: float = 0.75,
    lane_base: float = 3.0,
    z_off: float = 0.11,
) -> Loop:
    """A loop threading a radius-``sphere_radius`` sphere at the origin.

    ``passages`` straight chords run through the ball while the loop's
    time climbs from -t_inside to +t_inside (each passage spans any
    surface time extent inside (-t_inside, t_inside)); ``removable``
    further chords cross the ball while the time stays pinned near
    +t_pocket, so they can always be withdrawn from a surface whose time
    extent reaches below +t_pocket.  Return connectors run well outside
    the ball on separated lanes, keeping the loop embedded.
    """
    total = passages + removable
    if total < 1:
        raise ValueError("need at least one passage")
    ys = np.linspace(-0.41, 0.33, total) * sphere_radius
    z = z_off * sphere_radius
    x_out = sphere_radius + 1.0
    chords = []
    for j in range(total):
        spanning = j < passages
        t_in = -t_inside if spanning else t_pocket - 0.1
        t_out = t_inside if spanning else t_pocket + 0.1
        chords.append(
            (
                np.array([t_in, -x_out, ys[j], z]),
                np.array([t_out, x_out, ys[j], z]),
            )
        )
    pts = []
    for j, (enter, leave) in enumerate(chords):
        lane = lane_base + 0.4 * j
        t_mid = 0.5 * (enter[0] + leave[0])
        pts.append(enter)
        pts.append(leave)
        # climb out sideways and return on a high lane to the next entry
        nxt = chords[(j + 1) % total][0]
        pts.append(np.array([leave[0], x_out + 1.0, ys[j], z]))
        pts.append(np.array([t_mid, x_out + 1.0, ys[j], lane]))
        pts.append(np.array([nxt[0], -x_out - 1.0, ys[(j + 1) % total], lane]))
        pts.append(np.array([nxt[0], -x_out - 1.0, ys[(j + 1) % total], z]))
    return Loop(id, np.asarray(pts))
