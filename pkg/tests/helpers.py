"""Scene builders shared across the test suite.

Random constructions are rejection-sampled: a candidate that fails
validation (or trips a degeneracy while computing) is discarded and the
next attempt for the same seed is tried, so every returned object is
valid and every test run sees the same sequence.
"""

from __future__ import annotations

import itertools

import numpy as np

from qgi import scenegen
from qgi.diagram import build_diagram, gauss_linking_number, linking_number
from qgi.errors import DegenerateGeometry
from qgi.framing import Node, Region3
from qgi.geom4 import (
    Hyperlink,
    Loop,
    Plane,
    TimeOrderedPair,
    validate_time_ordered_pair,
)
from qgi.scene import Scene, pregeneric, validate_scene

TOL = 1e-9


def hopf_scene(seed: int | None = 12345, n: int = 28, reverse_order: bool = False) -> Scene:
    """The canonical linked-pair scene; ``seed=None`` keeps it axis-aligned
    (degenerate projections), ``reverse_order`` puts matter after geometric."""
    times = (1.0, -1.0) if reverse_order else (-1.0, 1.0)
    m, g = scenegen.hopf_loops(seed=seed, n=n, matter_time=times[0], geometric_time=times[1])
    return Scene(TOL, Hyperlink([m]), Hyperlink([g]), (), (), ())


def _fourier_pair(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    a = scenegen.fourier_loop(rng, n=n, modes=3, scale=1.0)
    b = scenegen.fourier_loop(rng, n=n, modes=3, scale=1.0)
    b = b + rng.uniform(-1.0, 1.0, 3)
    return a, b


def _spatial_min_distance(a: np.ndarray, b: np.ndarray) -> float:
    from qgi import _geom

    p0, p1 = _geom.cyclic_pairs(a)
    q0, q1 = _geom.cyclic_pairs(b)
    d = _geom.segseg_distance(p0[:, None, :], p1[:, None, :], q0[None, :, :], q1[None, :, :])
    return float(d.min())


def random_spatial_link(seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Two disjoint closed spatial polylines whose three plane diagrams
    all build cleanly.  Mixes unlinked, Hopf-style, and cabled pairs."""
    for attempt in itertools.count():
        rng = np.random.default_rng([101, seed, attempt])
        style = seed % 3
        if style == 0:
            a, b = _fourier_pair(rng, n=18)
        elif style == 1:
            la, lb = scenegen.hopf_loops(seed=int(rng.integers(1, 2**31)))
            a, b = la.spatial(), lb.spatial()
        else:
            la, lb = scenegen.cable_loops(seed=int(rng.integers(1, 2**31)), winds=1 + seed % 2)
            a, b = la.spatial(), lb.spatial()
        if _spatial_min_distance(a, b) < 1e-5:
            continue
        try:
            for plane in Plane:
                linking_number(a, b, plane, TOL)
            gauss_linking_number(a, b, TOL)
        except DegenerateGeometry:
            continue
        return a, b


def _timed_loop(id: str, pts: np.ndarray, center_time: float, rng: np.random.Generator) -> Loop:
    """Attach a rippled time coordinate so projected self-crossings of the
    loop see distinct times (condition T2 covers them too)."""
    ts = np.linspace(0, 2 * np.pi, len(pts), endpoint=False)
    waves = int(rng.integers(1, 4))
    phase = float(rng.uniform(0, 2 * np.pi))
    times = center_time + 0.18 * np.sin(waves * ts + phase)
    return Loop(id, np.column_stack([times, pts]))


def random_timelike_pair(seed: int) -> TimeOrderedPair:
    """A valid time-ordered pair of single-loop hyperlinks; roughly a
    third each of split, Hopf-style, and cabled geometry."""
    for attempt in itertools.count():
        rng = np.random.default_rng([202, seed, attempt])
        style = seed % 3
        t_m = -1.0 + rng.uniform(-0.2, 0.2)
        t_g = 1.0 + rng.uniform(-0.2, 0.2)
        if style == 0:
            a_pts, b_pts = _fourier_pair(rng, n=16)
            a = _timed_loop("m1", a_pts, t_m, rng)
            b = _timed_loop("g1", b_pts, t_g, rng)
        elif style == 1:
            a, b = scenegen.hopf_loops(
                seed=int(rng.integers(1, 2**31)), matter_time=t_m, geometric_time=t_g
            )
        else:
            a, b = scenegen.cable_loops(
                seed=int(rng.integers(1, 2**31)),
                matter_time=t_m,
                geometric_time=t_g,
                winds=1 + seed % 2,
                time_amplitude=0.15,
                time_waves=int(rng.integers(1, 4)),
                time_phase=float(rng.uniform(0, 2 * np.pi)),
            )
        pair = TimeOrderedPair(Hyperlink([a]), Hyperlink([b]))
        if validate_time_ordered_pair(pair, TOL).ok:
            return pair


def random_pair_scene(seed: int) -> Scene:
    """A valid two-hyperlink scene for deformation runs."""
    pair = random_timelike_pair(seed)
    scene = Scene(TOL, pair.matter, pair.geometric, (), (), ())
    assert validate_scene(scene).ok
    return scene


def closed_surface_scene(seed: int) -> Scene:
    """A valid scene with one geometric loop and one closed surface; the
    loop threads the surface on most seeds and misses it on others."""
    passages = 1 + seed % 2
    removable = (seed // 2) % 2
    for attempt in itertools.count():
        rng = np.random.default_rng([303, seed, attempt])
        sph = scenegen.sphere_surface(
            "S",
            radius=1.0,
            subdivisions=1,
            time=0.0,
            time_shear=tuple(rng.uniform(-0.12, 0.12, 3)),
        )
        loop = scenegen.spanning_loop("g1", passages=passages, removable=removable)
        R = scenegen.rotation(int(rng.integers(1, 2**31)))
        shift = rng.uniform(-0.04, 0.04, 3)
        if seed % 5 == 4:
            # miss the surface entirely; every
            # axis must then agree on zero
            shift = shift + np.array([0.0, 6.0, 0.0])
        sph = scenegen.transformed_surface(sph, R=R, translate=shift)
        loop = scenegen.transformed_loop(loop, R=R)
        scene = Scene(TOL, Hyperlink([]), Hyperlink([loop]), (), (sph,), ())
        if validate_scene(scene).ok:
            return scene


def loop_disk_parts(seed: int):
    """A matter loop threading the rim of a later flat disk, generically
    rotated; odd seeds reverse the loop so both signs are exercised.

    Returns (matter loop, disk surface).
    """
    rng = np.random.default_rng([404, seed])
    n_loop = 24 + 4 * (seed % 3)
    n_rim = 14 + 2 * (seed % 4)
    matter = scenegen.ngon_loop(
        "m1",
        (0.0, 0.0, 0.05 + 0.03 * float(rng.uniform())),
        (1.0, 0.0, 0.0),
        (0.0, 1.0, 0.0),
        1.0,
        n_loop,
        -1.0 - 0.3 * float(rng.uniform()),
        phase=0.1 + 0.05 * float(rng.uniform()),
    )
    disk = scenegen.disk_surface(
        "D",
        center=(1.0, 0.0, 0.0),
        u=(1.0, 0.0, 0.0),
        v=(0.0, 0.0, 1.0),
        radius=0.8 + 0.4 * float(rng.uniform()),
        n_rim=n_rim,
        time=1.0 + 0.3 * float(rng.uniform()),
        time_amplitude=0.03 + 0.02 * float(rng.uniform()),
        phase=0.2 + 0.05 * float(rng.uniform()),
    )
    R = scenegen.rotation(int(rng.integers(1, 2**31)))
    matter = scenegen.transformed_loop(matter, R=R)
    disk = scenegen.transformed_surface(disk, R=R)
    if seed % 2:
        matter = matter.reversed()
    return matter, disk


def framed_scene() -> Scene:
    """A framed matter loop dipping through a ball region: two nodes, one
    inside the region and one outside, confinement number 1."""
    reg = Region3(
        "R", *scenegen.ball_region_mesh(center=(1.2, 0.0, 0.0), radius=0.5, subdivisions=1)
    )
    loop = scenegen.ngon_loop(
        "m1",
        (0.0, 0.0, 0.0),
        (1.0, 0.0, 0.0),
        (0.0, 1.0, 0.0),
        1.0,
        20,
        0.0,
        time_amplitude=0.3,
        time_waves=2,
        time_phase=np.pi / 2,
    )
    nodes = (Node("m1", 0, 0.5, 1), Node("m1", 10, 0.5, 1))
    scene = pregeneric(Scene(TOL, Hyperlink([loop]), Hyperlink([]), nodes, (), (reg,)), 13)
    assert validate_scene(scene).ok
    return scene


def subdivided(loop: Loop) -> Loop:
    """The same loop with a midpoint inserted on every edge."""
    pts = loop.vertices
    mids = 0.5 * (pts + np.roll(pts, -1, axis=0))
    out = np.empty((2 * len(pts), 4))
    out[0::2] = pts
    out[1::2] = mids
    return Loop(loop.id, out)


def hairpin_loop() -> Loop:
    """A loop running through the unit ball twice in opposite directions
    (and opposite time slopes), so its piercings cancel in the signed sum
    but cannot be withdrawn.  Lanes avoid the mesh's symmetry planes."""
    z = 0.11
    pts = np.array(
        [
            [-1.5, -2.0, 0.18, z],
            [1.5, 2.0, 0.18, z],
            [1.5, 2.0, 0.42, z],
            [-1.5, -2.0, 0.42, z],
        ]
    )
    return Loop("H", pts)


def sk_via_joint_diagram(pair: TimeOrderedPair, tol: float = TOL) -> int:
    """Independent recomputation of the hyperlinking number from one
    diagram containing every loop at once, instead of per-pair diagrams."""
    loops = list(pair.matter.loops) + list(pair.geometric.loops)
    names = [l.id for l in loops]
    matter_count = len(pair.matter)
    total = 0
    for plane in Plane:
        dia = build_diagram([l.spatial() for l in loops], plane, tol, names=names)
        for c in dia.crossings:
            i, j = c.over.strand, c.under.strand
            if i == j:
                continue
            if (i < matter_count) == (j < matter_count):
                continue
            m_idx, g_idx = (i, j) if i < matter_count else (j, i)
            rm = c.ref_for(m_idx)
            rg = c.ref_for(g_idx)
            t_m = loops[m_idx].x0_at(rm.edge, rm.u)
            t_g = loops[g_idx].x0_at(rg.edge, rg.u)
            total += c.eps * (1 if t_m < t_g else -1)
    return total
