"""SVG rendering of plane diagrams.

Strands are drawn as closed polylines in the chosen projection plane,
the under strand at every crossing is interrupted by a short gap, each
crossing is labeled with its sign, and node markers are drawn on the
matter strands.  The output is a pure function of the scene, plane and
tolerance: element order, colors and float formatting are all fixed, so
identical inputs give identical bytes.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from .diagram import build_diagram
from .geom4 import PLANE_COLUMNS, Plane
from .scene import Scene

__all__ = ["render_svg", "export_svg"]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")


def _fmt(x: float) -> str:
    out = "%.6g" % float(x)
    return "0" if out == "-0" else out


def _cumulative_arclength(poly: np.ndarray) -> np.ndarray:
    seg = np.linalg.norm(np.roll(poly, -1, axis=0) - poly, axis=1)
    return np.concatenate([[0.0], np.cumsum(seg)])


def _point_at_arclength(poly: np.ndarray, cum: np.ndarray, s: float) -> np.ndarray:
    total = cum[-1]
    s = s % total
    e = int(np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(poly) - 1))
    length = cum[e + 1] - cum[e]
    t = 0.0 if length <= 0 else (s - cum[e]) / length
    a = poly[e]
    b = poly[(e + 1) % len(poly)]
    return a + t * (b - a)


def _merge_cyclic(intervals: list[tuple[float, float]], total: float):
    """Merge intervals on a circle of circumference total; returns merged
    intervals as (start, end) with start in [0, total) and end > start."""
    pieces: list[tuple[float, float]] = []
    for a, b in intervals:
        a %= total
        width = min(b - a if b >= a else (b - a) % total, total)
        pieces.append((a, a + width))
    pieces.sort()
    merged: list[list[float]] = []
    for a, b in pieces:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    # wrap: an interval reaching past total may swallow the first ones
    while len(merged) > 1 and merged[-1][1] >= merged[0][0] + total:
        merged[0][0] = merged[-1][0] - total
        merged[0][1] = max(merged[0][1], merged[-1][1] - total)
        merged.pop()
    return [(a, b) for a, b in merged]


def _visible_runs(total: float, cuts: list[tuple[float, float]]):
    """Complement of the cut intervals: the visible stretches of one
    strand, each as (start, end) with end possibly past total (wrap)."""
    if not cuts:
        return None
    merged = _merge_cyclic([(c - h, c + h) for c, h in cuts], total)
    if not merged or merged[0][1] - merged[0][0] >= total:
        return []
    runs = []
    for i, (_, b) in enumerate(merged):
        next_a = merged[(i + 1) % len(merged)][0]
        if i + 1 == len(merged):
            next_a += total
        if next_a > b:
            runs.append((b, next_a))
    return runs


def _run_points(poly: np.ndarray, cum: np.ndarray, a: float, b: float) -> list[np.ndarray]:
    total = cum[-1]
    eps = 1e-9 * max(total, 1.0)
    verts = cum[:-1]
    stations = np.concatenate([verts, verts + total, verts + 2.0 * total])
    inner = stations[(stations > a + eps) & (stations < b - eps)]
    return [
        _point_at_arclength(poly, cum, s) for s in [a, *np.sort(inner).tolist(), b]
    ]


def _points_attr(points, flip_y: float) -> str:
    return " ".join(f"{_fmt(p[0])},{_fmt(flip_y - p[1])}" for p in points)


def render_svg(scene: Scene, plane: Plane, tol: float | None = None) -> str:
    """Render a scene's diagram on one plane to an SVG string.

    Degenerate projections raise before any output is produced.
    """
    plane = Plane(plane)
    tol = scene.tolerance if tol is None else tol
    loops = scene.loops()
    dia = build_diagram(
        [l.spatial() for l in loops], plane, tol, names=[l.id for l in loops]
    )

    all_points = [s for strand in dia.strands for s in strand]
    all_points += [np.asarray(c.point) for c in dia.crossings]
    if all_points:
        pts = np.asarray(all_points)
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
    else:
        lo = np.zeros(2)
        hi = np.ones(2)
    span = np.maximum(hi - lo, 1e-6)
    pad = 0.1 * float(span.max())
    lo = lo - pad
    hi = hi + pad
    width = float(hi[0] - lo[0])
    height = float(hi[1] - lo[1])
    stroke = 0.004 * max(width, height)
    gap_half = 4.0 * stroke
    flip = float(lo[1] + hi[1])           # svg y axis points down

    cuts: dict[int, list[tuple[float, float]]] = {i: [] for i in range(len(loops))}
    cums = [_cumulative_arclength(strand) for strand in dia.strands]
    crossings = sorted(dia.crossings, key=lambda c: c.sort_key())
    for c in crossings:
        s = cums[c.under.strand]
        at = s[c.under.edge] + c.under.u * (s[c.under.edge + 1] - s[c.under.edge])
        cuts[c.under.strand].append((float(at), gap_half))

    out: list[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(lo[0])} {_fmt(flip - hi[1])} {_fmt(width)} {_fmt(height)}" '
        f'width="640" height="{_fmt(640.0 * height / width)}">'
    )
    out.append(f'<title>plane {int(plane)} diagram</title>')
    out.append(
        f'<rect x="{_fmt(lo[0])}" y="{_fmt(flip - hi[1])}" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" fill="#ffffff"/>'
    )

    for i, (loop, strand, cum) in enumerate(zip(loops, dia.strands, cums)):
        color = _PALETTE[i % len(_PALETTE)]
        out.append(
            f'<g class="strand" data-loop="{loop.id}" stroke="{color}" '
            f'stroke-width="{_fmt(stroke)}" fill="none" stroke-linecap="round">'
        )
        runs = _visible_runs(float(cum[-1]), cuts[i])
        if runs is None:
            out.append(f'<polygon points="{_points_attr(strand, flip)}"/>')
        else:
            for a, b in runs:
                pts = _run_points(strand, cum, a, b)
                out.append(f'<polyline points="{_points_attr(pts, flip)}"/>')
        out.append("</g>")

    label = 5.0 * stroke
    for c in crossings:
        x, y = float(c.point[0]), float(c.point[1])
        sign = "+1" if c.eps > 0 else "-1"
        out.append(
            f'<g class="crossing" data-eps="{sign}">'
            f'<text x="{_fmt(x + label * 0.6)}" y="{_fmt(flip - (y + label * 0.6))}" '
            f'font-size="{_fmt(label)}" font-family="sans-serif" '
            f'fill="#333333">{sign}</text></g>'
        )

    cols = list(PLANE_COLUMNS[plane])
    for node in scene.nodes:
        loop = scene.matter.loop(node.loop_id)
        p = loop.spatial_at(node.edge, node.u)[cols]
        sign = "+1" if node.sign > 0 else "-1"
        fill = "#000000" if node.sign > 0 else "#ffffff"
        out.append(
            f'<circle class="node" data-sign="{sign}" cx="{_fmt(p[0])}" '
            f'cy="{_fmt(flip - p[1])}" r="{_fmt(2.0 * stroke)}" '
            f'fill="{fill}" stroke="#000000" stroke-width="{_fmt(0.5 * stroke)}"/>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def export_svg(scene: Scene, plane: Plane, path: str, tol: float | None = None) -> None:
    """Render and write atomically; nothing is written if rendering fails."""
    atomic_write_text(path, render_svg(scene, plane, tol))
