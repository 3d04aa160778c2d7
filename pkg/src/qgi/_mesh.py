"""Combinatorial triangle-mesh helpers shared by surfaces and regions.

Pure index bookkeeping, no coordinates: directed-edge maps, manifold and
orientation diagnostics, boundary chaining, connected components.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np


def directed_edges(triangles: np.ndarray):
    """Yield (a, b, triangle_index) for the three directed edges of each
    triangle (p, q, r): p->q, q->r, r->p."""
    for t_idx, (p, q, r) in enumerate(np.asarray(triangles)):
        yield int(p), int(q), t_idx
        yield int(q), int(r), t_idx
        yield int(r), int(p), t_idx


def topology_problems(triangles: np.ndarray) -> list[str]:
    """Human-readable structural defects: repeated vertices in a triangle,
    duplicated directed edges, non-manifold edges, and inconsistent
    orientation (an undirected edge used twice in the same direction)."""
    problems = []
    tri = np.asarray(triangles)
    for t_idx, (p, q, r) in enumerate(tri):
        if len({int(p), int(q), int(r)}) != 3:
            problems.append(f"triangle {t_idx} repeats a vertex")
    directed = defaultdict(list)
    undirected = defaultdict(list)
    for a, b, t_idx in directed_edges(tri):
        directed[(a, b)].append(t_idx)
        undirected[(min(a, b), max(a, b))].append((a, b, t_idx))
    for (a, b), users in sorted(directed.items()):
        if len(users) > 1:
            problems.append(
                f"directed edge ({a}, {b}) appears in triangles {sorted(users)}"
            )
    for (a, b), users in sorted(undirected.items()):
        if len(users) > 2:
            problems.append(
                f"edge ({a}, {b}) is shared by {len(users)} triangles (non-manifold)"
            )
        elif len(users) == 2 and users[0][:2] == users[1][:2]:
            problems.append(
                f"edge ({a}, {b}) is traversed twice in the same direction "
                "(inconsistent orientation)"
            )
    return problems


def boundary_directed_edges(triangles: np.ndarray) -> list[tuple[int, int]]:
    """Directed edges whose reverse never occurs; they inherit the
    orientation of the triangle they belong to."""
    directed = set()
    for a, b, _ in directed_edges(triangles):
        directed.add((a, b))
    return sorted((a, b) for (a, b) in directed if (b, a) not in directed)


def chain_boundary(triangles: np.ndarray):
    """Chain the boundary edges into oriented vertex cycles.

    Returns (cycles, problems); problems are non-empty when some boundary
    vertex does not have exactly one outgoing and one incoming boundary
    edge, in which case the cycles list covers only what chained cleanly.
    """
    edges = boundary_directed_edges(triangles)
    problems: list[str] = []
    nxt: dict[int, int] = {}
    indeg = defaultdict(int)
    for a, b in edges:
        if a in nxt:
            problems.append(f"boundary vertex {a} has two outgoing boundary edges")
        nxt[a] = b
        indeg[b] += 1
    for v, d in sorted(indeg.items()):
        if d > 1:
            problems.append(f"boundary vertex {v} has two incoming boundary edges")
    cycles: list[tuple[int, ...]] = []
    seen: set[int] = set()
    for a, _ in edges:
        if a in seen:
            continue
        cycle = [a]
        seen.add(a)
        cur = nxt.get(a)
        broken = False
        while cur is not None and cur != a:
            if cur in seen:
                broken = True
                break
            cycle.append(cur)
            seen.add(cur)
            cur = nxt.get(cur)
        if cur is None or broken:
            problems.append(f"boundary starting at vertex {a} does not close into a cycle")
            continue
        cycles.append(tuple(cycle))
    cycles.sort(key=lambda c: c[0])
    return cycles, problems


def vertex_components(n_vertices: int, triangles: np.ndarray) -> list[np.ndarray]:
    """Triangle indices grouped by vertex-connected component, each group
    sorted, groups ordered by smallest contained triangle index."""
    tri = np.asarray(triangles)
    parent = list(range(n_vertices))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for p, q, r in tri:
        union(int(p), int(q))
        union(int(q), int(r))
    groups = defaultdict(list)
    for t_idx, (p, _, _) in enumerate(tri):
        groups[find(int(p))].append(t_idx)
    out = [np.asarray(sorted(g)) for g in groups.values()]
    out.sort(key=lambda g: int(g[0]))
    return out
