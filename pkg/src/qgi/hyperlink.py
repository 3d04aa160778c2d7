"""The hyperlinking number of time-like loops.

Each crossing of a plane diagram gets, besides its sign, a *time lag*:
+1 when the first loop's preimage of the crossing is earlier in time
than the second loop's, -1 when later.  Summing sign times lag over all
inter-component crossings of all three plane diagrams gives the
hyperlinking number of the ordered loop pair.

For a pair that is strictly time-ordered the lag is the same at every
crossing, so the value collapses to 3 times the all-crossings linking
number (with sign from the order).  The double sum is computed anyway:
it is the defined quantity, the collapse is merely a property of the
ordered case, and the general formula also evaluates on non-ordered
time-like pairs, where the result is well-defined but not a deformation
invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagram import Crossing, build_diagram
from .errors import TimeTie
from .geom4 import Hyperlink, Loop, Plane, TimeOrderedPair


@dataclass(frozen=True)
class TimedCrossing:
    """A diagram crossing together with the times of its two preimages
    on the ordered loop pair (first, second)."""

    crossing: Crossing
    x0_first: float
    x0_second: float
    lag: int


def time_lag(crossing: Crossing, first: Loop, second: Loop, tol: float = 1e-9) -> int:
    """+1 when the first loop passes the crossing earlier than the second.

    The crossing must come from a diagram built over [first, second] in
    that strand order.  Equal times within tolerance are a time-likeness
    failure and raise TimeTie.
    """
    ref_a = crossing.ref_for(0)
    ref_b = crossing.ref_for(1)
    t_a = first.x0_at(ref_a.edge, ref_a.u)
    t_b = second.x0_at(ref_b.edge, ref_b.u)
    if abs(t_a - t_b) <= tol:
        raise TimeTie(
            f"loops {first.id!r} and {second.id!r} cross at equal time "
            f"{t_a:.6g} (difference {abs(t_a - t_b):.3e})"
        )
    return 1 if t_a < t_b else -1


def timed_crossings(first: Loop, second: Loop, plane: Plane, tol: float = 1e-9) -> list[TimedCrossing]:
    """Inter-component crossings of one plane diagram, annotated with the
    preimage times on each loop."""
    dia = build_diagram(
        [first.spatial(), second.spatial()], plane, tol, names=[first.id, second.id]
    )
    out = []
    for c in dia.crossings:
        if not c.inter_component:
            continue
        ref_a = c.ref_for(0)
        ref_b = c.ref_for(1)
        t_a = first.x0_at(ref_a.edge, ref_a.u)
        t_b = second.x0_at(ref_b.edge, ref_b.u)
        if abs(t_a - t_b) <= tol:
            raise TimeTie(
                f"loops {first.id!r} and {second.id!r} cross at equal time "
                f"{t_a:.6g} (difference {abs(t_a - t_b):.3e})"
            )
        out.append(TimedCrossing(c, t_a, t_b, 1 if t_a < t_b else -1))
    return out


def hyperlinking_number(first: Loop, second: Loop, tol: float = 1e-9) -> int:
    """Sum of sign times lag over all inter-component crossings of the
    three plane diagrams.  Antisymmetric in the two loops."""
    total = 0
    for plane in Plane:
        for tc in timed_crossings(first, second, plane, tol):
            total += tc.crossing.eps * tc.lag
    return total


def total_hyperlinking_number(pair: TimeOrderedPair, tol: float = 1e-9) -> int:
    """Double sum of the pairwise hyperlinking number over every
    (matter, geometric) component pair."""
    total = 0
    for m in pair.matter.loops:
        for g in pair.geometric.loops:
            total += hyperlinking_number(m, g, tol)
    return total
