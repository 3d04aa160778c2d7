"""Exception hierarchy shared by every module in the package.

The split matters for the CLI and the HTTP service: parse and schema
problems, degenerate geometry, and a broken invariance run each map to a
distinct exit code / status code.  Anything under ``DegenerateGeometry``
means the input sits within tolerance of a knife-edge configuration and
was refused rather than silently perturbed.
"""

from __future__ import annotations


class QgiError(Exception):
    """Base class for every error raised by this package."""


class ParseError(QgiError):
    """Scene text is not valid JSON."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        super().__init__(message)
        self.line = line
        self.col = col


class SchemaError(QgiError):
    """Scene JSON parsed but does not match the document schema."""


class DegenerateGeometry(QgiError):
    """Input is within tolerance of a configuration with no robust answer."""


class DegenerateDiagram(DegenerateGeometry):
    """A planar projection has a tangency, triple point, zero-length edge,
    or a crossing too close to a vertex to classify."""


class ParallelTangents(DegenerateGeometry):
    """Crossing sign requested for two directions that are parallel
    within tolerance."""


class TimeTie(DegenerateGeometry):
    """Two strands of a crossing sit at the same time within tolerance,
    so neither is earlier."""


class TangentIntersection(DegenerateGeometry):
    """A loop meets a projected surface tangentially, at a vertex, or
    along a triangle plane instead of crossing it transversally."""


class BoundaryGraze(DegenerateGeometry):
    """A piercing passes within tolerance of a triangle edge that lies on
    the surface boundary."""


class EdgeGraze(DegenerateGeometry):
    """A piercing passes within tolerance of an interior mesh edge, where
    attribution to one triangle is not robust."""


class HeightTie(DegenerateGeometry):
    """The dropped coordinate of a piercing agrees on loop and surface
    within tolerance, so the over/under state is undefined."""


class NonSeparatingProjection(DegenerateGeometry):
    """Arc classification along a loop disagrees with the point-in-solid
    test; the projected surface does not separate the loop robustly."""


class DegenerateRay(DegenerateGeometry):
    """Every retry direction for a containment ray hit the mesh
    unclean (edge graze, tangency, or origin contact)."""


class NodeOnBoundary(DegenerateGeometry):
    """A node sits on the boundary of a region within tolerance."""


class NumericalInstability(DegenerateGeometry):
    """A numeric computation (solid-angle linking sum) did not settle to
    an integer within its accuracy budget."""


class NotTimeOrdered(QgiError):
    """An operation requiring time-ordered inputs received overlapping
    time extents."""


class NoAdmissibleMove(QgiError):
    """The move generator found no deformation with positive clearance."""


class InvarianceBroken(QgiError):
    """An admissible fuzz step changed an invariant.  Carries the
    offending step report."""

    def __init__(self, message: str | None = None, report=None):
        if message is None and report is not None:
            changed = [v for v in report.violations if v.invariant is not None]
            what = ", ".join(
                f"{v.invariant}: {v.before!r} -> {v.after!r}" for v in changed
            )
            message = f"invariant changed by an admissible move ({what})"
        super().__init__(message or "invariant changed by an admissible move")
        self.report = report
