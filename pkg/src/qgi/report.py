"""Assembly of the invariant report for a scene.

The report pairs each invariant with the hyperlink it is defined on:
the hyperlinking number couples matter to geometric components, the
surface linking numbers take the geometric hyperlink through each
surface, and the piercing and confinement numbers describe how the
matter hyperlink meets surfaces and regions.
"""

from __future__ import annotations

from ._version import VERSION
from .framing import confinement_number
from .geom4 import Axis, TimeOrderedPair, ValidationReport
from .hyperlink import total_hyperlinking_number
from .scene import Scene, validate_scene
from .surface import hyperlink_surface_linking_number, piercing_count

__all__ = ["ALL_AXES", "invariant_values", "invariant_report"]

ALL_AXES = (Axis.A0, Axis.A1, Axis.A2, Axis.A3)

# With these violations a scene's invariants are still well defined
# numbers; they are just not stable under deformation.
_UNSTABLE_ONLY = {"incomparable"}


def invariant_values(scene: Scene, axes=ALL_AXES, tol: float | None = None) -> dict:
    """Invariant vector of a scene, assuming it validates.

    Each entry appears only when the objects it couples are present:
    ``sk`` needs both hyperlinks, ``lk_surface`` needs surfaces and
    geometric loops, ``nu_S`` surfaces and matter loops, ``nu_R``
    regions and matter loops.  Values are exact integers except the
    ``nu_S`` entries, which carry an exactness tag.
    """
    tol = scene.tolerance if tol is None else tol
    axes = tuple(Axis(a) for a in axes)
    values: dict = {}
    if len(scene.matter) and len(scene.geometric):
        values["sk"] = int(
            total_hyperlinking_number(TimeOrderedPair(scene.matter, scene.geometric), tol)
        )
    if scene.surfaces and len(scene.geometric):
        values["lk_surface"] = {
            surface.id: {
                str(int(axis)): int(
                    hyperlink_surface_linking_number(scene.geometric, surface, axis, tol)
                )
                for axis in axes
            }
            for surface in scene.surfaces
        }
    if scene.surfaces and len(scene.matter):
        values["nu_S"] = {
            surface.id: piercing_count(scene.matter, surface, tol).to_dict()
            for surface in scene.surfaces
        }
    if scene.regions and len(scene.matter):
        framed = scene.framed()
        values["nu_R"] = {
            region.id: int(confinement_number(framed, region, tol))
            for region in scene.regions
        }
    return values


def invariant_report(
    scene: Scene,
    axes=ALL_AXES,
    seed: int | None = None,
    validation: ValidationReport | None = None,
) -> dict:
    """Full report: invariants, validation outcome, and provenance.

    When validation fails, invariants are omitted rather than computed
    on geometry whose meaning is in doubt.  The one exception is a scene
    whose only defect is a time-overlapping matter/geometric pairing:
    the numbers still exist, so they are reported with ``sk_invariant``
    false to mark that deformations need not preserve them.
    """
    if validation is None:
        validation = validate_scene(scene)
    report: dict = {"validation": validation.to_dict()}
    provenance: dict = {"version": VERSION}
    if seed is not None:
        provenance["seed"] = int(seed)
    report["provenance"] = provenance
    codes = validation.codes()
    if validation.ok or codes <= _UNSTABLE_ONLY:
        values = invariant_values(scene, axes)
        report.update(values)
        if "sk" in values:
            report["sk_invariant"] = validation.ok
    return report
