"""Unit tests for surface piercings, linking numbers, and piercing counts."""

import numpy as np
import pytest

import helpers
from qgi import scenegen
from qgi.errors import NotTimeOrdered
from qgi.geom4 import Axis, Hyperlink, Loop, TimeOrderedPair, validate_time_ordered_pair
from qgi.hyperlink import total_hyperlinking_number
from qgi.surface import (
    Surface4,
    hyperlink_surface_linking_number,
    piercing_count,
    piercing_sequence,
    piercings,
    surface_linking_number,
    validate_surface,
    withdraw_removable_arcs,
)

TOL = helpers.TOL


def sheared_sphere() -> Surface4:
    sph = scenegen.sphere_surface(
        "S", radius=1.0, subdivisions=1, time=0.0, time_shear=(0.06, 0.1, 0.08)
    )
    return scenegen.transformed_surface(sph, R=scenegen.rotation(3))


class TestClosedSurface:
    def test_sphere_is_valid_and_closed(self):
        sph = sheared_sphere()
        assert validate_surface(sph).ok
        assert sph.is_closed

    def test_threading_loop_links_twice_on_every_axis(self):
        sph = sheared_sphere()
        loop = scenegen.spanning_loop("L", passages=1, removable=0)
        values = {}
        for axis in Axis:
            ps = piercings(loop, sph, axis, TOL)
            values[axis] = sum(p.eps for p in ps)
        assert values[Axis.A0] == 2
        assert len(set(values.values())) == 1

    def test_orientation_flips_negate(self):
        sph = sheared_sphere()
        loop = scenegen.spanning_loop("L", passages=1, removable=0)
        assert surface_linking_number(loop, sph, Axis.A0, TOL) == 2
        assert surface_linking_number(loop.reversed(), sph, Axis.A0, TOL) == -2
        flipped = Surface4("S", sph.vertices, sph.triangles[:, [0, 2, 1]])
        assert surface_linking_number(loop, flipped, Axis.A0, TOL) == -2


class TestWithdrawal:
    def test_pocket_arcs_withdraw(self):
        sph = sheared_sphere()
        loop = scenegen.spanning_loop("L2", passages=1, removable=1)
        ps = piercings(loop, sph, Axis.A0, TOL)
        assert len(ps) == 4
        assert sum(p.eps for p in ps) == 2
        seq = piercing_sequence(loop, sph, TOL)
        assert len(seq.arcs) == 4
        reduced = withdraw_removable_arcs(seq, sph.tau_extent())
        assert len(reduced.piercings) == 2
        count = piercing_count(Hyperlink([loop]), sph, TOL)
        assert count.value == 2 and count.exactness == "exact"

    @pytest.mark.parametrize("passages", [1, 2, 3])
    @pytest.mark.parametrize("removable", [0, 1, 2])
    def test_count_is_twice_the_spanning_passages(self, passages, removable):
        sph = sheared_sphere()
        loop = scenegen.spanning_loop("L", passages=passages, removable=removable)
        count = piercing_count(Hyperlink([loop]), sph, TOL)
        assert count.value == 2 * passages
        assert count.exactness == "exact"
        # the count never goes below the absolute signed sum
        lk = surface_linking_number(loop, sph, Axis.A0, TOL)
        assert count.value >= abs(lk)

    def test_subdivision_keeps_count(self):
        sph = sheared_sphere()
        loop = scenegen.spanning_loop("L", passages=2, removable=1)
        fine = helpers.subdivided(loop)
        a = piercing_count(Hyperlink([loop]), sph, TOL)
        b = piercing_count(Hyperlink([fine]), sph, TOL)
        assert a.to_dict() == b.to_dict()

    def test_hairpin_cancels_but_stays(self):
        # two opposite passages: the signed sum vanishes but all four
        # piercings are pinned inside the surface's time extent
        sph = sheared_sphere()
        loop = helpers.hairpin_loop()
        ps = piercings(loop, sph, Axis.A0, TOL)
        assert len(ps) == 4
        assert sum(p.eps for p in ps) == 0
        count = piercing_count(Hyperlink([loop]), sph, TOL)
        assert count.value == 4 and count.exactness == "exact"
        assert surface_linking_number(loop, sph, Axis.A0, TOL) == 0

    def test_sequence_requires_closed_surface(self):
        disk = scenegen.disk_surface(
            "D", center=(0, 0, 0), radius=1.0, n_rim=16, time=1.0, time_amplitude=0.05
        )
        loop = scenegen.spanning_loop("L", passages=1, removable=0)
        with pytest.raises(ValueError):
            piercing_sequence(loop, disk, TOL)


class TestBoundedSurface:
    def _disk(self):
        return scenegen.disk_surface(
            "D", center=(0, 0, 0), radius=1.0, n_rim=16, time=1.0, time_amplitude=0.05
        )

    def test_disk_is_valid_and_bounded(self):
        disk = self._disk()
        assert validate_surface(disk).ok
        assert not disk.is_closed
        assert len(disk.boundary_loops()) == 1

    def test_only_the_time_axis_sees_the_linking(self):
        disk = self._disk()
        thread = Loop(
            "T",
            np.array(
                [
                    [-1.0, 0.2, 0.1, -1.0],
                    [-1.2, 0.2, 0.1, 1.0],
                    [-1.4, 0.2, 2.5, 1.0],
                    [-1.6, 0.2, 2.5, -1.0],
                ]
            ),
        )
        values = [
            hyperlink_surface_linking_number(Hyperlink([thread]), disk, a, TOL)
            for a in Axis
        ]
        assert values == [-1, 0, 0, 0]

    def test_rim_linking_matches_hyperlinking(self):
        matter = scenegen.ngon_loop(
            "m1", (0, 0, 0.07), (1, 0, 0), (0, 1, 0), 1.0, 28, -1.0, phase=0.1
        )
        disk = scenegen.disk_surface(
            "D2",
            center=(1, 0, 0),
            u=(1, 0, 0),
            v=(0, 0, 1),
            radius=1.0,
            n_rim=16,
            time=1.0,
            time_amplitude=0.04,
            phase=0.2,
        )
        R = scenegen.rotation(11)
        matter = scenegen.transformed_loop(matter, R=R)
        disk = scenegen.transformed_surface(disk, R=R)
        rim = disk.boundary_loops()
        pair = TimeOrderedPair(Hyperlink([matter]), Hyperlink(rim))
        assert validate_time_ordered_pair(pair).ok
        sk = total_hyperlinking_number(pair)
        lk = hyperlink_surface_linking_number(Hyperlink([matter]), disk, Axis.A0, TOL)
        assert sk == -6 and lk == 1
        assert sk == -6 * lk

    def test_bounded_count_is_a_lower_bound(self):
        matter, disk = helpers.loop_disk_parts(2)
        count = piercing_count(Hyperlink([matter]), disk, TOL)
        lk = hyperlink_surface_linking_number(Hyperlink([matter]), disk, Axis.A0, TOL)
        assert count.exactness == "lower-bound"
        assert count.lower_bound == abs(lk)
        assert count.value >= count.lower_bound

    def test_time_overlap_is_refused(self):
        disk = self._disk()
        bad = Loop(
            "B",
            np.array(
                [
                    [1.0, 0.2, 0.1, -1.0],
                    [0.9, 0.2, 0.1, 1.0],
                    [1.1, 0.2, 2.5, 1.0],
                    [1.2, 0.2, 2.5, -1.0],
                ]
            ),
        )
        with pytest.raises(NotTimeOrdered):
            hyperlink_surface_linking_number(Hyperlink([bad]), disk, Axis.A0, TOL)


class TestSceneLevel:
    @pytest.mark.parametrize("seed", range(8))
    def test_axis_independence_on_valid_scenes(self, seed):
        scene = helpers.closed_surface_scene(seed)
        surface = scene.surfaces[0]
        values = [
            hyperlink_surface_linking_number(scene.geometric, surface, a, TOL)
            for a in Axis
        ]
        assert len(set(values)) == 1
