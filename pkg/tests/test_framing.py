"""Unit tests for framed hyperlinks, regions, and the confinement number."""

import numpy as np
import pytest

import helpers
from qgi import scenegen
from qgi.errors import NodeOnBoundary
from qgi.framing import (
    FramedHyperlink,
    Node,
    Region3,
    confinement_number,
    node_position,
    point_in_region,
    region_slice_violations,
    validate_frame,
    validate_region,
)
from qgi.geom4 import Hyperlink, Loop


@pytest.fixture()
def ball():
    verts, tris = scenegen.ball_region_mesh(
        center=(1.2, 0.0, 0.0), radius=0.5, subdivisions=1
    )
    return Region3("R", verts, tris)


def circle_with_nodes():
    matter = scenegen.ngon_loop(
        "m1", (0, 0, 0), (1, 0, 0), (0, 1, 0), 1.0, 28, -1.0, phase=0.1
    )
    return FramedHyperlink(
        Hyperlink([matter]),
        [Node("m1", 0, 0.5, 1), Node("m1", 14, 0.5, 1)],
    )


class TestContainment:
    def test_ball_mesh_is_valid(self, ball):
        assert validate_region(ball).ok

    def test_inside_outside_boundary(self, ball):
        assert point_in_region((1.2, 0.0, 0.0), ball) == "inside"
        assert point_in_region((5.0, 0.0, 0.0), ball) == "outside"
        assert point_in_region(tuple(ball.vertices[0]), ball) == "boundary"

    def test_two_shell_region(self, ball):
        v2, t2 = scenegen.ball_region_mesh(
            center=(-3.0, 0.0, 0.0), radius=0.4, subdivisions=0
        )
        both = Region3(
            "R2",
            np.vstack([ball.vertices, v2]),
            np.vstack([ball.triangles, t2 + len(ball.vertices)]),
        )
        assert validate_region(both).ok
        assert point_in_region((-3.0, 0.0, 0.0), both) == "inside"
        assert point_in_region((1.2, 0.0, 0.0), both) == "inside"
        assert point_in_region((0.0, 2.0, 0.0), both) == "outside"


class TestConfinement:
    def test_one_node_inside(self, ball):
        framed = circle_with_nodes()
        assert validate_frame(framed, [ball]).ok
        inside = point_in_region(node_position(framed, framed.nodes[0]), ball)
        outside = point_in_region(node_position(framed, framed.nodes[1]), ball)
        assert (inside, outside) == ("inside", "outside")
        assert confinement_number(framed, ball) == 1

    def test_mixed_signs_and_odd_count_flagged(self, ball):
        matter = circle_with_nodes().hyperlink.loops[0]
        bad = FramedHyperlink(
            Hyperlink([matter]),
            [Node("m1", 0, 0.5, 1), Node("m1", 7, 0.5, -1), Node("m1", 14, 0.5, 1)],
        )
        codes = validate_frame(bad, [ball]).codes()
        assert "node-sign" in codes
        assert "node-parity" in codes

    def test_node_on_boundary_is_refused(self, ball):
        surfpt = ball.vertices[0]
        sq = np.array(
            [
                [-1.0, *(surfpt + np.array([-0.1, 0.0, 0.0]))],
                [-1.0, *(surfpt + np.array([0.1, 0.0, 0.0]))],
                [-1.2, *(surfpt + np.array([0.1, 0.4, 0.0]))],
                [-1.2, *(surfpt + np.array([-0.1, 0.4, 0.0]))],
            ]
        )
        framed = FramedHyperlink(
            Hyperlink([Loop("m3", sq)]),
            [Node("m3", 0, 0.5, 1), Node("m3", 2, 0.5, 1)],
        )
        assert "node-boundary" in validate_frame(framed, [ball]).codes()
        with pytest.raises(NodeOnBoundary):
            confinement_number(framed, ball)


class TestSliceViolations:
    def test_crossing_inside_the_region_is_reported(self, ball):
        crossing = Loop(
            "c1",
            np.array(
                [
                    [-1.0, 1.2, 0.0, -0.8],
                    [1.0, 1.2, 0.0, 0.8],
                    [1.0, 3.0, 0.0, 0.8],
                    [-1.0, 3.0, 0.0, -0.8],
                ]
            ),
        )
        problems = region_slice_violations(Hyperlink([crossing]), ball)
        assert len(problems) == 1
        assert problems[0][0] == "c1"

    def test_crossing_far_away_is_clear(self, ball):
        clear = Loop(
            "c2",
            np.array(
                [
                    [-1.0, 5.0, 0.0, -0.8],
                    [1.0, 5.0, 0.0, 0.8],
                    [1.0, 7.0, 0.0, 0.8],
                    [-1.0, 7.0, 0.0, -0.8],
                ]
            ),
        )
        assert region_slice_violations(Hyperlink([clear]), ball) == []


class TestFramedScene:
    def test_helper_scene_confines_one_node(self):
        scene = helpers.framed_scene()
        framed = scene.framed()
        assert confinement_number(framed, scene.regions[0]) == 1
