"""Unit tests for SVG diagram export."""

import os

import pytest

import helpers
from qgi import scenegen
from qgi.errors import DegenerateDiagram
from qgi.framing import Node
from qgi.geom4 import Hyperlink, Plane
from qgi.scene import Scene
from qgi.svg import atomic_write_text, export_svg, render_svg


class TestRender:
    def test_hopf_has_two_signed_crossings(self):
        text = render_svg(helpers.hopf_scene(), Plane(1))
        assert text.count('class="crossing"') == 2
        assert text.count('data-eps="-1"') == 2
        assert 'class="strand"' in text
        assert text.startswith("<svg")
        assert text.endswith("</svg>\n")

    def test_split_link_draws_closed_outlines(self):
        a = scenegen.ngon_loop("a", (0, 0, 0), (1, 0, 0), (0, 1, 0), 1.0, 12, -1.0)
        b = scenegen.ngon_loop("b", (9, 7, 5), (0, 1, 0), (0, 0, 1), 1.0, 12, 1.0)
        R = scenegen.rotation(5)
        scene = Scene(
            1e-9,
            Hyperlink([scenegen.transformed_loop(a, R=R)]),
            Hyperlink([scenegen.transformed_loop(b, R=R)]),
            (), (), (),
        )
        text = render_svg(scene, Plane(2))
        # no crossings means no gaps: both loops render as whole polygons
        assert text.count("<polygon") == 2
        assert "<polyline" not in text
        assert 'class="crossing"' not in text

    def test_under_strand_is_interrupted(self):
        text = render_svg(helpers.hopf_scene(), Plane(1))
        assert "<polyline" in text

    def test_node_markers(self):
        scene = helpers.framed_scene()
        base = scene.matter.loop("m1")
        nodes = (
            Node("m1", scene.nodes[0].edge, scene.nodes[0].u, 1),
            Node("m1", scene.nodes[1].edge, scene.nodes[1].u, -1),
        )
        marked = Scene(
            scene.tolerance, scene.matter, scene.geometric, nodes,
            scene.surfaces, scene.regions,
        )
        text = render_svg(marked, Plane(3))
        assert text.count('class="node"') == 2
        assert 'data-sign="+1"' in text and 'data-sign="-1"' in text
        assert 'fill="#000000"' in text and 'fill="#ffffff"' in text
        assert base.id in text

    def test_deterministic(self):
        a = render_svg(helpers.hopf_scene(), Plane(1))
        b = render_svg(helpers.hopf_scene(), Plane(1))
        assert a == b

    def test_degenerate_projection_raises(self):
        with pytest.raises(DegenerateDiagram):
            render_svg(helpers.hopf_scene(seed=None), Plane(1))


class TestExport:
    def test_writes_file(self, tmp_path):
        path = tmp_path / "diagram.svg"
        export_svg(helpers.hopf_scene(), Plane(1), str(path))
        assert path.read_text() == render_svg(helpers.hopf_scene(), Plane(1))

    def test_nothing_written_on_failure(self, tmp_path):
        path = tmp_path / "diagram.svg"
        with pytest.raises(DegenerateDiagram):
            export_svg(helpers.hopf_scene(seed=None), Plane(1), str(path))
        assert not path.exists()
        assert os.listdir(tmp_path) == []

    def test_atomic_write_replaces(self, tmp_path):
        path = tmp_path / "out.txt"
        atomic_write_text(str(path), "first")
        atomic_write_text(str(path), "second")
        assert path.read_text() == "second"
        assert os.listdir(tmp_path) == ["out.txt"]
