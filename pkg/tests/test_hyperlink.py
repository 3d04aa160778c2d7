"""Unit tests for the hyperlinking number of time-like loop pairs."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import helpers
from qgi import scenegen
from qgi.errors import TimeTie
from qgi.geom4 import Hyperlink, Loop, TimeOrderedPair
from qgi.hyperlink import hyperlinking_number, total_hyperlinking_number


def _pair(scene):
    return scene.matter.loops[0], scene.geometric.loops[0]


class TestCanonicalPair:
    def test_hopf_value(self):
        matter, geometric = _pair(helpers.hopf_scene())
        assert hyperlinking_number(matter, geometric) == -6

    def test_reversed_time_order_negates(self):
        matter, geometric = _pair(helpers.hopf_scene(reverse_order=True))
        assert hyperlinking_number(matter, geometric) == 6

    def test_rotation_invariance(self):
        values = set()
        for seed in (1, 2, 3, 17, 88):
            matter, geometric = _pair(helpers.hopf_scene(seed=seed))
            values.add(hyperlinking_number(matter, geometric))
        assert values == {-6}

    def test_antisymmetry(self):
        matter, geometric = _pair(helpers.hopf_scene())
        assert hyperlinking_number(geometric, matter) == 6


class TestTimeStructure:
    def test_equal_time_crossing_raises(self):
        # generic spatial link, but both loops at the same constant time
        matter, geometric = _pair(helpers.hopf_scene())
        a = Loop("a", np.hstack([np.zeros((len(matter.vertices), 1)), matter.spatial()]))
        b = Loop("b", np.hstack([np.zeros((len(geometric.vertices), 1)), geometric.spatial()]))
        with pytest.raises(TimeTie):
            hyperlinking_number(a, b)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=400))
    def test_matches_joint_diagram_oracle(self, seed):
        pair = helpers.random_timelike_pair(seed)
        matter, geometric = pair.matter.loops[0], pair.geometric.loops[0]
        expected = helpers.sk_via_joint_diagram(pair)
        assert hyperlinking_number(matter, geometric) == expected

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=400))
    def test_antisymmetric_on_random_pairs(self, seed):
        pair = helpers.random_timelike_pair(seed)
        matter, geometric = pair.matter.loops[0], pair.geometric.loops[0]
        assert hyperlinking_number(matter, geometric) == -hyperlinking_number(
            geometric, matter
        )


def _composite_pair() -> TimeOrderedPair:
    """Two far-apart linked pairs in one scene, four matter/geometric pairs."""
    la, lb = _pair(helpers.hopf_scene(seed=5))
    lc, ld = _pair(helpers.hopf_scene(seed=6))
    # a diagonal offset keeps the two pairs apart in every projection plane
    off = np.array([0.0, 4.0, 4.0, 4.0])
    lc = Loop("m2", lc.vertices + off + np.array([-0.3, 0, 0, 0]))
    ld = Loop("g2", ld.vertices + off + np.array([0.3, 0, 0, 0]))
    matter = Hyperlink((Loop("m1", la.vertices), lc))
    geometric = Hyperlink((Loop("g1", lb.vertices), ld))
    return TimeOrderedPair(matter, geometric)


class TestTotal:
    def test_componentwise_additivity(self):
        pair = _composite_pair()
        total = total_hyperlinking_number(pair)
        parts = sum(
            hyperlinking_number(m, g)
            for m in pair.matter.loops
            for g in pair.geometric.loops
        )
        assert total == parts
        # only the original pairs link; the cross pairs sit in disjoint balls
        assert total == -12
        assert total == helpers.sk_via_joint_diagram(pair)

    def test_single_pair_matches(self):
        matter, geometric = _pair(helpers.hopf_scene())
        pair = TimeOrderedPair(Hyperlink((matter,)), Hyperlink((geometric,)))
        assert total_hyperlinking_number(pair) == hyperlinking_number(matter, geometric)
