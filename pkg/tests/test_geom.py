"""Unit tests for the low-level geometric primitives."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qgi import _geom, _mesh, scenegen

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


def vec(dim):
    return st.tuples(*([finite] * dim)).map(np.array)


def _sampled_segseg(p0, p1, q0, q1, k=65):
    ts = np.linspace(0.0, 1.0, k)
    a = p0[None, :] + ts[:, None] * (p1 - p0)[None, :]
    b = q0[None, :] + ts[:, None] * (q1 - q0)[None, :]
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
    return float(d.min())


class TestSegSegDistance:
    def test_known_values(self):
        d = _geom.segseg_distance(
            np.array([0.0, 0, 0]), np.array([1.0, 0, 0]),
            np.array([0.0, 0, 1]), np.array([1.0, 0, 1]),
        )
        assert float(d) == pytest.approx(1.0)
        d = _geom.segseg_distance(
            np.array([0.0, 0, 0]), np.array([1.0, 0, 0]),
            np.array([0.5, -1, 0]), np.array([0.5, 1, 0]),
        )
        assert float(d) == pytest.approx(0.0)

    def test_broadcasts(self):
        p0 = np.zeros((3, 1, 3))
        p1 = p0 + np.array([1.0, 0, 0])
        q0 = np.array([[[0.0, 0, 1]], [[0.0, 0, 2]]]).reshape(1, 2, 3)
        q1 = q0 + np.array([1.0, 0, 0])
        d = _geom.segseg_distance(p0, p1, q0, q1)
        assert d.shape == (3, 2)
        assert np.allclose(d[:, 0], 1.0) and np.allclose(d[:, 1], 2.0)

    @settings(max_examples=100, deadline=None)
    @given(vec(3), vec(3), vec(3), vec(3))
    def test_matches_dense_sampling(self, p0, p1, q0, q1):
        exact = float(_geom.segseg_distance(p0, p1, q0, q1))
        sampled = _sampled_segseg(p0, p1, q0, q1)
        assert exact <= sampled + 1e-9
        # the sampled minimum can overshoot by at most half a grid cell
        slack = (np.linalg.norm(p1 - p0) + np.linalg.norm(q1 - q0)) / 64
        assert sampled - exact <= slack + 1e-9


class TestSegmentTriangleDistance:
    def test_piercing_is_zero(self):
        a, b, c = np.array([0.0, 0, 0]), np.array([2.0, 0, 0]), np.array([0.0, 2, 0])
        d = _geom.segment_triangle_distance(
            np.array([0.5, 0.5, -1.0]), np.array([0.5, 0.5, 1.0]), a, b, c
        )
        assert d == pytest.approx(0.0)

    def test_parallel_above(self):
        a, b, c = np.array([0.0, 0, 0]), np.array([2.0, 0, 0]), np.array([0.0, 2, 0])
        d = _geom.segment_triangle_distance(
            np.array([0.2, 0.2, 0.7]), np.array([1.0, 0.5, 0.7]), a, b, c
        )
        assert d == pytest.approx(0.7)

    @settings(max_examples=60, deadline=None)
    @given(vec(4), vec(4), vec(4), vec(4), vec(4))
    def test_nd_matches_sampling(self, p0, p1, a, b, c):
        exact = _geom.segment_triangle_distance_nd(p0, p1, a, b, c)
        ts = np.linspace(0.0, 1.0, 33)
        seg = p0[None, :] + ts[:, None] * (p1 - p0)[None, :]
        l1, l2 = np.meshgrid(ts, ts)
        keep = (l1 + l2) <= 1.0
        tri = (
            a[None, :]
            + l1[keep][:, None] * (b - a)[None, :]
            + l2[keep][:, None] * (c - a)[None, :]
        )
        sampled = float(np.linalg.norm(seg[:, None, :] - tri[None, :, :], axis=-1).min())
        assert exact <= sampled + 1e-7
        scale = max(
            np.linalg.norm(p1 - p0), np.linalg.norm(b - a), np.linalg.norm(c - a), 1.0
        )
        assert sampled - exact <= scale / 8


class TestRotations:
    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_seeded_rotation_is_special_orthogonal(self, seed):
        R = _geom.rotation_from_seed(seed)
        assert np.allclose(R @ R.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(R) == pytest.approx(1.0)

    def test_seeded_rotation_deterministic(self):
        assert np.array_equal(_geom.rotation_from_seed(7), _geom.rotation_from_seed(7))

    @settings(max_examples=50, deadline=None)
    @given(vec(3), st.floats(min_value=-6.0, max_value=6.0, allow_nan=False))
    def test_axis_angle(self, axis, angle):
        R = _geom.rotation_axis_angle(axis, angle)
        assert np.allclose(R @ R.T, np.eye(3), atol=1e-9)
        assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-9)
        if np.linalg.norm(axis) > 1e-9:
            u = axis / np.linalg.norm(axis)
            assert np.allclose(R @ u, u, atol=1e-9)


class TestPointInMesh:
    def setup_method(self):
        self.verts, self.tris = scenegen.icosphere(1)

    def test_center_inside(self):
        assert _geom.point_in_mesh(np.zeros(3), self.verts, self.tris, 1e-9) == _geom.INSIDE

    def test_far_outside(self):
        assert (
            _geom.point_in_mesh(np.array([3.0, 0.1, 0.2]), self.verts, self.tris, 1e-9)
            == _geom.OUTSIDE
        )

    def test_vertex_on_boundary(self):
        assert (
            _geom.point_in_mesh(self.verts[5], self.verts, self.tris, 1e-9)
            == _geom.ON_BOUNDARY
        )

    @settings(max_examples=60, deadline=None)
    @given(vec(3))
    def test_radius_decides(self, p):
        r = np.linalg.norm(p)
        if 0.2 < r < 0.8:
            expected = _geom.INSIDE
        elif 1.2 < r:
            expected = _geom.OUTSIDE
        else:
            return  # too close to the faceted boundary to call
        assert _geom.point_in_mesh(p, self.verts, self.tris, 1e-9) == expected


class TestMeshTopology:
    def test_closed_meshes_are_clean(self):
        for verts, tris in (scenegen.octahedron(), scenegen.icosahedron(), scenegen.icosphere(2)):
            assert _mesh.topology_problems(tris) == []
            assert _mesh.boundary_directed_edges(tris) == []

    def test_disk_fan_boundary_cycle(self):
        disk = scenegen.disk_surface("D", n_rim=12)
        assert _mesh.topology_problems(disk.triangles) == []
        cycles, problems = _mesh.chain_boundary(disk.triangles)
        assert problems == []
        assert len(cycles) == 1
        assert sorted(cycles[0]) == list(range(1, 13))

    def test_duplicate_face_is_flagged(self):
        verts, tris = scenegen.octahedron()
        bad = np.vstack([tris, tris[:1]])
        assert _mesh.topology_problems(bad)

    def test_flipped_face_is_flagged(self):
        verts, tris = scenegen.octahedron()
        bad = tris.copy()
        bad[0] = bad[0, ::-1]
        assert _mesh.topology_problems(bad)

    def test_embedding_self_intersection(self):
        verts, tris = scenegen.octahedron()
        # second octahedron shifted so the shells pass through each other
        verts2 = verts + np.array([0.9, 0.0, 0.0])
        both_v = np.vstack([verts, verts2])
        both_t = np.vstack([tris, tris + len(verts)])
        assert list(_geom.mesh_embedding_problems(both_v, both_t, 1e-9))
        far_v = np.vstack([verts, verts + np.array([5.0, 0.0, 0.0])])
        assert not list(_geom.mesh_embedding_problems(far_v, both_t, 1e-9))
