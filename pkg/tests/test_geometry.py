import math

import numpy as np
import pytest
from scipy.spatial import cKDTree

from apfmpc.geometry import (ClosestPair, OrientedRectangle, Pose2D, closest_pair,
                             corners, normalize_angle, rectangles_intersect)


def rect(x, y, heading, hl, hw):
    return OrientedRectangle(Pose2D(x, y, heading), hl, hw)


def sample_boundary(r, n=10_000):
    """Dense boundary samples including the exact corners."""
    cs = np.array(corners(r))
    pts = []
    per_edge = n // 4
    for i in range(4):
        a, b = cs[i], cs[(i + 1) % 4]
        t = np.linspace(0.0, 1.0, per_edge, endpoint=False)[:, None]
        pts.append(a + t * (b - a))
    return np.vstack(pts)


def oracle_distance(a, b, n=10_000):
    pa, pb = sample_boundary(a, n), sample_boundary(b, n)
    tree = cKDTree(pa)
    d, _ = tree.query(pb)
    return float(d.min())


def random_rect(rng, span=8.0):
    return rect(rng.uniform(-span, span), rng.uniform(-span, span),
                rng.uniform(-math.pi, math.pi),
                rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5))


class TestNormalizeAngle:
    @pytest.mark.parametrize("angle,expected", [
        (0.0, 0.0), (math.pi, math.pi), (-math.pi, math.pi),
        (3 * math.pi / 2, -math.pi / 2), (2 * math.pi, 0.0),
    ])
    def test_wraps(self, angle, expected):
        assert normalize_angle(angle) == pytest.approx(expected, abs=1e-12)


class TestCorners:
    def test_axis_aligned(self):
        got = corners(rect(0, 0, 0, 1, 0.5))
        assert np.allclose(got, [(1, 0.5), (-1, 0.5), (-1, -0.5), (1, -0.5)])

    def test_rotated_quarter_turn(self):
        got = corners(rect(0, 0, math.pi / 2, 1, 0.5))
        assert np.allclose(got, [(-0.5, 1), (-0.5, -1), (0.5, -1), (0.5, 1)])

    def test_general_rotation_matches_rotation_matrix(self):
        hl, hw, th = 2.0, 1.0, math.pi / 6
        got = np.array(corners(rect(1, 2, th, hl, hw)))
        rot = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        local = np.array([(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)])
        expected = local @ rot.T + np.array([1, 2])
        assert np.allclose(got, expected, atol=1e-12)

    def test_counter_clockwise(self):
        cs = corners(rect(3, -1, 0.7, 1.2, 0.4))
        area = 0.0
        for i in range(4):
            x1, y1 = cs[i]
            x2, y2 = cs[(i + 1) % 4]
            area += x1 * y2 - x2 * y1
        assert area > 0.0


class TestClosestPair:
    def test_face_to_face(self):
        got = closest_pair(rect(0, 0, 0, 1, 0.5), rect(5, 0, 0, 1, 0.5))
        assert got.distance == pytest.approx(3.0)
        assert got.on_a == pytest.approx((1.0, 0.0))
        assert got.on_b == pytest.approx((4.0, 0.0))
        assert got.offset_a == pytest.approx((1.0, 0.0))

    def test_identical_rectangles_overlap(self):
        r = rect(2, 3, 0.3, 1, 0.5)
        got = closest_pair(r, r)
        assert got.distance == 0.0
        assert got.on_a == got.on_b

    def test_rotated_pair_matches_sampling_oracle(self):
        a, b = rect(0, 0, 0, 1, 0.5), rect(3, 3, math.pi / 4, 1, 0.5)
        assert closest_pair(a, b).distance == pytest.approx(
            oracle_distance(a, b), abs=1e-3)

    def test_offset_is_from_center_to_witness(self):
        a, b = rect(1, -2, 0.4, 1, 0.5), rect(6, 1, 1.1, 0.8, 0.6)
        got = closest_pair(a, b)
        assert got.offset_a[0] == pytest.approx(got.on_a[0] - 1.0)
        assert got.offset_a[1] == pytest.approx(got.on_a[1] + 2.0)

    def test_distance_equals_witness_separation(self, rng):
        for _ in range(200):
            a, b = random_rect(rng), random_rect(rng)
            got = closest_pair(a, b)
            assert got.distance == pytest.approx(
                math.hypot(got.on_a[0] - got.on_b[0], got.on_a[1] - got.on_b[1]),
                abs=1e-12)


class TestInvariants:
    def test_symmetry_exact(self, rng):
        for _ in range(300):
            a, b = random_rect(rng), random_rect(rng)
            assert closest_pair(a, b).distance == closest_pair(b, a).distance

    def test_translation_invariance(self, rng):
        for _ in range(200):
            a, b = random_rect(rng), random_rect(rng)
            tx, ty = rng.uniform(-50, 50, size=2)
            a2 = rect(a.center.x + tx, a.center.y + ty, a.center.heading,
                      a.half_length, a.half_width)
            b2 = rect(b.center.x + tx, b.center.y + ty, b.center.heading,
                      b.half_length, b.half_width)
            assert closest_pair(a2, b2).distance == pytest.approx(
                closest_pair(a, b).distance, abs=1e-12)

    def test_rotation_invariance(self, rng):
        for _ in range(200):
            a, b = random_rect(rng), random_rect(rng)
            phi = rng.uniform(-math.pi, math.pi)
            c, s = math.cos(phi), math.sin(phi)

            def rot(r):
                x = c * r.center.x - s * r.center.y
                y = s * r.center.x + c * r.center.y
                return rect(x, y, r.center.heading + phi,
                            r.half_length, r.half_width)

            assert closest_pair(rot(a), rot(b)).distance == pytest.approx(
                closest_pair(a, b).distance, abs=1e-9)

    def test_zero_distance_iff_sat_intersection(self, rng):
        for _ in range(500):
            a, b = random_rect(rng, span=2.0), random_rect(rng, span=2.0)
            got = closest_pair(a, b)
            assert (got.distance == 0.0) == rectangles_intersect(a, b)

    def test_matches_sampling_oracle_on_random_pairs(self, rng):
        checked = 0
        while checked < 200:
            a, b = random_rect(rng), random_rect(rng)
            if rectangles_intersect(a, b):
                continue
            assert closest_pair(a, b).distance == pytest.approx(
                oracle_distance(a, b, n=4000), abs=1e-3)
            checked += 1


class TestValidation:
    def test_rejects_nonpositive_extents(self):
        with pytest.raises(ValueError):
            OrientedRectangle(Pose2D(0, 0, 0), 0.0, 1.0)
        with pytest.raises(ValueError):
            OrientedRectangle(Pose2D(0, 0, 0), 1.0, -0.1)

    def test_pose_heading_normalized(self):
        assert Pose2D(0, 0, 3 * math.pi).heading == pytest.approx(math.pi)
