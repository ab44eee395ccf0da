import math

import numpy as np
import pytest

from apfmpc.geometry import OrientedRectangle, Pose2D
from apfmpc.kinematics import ControlInput, RobotState
from apfmpc.prediction import (Obstacle, advance_obstacle, predict_obstacle,
                               predict_robot)

DT = 0.1


def square_obstacle(x, y, heading=0.0, vel=(0.0, 0.0), yaw_rate=0.0):
    return Obstacle(OrientedRectangle(Pose2D(x, y, heading), 0.5, 0.5),
                    vel, yaw_rate)


class TestPredictRobot:
    def test_stationary_fixed_point(self, geom):
        track = predict_robot(RobotState(1, 2, 0.3, 0, 0),
                              ControlInput(0, 0, 0, 0), geom, 5, DT)
        assert len(track.poses) == 5
        for p in track.poses:
            assert (p.x, p.y) == (1, 2)
            assert p.heading == pytest.approx(0.3)

    def test_straight_roll(self, geom):
        track = predict_robot(RobotState(0, 0, 0, 1, 1),
                              ControlInput(0, 0, 0, 0), geom, 10, DT)
        for i, p in enumerate(track.poses, start=1):
            assert p.x == pytest.approx(0.1 * i, abs=1e-12)
            assert p.y == 0.0

    def test_crab_roll(self, geom):
        d = math.pi / 4
        track = predict_robot(RobotState(0, 0, 0, 1, 1),
                              ControlInput(0, 0, d, d), geom, 8, DT)
        step = 0.1 * math.sqrt(2) / 2
        for i, p in enumerate(track.poses, start=1):
            assert p.x == pytest.approx(step * i, abs=1e-12)
            assert p.y == pytest.approx(step * i, abs=1e-12)
            assert p.heading == 0.0

    def test_rejects_bad_steps(self, geom):
        with pytest.raises(ValueError):
            predict_robot(RobotState(0, 0, 0, 1, 1),
                          ControlInput(0, 0, 0, 0), geom, 0, DT)


class TestObstacles:
    def test_static_obstacle_fixed(self):
        obs = square_obstacle(3, 4, 0.5)
        track = predict_obstacle(obs, 6, DT)
        for p in track.poses:
            assert (p.x, p.y) == (3, 4)
            assert p.heading == pytest.approx(0.5)

    def test_constant_velocity(self):
        obs = square_obstacle(0, 0, vel=(0.0, 0.5))
        track = predict_obstacle(obs, 10, DT)
        for i, p in enumerate(track.poses, start=1):
            assert p.x == 0.0
            assert p.y == pytest.approx(0.05 * i, abs=1e-12)

    def test_advance_preserves_shape_and_kind(self):
        obs = square_obstacle(0, 0, vel=(1.0, 0.0), yaw_rate=0.3)
        nxt = advance_obstacle(obs, DT)
        assert nxt.footprint.half_length == obs.footprint.half_length
        assert nxt.footprint.half_width == obs.footprint.half_width
        assert nxt.kind == "obstacle"
        assert nxt.yaw_rate == 0.3

    def test_turning_track_lies_on_circle(self):
        # speed 1, yaw rate 0.314..: discrete chord circle of radius
        # dt*|v| / (2 sin(dt*w/2))
        w = 0.1 * math.pi
        obs = square_obstacle(0, 0, vel=(1.0, 0.0), yaw_rate=w)
        track = predict_obstacle(obs, 40, DT)
        pts = np.array([[p.x, p.y] for p in track.poses])
        r_expected = DT * 1.0 / (2.0 * math.sin(DT * w / 2.0))
        assert r_expected == pytest.approx(3.1831, abs=1e-3)
        # fit circle center from first three points, then check all radii
        ax, ay = 0.0, 0.0  # start point
        b = pts[len(pts) // 2]
        c = pts[-1]
        d = 2 * (ax * (b[1] - c[1]) + b[0] * (c[1] - ay) + c[0] * (ay - b[1]))
        ux = ((ax**2 + ay**2) * (b[1] - c[1]) + (b @ b) * (c[1] - ay)
              + (c @ c) * (ay - b[1])) / d
        uy = ((ax**2 + ay**2) * (c[0] - b[0]) + (b @ b) * (ax - c[0])
              + (c @ c) * (b[0] - ax)) / d
        radii = np.hypot(pts[:, 0] - ux, pts[:, 1] - uy)
        assert np.ptp(radii) < 1e-9
        assert radii[0] == pytest.approx(r_expected, abs=1e-9)

    def test_speed_preserved_under_turning(self):
        obs = square_obstacle(0, 0, vel=(0.6, 0.8), yaw_rate=1.3)
        cur = obs
        for _ in range(50):
            cur = advance_obstacle(cur, DT)
            assert math.hypot(*cur.velocity) == pytest.approx(1.0, abs=1e-12)

    def test_zero_yaw_linearity(self):
        obs = square_obstacle(1, 1, vel=(0.3, -0.4))
        one_big = advance_obstacle(obs, 0.5)
        five_small = obs
        for _ in range(5):
            five_small = advance_obstacle(five_small, DT)
        assert one_big.footprint.center.x == pytest.approx(
            five_small.footprint.center.x, abs=1e-12)
        assert one_big.footprint.center.y == pytest.approx(
            five_small.footprint.center.y, abs=1e-12)

    def test_substep_bit_identity(self):
        # advancing twice by dt must equal the two poses of a 2-step track
        obs = square_obstacle(0, 0, vel=(1.0, 0.0), yaw_rate=0.7)
        track = predict_obstacle(obs, 2, DT)
        step1 = advance_obstacle(obs, DT)
        step2 = advance_obstacle(step1, DT)
        assert track.poses[0] == step1.footprint.center
        assert track.poses[1] == step2.footprint.center

    def test_boundary_must_be_static(self):
        rect = OrientedRectangle(Pose2D(0, 0, 0), 1, 1)
        with pytest.raises(ValueError):
            Obstacle(rect, (0.1, 0.0), 0.0, "boundary")
        with pytest.raises(ValueError):
            Obstacle(rect, (0.0, 0.0), 0.2, "boundary")

    def test_rejects_unknown_kind(self):
        rect = OrientedRectangle(Pose2D(0, 0, 0), 1, 1)
        with pytest.raises(ValueError):
            Obstacle(rect, kind="wall")
