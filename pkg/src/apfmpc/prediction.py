"""Horizon prediction of robot and obstacle poses.

The robot is rolled forward with its previously applied input held
constant; obstacles follow a constant velocity and turning rate model
(velocity vector rotated by dt*yaw_rate before each displacement, so speed
magnitude is preserved).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import OrientedRectangle, Pose2D, normalize_angle
from .kinematics import ControlInput, RobotGeometry, RobotState, euler_step


@dataclass(frozen=True)
class Obstacle:
    footprint: OrientedRectangle
    velocity: tuple[float, float] = (0.0, 0.0)
    yaw_rate: float = 0.0
    kind: str = "obstacle"  # "obstacle" or "boundary"

    def __post_init__(self):
        if self.kind not in ("obstacle", "boundary"):
            raise ValueError(f"unknown obstacle kind: {self.kind!r}")
        if self.kind == "boundary" and (self.velocity != (0.0, 0.0) or self.yaw_rate != 0.0):
            raise ValueError("boundaries must be static")


@dataclass(frozen=True)
class PredictionTrack:
    """Poses for steps 1..n ahead of the current time, one per dt."""
    poses: list[Pose2D]
    dt: float


def predict_robot(state: RobotState, held_input: ControlInput,
                  geom: RobotGeometry, n_steps: int, dt: float) -> PredictionTrack:
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    poses = []
    cur = state
    for _ in range(n_steps):
        cur = euler_step(cur, held_input, geom, dt)
        poses.append(Pose2D(cur.x, cur.y, cur.heading))
    return PredictionTrack(poses, dt)


def advance_obstacle(obs: Obstacle, dt: float) -> Obstacle:
    """One constant velocity / turning rate step."""
    ang = dt * obs.yaw_rate
    c, s = math.cos(ang), math.sin(ang)
    vx = c * obs.velocity[0] - s * obs.velocity[1]
    vy = s * obs.velocity[0] + c * obs.velocity[1]
    pose = obs.footprint.center
    new_pose = Pose2D(pose.x + dt * vx, pose.y + dt * vy,
                      normalize_angle(pose.heading + ang))
    return Obstacle(OrientedRectangle(new_pose, obs.footprint.half_length,
                                      obs.footprint.half_width),
                    (vx, vy), obs.yaw_rate, obs.kind)


def predict_obstacle(obs: Obstacle, n_steps: int, dt: float) -> PredictionTrack:
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    poses = []
    cur = obs
    for _ in range(n_steps):
        cur = advance_obstacle(cur, dt)
        poses.append(cur.footprint.center)
    return PredictionTrack(poses, dt)
