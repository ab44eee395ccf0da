"""Repulsive potential field over closest-point pairs and its convex
quadratic approximation.

The field value is a / d^(2b) in the closest distance d between the robot
and an obstacle footprint. Because that is non-convex, each prediction step
uses a second-order Taylor expansion in the robot position with the Hessian
projected to the nearest positive semidefinite matrix (Frobenius norm).
The closest-point offsets are held constant during differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ClosestPair


@dataclass(frozen=True)
class ApfParams:
    scale_a: float
    exponent_b: float
    min_sq_distance: float = 1e-4

    def __post_init__(self):
        if self.scale_a <= 0.0 or self.exponent_b <= 0.0 or self.min_sq_distance <= 0.0:
            raise ValueError("potential field parameters must be positive")


@dataclass(frozen=True)
class QuadraticApproximation:
    constant: float
    gradient: np.ndarray     # d/d(X, Y)
    hessian_psd: np.ndarray  # symmetric 2x2, eigenvalues >= 0
    anchor: tuple[float, float]


def apf_value(pair: ClosestPair, params: ApfParams) -> float:
    """Field value at a closest-point pair; clamped near contact."""
    d_sq = max(pair.distance * pair.distance, params.min_sq_distance)
    return params.scale_a / d_sq ** params.exponent_b


def psd_project(h: np.ndarray) -> np.ndarray:
    """Nearest positive semidefinite matrix in Frobenius norm.

    Eigendecomposes the symmetric input, clamps negative eigenvalues to
    zero, and recomposes.
    """
    h = np.asarray(h, dtype=float)
    if h.shape[0] != h.shape[1] or not np.allclose(h, h.T, atol=1e-9):
        raise ValueError("input must be symmetric")
    vals, vecs = np.linalg.eigh(h)
    vals = np.maximum(vals, 0.0)
    out = (vecs * vals) @ vecs.T
    return 0.5 * (out + out.T)


def quadratic_approx(robot_pos: tuple[float, float],
                     offset: tuple[float, float],
                     obstacle_point: tuple[float, float],
                     params: ApfParams) -> QuadraticApproximation:
    """Second-order expansion of the field in the robot position.

    The robot-side closest point is robot_pos + offset with the offset
    frozen, so only the robot position varies. Inside the clamp region the
    expansion is flat (constant value, zero gradient and Hessian).
    """
    a, b = params.scale_a, params.exponent_b
    dx = obstacle_point[0] - (robot_pos[0] + offset[0])
    dy = obstacle_point[1] - (robot_pos[1] + offset[1])
    d_sq = dx * dx + dy * dy
    if d_sq <= params.min_sq_distance:
        value = a / params.min_sq_distance ** b
        return QuadraticApproximation(value, np.zeros(2), np.zeros((2, 2)),
                                      (robot_pos[0], robot_pos[1]))
    value = a / d_sq ** b
    common = 2.0 * a * b * d_sq ** (-b - 1.0)
    gradient = np.array([common * dx, common * dy])
    curv = 2.0 * a * b * d_sq ** (-b - 2.0)
    hess = np.array([
        [curv * (2.0 * (b + 1.0) * dx * dx - d_sq),
         curv * 2.0 * (b + 1.0) * dx * dy],
        [curv * 2.0 * (b + 1.0) * dx * dy,
         curv * (2.0 * (b + 1.0) * dy * dy - d_sq)],
    ])
    return QuadraticApproximation(value, gradient, psd_project(hess),
                                  (robot_pos[0], robot_pos[1]))
