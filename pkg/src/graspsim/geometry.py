"""Rotations, rigid transforms and the camera -> robot change of frame.

Robot frame: x forward (toward the obstacle), y left, z up.  The camera frame
coincides with the robot frame when pan and tilt are zero, so the optical axis
is the camera's x axis.  Points are numpy arrays of shape (3,), clouds are
arrays of shape (N, 3).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# degenerate support pair (meters)
DEGENERATE_EPS = 1e-12

FRONTAL_NORMAL = np.array([1.0, 0.0, 0.0])


class DegenerateLineError(ValueError):
    pass


class ZeroVectorError(ValueError):
    pass


def as_point(p) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(3)
    if not np.all(np.isfinite(p)):
        raise ValueError(f"point has non-finite components: {p}")
    return p


def as_cloud(cloud) -> np.ndarray:
    cloud = np.asarray(cloud, dtype=float)
    if cloud.size == 0:
        return np.zeros((0, 3))
    cloud = cloud.reshape(-1, 3)
    if not np.all(np.isfinite(cloud)):
        raise ValueError("cloud has non-finite points")
    return cloud


def rot_y(phi: float) -> np.ndarray:
    """Tilt rotation about the y axis."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, 0.0, s],
                     [0.0, 1.0, 0.0],
                     [-s, 0.0, c]])


def rot_z(theta: float) -> np.ndarray:
    """Pan / yaw rotation about the z axis."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0],
                     [s, c, 0.0],
                     [0.0, 0.0, 1.0]])


def is_rotation(R, tol: float = 1e-9) -> bool:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        return False
    return bool(np.allclose(R.T @ R, np.eye(3), atol=tol, rtol=0)
                and abs(np.linalg.det(R) - 1.0) <= tol)


@dataclass(frozen=True)
class RigidTransform:
    """p' = R p + t."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        R = np.array(self.rotation, dtype=float)
        t = as_point(self.translation)
        if not is_rotation(R):
            raise ValueError("rotation is not orthonormal with det +1")
        R.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    def apply(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts @ self.rotation.T + self.translation

    def inverse(self) -> "RigidTransform":
        Rt = self.rotation.T
        return RigidTransform(Rt, -Rt @ self.translation)

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self after other."""
        return RigidTransform(self.rotation @ other.rotation,
                              self.rotation @ other.translation + self.translation)

    def matrix(self) -> np.ndarray:
        T = np.eye(4)
        T[:3, :3] = self.rotation
        T[:3, 3] = self.translation
        return T


@dataclass(frozen=True)
class CameraExtrinsics:
    """Pose of the head camera on the robot.

    tilt is about y (positive pitches the optical axis down), pan about z.
    """

    tilt: float = 0.0
    pan: float = 0.0
    translation: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not -np.pi / 2 <= self.tilt <= np.pi / 2:
            raise ValueError(f"tilt {self.tilt} outside [-pi/2, pi/2]")
        if not -np.pi < self.pan <= np.pi:
            raise ValueError(f"pan {self.pan} outside (-pi, pi]")
        object.__setattr__(self, "translation", tuple(float(v) for v in as_point(self.translation)))

    @property
    def rotation(self) -> np.ndarray:
        # order matters: tilt applied after pan
        return rot_y(self.tilt) @ rot_z(self.pan)

    def transform(self) -> RigidTransform:
        return RigidTransform(self.rotation, np.array(self.translation))


def camera_to_robot(cloud, ext: CameraExtrinsics) -> np.ndarray:
    """Map camera-frame points into the robot frame, p = R_Y R_Z s + t."""
    cloud = as_cloud(cloud)
    return cloud @ ext.rotation.T + np.asarray(ext.translation)


def robot_to_camera(cloud, ext: CameraExtrinsics) -> np.ndarray:
    cloud = as_cloud(cloud)
    return (cloud - np.asarray(ext.translation)) @ ext.rotation


def point_line_distance(p1, p2, q) -> float:
    """Distance from q to the infinite line through p1 and p2."""
    p1, p2, q = as_point(p1), as_point(p2), as_point(q)
    base = np.linalg.norm(p2 - p1)
    if base < DEGENERATE_EPS:
        raise DegenerateLineError("line support points coincide")
    return float(np.linalg.norm(np.cross(q - p1, q - p2)) / base)


def angle_to_frontal_normal(l_dir) -> float:
    """Unsigned angle in [0, pi] between a direction and the frontal normal (1, 0, 0)."""
    l_dir = as_point(l_dir)
    norm = np.linalg.norm(l_dir)
    if norm == 0.0:
        raise ZeroVectorError("direction has zero length")
    c = np.dot(l_dir, FRONTAL_NORMAL) / norm
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


@dataclass(frozen=True)
class LineModel:
    """A fitted line: two support points, unit direction and the extreme inliers."""

    support_a: np.ndarray
    support_b: np.ndarray
    direction: np.ndarray
    extreme_points: np.ndarray  # (2, 3): min / max projection along direction

    def __post_init__(self):
        a, b = as_point(self.support_a), as_point(self.support_b)
        if np.linalg.norm(b - a) < DEGENERATE_EPS:
            raise DegenerateLineError("line support points coincide")
        d = as_point(self.direction)
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise ValueError("direction must be a unit vector")
        ext = np.asarray(self.extreme_points, dtype=float).reshape(2, 3)
        for name, val in (("support_a", a), ("support_b", b), ("direction", d), ("extreme_points", ext)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @classmethod
    def through(cls, p1, p2) -> "LineModel":
        p1, p2 = as_point(p1), as_point(p2)
        span = p2 - p1
        n = np.linalg.norm(span)
        if n < DEGENERATE_EPS:
            raise DegenerateLineError("line support points coincide")
        return cls(p1, p2, span / n, np.stack([p1, p2]))

    def distances(self, points) -> np.ndarray:
        """Vectorised point_line_distance against every row of ``points``."""
        pts = np.asarray(points, dtype=float)
        rel = pts - self.support_a
        perp = rel - np.outer(rel @ self.direction, self.direction)
        return np.linalg.norm(perp, axis=1)


def rotate_line_z(line: LineModel, omega: float) -> LineModel:
    R = rot_z(omega)
    return LineModel(R @ line.support_a, R @ line.support_b,
                     R @ line.direction, line.extreme_points @ R.T)
