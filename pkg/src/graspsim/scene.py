"""Synthetic dishwasher scene.

World frame = the robot frame at the nominal arrival pose.  The obstacle
front is the plane x = nominal_plane_distance, spanning y in
[-plane_width/2, plane_width/2] and z in [0, plane_height].  The handle is a
horizontal bar sticking out of that plane; a floor strip sits at z = 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .geometry import CameraExtrinsics, as_cloud, as_point, camera_to_robot, robot_to_camera

# RNG stream tags
_DRIFT, _RENDER = 1, 2


class PoseMode(enum.Enum):
    CONSTANT = "Constant"
    RANDOM = "Random"


def default_camera() -> CameraExtrinsics:
    return CameraExtrinsics(tilt=0.55, pan=0.0, translation=(0.0, 0.0, 1.1))


@dataclass(frozen=True)
class SceneConfig:
    plane_width: float = 1.2
    plane_height: float = 0.85
    nominal_plane_distance: float = 0.60
    handle_center: tuple = (0.0, 0.75)  # (lateral, height) on the plane
    handle_width: float = 0.30
    handle_height: float = 0.02
    handle_protrusion: float = 0.04
    noise_sigma: float = 0.005
    points_per_cloud: int = 5000
    floor_depth: float = 0.40
    lateral_drift_range: tuple = (-0.1, 0.1)
    frontal_drift_range: tuple = (-0.2, 0.0)
    yaw_drift_range: tuple = (-15.0, 15.0)  # degrees
    handle_jitter_range: tuple = (-0.05, 0.05)
    constant_residual: bool = False
    residual_pose_sigma: float = 0.02
    residual_yaw_sigma: float = 3.0  # degrees
    camera: CameraExtrinsics = field(default_factory=default_camera)
    seed: int = 0

    def __post_init__(self):
        for name in ("lateral_drift_range", "frontal_drift_range", "yaw_drift_range", "handle_jitter_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name}: lower bound {lo} exceeds upper bound {hi}")
            object.__setattr__(self, name, (float(lo), float(hi)))
        object.__setattr__(self, "handle_center", tuple(float(v) for v in self.handle_center))
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.points_per_cloud < 1:
            raise ValueError("points_per_cloud must be >= 1")
        for name in ("plane_width", "plane_height", "nominal_plane_distance",
                     "handle_width", "handle_height", "handle_protrusion"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        u, v = self.handle_center
        j_lo, j_hi = self.handle_jitter_range
        half_w, half_h = self.handle_width / 2, self.handle_height / 2
        if (u + j_lo - half_w < -self.plane_width / 2 or u + j_hi + half_w > self.plane_width / 2
                or v + j_lo - half_h < 0 or v + j_hi + half_h > self.plane_height):
            raise ValueError("handle (with jitter) must stay inside the plane")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class DriftSample:
    lateral: float = 0.0
    frontal: float = 0.0
    yaw: float = 0.0  # radians
    handle_dx: float = 0.0  # along the plane, lateral
    handle_dy: float = 0.0  # along the plane, vertical

    def as_tuple(self):
        return (self.lateral, self.frontal, self.yaw, self.handle_dx, self.handle_dy)


@dataclass(frozen=True)
class RobotPose:
    """Planar base pose in the world frame."""

    x: float = 0.0
    y: float = 0.0
    yaw: float = 0.0

    @classmethod
    def from_drift(cls, drift: DriftSample) -> "RobotPose":
        return cls(drift.frontal, drift.lateral, drift.yaw)

    def _rot(self):
        c, s = np.cos(self.yaw), np.sin(self.yaw)
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])

    def to_robot(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return (pts - np.array([self.x, self.y, 0.0])) @ self._rot()

    def to_world(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts @ self._rot().T + np.array([self.x, self.y, 0.0])

    def moved(self, rotate_by: float, advance_by: float) -> "RobotPose":
        """Turn in place, then drive straight along the new heading."""
        yaw = self.yaw + rotate_by
        return RobotPose(self.x + advance_by * np.cos(yaw), self.y + advance_by * np.sin(yaw), yaw)


@dataclass(frozen=True)
class GroundTruth:
    true_plane_distance: float
    true_plane_yaw: float
    true_handle_position: np.ndarray  # robot frame, centre of the handle's front face
    handle_half_width: float = 0.0

    @property
    def plane_normal(self) -> np.ndarray:
        """Unit normal of the obstacle plane in the robot frame, pointing away from the robot."""
        return np.array([np.cos(self.true_plane_yaw), -np.sin(self.true_plane_yaw), 0.0])

    @property
    def handle_axis(self) -> np.ndarray:
        return np.array([np.sin(self.true_plane_yaw), np.cos(self.true_plane_yaw), 0.0])

    def penetration(self, pts) -> np.ndarray:
        """Signed depth past the plane (positive = inside the obstacle)."""
        return np.asarray(pts, dtype=float) @ self.plane_normal - self.true_plane_distance

    def handle_distance(self, p) -> float:
        """Distance from p to the handle's front-face centre line."""
        rel = as_point(p) - self.true_handle_position
        along = np.clip(rel @ self.handle_axis, -self.handle_half_width, self.handle_half_width)
        return float(np.linalg.norm(rel - along * self.handle_axis))


@dataclass(frozen=True)
class GripperOcclusionSpec:
    gripper_position: np.ndarray  # robot frame
    occlusion_radius: float = 0.06

    def __post_init__(self):
        if self.occlusion_radius < 0:
            raise ValueError("occlusion_radius must be >= 0")
        object.__setattr__(self, "gripper_position", as_point(self.gripper_position))


def _rng(*words) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(w) for w in words]))


def sample_drift(config: SceneConfig, trial_index: int, mode: PoseMode = PoseMode.RANDOM) -> DriftSample:
    """Arrival drift for one trial.

    Constant mode is drift free unless ``config.constant_residual`` is set, in
    which case a small Gaussian pose residual stands in for imperfect map
    re-initialisation (the handle does not move).
    """
    rng = _rng(config.seed, trial_index, _DRIFT)
    if mode is PoseMode.CONSTANT:
        if not config.constant_residual:
            return DriftSample()
        lat, front = rng.normal(0.0, config.residual_pose_sigma, size=2)
        yaw = np.radians(rng.normal(0.0, config.residual_yaw_sigma))
        return DriftSample(float(lat), float(front), float(yaw))
    lat = rng.uniform(*config.lateral_drift_range)
    front = rng.uniform(*config.frontal_drift_range)
    yaw = np.radians(rng.uniform(*config.yaw_drift_range))
    hdx, hdy = rng.uniform(*config.handle_jitter_range, size=2)
    return DriftSample(float(lat), float(front), float(yaw), float(hdx), float(hdy))


def handle_world(config: SceneConfig, drift: DriftSample) -> np.ndarray:
    u, v = config.handle_center
    return np.array([config.nominal_plane_distance - config.handle_protrusion,
                     u + drift.handle_dx, v + drift.handle_dy])


def ground_truth(config: SceneConfig, drift: DriftSample, pose: RobotPose | None = None,
                 plane_shift: float = 0.0) -> GroundTruth:
    pose = RobotPose.from_drift(drift) if pose is None else pose
    distance = config.nominal_plane_distance + plane_shift - pose.x
    handle = pose.to_robot(handle_world(config, drift))
    return GroundTruth(distance, pose.yaw, handle, config.handle_width / 2)


def _uniform_rect(rng, n, origin, e1, e2):
    a, b = rng.random(n), rng.random(n)
    return origin + np.outer(a, e1) + np.outer(b, e2)


def _world_points(config: SceneConfig, drift: DriftSample, rng, door_open: bool, plane_shift: float):
    D = config.nominal_plane_distance + plane_shift
    W, H = config.plane_width, config.plane_height
    hx, hu, hv = handle_world(config, drift)
    hw, hh, hp = config.handle_width, config.handle_height, config.handle_protrusion
    ex, ey, ez = np.eye(3)

    # (origin, edge1, edge2) rectangles
    faces = [("plane", np.array([D, -W / 2, 0.0]), W * ey, H * ez),
             ("floor", np.array([D - config.floor_depth, -W / 2, 0.0]), W * ey, config.floor_depth * ex)]
    if not door_open:
        y0, z0 = hu - hw / 2, hv - hh / 2
        faces += [("handle", np.array([hx, y0, z0]), hw * ey, hh * ez),          # front
                  ("handle", np.array([hx, y0, z0 + hh]), hw * ey, hp * ex),     # top
                  ("handle", np.array([hx, y0, z0]), hw * ey, hp * ex),          # bottom
                  ("handle", np.array([hx, y0, z0]), hh * ez, hp * ex),          # ends
                  ("handle", np.array([hx, y0 + hw, z0]), hh * ez, hp * ex)]
    areas = np.array([np.linalg.norm(np.cross(e1, e2)) for _, _, e1, e2 in faces])
    counts = rng.multinomial(config.points_per_cloud, areas / areas.sum())
    chunks = []
    for (kind, origin, e1, e2), n in zip(faces, counts):
        pts = _uniform_rect(rng, n, origin, e1, e2)
        if kind == "plane" and not door_open:
            # the bar hides the patch of door right behind it
            hidden = (np.abs(pts[:, 1] - hu) < hw / 2) & (np.abs(pts[:, 2] - hv) < hh / 2)
            pts = pts[~hidden]
        chunks.append(pts)
    return np.concatenate(chunks)


def apply_occlusion(cloud_robot, occ: GripperOcclusionSpec, camera_center) -> np.ndarray:
    """Swap points hidden behind a spherical gripper for the sphere's visible surface."""
    pts = as_cloud(cloud_robot).copy()
    c = as_point(camera_center)
    g, r = occ.gripper_position, occ.occlusion_radius
    if r == 0 or len(pts) == 0:
        return pts
    ray = pts - c
    length2 = np.einsum("ij,ij->i", ray, ray)
    tau = np.clip((ray @ (g - c)) / np.where(length2 > 0, length2, 1.0), 0.0, 1.0)
    closest = c + tau[:, None] * ray
    miss2 = np.einsum("ij,ij->i", closest - g, closest - g)
    hit = (miss2 < r * r) & (tau > 0)
    if np.any(hit):
        # near intersection of the ray with the sphere
        length = np.sqrt(length2[hit])
        back = np.sqrt(r * r - miss2[hit])
        t_near = np.maximum(tau[hit] * length - back, 0.0)
        pts[hit] = c + ray[hit] / length[:, None] * t_near[:, None]
    return pts


def render_cloud(config: SceneConfig, drift: DriftSample, ext: CameraExtrinsics | None = None,
                 occ: GripperOcclusionSpec | None = None, *, trial_index: int = 0,
                 pose: RobotPose | None = None, door_open: bool = False, plane_shift: float = 0.0,
                 shot: int = 0):
    """Render a noisy camera-frame cloud and the matching ground truth.

    ``pose`` overrides the drifted arrival pose (used after the robot moves),
    ``door_open`` drops the handle, ``plane_shift`` pushes the plane back along
    world x, and ``shot`` separates repeated renders within a trial.
    """
    ext = config.camera if ext is None else ext
    pose = RobotPose.from_drift(drift) if pose is None else pose
    rng = _rng(config.seed, trial_index, _RENDER, shot)
    world = _world_points(config, drift, rng, door_open, plane_shift)
    robot = pose.to_robot(world)
    if occ is not None:
        robot = apply_occlusion(robot, occ, ext.translation)
    cam = robot_to_camera(robot, ext)
    if config.noise_sigma > 0:
        cam = cam + rng.normal(0.0, config.noise_sigma, size=cam.shape)
    return cam, ground_truth(config, drift, pose, plane_shift)


def render_robot_cloud(config: SceneConfig, drift: DriftSample, **kw):
    cam, truth = render_cloud(config, drift, **kw)
    ext = kw.get("ext") or config.camera
    return camera_to_robot(cam, ext), truth


def remove_lateral_band(cloud_robot, truth: GroundTruth, center: float, width: float) -> np.ndarray:
    """Drop points whose coordinate along the obstacle edge lies in [center - width/2, center + width/2]."""
    cloud = as_cloud(cloud_robot)
    along = cloud @ truth.handle_axis
    return cloud[np.abs(along - center) > width / 2]


def save_cloud(path, cloud, frame: str = "camera") -> None:
    if frame not in ("camera", "robot"):
        raise ValueError("frame must be 'camera' or 'robot'")
    cloud = as_cloud(cloud)
    with open(path, "w") as fh:
        fh.write(f"# frame={frame} n={len(cloud)}\n")
        for x, y, z in cloud:
            fh.write(f"{x:.6f} {y:.6f} {z:.6f}\n")


def load_cloud(path):
    """Read a cloud dump, returning (points, frame)."""
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError(f"{path}: missing '# frame=... n=...' header")
    fields = dict(tok.split("=", 1) for tok in text[0][1:].split() if "=" in tok)
    frame = fields.get("frame")
    if frame not in ("camera", "robot"):
        raise ValueError(f"{path}: header frame must be camera or robot, got {frame!r}")
    rows = [line.split() for line in text[1:] if line.strip()]
    cloud = np.array(rows, dtype=float).reshape(-1, 3)
    if "n" in fields and int(fields["n"]) != len(cloud):
        raise ValueError(f"{path}: header says n={fields['n']} but found {len(cloud)} points")
    return cloud, frame


def with_seed(config: SceneConfig, seed: int) -> SceneConfig:
    return replace(config, seed=int(seed))
