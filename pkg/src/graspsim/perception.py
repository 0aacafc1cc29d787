"""Edge-based pose correction and handle detection from a robot-frame cloud."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import LineModel, angle_to_frontal_normal, as_cloud, rotate_line_z
from .ransac import RansacParams, fit_line

DEFAULT_TARGET_STANDOFF = 0.60
DEFAULT_PROTRUSION_MIN = 0.015
DEFAULT_BIN_WIDTH = np.radians(0.5)
DEFAULT_DEPTH_BAND = 0.02


class EmptyCloudError(ValueError):
    pass


class LowMarginError(RuntimeError):
    """The closest point does not stand out from the obstacle plane."""


@dataclass(frozen=True)
class RoiLimits:
    x: tuple = (0.2, 1.2)
    y: tuple = (-0.5, 0.5)
    z: tuple = (0.05, 1.0)

    def __post_init__(self):
        for axis in ("x", "y", "z"):
            lo, hi = getattr(self, axis)
            if not lo < hi:
                raise ValueError(f"roi {axis}: min {lo} must be < max {hi}")
            object.__setattr__(self, axis, (float(lo), float(hi)))

    def contains(self, cloud) -> np.ndarray:
        cloud = as_cloud(cloud)
        lo = np.array([self.x[0], self.y[0], self.z[0]])
        hi = np.array([self.x[1], self.y[1], self.z[1]])
        return np.all((cloud >= lo) & (cloud <= hi), axis=1)


@dataclass(frozen=True)
class EdgeEstimate:
    angle: float  # signed yaw of the edge away from the frontal plane
    standoff_distance: float
    line: LineModel
    inlier_count: int


@dataclass(frozen=True)
class HandleEstimate:
    position: np.ndarray
    margin: float


@dataclass(frozen=True)
class PoseDelta:
    rotate_by: float
    advance_by: float


def crop_roi(cloud, limits: RoiLimits = RoiLimits()) -> np.ndarray:
    cloud = as_cloud(cloud)
    return cloud[limits.contains(cloud)]


def line_of_sight(xy, bin_width: float = DEFAULT_BIN_WIDTH,
                  depth_band: float = DEFAULT_DEPTH_BAND, origin=(0.0, 0.0)) -> np.ndarray:
    """Indices of the visible surface point per bearing bin.

    Points are binned by bearing from ``origin``.  In each bin the nearest
    range r0 is found and, among the points with range in [r0, r0 + depth_band],
    the one with median range is kept.  ``depth_band=0`` keeps the nearest point.
    """
    xy = np.asarray(xy, dtype=float)[:, :2]
    if len(xy) == 0:
        return np.zeros(0, dtype=int)
    rel = xy - np.asarray(origin, dtype=float)
    rng = np.hypot(rel[:, 0], rel[:, 1])
    bins = np.floor(np.arctan2(rel[:, 1], rel[:, 0]) / bin_width).astype(np.int64)
    order = np.lexsort((np.arange(len(xy)), rng, bins))
    b_sorted, r_sorted = bins[order], rng[order]
    starts = np.flatnonzero(np.r_[True, b_sorted[1:] != b_sorted[:-1]])
    ends = np.r_[starts[1:], len(order)]
    r0 = np.repeat(r_sorted[starts], ends - starts)
    in_band = r_sorted <= r0 + depth_band
    # ranges are sorted inside a bin, so the band is a prefix of each run
    band_len = np.add.reduceat(in_band.astype(np.int64), starts)
    pick = starts + (band_len - 1) // 2
    return order[pick]


def estimate_edge(cloud, params: RansacParams = RansacParams(), *,
                  bin_width: float = DEFAULT_BIN_WIDTH,
                  depth_band: float = DEFAULT_DEPTH_BAND,
                  origin=(0.0, 0.0)) -> EdgeEstimate:
    """Fit the obstacle edge on an ROI-cropped robot-frame cloud.

    Returns the signed edge angle (positive when the edge direction leans
    toward +x, i.e. the robot is yawed counter-clockwise relative to the
    obstacle) and the standoff: mean x of the segment's end points (the
    extreme inliers projected onto the fitted line) once the edge is rotated
    parallel to the frontal plane.  Raw extreme inliers are avoided because
    the ROI's lateral cut truncates the outermost bearing bins by range.
    """
    cloud = as_cloud(cloud)
    xy = cloud[:, :2]
    sight = line_of_sight(xy, bin_width, depth_band, origin)
    fit = fit_line(xy[sight], params)
    direction = fit.model.direction  # canonical: y component >= 0
    # complement of the unsigned angle to the normal; sign follows the x component
    omega = np.pi / 2 - angle_to_frontal_normal(direction)
    corrected = rotate_line_z(fit.model, omega)
    standoff = float((corrected.support_a[0] + corrected.support_b[0]) / 2)
    return EdgeEstimate(float(omega), standoff, fit.model, len(fit.inlier_indices))


def pose_correction(edge: EdgeEstimate, target_standoff: float = DEFAULT_TARGET_STANDOFF) -> PoseDelta:
    return PoseDelta(rotate_by=-edge.angle, advance_by=edge.standoff_distance - target_standoff)


def detect_handle(cloud, limits: RoiLimits | None = None,
                  min_margin: float = DEFAULT_PROTRUSION_MIN) -> HandleEstimate:
    """Closest point to the camera plane (lowest x), checked against the plane."""
    cloud = as_cloud(cloud)
    if limits is not None:
        cloud = crop_roi(cloud, limits)
    if len(cloud) == 0:
        raise EmptyCloudError("no points to search for a handle")
    k = int(np.argmin(cloud[:, 0]))
    p_c = cloud[k].copy()
    plane_x = float(np.median(cloud[:, 0]))
    margin = plane_x - float(p_c[0])
    if margin < min_margin:
        raise LowMarginError(f"closest point only {margin:.4f} m in front of the plane")
    return HandleEstimate(p_c, margin)
