"""RANSAC line fitting in the horizontal (XY) plane."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DEGENERATE_EPS, LineModel

__all__ = [
    "LineModel", "RansacParams", "FitResult", "InsufficientPointsError",
    "NoConsensusError", "IterationDomainError", "required_iterations", "fit_line",
]


class InsufficientPointsError(ValueError):
    pass


class NoConsensusError(RuntimeError):
    pass


class IterationDomainError(ValueError):
    pass


@dataclass(frozen=True)
class RansacParams:
    success_prob: float = 0.99
    outlier_ratio: float = 0.5
    sample_size: int = 2
    inlier_threshold: float = 0.01
    max_iterations_cap: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.success_prob < 1.0:
            raise ValueError("success_prob must lie in (0, 1)")
        if not 0.0 <= self.outlier_ratio < 1.0:
            raise ValueError("outlier_ratio must lie in [0, 1)")
        if self.sample_size < 2:
            raise ValueError("sample_size must be >= 2 for a line")
        if not self.inlier_threshold > 0.0:
            raise ValueError("inlier_threshold must be > 0")
        if self.max_iterations_cap < 1:
            raise ValueError("max_iterations_cap must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class FitResult:
    model: LineModel
    inlier_indices: np.ndarray
    iterations_used: int
    consensus_indices: np.ndarray  # inliers of the winning two-point hypothesis

    @property
    def consensus_size(self) -> int:
        return int(len(self.consensus_indices))


def required_iterations(p: float, eps: float, s: int) -> int:
    """Number of draws so that, with probability ``p``, at least one sample
    of size ``s`` is outlier free when a fraction ``eps`` of the data are outliers.
    """
    if not 0.0 < p < 1.0:
        raise IterationDomainError("p must lie in (0, 1)")
    if not 0.0 <= eps < 1.0:
        raise IterationDomainError("eps must lie in [0, 1)")
    if s < 1:
        raise IterationDomainError("s must be >= 1")
    w = (1.0 - eps) ** s
    if w >= 1.0:
        # every draw is clean
        return 1
    denom = math.log1p(-w)
    if w <= 0.0 or denom == 0.0:
        raise IterationDomainError(f"log(1 - (1 - eps)^s) undefined for eps={eps}, s={s}")
    n = math.log1p(-p) / denom
    # absorb float noise on exact integers before taking the ceiling
    return max(1, math.ceil(n - 1e-9 * max(1.0, n)))


def _pair_distances(pts: np.ndarray, i: np.ndarray, j: np.ndarray):
    """Distances of every point to every (i, j) hypothesis line. Shape (H, N)."""
    a = pts[i]
    span = pts[j] - a
    base = np.hypot(span[:, 0], span[:, 1])
    rel = pts[None, :, :] - a[:, None, :]
    cross = np.abs(span[:, None, 0] * rel[:, :, 1] - span[:, None, 1] * rel[:, :, 0])
    with np.errstate(invalid="ignore", divide="ignore"):
        d = cross / base[:, None]
    return d, base >= DEGENERATE_EPS


def _tls_line(xy: np.ndarray):
    centroid = xy.mean(axis=0)
    _, _, vt = np.linalg.svd(xy - centroid, full_matrices=False)
    return centroid, vt[0]


def _canonical(direction: np.ndarray) -> np.ndarray:
    # point along +y; for lines parallel to x, along +x
    if direction[1] < 0 or (direction[1] == 0 and direction[0] < 0):
        direction = -direction
    return direction


def _line_dist(xy, centroid, direction):
    rel = xy - centroid
    return np.abs(rel[:, 0] * direction[1] - rel[:, 1] * direction[0])


def fit_line(points, params: RansacParams = RansacParams()) -> FitResult:
    """Fit one line to 2D (or XY of 3D) points.

    Hypotheses are lines through two distinct points.  When the number of
    distinct pairs is within ``max_iterations_cap`` every pair is evaluated;
    otherwise ``min(required_iterations, cap)`` random samples are drawn.
    The winner has the most inliers, then the lowest mean inlier distance,
    then the earliest index.  Its consensus set is refit by total least
    squares and reclassified until stable.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] < 2:
        raise ValueError("points must be an (N, 2) or (N, 3) array")
    xy = np.ascontiguousarray(pts[:, :2])
    if not np.all(np.isfinite(xy)):
        raise ValueError("points must be finite")
    n = len(xy)
    s = params.sample_size
    if n < max(2, s):
        raise InsufficientPointsError(f"need at least {max(2, s)} points, got {n}")

    thr = params.inlier_threshold
    n_pairs = n * (n - 1) // 2
    if n_pairs <= params.max_iterations_cap:
        i, j = np.triu_indices(n, k=1)
    else:
        n_iter = min(required_iterations(params.success_prob, params.outlier_ratio, s),
                     params.max_iterations_cap)
        rng = np.random.default_rng(params.seed)
        draws = np.array([rng.choice(n, size=s, replace=False) for _ in range(n_iter)])
        i, j = draws[:, 0], draws[:, 1]

    d, valid = _pair_distances(xy, i, j)
    inl = (d <= thr) & valid[:, None]
    counts = inl.sum(axis=1)
    counts[~valid] = -1
    with np.errstate(invalid="ignore"):
        mean_d = np.where(counts > 0, np.where(inl, d, 0.0).sum(axis=1) / np.maximum(counts, 1), np.inf)
    order = np.lexsort((np.arange(len(i)), mean_d, -counts))
    best = order[0]
    consensus = np.flatnonzero(inl[best])
    if len(consensus) < 2 * s:
        raise NoConsensusError(f"best hypothesis has {len(consensus)} inliers, need {2 * s}")

    # refit on the consensus set, then reclassify until the set settles
    members = consensus
    centroid, direction = _tls_line(xy[members])
    for _ in range(10):
        new = np.flatnonzero(_line_dist(xy, centroid, direction) <= thr)
        if len(new) < 2 or np.array_equal(new, members):
            break
        members = new
        centroid, direction = _tls_line(xy[members])
    inliers = np.flatnonzero(_line_dist(xy, centroid, direction) <= thr)
    if len(inliers) < 2 * s:
        # refit drifted off; fall back to the winning hypothesis line
        centroid = xy[i[best]]
        span = xy[j[best]] - centroid
        direction = span / np.hypot(*span)
        inliers = consensus
    direction = _canonical(direction)

    proj = (xy[inliers] - centroid) @ direction
    lo, hi = inliers[np.argmin(proj)], inliers[np.argmax(proj)]
    d3 = np.array([direction[0], direction[1], 0.0])
    c3 = np.array([centroid[0], centroid[1], 0.0])
    a = c3 + d3 * proj.min()
    b = c3 + d3 * proj.max()
    if np.linalg.norm(b - a) < DEGENERATE_EPS:
        raise NoConsensusError("inliers collapse to a single point")
    extremes = np.array([[xy[lo, 0], xy[lo, 1], 0.0], [xy[hi, 0], xy[hi, 1], 0.0]])
    model = LineModel(a, b, d3, extremes)

    # the advertised inlier contract
    assert np.all(model.distances(np.c_[xy[inliers], np.zeros(len(inliers))]) <= thr + 1e-12)
    return FitResult(model, inliers, int(len(i)), consensus)
