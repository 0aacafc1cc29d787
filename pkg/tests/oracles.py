"""Independent reference computations used by several test modules."""

import itertools

import mpmath
import numpy as np


def mp_iterations(p, eps, s):
    """Iteration count for RANSAC evaluated at 50 significant digits."""
    mpmath.mp.dps = 50
    n = mpmath.log(1 - mpmath.mpf(p)) / mpmath.log(1 - (1 - mpmath.mpf(eps)) ** s)
    return int(mpmath.ceil(n))


def brute_force_max_inliers(xy, thr):
    """Max inlier count over every two-point line, via |(q-p1) x (q-p2)| / |p2-p1|."""
    best = 0
    pts3 = np.c_[xy, np.zeros(len(xy))]
    for a, b in itertools.combinations(range(len(xy)), 2):
        base = np.linalg.norm(pts3[b] - pts3[a])
        if base < 1e-12:
            continue
        d = np.linalg.norm(np.cross(pts3 - pts3[a], pts3 - pts3[b]), axis=1) / base
        best = max(best, int(np.sum(d <= thr)))
    return best


def small_instance(seed, min_on_line=2):
    """4-12 points, some of them near a random line, the rest uniform clutter."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(max(4, min_on_line), 13))
    k = int(rng.integers(min_on_line, n + 1))
    a = rng.uniform(-np.pi, np.pi)
    t = rng.uniform(-1, 1, k)
    on_line = np.outer(t, [np.cos(a), np.sin(a)]) + rng.normal(0, 0.003, (k, 2))
    return np.vstack([on_line, rng.uniform(-1, 1, (n - k, 2))])
