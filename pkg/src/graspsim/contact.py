"""Wrist force sensor model and the guarded advance-until-contact move."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import as_point
from .scene import GroundTruth

STIFFNESS = 500.0  # N/m
FORCE_SIGMA = 0.1  # N
DEFAULT_THRESHOLD = 2.0
DEFAULT_STEP = 0.005
DEFAULT_MAX_TRAVEL = 0.25
FINE_STEPS = 10  # fine increments per coarse step after the first trigger


@dataclass(frozen=True)
class ForceReading:
    fx: float = 0.0
    fy: float = 0.0
    fz: float = 0.0
    tx: float = 0.0
    ty: float = 0.0
    tz: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite([self.fx, self.fy, self.fz, self.tx, self.ty, self.tz])):
            raise ValueError("force reading must be finite")


@dataclass(frozen=True)
class GripperState:
    """Fingertip reference point and the hand's X (approach) axis, robot frame."""

    position: np.ndarray
    approach_axis: np.ndarray = (1.0, 0.0, 0.0)
    aperture: float = 0.08
    closed: bool = False

    def __post_init__(self):
        axis = as_point(self.approach_axis)
        if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
            raise ValueError("approach_axis must be a unit vector")
        if self.aperture < 0:
            raise ValueError("aperture must be >= 0")
        object.__setattr__(self, "position", as_point(self.position))
        object.__setattr__(self, "approach_axis", axis)


@dataclass(frozen=True)
class ContactResult:
    contacted: bool
    contact_position: np.ndarray
    travel: float
    final_reading: ForceReading


def simulate_force(gripper: GripperState, truth: GroundTruth, rng: np.random.Generator | None = None,
                   sigma: float = FORCE_SIGMA, stiffness: float = STIFFNESS) -> ForceReading:
    """Linear-spring reaction of the obstacle plane, seen along the hand axes.

    ``rng=None`` gives a noiseless reading.
    """
    pen = float(truth.penetration(gripper.position))
    fx = stiffness * pen * float(truth.plane_normal @ gripper.approach_axis) if pen >= 0 else 0.0
    noise = rng.normal(0.0, sigma, size=6) if (rng is not None and sigma > 0) else np.zeros(6)
    return ForceReading(fx + noise[0], *noise[1:])


def advance_until_contact(gripper: GripperState, truth: GroundTruth,
                          threshold: float = DEFAULT_THRESHOLD, step: float = DEFAULT_STEP,
                          max_travel: float = DEFAULT_MAX_TRAVEL, *,
                          rng: np.random.Generator | None = None,
                          sigma: float = FORCE_SIGMA) -> ContactResult:
    """Step along the approach axis until |fx| reaches ``threshold``.

    After the first coarse trigger the hand backs up one step and repeats the
    last stretch in ``step / FINE_STEPS`` increments, which bounds the
    penetration at the stop.  Noise is drawn from ``rng``; without one the
    sensor is noiseless and ``sigma`` is ignored.
    """
    noisy = rng is not None and sigma > 0
    floor = 3 * sigma if noisy else 0.0
    if not threshold > floor:
        raise ValueError(f"threshold {threshold} N must exceed the noise floor {floor} N")
    if not step > 0:
        raise ValueError("step must be > 0")
    if max_travel < 0:
        raise ValueError("max_travel must be >= 0")
    start, axis = gripper.position, gripper.approach_axis

    def read(travel):
        pos = start + travel * axis
        g = GripperState(pos, axis, gripper.aperture, gripper.closed)
        return pos, simulate_force(g, truth, rng, sigma)

    def scan(t0, inc, t_end):
        k = 0
        while True:
            t = min(t0 + k * inc, t_end)
            pos, f = read(t)
            if abs(f.fx) >= threshold:
                return True, t, pos, f
            if t >= t_end:
                return False, t, pos, f
            k += 1

    coarse = scan(0.0, step, max_travel)
    hit, t, pos, f = coarse
    if hit and t > 0:
        fine = scan(max(t - step, 0.0), step / FINE_STEPS, t)
        # noise can hide the trigger on the fine pass; keep the coarse stop then
        hit, t, pos, f = fine if fine[0] else coarse
    return ContactResult(hit, pos, float(t), f)
