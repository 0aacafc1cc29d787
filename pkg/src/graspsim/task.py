"""Door-opening trials under the four feedback strategies."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .contact import (DEFAULT_MAX_TRAVEL, DEFAULT_STEP, DEFAULT_THRESHOLD, FORCE_SIGMA,
                      GripperState, advance_until_contact)
from .geometry import camera_to_robot
from .perception import (DEFAULT_PROTRUSION_MIN, DEFAULT_TARGET_STANDOFF, EdgeEstimate,
                         EmptyCloudError, LowMarginError, RoiLimits, crop_roi, detect_handle,
                         estimate_edge, pose_correction)
from .ransac import InsufficientPointsError, NoConsensusError, RansacParams
from .scene import (DriftSample, GripperOcclusionSpec, PoseMode, RobotPose, SceneConfig, _rng,
                    ground_truth, handle_world, render_cloud, sample_drift)

__all__ = ["FeedbackMethod", "PoseMode", "FailureCause", "Tolerances", "TaskSettings",
           "TrialOutcome", "run_trial", "verify_door_open"]

PERCEPTION_ERRORS = (InsufficientPointsError, NoConsensusError, EmptyCloudError, LowMarginError)
_FORCE = 3
X_AXIS = np.array([1.0, 0.0, 0.0])


class FeedbackMethod(enum.Enum):
    NO_FEEDBACK = "NoFeedback"
    TACTILE_ONLY = "TactileOnly"
    VISUAL_ONLY = "VisualOnly"
    TACTILE_VISUAL = "TactileVisual"

    @property
    def visual(self) -> bool:
        return self in (FeedbackMethod.VISUAL_ONLY, FeedbackMethod.TACTILE_VISUAL)

    @property
    def tactile(self) -> bool:
        return self in (FeedbackMethod.TACTILE_ONLY, FeedbackMethod.TACTILE_VISUAL)


class FailureCause(enum.Enum):
    MISSED_HANDLE = "MissedHandle"
    COLLISION = "Collision"
    NO_CONSENSUS = "NoConsensus"
    OUT_OF_REACH = "OutOfReach"
    NONE = "None"


@dataclass(frozen=True)
class Tolerances:
    grasp_capture_radius: float = 0.03
    collision_penetration_max: float = 0.02
    align_tolerance: float = np.radians(2.0)

    def __post_init__(self):
        for name in ("grasp_capture_radius", "collision_penetration_max", "align_tolerance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class TaskSettings:
    """Knobs of the state machines that are not scoring tolerances."""

    target_standoff: float = DEFAULT_TARGET_STANDOFF
    standoff_tolerance: float = 0.01
    max_correction_rounds: int = 3
    approach_offset: float = 0.10  # pre-grasp distance in front of the handle
    finger_depth: float = 0.04  # fingertip ahead of the grasp centre
    door_swing_depth: float = 0.35
    contact_threshold: float = DEFAULT_THRESHOLD
    contact_step: float = DEFAULT_STEP
    contact_max_travel: float = DEFAULT_MAX_TRAVEL
    force_sigma: float = FORCE_SIGMA
    handle_protrusion_min: float = DEFAULT_PROTRUSION_MIN
    occlusion_radius: float = 0.06
    roi: RoiLimits = field(default_factory=RoiLimits)
    ransac: RansacParams = field(default_factory=RansacParams)


@dataclass
class TrialOutcome:
    success: bool
    failure_cause: FailureCause
    grasp_error: float
    steps_log: list = field(default_factory=list)

    def __post_init__(self):
        if self.success and self.failure_cause is not FailureCause.NONE:
            raise ValueError("a successful trial has no failure cause")


def verify_door_open(post_cloud, pre_edge: EdgeEstimate, swing_depth: float,
                     params: RansacParams = RansacParams()) -> bool:
    """True when the obstacle front has receded by at least 90% of the swing depth."""
    post_cloud = np.asarray(post_cloud, dtype=float).reshape(-1, 3)
    if len(post_cloud) == 0:
        return False
    try:
        post = estimate_edge(post_cloud, params)
    except PERCEPTION_ERRORS:
        return False
    return post.standoff_distance > pre_edge.standoff_distance + 0.9 * swing_depth


class _Trial:
    """Mutable bookkeeping for one sequential trial."""

    def __init__(self, method, mode, scene, tol, settings, trial_index, cloud_sink, drift=None):
        self.method, self.scene, self.tol, self.s = method, scene, tol, settings
        self.trial_index = trial_index
        self.drift = sample_drift(scene, trial_index, mode) if drift is None else drift
        self.pose = RobotPose.from_drift(self.drift)
        self.force_rng = _rng(scene.seed, trial_index, _FORCE)
        self.shot = 0
        self.log = []
        self.max_penetration = -np.inf
        self.sink = cloud_sink

    @property
    def truth(self):
        return ground_truth(self.scene, self.drift, self.pose)

    def look(self, occ=None, **kw):
        cam, _ = render_cloud(self.scene, self.drift, occ=occ, trial_index=self.trial_index,
                              pose=self.pose, shot=self.shot, **kw)
        if self.sink is not None:
            self.sink(f"shot{self.shot}", cam)
        params = replace(self.s.ransac, seed=int(np.random.SeedSequence(
            [self.scene.seed, self.trial_index, self.shot]).generate_state(2, np.uint64)[0]))
        self.shot += 1
        return crop_roi(camera_to_robot(cam, self.scene.camera), self.s.roi), params

    def tip(self, centre):
        return centre + self.s.finger_depth * X_AXIS

    def touch(self, centre):
        self.max_penetration = max(self.max_penetration, float(self.truth.penetration(self.tip(centre))))

    def guarded_approach(self, start_centre):
        self.touch(start_centre)
        self.log.append("advance_until_contact")
        res = advance_until_contact(GripperState(self.tip(start_centre), X_AXIS), self.truth,
                                    self.s.contact_threshold, self.s.contact_step,
                                    self.s.contact_max_travel, rng=self.force_rng,
                                    sigma=self.s.force_sigma)
        centre = res.contact_position - self.s.finger_depth * X_AXIS
        self.touch(centre)
        return res.contacted, centre

    def close(self, centre) -> TrialOutcome:
        self.log.append("close")
        err = self.truth.handle_distance(centre)
        if self.max_penetration > self.tol.collision_penetration_max:
            return self.fail(FailureCause.COLLISION, err)
        if err > self.tol.grasp_capture_radius:
            return self.fail(FailureCause.MISSED_HANDLE, err)
        return TrialOutcome(True, FailureCause.NONE, err, self.log)

    def fail(self, cause, err=np.nan) -> TrialOutcome:
        self.log.append(f"fail:{cause.value}")
        return TrialOutcome(False, cause, float(err), self.log)


def _align(t: _Trial):
    """Perceive the edge and correct the base until aligned; returns (edge, cloud)."""
    s = t.s
    for round_ in range(s.max_correction_rounds + 1):
        cloud, params = t.look()
        t.log.append("estimate_edge")
        edge = estimate_edge(cloud, params)
        aligned = (abs(edge.angle) <= t.tol.align_tolerance
                   and abs(edge.standoff_distance - s.target_standoff) <= s.standoff_tolerance)
        if aligned or round_ == s.max_correction_rounds:
            return edge, cloud
        delta = pose_correction(edge, s.target_standoff)
        t.pose = t.pose.moved(delta.rotate_by, delta.advance_by)
        t.log.append("correct_pose")


def run_trial(method: FeedbackMethod, mode: PoseMode, scene: SceneConfig,
              tol: Tolerances = Tolerances(), trial_index: int = 0,
              settings: TaskSettings = TaskSettings(),
              cloud_sink: Callable[[str, np.ndarray], None] | None = None,
              drift: DriftSample | None = None) -> TrialOutcome:
    """Run one door-opening attempt and score it against the scene's ground truth.

    The gripper is tracked by its grasp centre (between the fingers); the
    fingertips, which carry the contact, sit ``finger_depth`` ahead along the
    approach axis.  A grasp counts when the centre ends within the capture
    radius of the handle bar and no fingertip went deeper than the collision
    limit into the door plane.  Passing ``drift`` replays that perturbation
    instead of sampling one for ``mode``.
    """
    t = _Trial(method, mode, scene, tol, settings, trial_index, cloud_sink, drift)
    s = settings
    nominal_handle = handle_world(scene, replace(t.drift, handle_dx=0.0, handle_dy=0.0))
    # the robot believes it stands at the nominal pose, so world == robot frame for it

    if method is FeedbackMethod.NO_FEEDBACK:
        t.log.append("dead_reckon_to_nominal_handle")
        t.touch(nominal_handle)
        return t.close(nominal_handle)

    if method is FeedbackMethod.TACTILE_ONLY:
        t.log.append("dead_reckon_to_nominal_bearing")
        contacted, centre = t.guarded_approach(nominal_handle - s.approach_offset * X_AXIS)
        if not contacted:
            return t.fail(FailureCause.OUT_OF_REACH)
        return t.close(centre)

    try:
        pre_edge, cloud = _align(t)
        t.log.append("detect_handle")
        handle = detect_handle(cloud, min_margin=s.handle_protrusion_min)
    except PERCEPTION_ERRORS:
        return t.fail(FailureCause.NO_CONSENSUS)

    pregrasp = handle.position - s.approach_offset * X_AXIS
    t.log.append("move_to_pregrasp")
    t.touch(pregrasp)
    if method is FeedbackMethod.VISUAL_ONLY:
        t.log.append("advance_open_loop")
        centre = handle.position
        t.touch(centre)
    else:
        # the hand now hides the handle from the head camera
        occ = GripperOcclusionSpec(pregrasp, s.occlusion_radius)
        occluded, _ = t.look(occ=occ)
        try:
            seen = detect_handle(occluded, min_margin=s.handle_protrusion_min)
            hidden = t.truth.handle_distance(seen.position) > t.tol.grasp_capture_radius
        except PERCEPTION_ERRORS:
            hidden = True
        t.log.append("handle_occluded" if hidden else "handle_visible")
        contacted, centre = t.guarded_approach(pregrasp)
        if not contacted:
            return t.fail(FailureCause.OUT_OF_REACH)

    outcome = t.close(centre)
    if not outcome.success:
        return outcome
    t.log.append("verify_door_open")
    post, params = t.look(door_open=True, plane_shift=s.door_swing_depth)
    if not verify_door_open(post, pre_edge, s.door_swing_depth, params):
        return t.fail(FailureCause.NO_CONSENSUS, outcome.grasp_error)
    return outcome
