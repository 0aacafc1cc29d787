"""Simulated visual + tactile feedback for a robot opening a dishwasher door."""

from .geometry import (CameraExtrinsics, LineModel, RigidTransform, angle_to_frontal_normal,
                       camera_to_robot, point_line_distance, robot_to_camera, rot_y, rot_z,
                       rotate_line_z)
from .ransac import FitResult, RansacParams, fit_line, required_iterations
from .perception import (EdgeEstimate, EmptyCloudError, HandleEstimate, LowMarginError, PoseDelta,
                         RoiLimits, crop_roi, detect_handle, estimate_edge, pose_correction)
from .scene import (DriftSample, GripperOcclusionSpec, GroundTruth, PoseMode, RobotPose,
                    SceneConfig, load_cloud, render_cloud, sample_drift, save_cloud)
from .contact import (ContactResult, ForceReading, GripperState, advance_until_contact,
                      simulate_force)
from .task import (FailureCause, FeedbackMethod, TaskSettings, Tolerances, TrialOutcome,
                   run_trial, verify_door_open)
from .harness import ExperimentConfig, ResultsTable, emit_results, load_config, run_experiment

__version__ = "0.1.0"
