"""Finding the dishwasher edge in a noisy depth cloud and correcting the base.

Run: python demos/02_edge_fitting.py
"""
# %%
import numpy as np

from graspsim import (DriftSample, RansacParams, RobotPose, SceneConfig, camera_to_robot,
                      crop_roi, estimate_edge, pose_correction, render_cloud)

scene = SceneConfig(seed=11)
# The robot arrived 12 deg rotated, 6 cm to the left and 15 cm further back than planned.
drift = DriftSample(lateral=0.06, frontal=-0.15, yaw=np.radians(12.0))

cam_cloud, truth = render_cloud(scene, drift)
cloud = crop_roi(camera_to_robot(cam_cloud, scene.camera))
print(f"{len(cam_cloud)} points rendered, {len(cloud)} left after the region-of-interest crop")

# %% Fit the edge.
edge = estimate_edge(cloud, RansacParams(seed=0))
print(f"edge angle    {np.degrees(edge.angle):7.2f} deg   (true {np.degrees(truth.true_plane_yaw):.2f})")
print(f"standoff      {edge.standoff_distance:7.3f} m     (true {truth.true_plane_distance:.3f})")
print(f"inliers       {edge.inlier_count}")

# %% Apply the correction and look again.
delta = pose_correction(edge, target_standoff=0.60)
pose = RobotPose.from_drift(drift).moved(delta.rotate_by, delta.advance_by)
after, truth2 = render_cloud(scene, drift, pose=pose, shot=1)
edge2 = estimate_edge(crop_roi(camera_to_robot(after, scene.camera)), RansacParams(seed=1))
print(f"after rotating {np.degrees(delta.rotate_by):.2f} deg and advancing {delta.advance_by:.3f} m:")
print(f"  angle {np.degrees(edge2.angle):.2f} deg, standoff {edge2.standoff_distance:.3f} m")
