"""Camera to robot frame: where does a pixel's 3D point land on the robot?

Run: python demos/01_transforms.py
"""
# %%
import numpy as np

from graspsim import CameraExtrinsics, camera_to_robot, robot_to_camera

# The head camera sits 1.1 m up and is tilted down by 31.5 degrees.
head = CameraExtrinsics(tilt=np.radians(31.5), pan=0.0, translation=(0.0, 0.0, 1.1))
print("camera -> robot rotation:\n", np.round(head.rotation, 3))

# %% A point one metre straight down the optical axis.
p = camera_to_robot([[1.0, 0.0, 0.0]], head)[0]
print("1 m along the optical axis is at", np.round(p, 3), "in the robot frame")

# %% Panning first, then tilting: the order matters.
panned = CameraExtrinsics(tilt=np.radians(31.5), pan=np.radians(20), translation=(0, 0, 1.1))
q = camera_to_robot([[1.0, 0.0, 0.0]], panned)[0]
print("with 20 deg pan the same ray hits", np.round(q, 3))

# %% Round trip: the inverse transform brings the points back.
cloud = np.random.default_rng(0).uniform(-1, 1, (1000, 3))
back = robot_to_camera(camera_to_robot(cloud, panned), panned)
print("worst round-trip error: %.2e m" % np.abs(back - cloud).max())
