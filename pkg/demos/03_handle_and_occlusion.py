"""Spotting the handle, and what happens once the gripper blocks the view.

Run: python demos/03_handle_and_occlusion.py
"""
# %%
import numpy as np

from graspsim import (DriftSample, GripperOcclusionSpec, LowMarginError, SceneConfig,
                      camera_to_robot, crop_roi, detect_handle, render_cloud)

scene = SceneConfig(seed=5)
drift = DriftSample(handle_dx=0.03, handle_dy=-0.02)


def look(occ=None):
    cam, truth = render_cloud(scene, drift, occ=occ)
    return crop_roi(camera_to_robot(cam, scene.camera)), truth


cloud, truth = look()
h = detect_handle(cloud)
print("closest point", np.round(h.position, 3), "stands", f"{h.margin * 100:.1f} cm proud of the door")
print(f"distance to the true handle bar: {truth.handle_distance(h.position) * 100:.1f} cm")

# %% Put the hand between the camera and the handle.
cam_pos = np.array(scene.camera.translation)
ray = truth.true_handle_position - cam_pos
ray /= np.linalg.norm(ray)
hand = GripperOcclusionSpec(truth.true_handle_position - 0.12 * ray, occlusion_radius=0.05)
hidden, _ = look(hand)
try:
    h2 = detect_handle(hidden)
    print("with the hand in view the closest point is", np.round(h2.position, 3),
          f"which is {truth.handle_distance(h2.position) * 100:.1f} cm from the handle")
    print("vision alone would now steer toward its own gripper; touch has to finish the job")
except LowMarginError as exc:
    print("no handle candidate:", exc)
