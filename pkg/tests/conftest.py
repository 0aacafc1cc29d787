import numpy as np
import pytest

ACCEPTANCE = pytest.StashKey[list]()

from graspsim.geometry import camera_to_robot
from graspsim.perception import crop_roi
from graspsim.scene import DriftSample, GripperOcclusionSpec, SceneConfig, render_cloud


def robot_cloud(scene, drift, crop=True, **kw):
    cam, truth = render_cloud(scene, drift, **kw)
    cloud = camera_to_robot(cam, kw.get("ext") or scene.camera)
    return (crop_roi(cloud) if crop else cloud), truth


@pytest.fixture
def quiet_scene():
    return SceneConfig(noise_sigma=0.0, seed=3)


@pytest.fixture
def no_drift():
    return DriftSample()


def yawed(deg, lateral=0.0, frontal=0.0):
    return DriftSample(lateral, frontal, float(np.radians(deg)))


def handle_ray_occluder(cfg, drift, back=0.12, radius=0.05, pose=None):
    """Gripper-sized sphere on the camera-to-handle ray, ``back`` metres in front of the handle."""
    _, truth = render_cloud(cfg, drift, pose=pose)
    cam = np.array(cfg.camera.translation)
    h = truth.true_handle_position
    ray = (h - cam) / np.linalg.norm(h - cam)
    return GripperOcclusionSpec(h - back * ray, radius), truth


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for the acceptance summary, then assert."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def report(number, title, ok, detail=""):
        lines.append(f"criterion {number} {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip())
        assert ok, f"criterion {number} failed: {detail}"
    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
