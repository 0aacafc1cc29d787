import numpy as np
import pytest

from graspsim.scene import (DriftSample, PoseMode, RobotPose, SceneConfig,
                            load_cloud, render_cloud, sample_drift, save_cloud)

from conftest import handle_ray_occluder, robot_cloud


def test_constant_mode_has_no_drift():
    assert sample_drift(SceneConfig(seed=9), 4, PoseMode.CONSTANT).as_tuple() == (0, 0, 0, 0, 0)


def test_constant_residual_is_small_and_leaves_handle():
    cfg = SceneConfig(seed=9, constant_residual=True)
    samples = [sample_drift(cfg, i, PoseMode.CONSTANT) for i in range(500)]
    lat = np.array([s.lateral for s in samples])
    yaw = np.degrees([s.yaw for s in samples])
    assert 0.015 < lat.std() < 0.025
    assert 2.5 < yaw.std() < 3.5
    assert all(s.handle_dx == s.handle_dy == 0 for s in samples)


def test_random_drift_ranges_and_means():
    cfg = SceneConfig(seed=1234)
    s = np.array([sample_drift(cfg, i).as_tuple() for i in range(10_000)])
    s[:, 2] = np.degrees(s[:, 2])
    bounds = [(-0.1, 0.1), (-0.2, 0.0), (-15.0, 15.0), (-0.05, 0.05), (-0.05, 0.05)]
    for col, (lo, hi) in enumerate(bounds):
        assert s[:, col].min() >= lo and s[:, col].max() <= hi
        # standard error of a uniform mean
        se = (hi - lo) / np.sqrt(12) / np.sqrt(len(s))
        assert abs(s[:, col].mean() - (lo + hi) / 2) < 3 * se


def test_drift_deterministic():
    cfg = SceneConfig(seed=77)
    assert sample_drift(cfg, 5) == sample_drift(cfg, 5)
    assert sample_drift(cfg, 5) != sample_drift(cfg, 6)


def test_config_validation():
    with pytest.raises(ValueError):
        SceneConfig(lateral_drift_range=(0.1, -0.1))
    with pytest.raises(ValueError):
        SceneConfig(noise_sigma=-1.0)
    with pytest.raises(ValueError):
        SceneConfig(handle_center=(0.5, 0.75))  # bar would hang off the plane


def test_noiseless_geometry(quiet_scene, no_drift):
    cloud, truth = robot_cloud(quiet_scene, no_drift, crop=False)
    D = quiet_scene.nominal_plane_distance
    on_floor = np.abs(cloud[:, 2]) < 1e-9
    u, v = quiet_scene.handle_center
    on_handle = ((cloud[:, 0] >= D - quiet_scene.handle_protrusion - 1e-9) & (cloud[:, 0] < D - 1e-9)
                 & (np.abs(cloud[:, 1] - u) <= quiet_scene.handle_width / 2 + 1e-9)
                 & (np.abs(cloud[:, 2] - v) <= quiet_scene.handle_height / 2 + 1e-9))
    plane = cloud[~on_floor & ~on_handle]
    assert len(plane) > 0.5 * len(cloud)
    assert np.all(np.abs(plane[:, 0] - D) < 1e-9)
    assert truth.true_plane_distance == D


def test_handle_points_at_protrusion():
    cfg = SceneConfig(seed=4)
    drift = DriftSample(0.05, -0.1, 0.0, 0.02, -0.01)
    cloud, truth = robot_cloud(cfg, drift)
    expected = truth.true_plane_distance - cfg.handle_protrusion
    assert truth.true_handle_position[0] == pytest.approx(expected, abs=1e-12)
    assert abs(cloud[:, 0].min() - expected) < 4 * cfg.noise_sigma
    quiet, truth0 = robot_cloud(SceneConfig(seed=4, noise_sigma=0.0), drift)
    assert quiet[:, 0].min() == pytest.approx(expected, abs=1e-9)


def test_occlusion_hides_handle():
    cfg = SceneConfig(seed=5)
    drift = sample_drift(cfg, 2)
    occ, truth = handle_ray_occluder(cfg, drift)
    cloud, _ = robot_cloud(cfg, drift, crop=False, occ=occ, trial_index=2)
    d = np.linalg.norm(cloud - truth.true_handle_position, axis=1)
    assert d.min() > 0.02


def test_occlusion_never_adds_points_behind_plane():
    for k in range(5):
        cfg = SceneConfig(seed=k)
        drift = sample_drift(cfg, k)
        occ, truth = handle_ray_occluder(cfg, drift)
        plain, _ = robot_cloud(cfg, drift, crop=False, trial_index=k)
        hidden, _ = robot_cloud(cfg, drift, crop=False, occ=occ, trial_index=k)
        moved = np.any(plain != hidden, axis=1)
        assert moved.any()
        assert np.all(truth.penetration(hidden[moved]) <= 3 * cfg.noise_sigma)
        quiet = SceneConfig(seed=k, noise_sigma=0.0)
        q, _ = robot_cloud(quiet, drift, crop=False, occ=occ, trial_index=k)
        assert np.all(truth.penetration(q) <= 1e-9)


def test_ground_truth_consistent_with_drift():
    cfg = SceneConfig(seed=8)
    for i in range(20):
        drift = sample_drift(cfg, i)
        _, truth = render_cloud(cfg, drift, trial_index=i)
        assert truth.true_plane_yaw == drift.yaw
        # frontal drift is forward motion of the robot
        assert truth.true_plane_distance == cfg.nominal_plane_distance - drift.frontal


def test_render_deterministic():
    cfg = SceneConfig(seed=21)
    drift = sample_drift(cfg, 3)
    a, _ = render_cloud(cfg, drift, trial_index=3)
    b, _ = render_cloud(cfg, drift, trial_index=3)
    c, _ = render_cloud(cfg, drift, trial_index=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_robot_pose_motion():
    pose = RobotPose(0.1, -0.2, 0.3)
    p = np.array([[0.5, 0.1, 0.7]])
    assert np.allclose(pose.to_world(pose.to_robot(p)), p)
    moved = pose.moved(-0.3, 0.2)
    assert moved.yaw == pytest.approx(0.0)
    assert moved.x == pytest.approx(0.3)


def test_cloud_file_round_trip(tmp_path):
    cloud = np.array([[0.1234567, -2.0, 3.5], [1e-7, 0.0, -0.25]])
    path = tmp_path / "c.xyz"
    save_cloud(path, cloud, "robot")
    lines = path.read_text().splitlines()
    assert lines[0] == "# frame=robot n=2"
    assert lines[1] == "0.123457 -2.000000 3.500000"
    back, frame = load_cloud(path)
    assert frame == "robot"
    assert np.allclose(back, cloud, atol=5e-7)


def test_cloud_file_errors(tmp_path):
    bad = tmp_path / "bad.xyz"
    bad.write_text("# frame=robot n=3\n0 0 0\n")
    with pytest.raises(ValueError):
        load_cloud(bad)
    with pytest.raises(ValueError):
        save_cloud(tmp_path / "x.xyz", np.zeros((1, 3)), "world")
