import numpy as np
import pytest

from graspsim.contact import (FORCE_SIGMA, STIFFNESS, ForceReading, GripperState,
                              advance_until_contact, simulate_force)
from graspsim.scene import GroundTruth

SIGMA = FORCE_SIGMA


def wall(distance):
    """Frontal plane at x = distance, handle irrelevant here."""
    return GroundTruth(distance, 0.0, np.array([distance, 0.0, 0.75]))


def at(x):
    return GripperState(np.array([x, 0.0, 0.75]))


def test_free_space_reads_only_noise():
    rng = np.random.default_rng(0)
    fx = [simulate_force(at(0.55), wall(0.60), rng).fx for _ in range(2000)]
    assert max(abs(f) for f in fx) <= 4 * SIGMA
    assert np.mean(np.abs(fx) <= 3 * SIGMA) > 0.99
    assert simulate_force(at(0.55), wall(0.60)).fx == 0.0


def test_penetration_gives_spring_force():
    rng = np.random.default_rng(1)
    f = simulate_force(at(0.61), wall(0.60), rng)
    assert f.fx == pytest.approx(STIFFNESS * 0.01, abs=3 * SIGMA)
    assert simulate_force(at(0.61), wall(0.60)).fx == pytest.approx(5.0, abs=1e-9)


def test_yawed_plane_force_is_projected():
    truth = GroundTruth(0.60, np.radians(20.0), np.zeros(3))
    g = GripperState(0.62 * truth.plane_normal)
    # tip is 2 cm deep along the normal; approach axis is x, so fx = k d cos(yaw)
    assert simulate_force(g, truth).fx == pytest.approx(STIFFNESS * 0.02 * np.cos(np.radians(20)))


def test_force_reading_must_be_finite():
    with pytest.raises(ValueError):
        ForceReading(fx=np.nan)


def test_gripper_axis_must_be_unit():
    with pytest.raises(ValueError):
        GripperState(np.zeros(3), approach_axis=(2.0, 0.0, 0.0))


def test_same_rng_seed_same_readings():
    a = simulate_force(at(0.605), wall(0.60), np.random.default_rng(7))
    b = simulate_force(at(0.605), wall(0.60), np.random.default_rng(7))
    assert a == b


def test_contact_within_one_step_beyond_plane():
    res = advance_until_contact(at(0.50), wall(0.60), rng=np.random.default_rng(2))
    assert res.contacted
    assert 0.10 <= res.travel <= 0.11


def test_no_contact_when_plane_out_of_reach():
    res = advance_until_contact(at(0.30), wall(0.60), max_travel=0.20,
                                rng=np.random.default_rng(3))
    assert not res.contacted
    assert res.travel == pytest.approx(0.20)


def test_threshold_below_noise_floor_rejected():
    with pytest.raises(ValueError):
        advance_until_contact(at(0.5), wall(0.6), threshold=0.2, rng=np.random.default_rng(0))
    with pytest.raises(ValueError):
        advance_until_contact(at(0.5), wall(0.6), threshold=0.0)


def test_contact_position_on_approach_ray():
    g = GripperState(np.array([0.45, 0.1, 0.7]))
    res = advance_until_contact(g, wall(0.60), rng=np.random.default_rng(4))
    assert np.allclose(res.contact_position, g.position + res.travel * g.approach_axis, atol=1e-12)


@pytest.mark.parametrize("gap", np.linspace(0.05, 0.20, 16))
def test_noiseless_overshoot_bounded_by_step(gap):
    res = advance_until_contact(at(0.60 - gap), wall(0.60), step=0.005)
    assert res.contacted
    assert 0.0 <= res.travel - gap <= 0.005


def test_higher_threshold_never_stops_earlier():
    travel = [advance_until_contact(at(0.47), wall(0.60), threshold=th).travel
              for th in (0.5, 1.0, 2.0, 4.0, 8.0)]
    assert all(a <= b + 1e-12 for a, b in zip(travel, travel[1:]))
