"""Creeping forward until the wrist force sensor feels the door.

Run: python demos/04_contact_approach.py
"""
# %%
import numpy as np

from graspsim import GripperState, GroundTruth, advance_until_contact, simulate_force

door = GroundTruth(true_plane_distance=0.60, true_plane_yaw=0.0,
                   true_handle_position=np.array([0.56, 0.0, 0.75]), handle_half_width=0.15)
rng = np.random.default_rng(1)

for x in (0.55, 0.60, 0.61, 0.62):
    f = simulate_force(GripperState(np.array([x, 0.0, 0.75])), door, rng)
    print(f"fingertip at x={x:.2f} m -> fx = {f.fx:5.2f} N")

# %% A guarded move from 12 cm out.
start = GripperState(np.array([0.48, 0.0, 0.75]))
res = advance_until_contact(start, door, threshold=2.0, step=0.005, rng=rng)
print(f"contact: {res.contacted}, travelled {res.travel * 100:.1f} cm,"
      f" {(res.travel - 0.12) * 1000:.1f} mm past the surface, fx {res.final_reading.fx:.2f} N")

# %% Out of reach.
far = advance_until_contact(GripperState(np.array([0.30, 0.0, 0.75])), door, max_travel=0.20, rng=rng)
print(f"plane 30 cm away with 20 cm of travel: contact={far.contacted}, travel={far.travel:.2f} m")
