"""Export the Bloch-sphere cones swept by each phase channel of a CNOT and a T plan.

Writes one CSV per channel with columns t, r1..r3 (state) and w1..w3
(Rabi vector), ready for any plotting tool. The state circles a cone of
fixed height theta/pi - 1 while the Rabi vector stays perpendicular to it.
"""

import sys
from pathlib import Path

import numpy as np

from isoholonomic import bloch_trajectory, gate_library, plan_gate
from isoholonomic.files import atomic_write, bloch_csv

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("bloch_out")
out.mkdir(exist_ok=True)

for name in ("t_gate", "cnot"):
    for k, channel in enumerate(plan_gate(gate_library(name)).channels):
        t, r, omega = bloch_trajectory(channel, 400)
        path = out / f"{name}_channel{k}.csv"
        atomic_write(path, bloch_csv(t, r, omega))
        height = r[:, 2].mean()
        perp = np.max(np.abs(np.einsum("tk,tk->t", r, omega)))
        print(f"{path}: theta {channel.theta / np.pi:.3g}pi, cone height {height:+.4f}, max |r.w| {perp:.1e}")
