"""Isoholonomic bounds of a universal gate set, plain and projective.

Prints each gate's eigenphases, the length any holonomic implementation
must cover, and the bound after the global phase is optimised away. T and
T' describe the same projective gate, so their projective bounds agree.
"""

import numpy as np

from isoholonomic import gate_library, isoholonomic_bound, phases_of_gate, projective_isoholonomic_bound, qsl_time

for name in ("t_gate", "t_prime", "hadamard", "cnot"):
    spectrum = phases_of_gate(gate_library(name))
    plain = isoholonomic_bound(spectrum)
    projective, shift = projective_isoholonomic_bound(spectrum)
    phases = ", ".join(f"{x / np.pi:.4g}pi" for x in spectrum.phases)
    print(f"{name:9s} phases [{phases}]")
    print(f"          bound {plain:.10f}   projective {projective:.10f} (shift index {shift})")

# shortest time to realise T when the subspace moves at mean speed 2
print(f"\nminimum time for T at mean speed 2: {qsl_time(gate_library('t_gate'), 2.0):.10f}")
