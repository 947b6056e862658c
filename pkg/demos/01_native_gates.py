"""
Native gates and the transpiler
===============================

The trapped-ion register drives single-qubit rotations R_phi(theta) and a
two-qubit XX(chi) interaction. Z rotations cost nothing: they are absorbed
into the phase of later pulses.
"""

import math

import numpy as np

from ghzsim import gates
from ghzsim.circuit import Circuit, cx, h, phase_insensitive_distance, transpile, unitary_of_circuit

np.set_printoptions(precision=3, suppress=True)

# A single XX(pi/4) pulse already entangles |00> into a Bell state.
bell = gates.ms_xx(math.pi / 4) @ np.array([1, 0, 0, 0])
print("XX(pi/4)|00> =", bell)
print("populations  =", np.abs(bell) ** 2)

# A logical Bell circuit written with H and CX ...
logical = Circuit(2, [h(0), cx(0, 1)])
print("\nlogical circuit:")
print(logical.to_text())

# ... becomes pulses plus a trailing frame once transpiled.
native = transpile(logical)
print("native circuit:")
print(native.to_text())
print("gate counts:", dict(native.gate_counts()))
print(f"duration: {native.total_duration() * 1e6:.1f} us")

# The transpiled unitary agrees with the logical one up to a global phase.
dist = phase_insensitive_distance(unitary_of_circuit(native), unitary_of_circuit(logical))
print(f"distance to logical unitary: {dist:.2e}")
