"""
Noise channels
==============

Gate errors are modelled as depolarizing channels calibrated to an average
gate fidelity. Idle qubits relax toward |0> with the metastable lifetime, and
slow laser phase noise acts on all ions at once.
"""

import math

import numpy as np

from ghzsim.ghz import ideal_ghz_state
from ghzsim.noise import (
    ConfusionMatrix,
    amplitude_damping,
    apply_spam,
    average_gate_fidelity,
    calibrate_depolarizing,
    collective_dephasing,
    depolarizing,
    invert_spam,
)
from ghzsim.qstate import DensityMatrix

# Depolarizing strength from a benchmarked fidelity, and back again.
for f, d in ((0.99946, 1), (0.963, 2)):
    p = calibrate_depolarizing(f, d)
    print(f"F = {f} on {d} qubit(s) -> p = {p:.6f} -> F = {average_gate_fidelity(depolarizing(p, d)):.6f}")

# Relaxation during a 10 us pulse and during a 1 ms wait.
excited = np.diag([0.0, 1.0]).astype(complex)
for t in (10e-6, 1e-3):
    rho = amplitude_damping(t, 0.053)(excited)
    print(f"after {t * 1e6:7.1f} us: P(1) = {rho[1, 1].real:.6f}")

# Common-mode dephasing hits the GHZ coherence N^2 times harder.
sigma = 0.05
print("\nGHZ coherence under collective dephasing, sigma =", sigma)
for n in (2, 4, 8):
    rho = collective_dephasing(sigma, n)(DensityMatrix.from_state(ideal_ghz_state(n)))
    print(f"  N = {n}: 2|rho_0,1| = {2 * abs(rho.elements[0, -1]):.4f}"
          f"  (exp(-sigma^2 N^2 / 2) = {math.exp(-sigma**2 * n**2 / 2):.4f})")

# Readout errors and their inversion.
cm = ConfusionMatrix(eps_bright=0.01, eps_dark=0.02)
true = np.array([0.5, 0.0, 0.0, 0.5])
seen = apply_spam(true, cm)
print("\nobserved two-qubit distribution:", np.round(seen, 4))
print("after correction:               ", np.round(invert_spam(seen, cm), 4))
