"""
Calibrating the noise model
===========================

With the single-qubit error and T1 held at their benchmarked values, the
two-qubit error p2 and the collective phase noise sigma are fitted so that
the simulated fidelities track the measured GHZ fidelities for N = 2..8.
This takes about half a minute.
"""

from ghzsim.experiments import MEASURED_GHZ_FIDELITIES, calibrate_noise_to_table1, fidelity_and_witness

result = calibrate_noise_to_table1()
print(f"p2 = {result.noise.p2:.5f}, sigma_collective = {result.noise.sigma_collective:.5f}")
print(f"RMS deviation = {result.rms:.4f} after {result.evaluations} evaluations")
print("\n N   measured   simulated   <W>")
for n, target in MEASURED_GHZ_FIDELITIES.items():
    f = result.fidelities[n]
    w = fidelity_and_witness(f, f).witness
    print(f"{n:2d}   {target:8.3f}   {f:9.3f}   {w:+.3f}")
