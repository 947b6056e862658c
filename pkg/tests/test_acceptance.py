"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""
import contextlib
import io
import json
import math
import time

import numpy as np
import pytest

from ghzsim import gates
from ghzsim.circuit import (
    Circuit,
    cx,
    decompose_cx,
    decompose_h,
    h,
    phase_insensitive_distance,
    transpile,
    unitary_of_circuit,
)
from ghzsim.cli import main
from ghzsim.experiments import (
    CALIBRATED_NOISE,
    MEASURED_GHZ_FIDELITIES,
    calibrate_noise_to_table1,
    fidelity_and_witness,
    parity_scan,
    select_parity_frequency,
    simulated_fidelities,
)
from ghzsim.ghz import build_ghz_circuit, ideal_ghz_state
from ghzsim.noise import (
    ConfusionMatrix,
    amplitude_damping,
    apply_spam,
    calibrate_depolarizing,
    collective_dephasing,
    depolarizing,
    invert_spam,
)
from ghzsim.qstate import DensityMatrix
from ghzsim.simulator import simulate

from oracles import embed, expm_hermitian, ms_generator, random_density_matrix

NS = range(2, 9)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
HAD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def test_criterion_1_noiseless_cli(tmp_path, criterion):
    worst = 0.0
    start = time.perf_counter()
    for n in NS:
        out = tmp_path / f"n{n}"
        with contextlib.redirect_stdout(io.StringIO()):
            assert main(["ghz-run", "--n", str(n), "--exact", "--noise", "ideal", "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        worst = max(worst, abs(report["F"] - 1), abs(report["A"] - 1), abs(report["B"] - 1))
    elapsed = time.perf_counter() - start
    ok = criterion(1, worst < 1e-9 and elapsed < 1.0, f"max |F-1|,|A-1|,|B-1| = {worst:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_2_parity_frequency(criterion):
    start = time.perf_counter()
    chosen, worst_b = {}, 0.0
    for n in NS:
        scan = parity_scan(build_ghz_circuit(n), n)
        chosen[n] = select_parity_frequency(scan.phases, scan.parities, n + 2)
        worst_b = max(worst_b, abs(scan.fitted_b - 1))
    elapsed = time.perf_counter() - start
    exact = all(chosen[n] == n for n in NS)
    ok = criterion(2, exact and worst_b < 1e-9 and elapsed < 5.0, f"frequencies {chosen}, max |B-1| = {worst_b:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_3_ms_gate(criterion):
    expected = np.exp(-1j * math.pi / 4) * np.array([1, 0, 0, -1j]) / math.sqrt(2)
    got = gates.ms_xx(math.pi / 4)[:, 0]
    oracle = expm_hermitian(ms_generator(math.pi / 4))[:, 0]
    err = max(np.abs(got - expected).max(), np.abs(oracle - expected).max(), np.abs(got - oracle).max())
    assert criterion(3, err < 1e-12, f"max deviation {err:.2e}")


def test_criterion_4_transpiler(criterion):
    def native(insts, n):
        u = np.eye(2**n, dtype=complex)
        for i in insts:
            u = embed(i.matrix(), i.targets, n) @ u
        return u

    d_h = phase_insensitive_distance(native(decompose_h(0), 1), HAD)
    d_cx = max(phase_insensitive_distance(native(decompose_cx(c, 1 - c), 2), embed(CNOT, [c, 1 - c], 2)) for c in (0, 1))
    rng = np.random.default_rng(2718)
    worst = 0.0
    for _ in range(1000):
        ops, oracle = [], np.eye(4, dtype=complex)
        for _ in range(int(rng.integers(1, 9))):
            if rng.random() < 0.5:
                q = int(rng.integers(2))
                ops.append(h(q))
                oracle = embed(HAD, [q], 2) @ oracle
            else:
                c = int(rng.integers(2))
                ops.append(cx(c, 1 - c))
                oracle = embed(CNOT, [c, 1 - c], 2) @ oracle
        worst = max(worst, phase_insensitive_distance(unitary_of_circuit(transpile(Circuit(2, ops), check=False)), oracle))
    ok = d_h < 1e-10 and d_cx < 1e-10 and worst < 1e-8
    assert criterion(4, ok, f"H {d_h:.1e}, CX {d_cx:.1e}, random circuits {worst:.1e}")


@pytest.mark.slow
def test_criterion_5_table_calibration(criterion):
    start = time.perf_counter()
    result = calibrate_noise_to_table1()
    elapsed = time.perf_counter() - start
    assert result.noise.p1 == pytest.approx(calibrate_depolarizing(0.99946, 1))
    assert result.noise.t1_seconds == 0.053
    values = [result.fidelities[n] for n in NS]
    monotone = all(a > b for a, b in zip(values, values[1:]))
    ok = result.rms <= 0.03 and monotone and elapsed < 120
    detail = (
        f"p2 = {result.noise.p2:.5f}, sigma = {result.noise.sigma_collective:.5f}, "
        f"RMS = {result.rms:.4f}, monotone = {monotone}, {elapsed:.1f} s"
    )
    assert criterion(5, ok, detail)


def test_criterion_6_witness(criterion):
    sim = simulated_fidelities(CALIBRATED_NOISE)
    witnesses = {n: fidelity_and_witness(sim[n], sim[n]).witness for n in NS}
    from_table = all(fidelity_and_witness(f, f).entangled for f in MEASURED_GHZ_FIDELITIES.values())
    synthetic = fidelity_and_witness(0.45, 0.45)
    ok = all(w < 0 for w in witnesses.values()) and from_table and not synthetic.entangled
    worst = max(witnesses.values())
    assert criterion(6, ok, f"largest calibrated <W> = {worst:.3f}, F = 0.45 -> {synthetic.verdict}")


def test_criterion_7_channel_properties(criterion):
    rng = np.random.default_rng(7)
    completeness = 0.0
    for arity in (1, 2):
        for p in np.linspace(0, 1, 11):
            ops = depolarizing(p, arity).operators
            completeness = max(completeness, np.abs(sum(k.conj().T @ k for k in ops) - np.eye(2**arity)).max())
    for t in (0.0, 1e-5, 0.01, 1.0):
        ops = amplitude_damping(t, 0.053).operators
        completeness = max(completeness, np.abs(sum(k.conj().T @ k for k in ops) - np.eye(2)).max())

    composition = 0.0
    for t1, t2 in rng.uniform(0, 0.1, size=(50, 2)):
        rho = random_density_matrix(2, rng)
        lhs = amplitude_damping(t1, 0.053)(amplitude_damping(t2, 0.053)(rho))
        composition = max(composition, np.abs(lhs - amplitude_damping(t1 + t2, 0.053)(rho)).max())

    dephasing = 0.0
    for n in NS:
        for sigma in (0.01, 0.05, 0.2):
            out = collective_dephasing(sigma, n)(DensityMatrix.from_state(ideal_ghz_state(n))).elements
            dephasing = max(dephasing, abs(abs(out[0, -1]) - 0.5 * math.exp(-(sigma**2) * n**2 / 2)))

    spam = 0.0
    for n in (1, 3, 5):
        cms = [ConfusionMatrix(*rng.uniform(0, 0.3, 2)) for _ in range(n)]
        v = rng.dirichlet(np.ones(2**n))
        _, raw = invert_spam(apply_spam(v, cms), cms, return_raw=True)
        spam = max(spam, np.abs(raw - v).max())

    ok = completeness < 1e-9 and composition < 1e-10 and dephasing < 1e-9 and spam < 1e-10
    detail = f"completeness {completeness:.1e}, AD composition {composition:.1e}, dephasing {dephasing:.1e}, SPAM {spam:.1e}"
    assert criterion(7, ok, detail)


def test_criterion_8_shot_scaling(criterion):
    start = time.perf_counter()
    circuit = build_ghz_circuit(3)
    rho = simulate(circuit, CALIBRATED_NOISE)
    spread = {}
    for shots in (100, 1000, 10000):
        bs = [parity_scan(circuit, 3, CALIBRATED_NOISE, shots=shots, seed=s, rho=rho).fitted_b for s in range(100)]
        spread[shots] = float(np.std(bs, ddof=1))
    elapsed = time.perf_counter() - start
    ratios = [spread[100] / spread[1000], spread[1000] / spread[10000]]
    target = math.sqrt(10)
    ok = all(abs(r / target - 1) <= 0.2 for r in ratios) and elapsed < 60
    detail = f"std(B) {', '.join(f'{k}: {v:.4f}' for k, v in spread.items())}; ratios {ratios[0]:.2f}, {ratios[1]:.2f} vs {target:.2f}; {elapsed:.1f} s"
    assert criterion(8, ok, detail)


def test_criterion_9_determinism(tmp_path, criterion):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        with contextlib.redirect_stdout(io.StringIO()):
            assert main(["ghz-run", "--n", "4", "--shots", "500", "--seed", "2024", "--out", str(d)]) == 0
    names = ("population.csv", "parity.csv")
    same = all((dirs[0] / f).read_bytes() == (dirs[1] / f).read_bytes() for f in names)
    assert criterion(9, same, f"{', '.join(names)} byte-identical across two runs")
