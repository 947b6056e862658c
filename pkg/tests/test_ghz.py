import math

import numpy as np
import pytest

from ghzsim.circuit import Circuit, GateKind, rz, transpile
from ghzsim.exceptions import SizeError
from ghzsim.ghz import GhzSpec, build_ghz_circuit, dd_layers, ghz_sign, ideal_ghz_state
from ghzsim.noise import NoiseSpec
from ghzsim.qstate import DensityMatrix
from ghzsim.simulator import NoisyRegister, simulate, simulate_statevector

NS = range(2, 9)


@pytest.mark.parametrize("n,sign", [(2, 1), (3, -1), (4, -1), (5, 1), (6, 1), (7, -1), (8, -1)])
def test_ghz_sign(n, sign):
    assert ghz_sign(n) == sign


def test_ideal_state():
    amps = ideal_ghz_state(3).amplitudes
    assert amps[0] == pytest.approx(1 / math.sqrt(2))
    assert amps[7] == pytest.approx(-1 / math.sqrt(2))
    assert np.count_nonzero(amps) == 2


@pytest.mark.parametrize("n", [1, 11, 2.5])
def test_size_limits(n):
    with pytest.raises(SizeError):
        GhzSpec(n)


def test_bell_circuit_has_no_echo():
    c = build_ghz_circuit(2)
    assert [i.kind for i in c] == [GateKind.H, GateKind.CX]


def test_gate_counts():
    assert dd_layers(3) == [(math.pi, (0, 1))]
    c8 = build_ghz_circuit(8)
    counts = c8.gate_counts()
    assert counts["CX"] == 7
    assert len(dd_layers(8)) == 6
    assert [a for a, _ in dd_layers(8)] == [math.pi, -math.pi] * 3
    assert counts["RPHI"] == sum(len(q) for _, q in dd_layers(8))
    assert transpile(c8).gate_counts()["MSXX"] == 7


@pytest.mark.parametrize("n", NS)
@pytest.mark.parametrize("dd", [True, False])
def test_noiseless_preparation_is_exact(n, dd):
    c = build_ghz_circuit(n, dd)
    target = ideal_ghz_state(n).amplitudes
    psi = simulate_statevector(c).amplitudes
    assert abs(np.vdot(target, psi)) ** 2 > 1 - 1e-12
    native = transpile(c)
    assert native.is_native
    assert abs(np.vdot(target, simulate_statevector(native).amplitudes)) ** 2 > 1 - 1e-12
    rho = simulate(c, NoiseSpec.ideal()).elements
    assert np.real(target.conj() @ rho @ target) > 1 - 1e-10


@pytest.mark.parametrize("n", range(3, 9))
def test_echo_layers_suppress_static_detuning(n):
    def fidelity(dd):
        out = []
        for inst in build_ghz_circuit(n, dd):
            out.append(inst)
            if inst.kind is GateKind.CX:
                out.extend(rz(q, 0.05) for q in range(inst.targets[1] + 1))
        psi = simulate_statevector(Circuit(n, out)).amplitudes
        return abs(np.vdot(ideal_ghz_state(n).amplitudes, psi)) ** 2

    assert fidelity(True) > fidelity(False)


@pytest.mark.parametrize("n", [2, 5, 8])
def test_dephasing_only_decays_ghz_coherence(n):
    sigma = 0.04
    noise = NoiseSpec.ideal().replace(sigma_collective=sigma)
    c = build_ghz_circuit(n)
    rho = simulate(c, noise).elements
    duration = transpile(c).total_duration()
    s_eff = sigma * math.sqrt(duration / noise.dur_2q_seconds)
    assert abs(rho[0, -1]) == pytest.approx(0.5 * math.exp(-(s_eff**2) * n**2 / 2), abs=1e-9)
    assert rho[0, 0].real == pytest.approx(0.5, abs=1e-12)


def test_amplitude_damping_only_preserves_trace_and_lowers_fidelity():
    noise = NoiseSpec.ideal().replace(t1_seconds=0.053)
    rho = simulate(build_ghz_circuit(4), noise)
    target = ideal_ghz_state(4).amplitudes
    f = np.real(target.conj() @ rho.elements @ target)
    assert np.trace(rho.elements).real == pytest.approx(1.0, abs=1e-12)
    assert 0.98 < f < 1.0


def test_lazy_damping_equals_slice_by_slice():
    noise = NoiseSpec.ideal().replace(t1_seconds=1e-3, p1=0.01, p2=0.02)
    native = transpile(build_ghz_circuit(4))
    lazy = NoisyRegister(4, noise)
    lazy.run(native)
    eager = NoisyRegister(4, noise)
    for inst in native:
        eager.run([inst])
        eager._flush(range(4))
    np.testing.assert_allclose(lazy.matrix(), eager.matrix(), atol=1e-12)


def test_depolarizing_only_bell_fidelity():
    p2 = 0.0493333333
    noise = NoiseSpec.ideal().replace(p2=p2)
    rho = simulate(build_ghz_circuit(2), noise)
    target = ideal_ghz_state(2).amplitudes
    assert np.real(target.conj() @ rho.elements @ target) == pytest.approx(1 - p2 + p2 / 4, abs=1e-12)


@pytest.mark.parametrize("n", NS)
def test_noisy_state_is_physical(n):
    rho = simulate(build_ghz_circuit(n), NoiseSpec.benchmarked(sigma_collective=0.04))
    assert isinstance(rho, DensityMatrix)
    assert np.trace(rho.elements).real == pytest.approx(1.0, abs=1e-10)
    assert np.linalg.eigvalsh(rho.elements).min() > -1e-10
