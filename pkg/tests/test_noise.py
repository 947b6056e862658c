import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghzsim.exceptions import CalibrationError, ValidationError
from ghzsim.ghz import ideal_ghz_state
from ghzsim.noise import (
    ConfusionMatrix,
    KrausChannel,
    NoiseSpec,
    amplitude_damping,
    apply_spam,
    average_gate_fidelity,
    calibrate_depolarizing,
    collective_dephasing,
    depolarizing,
    invert_spam,
)
from ghzsim.qstate import DensityMatrix

from oracles import haar_state, random_density_matrix


def _complete(ch: KrausChannel) -> float:
    d = 2**ch.arity
    return np.abs(sum(k.conj().T @ k for k in ch.operators) - np.eye(d)).max()


def test_depolarizing_zero_is_identity_channel():
    ch = depolarizing(0.0, 2)
    assert len(ch.operators) == 1
    np.testing.assert_allclose(ch.operators[0], np.eye(4))


@pytest.mark.parametrize("arity", [1, 2])
def test_depolarizing_full_gives_maximally_mixed(arity):
    d = 2**arity
    rng = np.random.default_rng(arity)
    out = depolarizing(1.0, arity)(random_density_matrix(d, rng))
    np.testing.assert_allclose(out, np.eye(d) / d, atol=1e-12)


@pytest.mark.parametrize("arity", [1, 2])
def test_depolarizing_equals_mixture_form(arity):
    d = 2**arity
    rng = np.random.default_rng(10 + arity)
    for p in np.linspace(0, 1, 11):
        ch = depolarizing(p, arity)
        assert _complete(ch) < 1e-9
        rho = random_density_matrix(d, rng)
        mixture = (1 - p) * rho + p * np.eye(d) / d
        assert np.abs(ch(rho) - mixture).max() < 1e-10


def test_depolarizing_rejects_bad_probability():
    for p in (-0.1, 1.1, math.nan):
        with pytest.raises(ValidationError):
            depolarizing(p, 1)


def test_calibrate_depolarizing_values():
    assert calibrate_depolarizing(1.0, 2) == 0.0
    assert calibrate_depolarizing(0.963, 2) == pytest.approx(0.04933333333333333, abs=1e-12)
    assert calibrate_depolarizing(0.99946, 1) == pytest.approx(0.00108, abs=1e-12)
    with pytest.raises(ValidationError):
        calibrate_depolarizing(0.2, 2)
    with pytest.raises(ValidationError):
        calibrate_depolarizing(1.01, 1)


def test_calibrated_two_qubit_channel_haar_average():
    # Monte-Carlo average of <psi|E(psi)|psi> over Haar-random two-qubit states
    p = calibrate_depolarizing(0.963, 2)
    ch = depolarizing(p, 2)
    rng = np.random.default_rng(77)
    vals = []
    for _ in range(4000):
        psi = haar_state(4, rng)
        vals.append(np.real(psi.conj() @ ch(np.outer(psi, psi.conj())) @ psi))
    assert abs(np.mean(vals) - 0.963) < 1e-3
    assert average_gate_fidelity(ch) == pytest.approx(0.963, abs=1e-12)


@pytest.mark.parametrize("arity", [1, 2])
def test_calibration_round_trip(arity):
    for p in np.linspace(0, 1, 21):
        assert abs(calibrate_depolarizing(average_gate_fidelity(depolarizing(p, arity)), arity) - p) < 1e-9


def test_amplitude_damping_values():
    assert np.allclose(amplitude_damping(0.0, 0.053).operators[0], np.eye(2))
    ch = amplitude_damping(10e-6, 0.053)
    gamma = abs(ch.operators[1][0, 1]) ** 2
    assert gamma == pytest.approx(0.00018866144647367022, rel=1e-12)
    out = amplitude_damping(1e6, 0.053)(np.diag([0.0, 1.0]).astype(complex))
    np.testing.assert_allclose(out, np.diag([1.0, 0.0]), atol=1e-12)
    with pytest.raises(ValidationError):
        amplitude_damping(1.0, 0.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 0.2), st.floats(0, 0.2), st.integers(0, 2**31))
def test_amplitude_damping_composition(t1, t2, seed):
    rho = random_density_matrix(2, np.random.default_rng(seed))
    lhs = amplitude_damping(t1, 0.053)(amplitude_damping(t2, 0.053)(rho))
    rhs = amplitude_damping(t1 + t2, 0.053)(rho)
    assert np.abs(lhs - rhs).max() < 1e-10


def test_dephasing_zero_is_identity():
    rho = random_density_matrix(8, np.random.default_rng(0))
    np.testing.assert_array_equal(collective_dephasing(0.0, 3).apply_array(rho), rho)


@pytest.mark.parametrize("n", range(2, 9))
def test_dephasing_damps_ghz_coherence(n):
    sigma = 0.17
    rho = DensityMatrix.from_state(ideal_ghz_state(n))
    out = collective_dephasing(sigma, n)(rho).elements
    expected = 0.5 * math.exp(-(sigma**2) * n**2 / 2)
    assert abs(abs(out[0, -1]) - expected) < 1e-9
    np.testing.assert_allclose(np.diag(out), np.diag(rho.elements), atol=0)


def test_dephasing_single_qubit_gaussian_average():
    out = collective_dephasing(1.0, 1).apply_array(np.full((2, 2), 0.5, dtype=complex))
    assert out[0, 1].real / 0.5 == pytest.approx(0.6065306597126334, abs=1e-15)
    # numerical average of R_z(delta)^{⊗n} rho R_z(delta)^dagger, delta ~ N(0, 1)
    rng = np.random.default_rng(8)
    rho = random_density_matrix(4, rng)
    deltas = rng.normal(0.0, 1.0, size=100_000)
    phases = np.exp(-0.5j * deltas)
    diag = np.stack([phases**2, np.ones_like(phases), np.ones_like(phases), phases.conj() ** 2], axis=1)
    avg = np.einsum("si,ij,sj->ij", diag, rho, diag.conj()) / deltas.size
    exact = collective_dephasing(1.0, 2).apply_array(rho)
    assert np.abs(avg - exact).max() < 1e-3


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 3), st.integers(1, 4), st.integers(0, 2**31))
def test_dephasing_contracts_and_keeps_trace(sigma, n, seed):
    rho = random_density_matrix(2**n, np.random.default_rng(seed))
    out = collective_dephasing(sigma, n).apply_array(rho)
    assert np.all(np.abs(out) <= np.abs(rho) + 1e-15)
    assert np.trace(out) == np.trace(rho)
    assert np.linalg.eigvalsh(out).min() > -1e-12


def test_confusion_matrix_layout_and_singularity():
    m = ConfusionMatrix(0.01, 0.02).matrix
    np.testing.assert_allclose(m, [[0.99, 0.02], [0.01, 0.98]])
    np.testing.assert_allclose(m.sum(axis=0), [1, 1])
    with pytest.raises(CalibrationError):
        invert_spam([0.5, 0.5], ConfusionMatrix(0.4, 0.6))


def test_spam_identity_and_single_qubit_example():
    v = np.array([0.1, 0.2, 0.3, 0.4])
    np.testing.assert_array_equal(apply_spam(v, ConfusionMatrix()), v)
    np.testing.assert_array_equal(invert_spam(v, ConfusionMatrix()), v)
    np.testing.assert_allclose(apply_spam([1.0, 0.0], ConfusionMatrix(0.01, 0.02)), [0.99, 0.01], atol=1e-15)


def test_spam_matches_dense_kronecker():
    rng = np.random.default_rng(4)
    cms = [ConfusionMatrix(*rng.uniform(0, 0.2, 2)) for _ in range(3)]
    full = np.kron(np.kron(cms[0].matrix, cms[1].matrix), cms[2].matrix)
    v = rng.dirichlet(np.ones(8))
    np.testing.assert_allclose(apply_spam(v, cms), full @ v, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31))
def test_spam_round_trip_and_normalization(n, seed):
    rng = np.random.default_rng(seed)
    cms = [ConfusionMatrix(*rng.uniform(0, 0.45, 2)) for _ in range(n)]
    v = rng.normal(size=2**n)
    _, raw = invert_spam(apply_spam(v, cms), cms, return_raw=True)
    assert np.abs(raw - v).max() < 1e-10
    p = rng.dirichlet(np.ones(2**n))
    assert abs(apply_spam(p, cms).sum() - 1) < 1e-12


def test_invert_spam_clamps_and_renormalizes():
    cm = ConfusionMatrix(0.1, 0.1)
    fixed, raw = invert_spam([1.0, 0.0], cm, return_raw=True)
    assert raw[1] < 0
    assert fixed.min() >= 0 and fixed.sum() == pytest.approx(1.0)


def test_noise_spec_defaults_and_validation():
    spec = NoiseSpec()
    assert spec.t1_seconds == 0.053 and spec.dur_1q_seconds == 10e-6
    assert spec.eps_bright == spec.eps_dark == 0.005
    bench = NoiseSpec.benchmarked()
    assert bench.p1 == pytest.approx(0.00108) and bench.p2 == pytest.approx(0.0493333333)
    assert NoiseSpec.ideal().is_noiseless
    for bad in (dict(p1=1.5), dict(t1_seconds=0.0), dict(sigma_collective=-1.0), dict(dur_2q_seconds=-1e-6)):
        with pytest.raises(ValidationError):
            NoiseSpec(**bad)


def test_effective_sigma_scaling():
    spec = NoiseSpec(sigma_collective=0.04, dur_2q_seconds=200e-6)
    assert spec.effective_sigma(800e-6) == pytest.approx(0.08)
