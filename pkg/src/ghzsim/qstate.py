"""Dense N-qubit state containers.

Basis convention: qubit 0 is the most significant bit, so basis index ``i``
corresponds to the bitstring ``b_0 b_1 ... b_{N-1}`` with ``b_k = 1`` meaning
ion ``k`` is in the upper (D) level ``|1>``.

Gates and channels are applied by reshaping the state into a rank-``n`` (pure)
or rank-``2n`` (mixed) tensor of qubit axes and contracting the operator into
the target axes; the full ``2^n x 2^n`` operator is never built.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

from .exceptions import QubitIndexError, SizeError, ValidationError
from .gates import is_unitary

__all__ = [
    "MAX_QUBITS",
    "StateVector",
    "DensityMatrix",
    "Outcome",
    "ground_state",
    "apply_unitary",
    "apply_kraus",
    "probabilities",
    "sample_shots",
    "purity",
    "to_density_matrix",
]

MAX_QUBITS = 12
NORM_TOL = 1e-9
CLAMP_TOL = 1e-12


def _check_n(n: int) -> int:
    if int(n) != n or not 1 <= n <= MAX_QUBITS:
        raise SizeError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n}")
    return int(n)


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n = _check_n(self.n_qubits)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2**n:
            raise SizeError(f"expected {2**n} amplitudes, got {amps.shape[0]}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalized (|psi|^2 = {norm})")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n_qubits: int
    elements: np.ndarray

    def __post_init__(self):
        n = _check_n(self.n_qubits)
        rho = np.asarray(self.elements, dtype=complex)
        if rho.shape != (2**n, 2**n):
            raise SizeError(f"expected shape {(2**n, 2**n)}, got {rho.shape}")
        if not np.allclose(rho, rho.conj().T, rtol=0.0, atol=NORM_TOL):
            raise ValidationError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValidationError(f"density matrix trace is {tr}, expected 1")
        rho.flags.writeable = False
        object.__setattr__(self, "elements", rho)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityMatrix":
        a = state.amplitudes
        return cls(state.n_qubits, np.outer(a, a.conj()))

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        n = _check_n(n)
        return cls(n, np.eye(2**n, dtype=complex) / 2**n)


State = Union[StateVector, DensityMatrix]


class Outcome(NamedTuple):
    bitstring: int
    count: int


def ground_state(n: int) -> StateVector:
    n = _check_n(n)
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1.0
    return StateVector(n, amps)


def to_density_matrix(state: State) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    return DensityMatrix.from_state(state)


def purity(rho: DensityMatrix) -> float:
    m = rho.elements
    return float(np.vdot(m, m).real)


def _check_targets(targets: Sequence[int], n: int) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise QubitIndexError(f"duplicate qubit targets {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise QubitIndexError(f"qubit {t} out of range for {n}-qubit state")
    return targets


def contract(tensor: np.ndarray, op: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Contract ``op`` (acting on ``len(axes)`` qubit axes) into ``tensor``.

    ``op`` is a ``2^k x 2^k`` matrix, or any array reshapeable to
    ``(2,)*2k`` with output bits first. The result keeps the axis order of
    ``tensor``.
    """
    k = len(axes)
    m = np.asarray(op).reshape((2,) * (2 * k))
    out = np.tensordot(m, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def superoperator(operators: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor ``T[i, j, a, b] = sum_K K[i, a] conj(K[j, b])`` as (2,)*4k array."""
    ops = np.asarray(operators, dtype=complex)
    d = ops.shape[-1]
    k = d.bit_length() - 1
    t = np.einsum("kia,kjb->ijab", ops, ops.conj())
    return t.reshape((2,) * (4 * k))


def evolve_tensor(rho_t: np.ndarray, n: int, superop: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Apply a superoperator from :func:`superoperator` to a rank-2n tensor."""
    axes = list(targets) + [n + t for t in targets]
    return contract(rho_t, superop, axes)


def unitary_tensor(rho_t: np.ndarray, n: int, u: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    rho_t = contract(rho_t, u, targets)
    return contract(rho_t, u.conj(), [n + t for t in targets])


def apply_unitary(state: State, u: np.ndarray, targets: Sequence[int]) -> State:
    """Apply ``u`` to ``targets`` (identity elsewhere); returns a new state.

    The first target is the most significant qubit of ``u``.
    """
    n = state.n_qubits
    targets = _check_targets(targets, n)
    u = np.asarray(u, dtype=complex)
    k = len(targets)
    if k not in (1, 2) or u.shape != (2**k, 2**k):
        raise SizeError(f"{u.shape} matrix does not act on {k} qubit(s)")
    if not is_unitary(u, atol=1e-9):
        raise ValidationError("matrix is not unitary")
    if isinstance(state, StateVector):
        psi = contract(state.amplitudes.reshape((2,) * n), u, targets)
        return StateVector(n, psi.reshape(-1))
    rho_t = unitary_tensor(state.elements.reshape((2,) * (2 * n)), n, u, targets)
    return DensityMatrix(n, rho_t.reshape(2**n, 2**n))


def apply_kraus(rho: DensityMatrix, channel, targets: Sequence[int]) -> DensityMatrix:
    """``rho -> sum_K K rho K^dagger`` on ``targets``.

    ``channel`` is a :class:`ghzsim.noise.KrausChannel` or a plain sequence of
    Kraus matrices; completeness is checked either way.
    """
    ops = getattr(channel, "operators", channel)
    ops = np.asarray(ops, dtype=complex)
    if ops.ndim == 2:
        ops = ops[None]
    d = ops.shape[-1]
    completeness = np.einsum("kai,kaj->ij", ops.conj(), ops)
    if not np.allclose(completeness, np.eye(d), rtol=0.0, atol=1e-9):
        raise ValidationError("Kraus operators are not complete (sum K^dag K != I)")
    if isinstance(rho, StateVector):
        rho = DensityMatrix.from_state(rho)
    n = rho.n_qubits
    targets = _check_targets(targets, n)
    if d != 2 ** len(targets):
        raise SizeError(f"{d}-dimensional channel on {len(targets)} target(s)")
    rho_t = evolve_tensor(rho.elements.reshape((2,) * (2 * n)), n, superoperator(ops), targets)
    return DensityMatrix(n, rho_t.reshape(2**n, 2**n))


def clamp_probabilities(p: np.ndarray, tol: float = CLAMP_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.size and p.min() < -tol:
        raise ValidationError(f"negative probability {p.min():.3e} beyond round-off")
    return np.clip(p, 0.0, None)


def probabilities(state: State) -> np.ndarray:
    """Computational-basis outcome probabilities."""
    if isinstance(state, StateVector):
        p = np.abs(state.amplitudes) ** 2
    else:
        p = np.diagonal(state.elements).real.copy()
    return clamp_probabilities(p)


def sample_shots(probs: Sequence[float], shots: int, seed) -> list[Outcome]:
    """Multinomial draw of ``shots`` outcomes; deterministic in ``seed``.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts (an int,
    a sequence of ints or a ``SeedSequence``).

    Returns:
        Outcomes with non-zero counts, ordered by basis index.
    """
    p = np.asarray(probs, dtype=float)
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    p = clamp_probabilities(p, tol=1e-9)
    total = p.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValidationError(f"probabilities sum to {total}, expected 1")
    counts = np.random.default_rng(seed).multinomial(int(shots), p / total)
    return [Outcome(int(i), int(c)) for i, c in enumerate(counts) if c]
