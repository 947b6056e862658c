"""Noise channels and readout model calibrated to the reported error figures.

Gate errors are modelled as depolarizing channels whose strength is fixed by
the average gate fidelity, ``F = (1 - p) + p / d``. Spontaneous decay of the
metastable upper level enters as amplitude damping with ``T1 = 53 ms``, slow
laser-phase noise as a collective (common-mode) Gaussian dephasing, and
readout as a per-qubit confusion matrix.
"""
from __future__ import annotations

import dataclasses
import functools
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import CalibrationError, SizeError, ValidationError
from .gates import IDENTITY, PAULI_X, PAULI_Y, PAULI_Z
from .qstate import DensityMatrix

__all__ = [
    "FIDELITY_CONVENTION",
    "BENCHMARK_F1Q",
    "BENCHMARK_F2Q",
    "BENCHMARK_T1",
    "NoiseSpec",
    "KrausChannel",
    "ConfusionMatrix",
    "CollectiveDephasing",
    "depolarizing",
    "calibrate_depolarizing",
    "average_gate_fidelity",
    "amplitude_damping",
    "damping_probability",
    "collective_dephasing",
    "apply_spam",
    "invert_spam",
]

FIDELITY_CONVENTION = "F_avg = (1 - p) + p/d for rho -> (1 - p) rho + p I/d"

# Randomized-benchmarking single-qubit fidelity, mean MS-gate fidelity and
# metastable D-level lifetime of the reference register.
BENCHMARK_F1Q = 0.99946
BENCHMARK_F2Q = 0.963
BENCHMARK_T1 = 0.053


def _check_probability(p: float, name: str) -> float:
    if not (math.isfinite(p) and 0.0 <= p <= 1.0):
        raise ValidationError(f"{name} must be a probability in [0, 1], got {p}")
    return float(p)


def _check_arity(arity: int) -> int:
    if arity not in (1, 2):
        raise SizeError(f"arity must be 1 or 2, got {arity}")
    return arity


@dataclass(frozen=True)
class KrausChannel:
    arity: int
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        _check_arity(self.arity)
        d = 2**self.arity
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops or any(k.shape != (d, d) for k in ops):
            raise SizeError(f"Kraus operators must be {d}x{d}")
        total = sum(k.conj().T @ k for k in ops)
        if not np.allclose(total, np.eye(d), rtol=0.0, atol=1e-9):
            raise ValidationError("Kraus set is not complete")
        object.__setattr__(self, "operators", ops)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        """Act on a bare ``d x d`` matrix."""
        return sum(k @ rho @ k.conj().T for k in self.operators)

    def compose(self, other: "KrausChannel") -> "KrausChannel":
        """Channel ``self ∘ other`` (``other`` acts first)."""
        if other.arity != self.arity:
            raise SizeError("cannot compose channels of different arity")
        return KrausChannel(self.arity, tuple(a @ b for a in self.operators for b in other.operators))


@functools.lru_cache(maxsize=None)
def _paulis(arity: int) -> tuple[np.ndarray, ...]:
    singles = (IDENTITY, PAULI_X, PAULI_Y, PAULI_Z)
    out = []
    for combo in itertools.product(singles, repeat=arity):
        m = combo[0]
        for s in combo[1:]:
            m = np.kron(m, s)
        out.append(m)
    return tuple(out)


def depolarizing(p: float, arity: int = 1) -> KrausChannel:
    """Depolarizing channel ``rho -> (1 - p) rho + p I / d``.

    Uses the Pauli twirl identity ``I/d = sum_P P rho P / d^2`` (sum over all
    ``d^2`` Pauli products), so the identity Kraus weight is
    ``1 - p (d^2 - 1)/d^2`` and every non-identity Pauli carries ``p/d^2``.
    """
    p = _check_probability(p, "p")
    arity = _check_arity(arity)
    d2 = 4**arity
    paulis = _paulis(arity)
    if p == 0.0:
        return KrausChannel(arity, (paulis[0],))
    ops = [math.sqrt(1.0 - p * (d2 - 1) / d2) * paulis[0]]
    ops += [math.sqrt(p / d2) * m for m in paulis[1:]]
    return KrausChannel(arity, tuple(ops))


def calibrate_depolarizing(f_avg: float, arity: int = 1) -> float:
    """Depolarizing probability reproducing average gate fidelity ``f_avg``.

    See :data:`FIDELITY_CONVENTION`; inverts it to ``p = (1 - F) d / (d - 1)``.
    """
    arity = _check_arity(arity)
    d = 2**arity
    if not (math.isfinite(f_avg) and 1.0 / d <= f_avg <= 1.0):
        raise ValidationError(f"average fidelity must lie in [1/{d}, 1], got {f_avg}")
    return (1.0 - f_avg) * d / (d - 1)


def average_gate_fidelity(channel: KrausChannel) -> float:
    """Average fidelity of ``channel`` to the identity, via entanglement fidelity."""
    d = 2**channel.arity
    f_ent = sum(abs(np.trace(k)) ** 2 for k in channel.operators) / d**2
    return (d * f_ent + 1.0) / (d + 1.0)


def damping_probability(duration: float, t1: float) -> float:
    if not t1 > 0:
        raise ValidationError(f"T1 must be positive, got {t1}")
    if duration < 0:
        raise ValidationError(f"duration must be non-negative, got {duration}")
    return -math.expm1(-duration / t1)


def amplitude_damping(duration: float, t1: float) -> KrausChannel:
    """Decay ``|1> -> |0>`` over ``duration`` with lifetime ``t1``."""
    gamma = damping_probability(duration, t1)
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return KrausChannel(1, (k0, k1))


@dataclass(frozen=True)
class CollectiveDephasing:
    """Common-mode Gaussian phase noise on ``n`` qubits.

    Averages ``R_z(delta)^{⊗n} rho R_z(delta)^{†⊗n}`` over
    ``delta ~ N(0, sigma^2)``, which scales each element by
    ``exp(-sigma^2 (m_i - m_j)^2 / 2)`` with ``m`` the excitation number.
    """

    sigma: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValidationError(f"sigma must be >= 0, got {self.sigma}")

    @functools.cached_property
    def factors(self) -> np.ndarray:
        m = np.array([bin(i).count("1") for i in range(2**self.n)], dtype=float)
        diff = m[:, None] - m[None, :]
        return np.exp(-0.5 * self.sigma**2 * diff**2)

    def apply_array(self, rho: np.ndarray) -> np.ndarray:
        return rho * self.factors

    def __call__(self, rho: DensityMatrix) -> DensityMatrix:
        if rho.n_qubits != self.n:
            raise SizeError(f"map built for {self.n} qubits, state has {rho.n_qubits}")
        return DensityMatrix(self.n, self.apply_array(rho.elements))


def collective_dephasing(sigma: float, n: int) -> CollectiveDephasing:
    return CollectiveDephasing(float(sigma), int(n))


@dataclass(frozen=True)
class ConfusionMatrix:
    """Single-qubit readout model, ``matrix[observed, true]``.

    ``eps_bright`` is the chance of reading a bright ``|0>`` ion as dark,
    ``eps_dark`` of reading a dark ``|1>`` ion as bright.
    """

    eps_bright: float = 0.0
    eps_dark: float = 0.0

    def __post_init__(self):
        _check_probability(self.eps_bright, "eps_bright")
        _check_probability(self.eps_dark, "eps_dark")

    @property
    def matrix(self) -> np.ndarray:
        eb, ed = self.eps_bright, self.eps_dark
        return np.array([[1.0 - eb, ed], [eb, 1.0 - ed]])

    @property
    def inverse(self) -> np.ndarray:
        det = 1.0 - self.eps_bright - self.eps_dark
        if abs(det) < 1e-12:
            raise CalibrationError("confusion matrix is singular (eps_bright + eps_dark = 1)")
        eb, ed = self.eps_bright, self.eps_dark
        return np.array([[1.0 - ed, -ed], [-eb, 1.0 - eb]]) / det


def _per_qubit(confusion, n: int) -> list[ConfusionMatrix]:
    if isinstance(confusion, ConfusionMatrix):
        return [confusion] * n
    confusion = list(confusion)
    if len(confusion) != n:
        raise SizeError(f"need {n} confusion matrices, got {len(confusion)}")
    return confusion


def _n_from_length(length: int) -> int:
    n = length.bit_length() - 1
    if length < 2 or 2**n != length:
        raise SizeError(f"probability vector length {length} is not a power of two")
    return n


def _tensor_action(probs: np.ndarray, matrices: Sequence[np.ndarray]) -> np.ndarray:
    n = len(matrices)
    t = probs.reshape((2,) * n)
    for q, m in enumerate(matrices):
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


def apply_spam(probs, confusion) -> np.ndarray:
    """Map true outcome probabilities to observed ones, ``(⊗ M_q) p``."""
    probs = np.asarray(probs, dtype=float)
    n = _n_from_length(probs.size)
    return _tensor_action(probs, [c.matrix for c in _per_qubit(confusion, n)])


def invert_spam(probs, confusion, return_raw: bool = False):
    """Undo readout errors, ``(⊗ M_q^{-1}) p``, then project onto the simplex.

    Negative entries are clamped to zero and the vector renormalized. With
    ``return_raw=True`` the unclamped quasi-probabilities are returned as a
    second element.
    """
    probs = np.asarray(probs, dtype=float)
    n = _n_from_length(probs.size)
    raw = _tensor_action(probs, [c.inverse for c in _per_qubit(confusion, n)])
    fixed = np.clip(raw, 0.0, None)
    total = fixed.sum()
    fixed = fixed / total if total > 0 else np.full_like(fixed, 1.0 / fixed.size)
    return (fixed, raw) if return_raw else fixed


@dataclass(frozen=True)
class NoiseSpec:
    """Per-gate-class noise configuration.

    ``sigma_collective`` is the standard deviation (radians) of the common
    laser phase accumulated over one two-qubit-gate duration; a circuit of
    total length ``T`` sees ``sigma_collective * sqrt(T / dur_2q_seconds)``.
    ``t1_seconds`` may be ``inf`` to disable decay.
    """

    p1: float = 0.0
    p2: float = 0.0
    t1_seconds: float = BENCHMARK_T1
    sigma_collective: float = 0.0
    eps_bright: float = 0.005
    eps_dark: float = 0.005
    dur_1q_seconds: float = 10e-6
    dur_2q_seconds: float = 200e-6

    def __post_init__(self):
        for name in ("p1", "p2", "eps_bright", "eps_dark"):
            _check_probability(getattr(self, name), name)
        for name in ("t1_seconds", "dur_1q_seconds", "dur_2q_seconds"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0 and not math.isnan(v)):
                raise ValidationError(f"{name} must be positive, got {v}")
        if not (math.isfinite(self.sigma_collective) and self.sigma_collective >= 0):
            raise ValidationError(f"sigma_collective must be >= 0, got {self.sigma_collective}")

    @classmethod
    def ideal(cls) -> "NoiseSpec":
        return cls(t1_seconds=math.inf, eps_bright=0.0, eps_dark=0.0)

    @classmethod
    def benchmarked(cls, **overrides) -> "NoiseSpec":
        """Gate errors from the reported fidelities, no collective dephasing."""
        base = cls(
            p1=calibrate_depolarizing(BENCHMARK_F1Q, 1),
            p2=calibrate_depolarizing(BENCHMARK_F2Q, 2),
            t1_seconds=BENCHMARK_T1,
        )
        return dataclasses.replace(base, **overrides)

    def replace(self, **changes) -> "NoiseSpec":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)

    @property
    def confusion(self) -> ConfusionMatrix:
        return ConfusionMatrix(self.eps_bright, self.eps_dark)

    @property
    def is_noiseless(self) -> bool:
        return (
            self.p1 == 0
            and self.p2 == 0
            and self.sigma_collective == 0
            and math.isinf(self.t1_seconds)
        )

    def effective_sigma(self, total_duration: float) -> float:
        return self.sigma_collective * math.sqrt(total_duration / self.dur_2q_seconds)
