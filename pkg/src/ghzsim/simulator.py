"""Circuit execution: noiseless state vectors and noisy density matrices.

Noise insertion policy for :func:`simulate`:

* each native pulse is followed by a depolarizing channel on its targets
  (``p1`` for ``RPHI``, ``p2`` for ``MSXX``);
* every qubit decays (amplitude damping, ``T1``) for the duration of every
  instruction, idle or not; virtual ``RZ`` costs no time;
* collective dephasing is applied once, after the last gate, with
  ``sigma_collective * sqrt(T_total / dur_2q)``.

Decay on a qubit is accumulated lazily and flushed right before the next
pulse that touches that qubit: damping channels on disjoint qubits commute
and compose additively in time, so this equals applying them slice by slice.
"""
from __future__ import annotations

import functools
import math
from typing import Iterable, Sequence

import numpy as np

from . import gates
from .circuit import Circuit, GateKind, Instruction, transpile
from .noise import NoiseSpec, amplitude_damping, collective_dephasing, damping_probability, depolarizing
from .qstate import (
    DensityMatrix,
    StateVector,
    contract,
    evolve_tensor,
    ground_state,
    superoperator,
    unitary_tensor,
)

__all__ = [
    "simulate_statevector",
    "simulate",
    "NoisyRegister",
]


def simulate_statevector(circuit: Circuit) -> StateVector:
    """Ideal evolution of ``|0...0>``, non-native gates included."""
    n = circuit.n_qubits
    psi = ground_state(n).amplitudes.reshape((2,) * n)
    for inst in circuit:
        m = inst.matrix()
        if m is not None:
            psi = contract(psi, m, inst.targets)
    if circuit.frame is not None:
        for q, angle in enumerate(circuit.frame):
            if angle != 0.0:
                psi = contract(psi, gates.r_z(angle), (q,))
    return StateVector(n, psi.reshape(-1))


@functools.lru_cache(maxsize=4096)
def _noisy_gate(kind: GateKind, params: tuple[float, ...], p: float) -> np.ndarray:
    u = Instruction(kind, (0,) if kind is not GateKind.MSXX else (0, 1), params).matrix()
    arity = 2 if kind is GateKind.MSXX else 1
    ops = [k @ u for k in depolarizing(p, arity).operators]
    return superoperator(ops)


@functools.lru_cache(maxsize=1024)
def _decay(duration: float, t1: float) -> np.ndarray | None:
    if damping_probability(duration, t1) == 0.0:
        return None
    return superoperator(amplitude_damping(duration, t1).operators)


class NoisyRegister:
    """Mutable density-matrix register driven by a :class:`NoiseSpec`.

    Holds the state as a rank-``2n`` tensor; owned by one caller at a time.
    """

    def __init__(self, n: int, noise: NoiseSpec, rho: np.ndarray | None = None):
        self.n = n
        self.noise = noise
        if rho is None:
            rho = np.zeros((2**n, 2**n), dtype=complex)
            rho[0, 0] = 1.0
        self.tensor = np.array(rho, dtype=complex).reshape((2,) * (2 * n))
        self.pending = np.zeros(n)
        self.elapsed = 0.0

    def _flush(self, qubits: Iterable[int]) -> None:
        for q in qubits:
            if self.pending[q] > 0:
                s = _decay(float(self.pending[q]), self.noise.t1_seconds)
                if s is not None:
                    self.tensor = evolve_tensor(self.tensor, self.n, s, (q,))
                self.pending[q] = 0.0

    def _pulse(self, inst: Instruction) -> None:
        p = self.noise.p2 if inst.kind is GateKind.MSXX else self.noise.p1
        self._flush(inst.targets)
        if p == 0.0:
            self.tensor = unitary_tensor(self.tensor, self.n, inst.matrix(), inst.targets)
        else:
            self.tensor = evolve_tensor(self.tensor, self.n, _noisy_gate(inst.kind, inst.params, p), inst.targets)

    def _advance(self, duration: float) -> None:
        self.pending += duration
        self.elapsed += duration

    def run(self, instructions: Iterable[Instruction]) -> None:
        noise = self.noise
        for inst in instructions:
            kind = inst.kind
            if kind is GateKind.BARRIER:
                continue
            if kind is GateKind.RZ:
                # virtual: phase bookkeeping only, no error, no time
                self.tensor = unitary_tensor(self.tensor, self.n, inst.matrix(), inst.targets)
                continue
            if kind not in (GateKind.RPHI, GateKind.MSXX):
                raise ValueError(f"{kind.value} is not native; transpile first")
            self._pulse(inst)
            self._advance(inst.duration(noise.dur_1q_seconds, noise.dur_2q_seconds))

    def apply_frame(self, frame: Sequence[float] | None) -> None:
        if frame is None:
            return
        for q, angle in enumerate(frame):
            if angle != 0.0:
                self.tensor = unitary_tensor(self.tensor, self.n, gates.r_z(angle), (q,))

    def parallel_layer(self, unitaries: dict[int, np.ndarray], duration: float) -> None:
        """Simultaneous single-qubit pulses (global beam), one time slice."""
        p = self.noise.p1
        for q, u in unitaries.items():
            self._flush((q,))
            if p == 0.0:
                self.tensor = unitary_tensor(self.tensor, self.n, u, (q,))
            else:
                ops = [k @ u for k in depolarizing(p, 1).operators]
                self.tensor = evolve_tensor(self.tensor, self.n, superoperator(ops), (q,))
        self._advance(duration)

    def dephase(self, sigma: float) -> None:
        if sigma > 0:
            d = 2**self.n
            rho = collective_dephasing(sigma, self.n).apply_array(self.tensor.reshape(d, d))
            self.tensor = rho.reshape((2,) * (2 * self.n))

    def matrix(self) -> np.ndarray:
        self._flush(range(self.n))
        d = 2**self.n
        rho = self.tensor.reshape(d, d)
        # re-symmetrize accumulated round-off
        return 0.5 * (rho + rho.conj().T)

    def density_matrix(self) -> DensityMatrix:
        return DensityMatrix(self.n, self.matrix())


def simulate(circuit: Circuit, noise: NoiseSpec | None = None) -> DensityMatrix:
    """Noisy execution of ``circuit`` from ``|0...0>``.

    Non-native gates are transpiled first; the final virtual-Z frame is
    applied exactly, so the result matches the logical circuit.
    """
    noise = noise if noise is not None else NoiseSpec.ideal()
    native = circuit if circuit.is_native else transpile(circuit, check=False)
    reg = NoisyRegister(circuit.n_qubits, noise)
    reg.run(native)
    reg.apply_frame(native.frame)
    reg.dephase(noise.effective_sigma(reg.elapsed))
    return reg.density_matrix()

