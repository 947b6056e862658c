"""GHZ-state target and preparation circuit with echo (decoupling) layers."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Instruction, cx, h, ry, rz
from .exceptions import SizeError
from .qstate import StateVector

__all__ = ["MAX_GHZ_QUBITS", "GhzSpec", "ghz_sign", "ideal_ghz_state", "build_ghz_circuit", "dd_layers"]

MAX_GHZ_QUBITS = 10


def ghz_sign(n: int) -> int:
    """Relative sign of ``|1...1>`` in the target state, ``(-1)^floor((n-1)/2)``."""
    return -1 if ((n - 1) // 2) % 2 else 1


@dataclass(frozen=True)
class GhzSpec:
    n: int
    include_dd: bool = True

    def __post_init__(self):
        if int(self.n) != self.n or not 2 <= self.n <= MAX_GHZ_QUBITS:
            raise SizeError(f"GHZ size must be in 2..{MAX_GHZ_QUBITS}, got {self.n}")


def ideal_ghz_state(n: int) -> StateVector:
    GhzSpec(n)
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1 / math.sqrt(2)
    amps[-1] = ghz_sign(n) / math.sqrt(2)
    return StateVector(n, amps)


def dd_layers(n: int) -> list[tuple[float, tuple[int, ...]]]:
    """(angle, qubits) of each echo layer: after CX number k (k < n-1),
    ``R_y(+pi)`` / ``R_y(-pi)`` alternately on qubits 0..k."""
    return [(math.pi if j % 2 == 0 else -math.pi, tuple(range(k + 1))) for j, k in enumerate(range(1, n - 1))]


def build_ghz_circuit(spec: GhzSpec | int, include_dd: bool = True) -> Circuit:
    """Logical preparation circuit: ``H`` on q0, then a CX ladder.

    Echo layers sit between consecutive CX gates. A layer of ``R_y(±pi)`` on
    ``m`` qubits in the state ``|0..0> + s|1..1>`` maps it to
    ``|0..0> + (-1)^m s|1..1>``, so the relative sign after the ladder is
    known in closed form. If it differs from the target sign a virtual
    ``R_z(pi)`` on q0 (zero duration) is appended to flip it.
    """
    if not isinstance(spec, GhzSpec):
        spec = GhzSpec(int(spec), include_dd)
    n = spec.n
    layers = iter(dd_layers(n) if spec.include_dd else [])
    instructions: list[Instruction] = [h(0)]
    sign = 1
    for k in range(1, n):
        instructions.append(cx(k - 1, k))
        if spec.include_dd and k < n - 1:
            angle, qubits = next(layers)
            instructions.extend(ry(q, angle) for q in qubits)
            sign *= (-1) ** len(qubits)
    if sign != ghz_sign(n):
        instructions.append(rz(0, math.pi))
    return Circuit(n, instructions)
