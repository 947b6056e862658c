"""Native gate set of the trapped-ion optical-qubit register.

Three gate families are available on the hardware:

* ``r_phi(theta, phi)`` -- resonant pulse, rotation by ``theta`` about the
  equatorial axis ``cos(phi) X + sin(phi) Y``;
* ``r_z(theta)`` -- virtual Z rotation (implemented as a phase shift of all
  later pulses, see :func:`ghzsim.circuit.fold_virtual_rz`);
* ``ms_xx(chi)`` -- Mølmer-Sørensen interaction
  ``exp(-i chi/2 (X⊗I + I⊗X)^2)``, fully entangling at ``chi = pi/4``.

All matrices are built from closed forms, global phases included.
"""
from __future__ import annotations

import math

import numpy as np

from .exceptions import ValidationError

__all__ = [
    "IDENTITY",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "HADAMARD",
    "CNOT",
    "r_phi",
    "r_x",
    "r_y",
    "r_z",
    "ms_xx",
    "is_unitary",
]

IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
# control = first (most significant) qubit
CNOT = np.eye(4, dtype=complex)[[0, 1, 3, 2]]

_XX = np.kron(PAULI_X, PAULI_X)


def _finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValidationError(f"gate parameter must be finite, got {v!r}")


def is_unitary(u: np.ndarray, atol: float = 1e-9) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0.0, atol=atol))


def r_phi(theta: float, phi: float) -> np.ndarray:
    """Equatorial rotation ``exp(-i (cos(phi) X + sin(phi) Y) theta / 2)``.

    Args:
        theta: rotation angle in radians (pulse area).
        phi: laser phase in radians.

    Returns:
        2x2 complex unitary.
    """
    _finite(theta, phi)
    c = math.cos(theta / 2)
    s = math.sin(theta / 2)
    return np.array(
        [
            [c, -1j * np.exp(-1j * phi) * s],
            [-1j * np.exp(1j * phi) * s, c],
        ],
        dtype=complex,
    )


def r_x(theta: float) -> np.ndarray:
    return r_phi(theta, 0.0)


def r_y(theta: float) -> np.ndarray:
    return r_phi(theta, math.pi / 2)


def r_z(theta: float) -> np.ndarray:
    """``exp(-i Z theta / 2) = diag(e^{-i theta/2}, e^{i theta/2})``."""
    _finite(theta)
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]).astype(complex)


def ms_xx(chi: float) -> np.ndarray:
    """Mølmer-Sørensen gate ``XX(chi)``.

    The squared generator equals ``2 I + 2 X⊗X``, so the exponential reduces
    to ``e^{-i chi} (cos(chi) I - i sin(chi) X⊗X)``.
    """
    _finite(chi)
    return np.exp(-1j * chi) * (math.cos(chi) * np.eye(4, dtype=complex) - 1j * math.sin(chi) * _XX)
