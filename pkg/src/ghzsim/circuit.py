"""Gate-level circuit IR, transpilation to the native gate set, virtual-Z folding.

Circuits are immutable sequences of :class:`Instruction`. Logical circuits may
contain ``H`` and ``CX``; :func:`transpile` expands them into native
``RPHI``/``MSXX`` pulses and folds every ``RZ`` into the phases of later
pulses, leaving a per-qubit *frame* record that completes the unitary.

Text format (one instruction per line, ``;`` also separates statements,
``#`` starts a comment)::

    QUBITS 2
    H q0
    CX q0 q1
    RPHI q0 theta=1.5707963267948966 phi=0.0
    RZ q1 theta=3.141592653589793
    MSXX q0 q1 chi=0.7853981633974483
    BARRIER q0 q1
    FRAME q0=3.141592653589793 q1=0.0

Parameters are written with ``repr`` so that they round-trip exactly.
"""
from __future__ import annotations

import enum
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import gates
from .exceptions import CircuitParseError, GhzSimError, QubitIndexError, SizeError, ValidationError
from .qstate import contract

__all__ = [
    "DUR_1Q",
    "DUR_2Q",
    "GateKind",
    "Instruction",
    "Circuit",
    "TranspileError",
    "rphi",
    "rx",
    "ry",
    "rz",
    "msxx",
    "h",
    "cx",
    "barrier",
    "decompose_h",
    "decompose_cx",
    "expand_to_native",
    "fold_virtual_rz",
    "transpile",
    "unitary_of_circuit",
    "phase_insensitive_distance",
    "parse_circuit",
    "format_circuit",
    "read_circuit",
    "write_circuit",
]

DUR_1Q = 10e-6
DUR_2Q = 200e-6
MAX_UNITARY_QUBITS = 10
_ANGLE_TOL = 1e-9


class TranspileError(GhzSimError):
    """Transpiled circuit is not equivalent to its source."""


class GateKind(str, enum.Enum):
    RPHI = "RPHI"
    RZ = "RZ"
    MSXX = "MSXX"
    H = "H"
    CX = "CX"
    BARRIER = "BARRIER"


_PARAM_NAMES = {
    GateKind.RPHI: ("theta", "phi"),
    GateKind.RZ: ("theta",),
    GateKind.MSXX: ("chi",),
    GateKind.H: (),
    GateKind.CX: (),
    GateKind.BARRIER: (),
}
_ARITY = {GateKind.RPHI: 1, GateKind.RZ: 1, GateKind.MSXX: 2, GateKind.H: 1, GateKind.CX: 2}
NATIVE_KINDS = frozenset({GateKind.RPHI, GateKind.RZ, GateKind.MSXX, GateKind.BARRIER})


@dataclass(frozen=True)
class Instruction:
    kind: GateKind
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        kind = GateKind(self.kind)
        targets = tuple(int(t) for t in self.targets)
        params = tuple(float(p) for p in self.params)
        if len(params) != len(_PARAM_NAMES[kind]):
            raise ValidationError(f"{kind.value} takes {len(_PARAM_NAMES[kind])} parameter(s), got {len(params)}")
        if not all(math.isfinite(p) for p in params):
            raise ValidationError(f"non-finite parameter in {kind.value}{params}")
        arity = _ARITY.get(kind)
        if arity is not None and len(targets) != arity:
            raise ValidationError(f"{kind.value} acts on {arity} qubit(s), got {targets}")
        if not targets:
            raise ValidationError(f"{kind.value} needs at least one target")
        if len(set(targets)) != len(targets):
            raise QubitIndexError(f"duplicate targets {targets}")
        if min(targets) < 0:
            raise QubitIndexError(f"negative qubit index in {targets}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "params", params)

    @property
    def is_native(self) -> bool:
        return self.kind in NATIVE_KINDS

    def matrix(self) -> np.ndarray | None:
        k = self.kind
        if k is GateKind.RPHI:
            return gates.r_phi(*self.params)
        if k is GateKind.RZ:
            return gates.r_z(*self.params)
        if k is GateKind.MSXX:
            return gates.ms_xx(*self.params)
        if k is GateKind.H:
            return gates.HADAMARD
        if k is GateKind.CX:
            return gates.CNOT
        return None

    def duration(self, dur_1q: float = DUR_1Q, dur_2q: float = DUR_2Q) -> float:
        """Wall-clock length in seconds.

        Pulses scale with their area (``|theta| / pi`` times the pi-pulse
        time), ``RZ`` and ``BARRIER`` are free, and ``H``/``CX`` cost as much
        as their native decompositions.
        """
        k = self.kind
        if k is GateKind.RPHI:
            return abs(self.params[0]) / math.pi * dur_1q
        if k is GateKind.MSXX:
            return dur_2q
        if k is GateKind.H:
            return sum(i.duration(dur_1q, dur_2q) for i in decompose_h(self.targets[0]))
        if k is GateKind.CX:
            return sum(i.duration(dur_1q, dur_2q) for i in decompose_cx(*self.targets))
        return 0.0

    def to_text(self) -> str:
        parts = [self.kind.value] + [f"q{t}" for t in self.targets]
        parts += [f"{name}={value!r}" for name, value in zip(_PARAM_NAMES[self.kind], self.params)]
        return " ".join(parts)


def rphi(q: int, theta: float, phi: float) -> Instruction:
    return Instruction(GateKind.RPHI, (q,), (theta, phi))


def rx(q: int, theta: float) -> Instruction:
    return rphi(q, theta, 0.0)


def ry(q: int, theta: float) -> Instruction:
    return rphi(q, theta, math.pi / 2)


def rz(q: int, theta: float) -> Instruction:
    return Instruction(GateKind.RZ, (q,), (theta,))


def msxx(a: int, b: int, chi: float = math.pi / 4) -> Instruction:
    return Instruction(GateKind.MSXX, (a, b), (chi,))


def h(q: int) -> Instruction:
    return Instruction(GateKind.H, (q,))


def cx(control: int, target: int) -> Instruction:
    return Instruction(GateKind.CX, (control, target))


def barrier(*qubits: int) -> Instruction:
    return Instruction(GateKind.BARRIER, tuple(qubits))


@dataclass(frozen=True)
class Circuit:
    """Ordered instruction list on ``n_qubits`` qubits.

    ``frame`` holds the pending virtual-Z angle per qubit after folding
    (``None`` for unfolded circuits); it acts as trailing ``RZ`` gates.
    """

    n_qubits: int
    instructions: tuple[Instruction, ...] = ()
    frame: tuple[float, ...] | None = field(default=None)

    def __post_init__(self):
        if int(self.n_qubits) != self.n_qubits or self.n_qubits < 1:
            raise SizeError(f"n_qubits must be a positive integer, got {self.n_qubits}")
        instructions = tuple(self.instructions)
        for inst in instructions:
            if max(inst.targets) >= self.n_qubits:
                raise QubitIndexError(f"{inst.to_text()} exceeds {self.n_qubits}-qubit register")
        object.__setattr__(self, "instructions", instructions)
        if self.frame is not None:
            frame = tuple(float(a) for a in self.frame)
            if len(frame) != self.n_qubits:
                raise SizeError("frame must list one angle per qubit")
            object.__setattr__(self, "frame", frame)

    def __iter__(self):
        return iter(self.instructions)

    def __len__(self):
        return len(self.instructions)

    def extended(self, instructions: Iterable[Instruction]) -> "Circuit":
        """New circuit with ``instructions`` appended (only valid before folding)."""
        if self.frame is not None and any(f != 0 for f in self.frame):
            raise ValidationError("cannot append to a circuit with a pending frame")
        return Circuit(self.n_qubits, self.instructions + tuple(instructions))

    def gate_counts(self) -> Counter:
        return Counter(inst.kind.value for inst in self.instructions)

    def total_duration(self, dur_1q: float = DUR_1Q, dur_2q: float = DUR_2Q) -> float:
        """Serial execution time; the register runs one instruction at a time."""
        return sum(inst.duration(dur_1q, dur_2q) for inst in self.instructions)

    @property
    def is_native(self) -> bool:
        return all(inst.is_native for inst in self.instructions)

    def to_text(self) -> str:
        return format_circuit(self)


def decompose_h(target: int) -> list[Instruction]:
    """Hadamard as ``R_y(-pi/2)`` followed by a virtual ``R_z(pi)`` (equals ``-i H``)."""
    return [ry(target, -math.pi / 2), rz(target, math.pi)]


def decompose_cx(control: int, target: int) -> list[Instruction]:
    """CX from one ``XX(pi/4)`` dressed with single-qubit pulses (time order)."""
    if control == target:
        raise QubitIndexError("control and target must differ")
    half = math.pi / 2
    return [
        ry(control, half),
        msxx(control, target, math.pi / 4),
        rx(control, -half),
        rx(target, -half),
        ry(control, -half),
    ]


def expand_to_native(circuit: Circuit) -> Circuit:
    out: list[Instruction] = []
    for inst in circuit:
        if inst.kind is GateKind.H:
            out.extend(decompose_h(inst.targets[0]))
        elif inst.kind is GateKind.CX:
            out.extend(decompose_cx(*inst.targets))
        else:
            out.append(inst)
    return Circuit(circuit.n_qubits, out, circuit.frame)


def _residue_class(angle: float) -> int | None:
    """0 or 1 if ``angle`` is an even or odd multiple of pi, else None."""
    r = math.remainder(angle, 2 * math.pi)
    if abs(r) < _ANGLE_TOL:
        return 0
    if abs(abs(r) - math.pi) < _ANGLE_TOL:
        return 1
    return None


def fold_virtual_rz(circuit: Circuit) -> Circuit:
    """Remove every ``RZ`` by shifting the phase of later pulses on that qubit.

    ``RPHI(theta, phi)`` after an accumulated frame ``f`` becomes
    ``RPHI(theta, phi - f)``. ``MSXX`` lets frames through when both are
    multiples of pi (``Z⊗I`` anticommutes with ``X⊗X``, so one odd frame
    flips the sign of ``chi``); any other frame is flushed as an explicit
    ``RZ`` in front of the gate. Remaining angles end up in ``frame``.
    """
    n = circuit.n_qubits
    frame = list(circuit.frame) if circuit.frame is not None else [0.0] * n
    out: list[Instruction] = []
    for inst in circuit:
        kind = inst.kind
        if kind is GateKind.RZ:
            frame[inst.targets[0]] += inst.params[0]
        elif kind is GateKind.RPHI:
            q = inst.targets[0]
            theta, phi = inst.params
            out.append(rphi(q, theta, phi - frame[q]))
        elif kind is GateKind.MSXX:
            a, b = inst.targets
            ca, cb = _residue_class(frame[a]), _residue_class(frame[b])
            chi = inst.params[0]
            if ca is None or cb is None:
                for q in (a, b):
                    if _residue_class(frame[q]) != 0:
                        out.append(rz(q, frame[q]))
                    frame[q] = 0.0
            elif ca != cb:
                chi = -chi
            out.append(msxx(a, b, chi))
        elif kind is GateKind.BARRIER:
            out.append(inst)
        else:
            raise ValidationError(f"cannot fold non-native instruction {kind.value}; expand it first")
    return Circuit(n, out, tuple(frame))


def transpile(circuit: Circuit, *, fold: bool = True, check: bool = True, atol: float = 1e-8) -> Circuit:
    """Expand ``H``/``CX`` into native pulses and fold virtual Z rotations.

    With ``check`` (and at most 8 qubits) the result is compared with the
    source unitary up to global phase; a mismatch raises
    :class:`TranspileError`.
    """
    native = expand_to_native(circuit)
    if fold:
        native = fold_virtual_rz(native)
    if check and circuit.n_qubits <= 8:
        dist = phase_insensitive_distance(unitary_of_circuit(circuit), unitary_of_circuit(native))
        if dist > atol:
            raise TranspileError(f"transpiled circuit differs from source (distance {dist:.3e})")
    return native


def unitary_of_circuit(circuit: Circuit, apply_frame: bool = True) -> np.ndarray:
    """Full ``2^n x 2^n`` unitary of the circuit, including any pending frame."""
    n = circuit.n_qubits
    if n > MAX_UNITARY_QUBITS:
        raise SizeError(f"unitary reconstruction limited to {MAX_UNITARY_QUBITS} qubits")
    d = 2**n
    u = np.eye(d, dtype=complex).reshape((2,) * n + (d,))
    for inst in circuit:
        m = inst.matrix()
        if m is not None:
            u = contract(u, m, inst.targets)
    if apply_frame and circuit.frame is not None:
        for q, angle in enumerate(circuit.frame):
            if angle != 0.0:
                u = contract(u, gates.r_z(angle), (q,))
    return u.reshape(d, d)


def phase_insensitive_distance(u: np.ndarray, v: np.ndarray) -> float:
    """``max |u - e^{i a} v|`` with ``a = arg tr(v^dagger u)``."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise SizeError(f"dimension mismatch {u.shape} vs {v.shape}")
    overlap = np.vdot(v, u)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-15 else 1.0
    return float(np.max(np.abs(u - phase * v)))


_QUBIT_RE = re.compile(r"^q(\d+)$")


def _parse_qubit(token: str, lineno: int) -> int:
    m = _QUBIT_RE.match(token)
    if not m:
        raise CircuitParseError(f"expected qubit like 'q0', got {token!r}", lineno)
    return int(m.group(1))


def _parse_float(text: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise CircuitParseError(f"bad number {text!r}", lineno) from None
    if not math.isfinite(value):
        raise CircuitParseError(f"non-finite number {text!r}", lineno)
    return value


def parse_circuit(text: str) -> Circuit:
    """Parse the line-oriented text format (see module docstring)."""
    instructions: list[Instruction] = []
    linenos: list[int] = []
    n_declared: int | None = None
    frame: dict[int, float] | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        for stmt in line.split(";"):
            tokens = stmt.split()
            if not tokens:
                continue
            head = tokens[0].upper()
            if head == "QUBITS":
                if len(tokens) != 2 or not tokens[1].isdigit() or int(tokens[1]) < 1:
                    raise CircuitParseError("QUBITS takes one positive integer", lineno)
                n_declared = int(tokens[1])
                continue
            if head == "FRAME":
                frame = {}
                for tok in tokens[1:]:
                    key, sep, value = tok.partition("=")
                    if not sep:
                        raise CircuitParseError(f"expected qN=angle, got {tok!r}", lineno)
                    frame[_parse_qubit(key, lineno)] = _parse_float(value, lineno)
                continue
            try:
                kind = GateKind(head)
            except ValueError:
                raise CircuitParseError(f"unknown instruction {tokens[0]!r}", lineno) from None
            qubits: list[int] = []
            params: dict[str, float] = {}
            for tok in tokens[1:]:
                if "=" in tok:
                    key, _, value = tok.partition("=")
                    if key not in _PARAM_NAMES[kind]:
                        raise CircuitParseError(f"{kind.value} has no parameter {key!r}", lineno)
                    params[key] = _parse_float(value, lineno)
                else:
                    qubits.append(_parse_qubit(tok, lineno))
            missing = [p for p in _PARAM_NAMES[kind] if p not in params]
            if missing:
                raise CircuitParseError(f"{kind.value} missing parameter(s) {', '.join(missing)}", lineno)
            try:
                instructions.append(Instruction(kind, tuple(qubits), tuple(params[p] for p in _PARAM_NAMES[kind])))
            except (ValidationError, QubitIndexError) as exc:
                raise CircuitParseError(str(exc), lineno) from None
            linenos.append(lineno)
    used = max((max(i.targets) for i in instructions), default=-1) + 1
    if frame:
        used = max(used, max(frame) + 1)
    n = n_declared if n_declared is not None else used
    if n < 1:
        raise CircuitParseError("empty circuit without a QUBITS declaration")
    for inst, lineno in zip(instructions, linenos):
        if max(inst.targets) >= n:
            raise CircuitParseError(f"qubit index {max(inst.targets)} exceeds QUBITS {n}", lineno)
    if used > n:
        raise CircuitParseError(f"frame qubit index {used - 1} exceeds QUBITS {n}")
    frame_tuple = None
    if frame is not None:
        frame_tuple = tuple(frame.get(q, 0.0) for q in range(n))
    return Circuit(n, instructions, frame_tuple)


def format_circuit(circuit: Circuit) -> str:
    lines = [f"QUBITS {circuit.n_qubits}"]
    lines += [inst.to_text() for inst in circuit]
    if circuit.frame is not None:
        lines.append("FRAME " + " ".join(f"q{q}={a!r}" for q, a in enumerate(circuit.frame)))
    return "\n".join(lines) + "\n"


def read_circuit(path: str | Path) -> Circuit:
    return parse_circuit(Path(path).read_text())


def write_circuit(circuit: Circuit, path: str | Path) -> None:
    Path(path).write_text(format_circuit(circuit))
