"""Dense statevector simulator for the gate-model dialect.

Qubit k is bit k of the amplitude index (little-endian). Shot strings list classical
bits in ascending order, bit 0 leftmost.
"""

from __future__ import annotations

import math

import numpy as np

from qxir.backends.base import Accelerator, AcceleratorDescriptor, ExecutionOptions
from qxir.backends.buffer import AcceleratorBuffer
from qxir.errors import (
    CapacityError,
    DialectError,
    ModeError,
    UnboundVariableError,
    UnsupportedParameterError,
)
from qxir.ir.nodes import FunctionNode, Instruction

MAX_QUBITS = 26

_SQ2 = 1 / math.sqrt(2)
FIXED_GATES = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    # basis |control target>, control most significant
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
}


def rx(t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(t: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


ROTATIONS = {"RX": rx, "RY": ry, "RZ": rz}


def gate_matrix(inst: Instruction) -> np.ndarray:
    if inst.name in FIXED_GATES:
        return FIXED_GATES[inst.name]
    if inst.name in ROTATIONS:
        return ROTATIONS[inst.name](_angle(inst))
    raise DialectError(f"{inst.name} is not a unitary gate of the gate-model dialect")


def _angle(inst: Instruction) -> float:
    p = inst.params[0]
    if p.is_var:
        raise UnboundVariableError(p.value, f"{inst.name}: unbound variable {p.value!r}")
    if not p.is_numeric:
        raise UnsupportedParameterError(f"{inst.name}: {p.kind} parameters are not executable")
    return float(p.value)


def apply_gate(state: np.ndarray, matrix: np.ndarray, qubits, n: int) -> np.ndarray:
    """Apply ``matrix`` (first listed qubit most significant) to ``qubits`` of an n-qubit state."""
    k = len(qubits)
    psi = state.reshape((2,) * n)
    axes = [n - 1 - q for q in qubits]
    u = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes).reshape(-1)


def zero_state(n: int) -> np.ndarray:
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    return psi


def run_unitary(ops, n: int, state: np.ndarray | None = None) -> np.ndarray:
    """Final state after applying the (non-MEASURE) gates in ``ops``."""
    psi = zero_state(n) if state is None else state
    for inst in ops:
        if inst.name != "MEASURE":
            psi = apply_gate(psi, gate_matrix(inst), inst.qubits, n)
    return psi


def measurements_terminal(ops) -> bool:
    """True when no gate touches a qubit after that qubit has been measured."""
    measured: set[int] = set()
    for inst in ops:
        if inst.name == "MEASURE":
            measured.add(inst.qubits[0])
        elif measured.intersection(inst.qubits):
            return False
    return True


def _render(bits: np.ndarray) -> list[str]:
    """(shots, width) 0/1 array -> list of strings."""
    shots, width = bits.shape
    if width == 0:
        return [""] * shots
    raw = (bits.astype(np.uint8) + ord("0")).tobytes().decode("ascii")
    return [raw[k * width : (k + 1) * width] for k in range(shots)]


def _readout_noise(bits: np.ndarray, readout_error, rng: np.random.Generator) -> np.ndarray:
    if readout_error is None:
        return bits
    p01, p10 = readout_error
    u = rng.random(bits.shape)
    flip = np.where(bits == 0, u < p01, u < p10)
    return bits ^ flip.astype(bits.dtype)


class StatevectorAccelerator(Accelerator):
    """``readout_error=(p01, p10)`` flips each sampled bit 0->1 with p01 and 1->0 with
    p10; it models measurement only and leaves exact mode untouched."""

    def __init__(self, max_qubits: int = MAX_QUBITS, readout_error: tuple[float, float] | None = None,
                 name: str = "sv"):
        if not 1 <= max_qubits <= MAX_QUBITS:
            raise CapacityError(f"statevector capacity must be within 1..{MAX_QUBITS}")
        self.descriptor = AcceleratorDescriptor(name, "gate", max_qubits)
        self.readout_error = readout_error

    def execute(self, buffer: AcceleratorBuffer, function: FunctionNode,
                options: ExecutionOptions | None = None) -> AcceleratorBuffer:
        return execute_gate(buffer, function, options or ExecutionOptions(),
                            readout_error=self.readout_error, max_qubits=self.descriptor.max_qubits)


def _validate(ops, n: int) -> None:
    for inst in ops:
        if inst.name == "QMI":
            raise DialectError("annealing instructions cannot run on a gate-model backend")
        for p in inst.params:
            if p.is_var:
                raise UnboundVariableError(p.value, f"{inst.name}: unbound variable {p.value!r}")
            if not p.is_numeric:
                raise UnsupportedParameterError(f"{inst.name}: {p.kind} parameters are not executable")
        if max(inst.qubits) >= n:
            raise CapacityError(f"{inst.name} touches qubit {max(inst.qubits)} of a {n}-qubit buffer")


def execute_gate(buffer: AcceleratorBuffer, f: FunctionNode, options: ExecutionOptions,
                 readout_error=None, max_qubits: int = MAX_QUBITS) -> AcceleratorBuffer:
    n = buffer.size
    if n > max_qubits:
        raise CapacityError(f"{n} qubits exceeds statevector capacity {max_qubits}")
    ops = f.instructions()
    _validate(ops, n)
    measures = [i for i in ops if i.name == "MEASURE"]
    cbits = sorted({i.cbits[0] for i in measures})
    column = {c: k for k, c in enumerate(cbits)}
    terminal = measurements_terminal(ops)

    if options.mode == "exact":
        if not terminal:
            raise ModeError(f"{f.name}: exact mode needs every MEASURE to be terminal")
        psi = run_unitary(ops, n)
        buffer.exact_expectation = exact_parity(psi, [m.qubits[0] for m in measures], n)
        return buffer

    rng = np.random.default_rng(options.seed)
    shots = options.shots
    bits = np.zeros((shots, len(cbits)), dtype=np.uint8)
    if terminal:
        psi = run_unitary(ops, n)
        probs = np.abs(psi) ** 2
        cdf = np.cumsum(probs)
        idx = np.searchsorted(cdf, rng.random(shots) * cdf[-1], side="right")
        idx = np.minimum(idx, len(probs) - 1)
        for m in measures:
            bits[:, column[m.cbits[0]]] = (idx >> m.qubits[0]) & 1
    else:
        bits = _sample_trajectories(ops, n, shots, column, rng)
    bits = _readout_noise(bits, readout_error, rng)
    buffer.append_measurements(_render(bits))
    return buffer


def _sample_trajectories(ops, n, shots, column, rng) -> np.ndarray:
    """Shot-by-shot simulation with state collapse, for circuits that keep operating on
    measured qubits."""
    first = next(k for k, i in enumerate(ops) if i.name == "MEASURE")
    prefix = run_unitary(ops[:first], n)
    bits = np.zeros((shots, len(column)), dtype=np.uint8)
    idx = np.arange(2**n)
    for s in range(shots):
        psi = prefix.copy()
        for inst in ops[first:]:
            if inst.name != "MEASURE":
                psi = apply_gate(psi, gate_matrix(inst), inst.qubits, n)
                continue
            q = inst.qubits[0]
            one = ((idx >> q) & 1).astype(bool)
            p1 = float(np.sum(np.abs(psi[one]) ** 2))
            outcome = int(rng.random() < p1)
            keep = one if outcome else ~one
            psi = np.where(keep, psi, 0)
            psi /= math.sqrt(p1 if outcome else 1 - p1)
            bits[s, column[inst.cbits[0]]] = outcome
    return bits


def exact_parity(psi: np.ndarray, measured_qubits, n: int) -> float:
    """<Z x ... x Z> over the measured qubits; a qubit measured twice cancels itself."""
    odd = set()
    for q in measured_qubits:
        odd ^= {q}
    idx = np.arange(2**n)
    parity = np.zeros(2**n, dtype=np.int64)
    for q in odd:
        parity ^= (idx >> q) & 1
    probs = np.abs(psi) ** 2
    return float(np.sum(probs * (1 - 2 * parity)) / np.sum(probs))
