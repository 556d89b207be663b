"""IR rewrites: semantics-preserving passes, and the readout-mitigation preprocessor
with its result postprocessor."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from qxir.backends.buffer import bit_matrix
from qxir.errors import CalibrationDegenerateError, DialectError
from qxir.ir.nodes import (
    GATE_LANGUAGE,
    FunctionNode,
    Instruction,
    InstructionParameter,
    IRContainer,
    measure,
)

SELF_INVERSE = frozenset({"X", "Y", "Z", "H", "CNOT", "CZ"})
ROTATIONS = frozenset({"RX", "RY", "RZ"})
ANGLE_TOL = 1e-12


class _Leaves:
    """Editable view of a function's enabled leaves in execution order. Edits are
    applied back onto the tree by ``commit`` so the call structure survives."""

    def __init__(self, f: FunctionNode):
        self.f = f
        self.slots: list[tuple[FunctionNode, int]] = []
        self._collect(f)
        self.ops: list[Instruction | None] = [p.children[i] for p, i in self.slots]

    def _collect(self, node: FunctionNode) -> None:
        for k, c in enumerate(node.children):
            if isinstance(c, FunctionNode):
                self._collect(c)
            elif c.enabled:
                self.slots.append((node, k))

    def next_on(self, k: int, qubits) -> int | None:
        qs = set(qubits)
        for m in range(k + 1, len(self.ops)):
            op = self.ops[m]
            if op is not None and qs.intersection(op.qubits):
                return m
        return None

    def commit(self) -> None:
        dead: dict[int, set[int]] = {}
        for (parent, i), op in zip(self.slots, self.ops):
            if op is None:
                dead.setdefault(id(parent), set()).add(i)
            else:
                parent.children[i] = op
        self._prune(self.f, dead)

    def _prune(self, node: FunctionNode, dead: dict[int, set[int]]) -> None:
        gone = dead.get(id(node), set())
        node.children = [c for k, c in enumerate(node.children) if k not in gone]
        for c in node.children:
            if isinstance(c, FunctionNode):
                self._prune(c, dead)


def _cancel_once(leaves: _Leaves) -> bool:
    changed = False
    ops = leaves.ops
    for k, op in enumerate(ops):
        if op is None or op.name not in SELF_INVERSE:
            continue
        m = leaves.next_on(k, op.qubits)
        if m is not None and ops[m].name == op.name and ops[m].qubits == op.qubits:
            ops[k] = ops[m] = None
            changed = True
    return changed


def _merge_once(leaves: _Leaves) -> bool:
    changed = False
    ops = leaves.ops
    for k in range(len(ops)):
        op = ops[k]
        while op is not None and op.name in ROTATIONS and op.params[0].is_numeric:
            m = leaves.next_on(k, op.qubits)
            if m is None:
                break
            nxt = ops[m]
            if nxt.name != op.name or nxt.qubits != op.qubits or not nxt.params[0].is_numeric:
                break
            angle = float(op.params[0].value) + float(nxt.params[0].value)
            ops[m] = None
            changed = True
            if abs(math.remainder(angle, 2 * math.pi)) <= ANGLE_TOL:
                ops[k] = op = None
            else:
                ops[k] = op = op.with_params([InstructionParameter.real(angle)])
    return changed


def _fixpoint(ir: IRContainer, step: Callable[[_Leaves], bool]) -> IRContainer:
    if ir.language != GATE_LANGUAGE:
        raise DialectError("gate-level passes need a gate-model container")
    out = ir.copy()
    for f in out.functions:
        while True:
            leaves = _Leaves(f)
            if not step(leaves):
                break
            leaves.commit()
    return out


def cancel_inverse_pairs(ir: IRContainer) -> IRContainer:
    """Drop adjacent identical self-inverse gates (nothing in between on their qubits)."""
    return _fixpoint(ir, _cancel_once)


def merge_rotations(ir: IRContainer) -> IRContainer:
    """Fuse adjacent same-axis literal rotations on one qubit; drop fusions that are
    0 mod 2*pi."""
    return _fixpoint(ir, _merge_once)


PASSES: dict[str, Callable[[IRContainer], IRContainer]] = {
    "cancel-inverse-pairs": cancel_inverse_pairs,
    "merge-rotations": merge_rotations,
}
DEFAULT_PASSES = ("cancel-inverse-pairs", "merge-rotations")


@dataclass
class TransformationPipeline:
    names: list[str] = field(default_factory=lambda: list(DEFAULT_PASSES))

    def __post_init__(self):
        unknown = [n for n in self.names if n not in PASSES]
        if unknown:
            raise KeyError(f"unknown pass(es) {unknown}; available: {sorted(PASSES)}")

    @classmethod
    def parse(cls, spec: str) -> TransformationPipeline:
        return cls([s.strip() for s in spec.split(",") if s.strip()])

    def __call__(self, ir: IRContainer) -> IRContainer:
        for name in self.names:
            out = PASSES[name](ir)
            assert out.names == ir.names, f"pass {name} renamed kernels"
            ir = out
        return ir


# ---------------------------------------------------------------- readout mitigation


@dataclass(frozen=True)
class MitigationRequest:
    """Which calibration kernels were appended: ``(kernel name, qubit, prepared bit)``."""

    kernels: tuple[tuple[str, int, int], ...] = ()

    @property
    def names(self) -> list[str]:
        return [k[0] for k in self.kernels]

    @property
    def qubits(self) -> list[int]:
        return sorted({k[1] for k in self.kernels})


def calibration_kernel_name(qubit: int, prepared: int) -> str:
    return f"cal_q{qubit}_{prepared}"


def readout_mitigation_preprocess(ir: IRContainer, nqubits: int) -> tuple[IRContainer, MitigationRequest]:
    """Append one ``|0>`` and one ``|1>`` measurement kernel per qubit."""
    if ir.language != GATE_LANGUAGE:
        raise DialectError("readout mitigation applies to gate-model kernels")
    out = ir.copy()
    entries = []
    for q in range(nqubits):
        for prepared in (0, 1):
            name = calibration_kernel_name(q, prepared)
            body = ([Instruction("X", (q,))] if prepared else []) + [measure(q, 0)]
            out.functions.append(FunctionNode(name, (), body, "b"))
            entries.append((name, q, prepared))
    # re-run container validation (name clashes with user kernels)
    return IRContainer(out.functions, out.language), MitigationRequest(tuple(entries))


@dataclass(frozen=True)
class MitigationCalibration:
    """``matrices[q][m, t]`` = P(measure m | prepared t)."""

    matrices: dict[int, np.ndarray]
    shots: int

    def __post_init__(self):
        for q, a in self.matrices.items():
            a = np.asarray(a, dtype=float)
            if a.shape != (2, 2) or (a < 0).any() or (a > 1).any():
                raise ValueError(f"qubit {q}: assignment matrix must be 2x2 with entries in [0, 1]")
            if not np.allclose(a.sum(axis=0), 1.0, atol=1e-9):
                raise ValueError(f"qubit {q}: assignment matrix columns must sum to 1")

    @property
    def qubits(self) -> list[int]:
        return sorted(self.matrices)

    @classmethod
    def from_marginals(cls, ones_given_0: dict[int, float], zeros_given_1: dict[int, float],
                       shots: int) -> MitigationCalibration:
        mats = {}
        for q in ones_given_0:
            e0, e1 = ones_given_0[q], zeros_given_1[q]
            mats[q] = np.array([[1 - e0, e1], [e0, 1 - e1]])
        return cls(mats, shots)

    def inverse(self, qubit: int) -> np.ndarray:
        a = self.matrices[qubit]
        if abs(np.linalg.det(a)) <= 1e-6:
            raise CalibrationDegenerateError(f"assignment matrix of qubit {qubit} is singular")
        return np.linalg.inv(a)


def _clip_renormalise(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, 1.0)
    s = p.sum()
    return p / s if s > 0 else np.full_like(p, 1.0 / p.size)


def correct_distribution(p_obs: Sequence[float], calibration: MitigationCalibration, qubit: int) -> np.ndarray:
    return _clip_renormalise(calibration.inverse(qubit) @ np.asarray(p_obs, dtype=float))


def correct_expectation(p_obs: Sequence[float], calibration: MitigationCalibration, qubit: int) -> float:
    """Mitigated <Z_q> from the observed (p0, p1) of that qubit."""
    p = correct_distribution(p_obs, calibration, qubit)
    return float(p[0] - p[1])


def corrected_parity(strings: Sequence[str], qubits: Sequence[int], calibration: MitigationCalibration) -> float:
    """Mitigated joint-parity <Z...Z>; ``qubits[k]`` is the qubit behind bit position k.

    Applies the tensor product of per-qubit inverses to the observed joint distribution.
    """
    bits = bit_matrix(strings)
    m = bits.shape[1]
    index = bits.astype(np.int64) @ (1 << np.arange(m - 1, -1, -1)) if m else np.zeros(len(strings), int)
    p = np.bincount(index, minlength=2**m).astype(float) / len(strings)
    p = p.reshape((2,) * m) if m else p
    for axis, q in enumerate(qubits):
        p = np.moveaxis(np.tensordot(calibration.inverse(q), p, axes=([1], [axis])), 0, axis)
    p = _clip_renormalise(p.reshape(-1))
    parity = np.array([bin(k).count("1") % 2 for k in range(2**m)])
    return float(np.sum(p * (1 - 2 * parity)))
