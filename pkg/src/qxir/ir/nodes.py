"""Composite instruction trees: parameters, leaves, function nodes, containers."""

from __future__ import annotations

import math
import re
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field, replace
from typing import Union

from qxir.errors import (
    ArityError,
    MalformedTreeError,
    QubitDistinctnessError,
    UnboundVariableError,
    UnknownGateError,
)

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_INT64 = (-(2**63), 2**63 - 1)

GATE_LANGUAGE = "gate-quil"
ANNEAL_LANGUAGE = "anneal-qmi"
LANGUAGES = (GATE_LANGUAGE, ANNEAL_LANGUAGE)


@dataclass(frozen=True)
class InstructionParameter:
    """Tagged variant: int, real, complex, string, or a reference to a kernel formal."""

    kind: str
    value: object

    KINDS = ("int", "real", "complex", "string", "var")

    def __post_init__(self):
        k, v = self.kind, self.value
        if k == "int":
            if isinstance(v, bool) or not isinstance(v, int) or not _INT64[0] <= v <= _INT64[1]:
                raise ValueError(f"int parameter must be a signed 64-bit integer, got {v!r}")
        elif k == "real":
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValueError(f"real parameter must be a number, got {v!r}")
            if not math.isfinite(v):
                raise ValueError(f"real parameter must be finite, got {v!r}")
            object.__setattr__(self, "value", float(v))
        elif k == "complex":
            c = complex(v)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError(f"complex parameter must be finite, got {v!r}")
            object.__setattr__(self, "value", c)
        elif k == "string":
            if not isinstance(v, str):
                raise ValueError(f"string parameter must be text, got {v!r}")
        elif k == "var":
            if not isinstance(v, str) or not IDENT_RE.match(v):
                raise ValueError(f"invalid variable identifier {v!r}")
        else:
            raise ValueError(f"unknown parameter kind {k!r}")

    @classmethod
    def int_(cls, v: int) -> InstructionParameter:
        return cls("int", v)

    @classmethod
    def real(cls, v: float) -> InstructionParameter:
        return cls("real", v)

    @classmethod
    def complex_(cls, v: complex) -> InstructionParameter:
        return cls("complex", v)

    @classmethod
    def string(cls, v: str) -> InstructionParameter:
        return cls("string", v)

    @classmethod
    def var(cls, name: str) -> InstructionParameter:
        return cls("var", name)

    @property
    def is_var(self) -> bool:
        return self.kind == "var"

    @property
    def is_numeric(self) -> bool:
        return self.kind in ("int", "real")

    def __repr__(self) -> str:
        return f"{self.kind}:{self.value!r}"


Param = InstructionParameter


@dataclass(frozen=True)
class GateSignature:
    mnemonic: str
    num_qubits: int
    num_params: int
    distinct_qubits: bool = True


# Closed set; parsers and constructors reject anything else.
SIGNATURES: dict[str, GateSignature] = {
    s.mnemonic: s
    for s in (
        GateSignature("X", 1, 0),
        GateSignature("Y", 1, 0),
        GateSignature("Z", 1, 0),
        GateSignature("H", 1, 0),
        GateSignature("RX", 1, 1),
        GateSignature("RY", 1, 1),
        GateSignature("RZ", 1, 1),
        GateSignature("CNOT", 2, 0),
        GateSignature("CZ", 2, 0),
        GateSignature("MEASURE", 1, 0),
        # annealing coefficient (i, j, weight); i == j is a linear bias
        GateSignature("QMI", 2, 1, distinct_qubits=False),
    )
}
GATE_NAMES = frozenset(n for n in SIGNATURES if n != "QMI")


@dataclass(frozen=True)
class Instruction:
    """A leaf of the IR tree.

    ``cbits`` is non-empty only for MEASURE. Disabled instructions are kept in the
    tree (and in every rendering) but skipped when the tree is executed.
    """

    name: str
    qubits: tuple[int, ...]
    params: tuple[InstructionParameter, ...] = ()
    enabled: bool = True
    cbits: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "cbits", tuple(self.cbits))
        sig = SIGNATURES.get(self.name)
        if sig is None:
            raise UnknownGateError(f"unknown instruction {self.name!r}")
        if len(self.qubits) != sig.num_qubits or len(self.params) != sig.num_params:
            raise ArityError(
                f"{self.name} takes {sig.num_qubits} qubit(s) and {sig.num_params} parameter(s), "
                f"got {len(self.qubits)} and {len(self.params)}"
            )
        for q in self.qubits + self.cbits:
            if isinstance(q, bool) or not isinstance(q, int) or q < 0:
                raise ArityError(f"{self.name}: indices must be non-negative integers, got {q!r}")
        if sig.distinct_qubits and len(set(self.qubits)) != len(self.qubits):
            raise QubitDistinctnessError(f"{self.name}: repeated qubit in {list(self.qubits)}")
        if (self.name == "MEASURE") != bool(self.cbits) or len(self.cbits) > 1:
            raise ArityError(f"{self.name}: MEASURE writes exactly one classical bit, other instructions none")
        for p in self.params:
            if not isinstance(p, InstructionParameter):
                raise TypeError(f"{self.name}: parameters must be InstructionParameter, got {p!r}")

    @property
    def is_leaf(self) -> bool:
        return True

    def with_params(self, params) -> Instruction:
        return replace(self, params=tuple(params))


def qmi(i: int, j: int, weight: float) -> Instruction:
    """Annealing coefficient leaf, normalised so that i <= j."""
    i, j = (i, j) if i <= j else (j, i)
    return Instruction("QMI", (i, j), (InstructionParameter.real(weight),))


def measure(qubit: int, cbit: int) -> Instruction:
    return Instruction("MEASURE", (qubit,), cbits=(cbit,))


def gate(name: str, *qubits: int, params=()) -> Instruction:
    ps = tuple(p if isinstance(p, InstructionParameter) else _coerce_param(p) for p in params)
    return Instruction(name, tuple(qubits), ps)


def _coerce_param(v) -> InstructionParameter:
    if isinstance(v, str):
        return InstructionParameter.var(v)
    if isinstance(v, int) and not isinstance(v, bool):
        return InstructionParameter.int_(v)
    if isinstance(v, complex):
        return InstructionParameter.complex_(v)
    return InstructionParameter.real(v)


@dataclass(eq=True)
class FunctionNode:
    """Composite node. Top-level kernels carry ``formals``; nested kernel calls carry
    ``call=True`` and the call-site ``args`` (expressed in the caller's formals), with
    ``children`` holding the inlined, already-substituted callee body."""

    name: str
    formals: tuple[str, ...] = ()
    children: list[Node] = field(default_factory=list)
    buffer: str | None = "b"
    call: bool = False
    args: tuple[InstructionParameter, ...] = ()

    def __post_init__(self):
        self.formals = tuple(self.formals)
        self.args = tuple(self.args)
        for f in self.formals:
            if not IDENT_RE.match(f):
                raise ValueError(f"invalid formal identifier {f!r}")

    @property
    def is_leaf(self) -> bool:
        return False

    def leaves(self) -> Iterator[Instruction]:
        """Every leaf, disabled ones included, in pre-order."""
        for n in preorder_walk(self):
            if isinstance(n, Instruction):
                yield n

    def instructions(self) -> list[Instruction]:
        """Enabled leaves in execution (pre-order) order."""
        return [i for i in self.leaves() if i.enabled]

    def variables(self) -> set[str]:
        out = set()
        for n in preorder_walk(self):
            ps = n.params if isinstance(n, Instruction) else n.args
            out.update(p.value for p in ps if p.is_var)
        return out

    def nqubits(self) -> int:
        """One past the largest qubit index referenced by an enabled leaf."""
        return max((q + 1 for i in self.instructions() for q in i.qubits), default=0)

    def copy(self) -> FunctionNode:
        return _copy(self)


Node = Union[Instruction, FunctionNode]


@dataclass(eq=True)
class IRContainer:
    functions: list[FunctionNode] = field(default_factory=list)
    language: str = GATE_LANGUAGE

    def __post_init__(self):
        if self.language not in LANGUAGES:
            raise ValueError(f"unknown language tag {self.language!r}")
        seen = set()
        for f in self.functions:
            if f.name in seen:
                raise ValueError(f"duplicate kernel name {f.name!r}")
            seen.add(f.name)

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.functions]

    def get(self, name: str) -> FunctionNode:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def copy(self) -> IRContainer:
        return IRContainer([f.copy() for f in self.functions], self.language)


def preorder_walk(f: FunctionNode) -> list[Node]:
    """Node before children, children left to right.

    Raises MalformedTreeError if a FunctionNode is reachable twice (a cycle or a
    shared subtree).
    """
    out: list[Node] = []
    seen: set[int] = set()
    stack: list[Node] = [f]
    while stack:
        n = stack.pop()
        if isinstance(n, FunctionNode):
            if id(n) in seen:
                raise MalformedTreeError(f"function node {n.name!r} reached twice")
            seen.add(id(n))
            stack.extend(reversed(n.children))
        out.append(n)
    return out


def _copy(n: Node) -> Node:
    if isinstance(n, Instruction):
        return n  # frozen
    return FunctionNode(n.name, n.formals, [_copy(c) for c in n.children], n.buffer, n.call, n.args)


def substitute(n: Node, mapping: Mapping[str, InstructionParameter]) -> Node:
    """Copy of ``n`` with every varref found in ``mapping`` replaced; others kept."""

    def sub(p: InstructionParameter) -> InstructionParameter:
        return mapping.get(p.value, p) if p.is_var else p

    if isinstance(n, Instruction):
        if not any(p.is_var for p in n.params):
            return n
        return n.with_params(sub(p) for p in n.params)
    preorder_walk(n)  # reject malformed trees before recursing
    return FunctionNode(
        n.name,
        n.formals,
        [substitute(c, mapping) for c in n.children],
        n.buffer,
        n.call,
        tuple(sub(p) for p in n.args),
    )


def evaluate_parameters(f: FunctionNode, bindings: Mapping[str, float]) -> FunctionNode:
    """Deep copy of ``f`` with every formal bound to a real value.

    Extra bindings are ignored. A formal (or stray varref) without a binding raises
    UnboundVariableError naming it.
    """
    for name in f.formals:
        if name not in bindings:
            raise UnboundVariableError(name)
    mapping = {k: InstructionParameter.real(float(v)) for k, v in bindings.items()}
    out = substitute(f, mapping)
    leftover = out.variables()
    if leftover:
        raise UnboundVariableError(min(leftover))
    return out
