"""Graph views of a compiled function: circuit wires and annealing problem graphs."""

from __future__ import annotations

from dataclasses import dataclass, field

from qxir.errors import DialectError
from qxir.ir.assembly import render_instruction
from qxir.ir.nodes import FunctionNode

SOURCE = "source"
SINK = "sink"


@dataclass
class CircuitGraph:
    """Node 0 is the source boundary, the last node the sink; nodes in between are the
    enabled instructions in execution order. Edge ``(a, b, q)``: b is the next
    operation on qubit q after a."""

    nodes: list[str] = field(default_factory=list)
    edges: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return len(self.nodes) - 1

    def wire(self, qubit: int) -> list[int]:
        """Node ids visited by ``qubit`` from source to sink."""
        nxt = {a: b for a, b, q in self.edges if q == qubit}
        if self.source not in nxt:
            return []
        path = [self.source]
        while path[-1] in nxt:
            path.append(nxt[path[-1]])
        return path

    def to_dot(self, name: str = "circuit") -> str:
        lines = [f'digraph "{name}" {{', "  rankdir=LR;"]
        for k, label in enumerate(self.nodes):
            shape = "point" if k in (self.source, self.sink) else "box"
            lines.append(f'  n{k} [label="{label}", shape={shape}];')
        for a, b, q in self.edges:
            lines.append(f'  n{a} -> n{b} [label="q{q}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass
class ProblemGraph:
    """Variable biases on nodes, couplings on unordered pairs (stored with i < j)."""

    biases: dict[int, float] = field(default_factory=dict)
    couplings: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def num_variables(self) -> int:
        return max(self.biases, default=-1) + 1

    def to_dot(self, name: str = "problem") -> str:
        lines = [f'graph "{name}" {{']
        for v in sorted(self.biases):
            lines.append(f'  v{v} [label="{v}: {self.biases[v]!r}"];')
        for (i, j), w in sorted(self.couplings.items()):
            lines.append(f'  v{i} -- v{j} [label="{w!r}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def circuit_graph(f: FunctionNode) -> CircuitGraph:
    ops = f.instructions()
    if any(i.name == "QMI" for i in ops):
        raise DialectError(f"{f.name}: circuit graph requested for an annealing kernel")
    g = CircuitGraph(nodes=[SOURCE] + [render_instruction(i) for i in ops] + [SINK])
    last: dict[int, int] = {}
    for k, inst in enumerate(ops, start=1):
        for q in inst.qubits:
            g.edges.append((last.get(q, 0), k, q))
            last[q] = k
    for q in sorted(last):
        g.edges.append((last[q], g.sink, q))
    return g


def problem_graph(f: FunctionNode) -> ProblemGraph:
    g = ProblemGraph()
    for inst in f.instructions():
        if inst.name != "QMI":
            raise DialectError(f"{f.name}: problem graph requested for a gate kernel")
        i, j = sorted(inst.qubits)
        w = float(inst.params[0].value)
        g.biases.setdefault(i, 0.0)
        g.biases.setdefault(j, 0.0)
        if i == j:
            g.biases[i] += w
        else:
            g.couplings[(i, j)] = g.couplings.get((i, j), 0.0) + w
    return g


def to_graph(f: FunctionNode, kind: str) -> CircuitGraph | ProblemGraph:
    if kind == "circuit":
        return circuit_graph(f)
    if kind == "problem":
        return problem_graph(f)
    raise ValueError(f"graph kind must be 'circuit' or 'problem', got {kind!r}")

