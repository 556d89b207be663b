"""Compiler for the annealing dialect: kernels of ``i j weight;`` coefficient lines.

``i == j`` is a linear bias on variable i, ``i != j`` a coupling; pairs are normalised
so that i <= j and a pair may appear at most once per kernel.
"""

from __future__ import annotations

import math
import re

from qxir._source import split_kernels
from qxir.errors import DuplicateCoefficientError, DuplicateKernelError, ParseError, VariableIndexError
from qxir.ir.assembly import DISABLED_PREFIX
from qxir.ir.nodes import ANNEAL_LANGUAGE, FunctionNode, Instruction, InstructionParameter, IRContainer

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
LINE_RE = re.compile(rf"(?P<i>[-+]?\d+)\s+(?P<j>[-+]?\d+)\s+(?P<w>{_NUM})\s*;\Z")


def parse_qmi_kernels(text: str) -> IRContainer:
    functions: list[FunctionNode] = []
    for block in split_kernels(text, disabled_prefix=DISABLED_PREFIX):
        if any(f.name == block.name for f in functions):
            raise DuplicateKernelError(f"duplicate kernel {block.name!r}", line=block.line, col=block.col)
        if block.formals:
            raise ParseError(f"annealing kernel {block.name!r} takes no parameters",
                             line=block.line, col=block.col)
        seen: dict[tuple[int, int], int] = {}
        children = []
        for sl in block.body:
            line = sl.text
            enabled = not line.startswith(DISABLED_PREFIX)
            if not enabled:
                line = line[len(DISABLED_PREFIX):].strip()
            m = LINE_RE.match(line)
            if m is None:
                raise ParseError(f"expected 'i j weight;', got {line!r}", line=sl.line, col=sl.col)
            i, j, w = int(m["i"]), int(m["j"]), float(m["w"])
            if i < 0 or j < 0:
                raise VariableIndexError(f"negative variable index in {line!r}", line=sl.line, col=sl.col)
            if not math.isfinite(w):
                raise ParseError(f"weight must be finite in {line!r}", line=sl.line, col=sl.col)
            key = (min(i, j), max(i, j))
            if key in seen:
                raise DuplicateCoefficientError(
                    f"coefficient {key} already given on line {seen[key]}", line=sl.line, col=sl.col)
            seen[key] = sl.line
            children.append(Instruction("QMI", key, (InstructionParameter.real(w),), enabled))
        functions.append(FunctionNode(block.name, (), children, block.buffer))
    return IRContainer(functions, ANNEAL_LANGUAGE)


class QmiCompiler:
    language = ANNEAL_LANGUAGE
    model = "anneal"
    extension = ".qmi"

    def compile(self, text: str, target=None) -> IRContainer:
        return parse_qmi_kernels(text)
