"""Compiler for the gate-model kernel dialect (a Quil subset).

Grammar::

    source   := kernel+
    kernel   := '__qpu__' IDENT '(' 'AcceleratorBuffer' IDENT (',' 'double' IDENT)* ')'
                '{' line* '}'
    line     := ['#@'] instr | call
    instr    := 'MEASURE' INT '[' INT ']'
              | GATE ['(' param (',' param)* ')'] INT+
    call     := IDENT '(' IDENT (',' param)* ')'

``#`` starts a comment except in the ``#@`` marker, which keeps a disabled instruction.
A call must name a kernel defined earlier in the same source.
"""

from __future__ import annotations

import re

from qxir._source import KernelBlock, SourceLine, split_kernels
from qxir.errors import (
    ArityError,
    DuplicateKernelError,
    ParseError,
    UnknownGateError,
    UnresolvedKernelError,
)
from qxir.ir.assembly import DISABLED_PREFIX, split_args
from qxir.ir.nodes import (
    GATE_LANGUAGE,
    GATE_NAMES,
    FunctionNode,
    Instruction,
    IRContainer,
    substitute,
)

_MEASURE_RE = re.compile(r"MEASURE\s+(\d+)\s*\[\s*(\d+)\s*\]\Z")
_NAME_RE = re.compile(r"[A-Za-z_]\w*")
_QUBITS_RE = re.compile(r"(?:\d+\s*)*\Z")


def _split_call(text: str, sl: SourceLine) -> tuple[str, str | None, str]:
    """Split ``NAME(args) rest`` respecting nested parentheses and strings."""
    m = _NAME_RE.match(text)
    if m is None:
        raise ParseError(f"expected an instruction, got {text!r}", line=sl.line, col=sl.col)
    name, pos = m.group(), m.end()
    while pos < len(text) and text[pos].isspace():
        pos += 1
    if pos >= len(text) or text[pos] != "(":
        return name, None, text[pos:].strip()
    depth, k, in_str = 0, pos, False
    while k < len(text):
        ch = text[k]
        if in_str:
            if ch == "\\":
                k += 1
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return name, text[pos + 1 : k], text[k + 1 :].strip()
        k += 1
    raise ParseError(f"unbalanced parentheses in {text!r}", line=sl.line, col=sl.col)


def _relocate(e: ParseError, sl: SourceLine) -> ParseError:
    return type(e)(e.args[0], line=sl.line, col=sl.col)


def _check_vars(params, block: KernelBlock, sl: SourceLine) -> None:
    for p in params:
        if p.is_var and p.value not in block.formals:
            raise ParseError(f"{p.value!r} is not a formal of kernel {block.name!r}",
                             line=sl.line, col=sl.col)


def _parse_instruction(text: str, enabled: bool, block: KernelBlock, sl: SourceLine) -> Instruction:
    m = _MEASURE_RE.match(text)
    try:
        if m:
            return Instruction("MEASURE", (int(m[1]),), enabled=enabled, cbits=(int(m[2]),))
        name, args, rest = _split_call(text, sl)
        if name not in GATE_NAMES or name == "MEASURE":
            raise UnknownGateError(f"unknown gate {name!r}")
        if not _QUBITS_RE.match(rest):
            raise ParseError(f"bad qubit list {rest!r}")
        try:
            params = split_args(args or "")
        except ValueError as e:
            raise ParseError(str(e)) from None
        if args is not None and not params:
            raise ArityError(f"{name}: empty parameter list")
        _check_vars(params, block, sl)
        return Instruction(name, tuple(int(q) for q in rest.split()), tuple(params), enabled)
    except ParseError as e:
        if e.line is None:
            raise _relocate(e, sl) from None
        raise


def _parse_call(name: str, args: str, block: KernelBlock, sl: SourceLine,
                defined: dict[str, FunctionNode], all_names: set[str]) -> FunctionNode:
    callee = defined.get(name)
    if callee is None:
        why = "defined later (forward references are not allowed)" if name in all_names else "undefined"
        raise UnresolvedKernelError(f"call to {why} kernel {name!r}", line=sl.line, col=sl.col)
    head, sep, tail = args.partition(",")
    if head.strip() != block.buffer:
        raise ParseError(f"first argument of {name!r} must be the buffer {block.buffer!r}",
                         line=sl.line, col=sl.col)
    try:
        if sep and not tail.strip():
            raise ValueError(f"trailing comma in call to {name!r}")
        actuals = split_args(tail)
    except ValueError as e:
        raise ParseError(str(e), line=sl.line, col=sl.col) from None
    if len(actuals) != len(callee.formals):
        raise ArityError(f"{name} takes {len(callee.formals)} argument(s), got {len(actuals)}",
                         line=sl.line, col=sl.col)
    _check_vars(actuals, block, sl)
    body = substitute(callee, dict(zip(callee.formals, actuals)))
    return FunctionNode(name, (), body.children, block.buffer, call=True, args=tuple(actuals))


def parse_gate_kernels(text: str) -> IRContainer:
    blocks = split_kernels(text, disabled_prefix=DISABLED_PREFIX)
    all_names = {b.name for b in blocks}
    defined: dict[str, FunctionNode] = {}
    functions = []
    for block in blocks:
        if block.name in defined:
            raise DuplicateKernelError(f"duplicate kernel {block.name!r}", line=block.line, col=block.col)
        if block.buffer is None:
            raise ParseError(f"kernel {block.name!r} must take an AcceleratorBuffer first",
                             line=block.line, col=block.col)
        children = []
        for sl in block.body:
            text = sl.text
            enabled = not text.startswith(DISABLED_PREFIX)
            if not enabled:
                text = text[len(DISABLED_PREFIX):].strip()
                children.append(_parse_instruction(text, False, block, sl))
                continue
            if _MEASURE_RE.match(text):
                children.append(_parse_instruction(text, True, block, sl))
                continue
            name, args, rest = _split_call(text, sl)
            if name not in GATE_NAMES and args is not None and not rest:
                children.append(_parse_call(name, args, block, sl, defined, all_names))
            else:
                children.append(_parse_instruction(text, True, block, sl))
        f = FunctionNode(block.name, tuple(block.formals), children, block.buffer)
        defined[block.name] = f
        functions.append(f)
    return IRContainer(functions, GATE_LANGUAGE)


class GateCompiler:
    language = GATE_LANGUAGE
    model = "gate"
    extension = ".qk"

    def compile(self, text: str, target=None) -> IRContainer:
        return parse_gate_kernels(text)


__all__ = ["GateCompiler", "parse_gate_kernels"]
