"""Assembly-like text rendering of IR, plus the parameter-literal grammar shared with
the dialect parsers.

Parameter literals::

    int      -?[0-9]+
    real     any float literal containing '.', 'e' or 'E'
    complex  complex(<real>, <real>)
    string   a JSON string literal
    varref   identifier
"""

from __future__ import annotations

import json
import re

from qxir.ir.nodes import (
    FunctionNode,
    Instruction,
    InstructionParameter,
    IRContainer,
    Node,
    substitute,
)

DISABLED_PREFIX = "#@"
INDENT = "    "

_NUM = r"[-+]?(?:\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)"
_ARG_TOKEN = re.compile(
    rf"""\s*(?:
        (?P<complex>complex\(\s*(?P<re>{_NUM})\s*,\s*(?P<im>{_NUM})\s*\))
      | (?P<string>"(?:[^"\\]|\\.)*")
      | (?P<num>{_NUM})
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    )\s*(?P<sep>,|\Z)""",
    re.VERBOSE,
)
_INT_RE = re.compile(r"[-+]?\d+\Z")


def parse_param(token: str) -> InstructionParameter:
    """Parse a single parameter literal; raises ValueError when it is not one."""
    args = split_args(token)
    if len(args) != 1:
        raise ValueError(f"expected one parameter, got {token!r}")
    return args[0]


def split_args(text: str) -> list[InstructionParameter]:
    """Parse a comma separated parameter list (possibly empty)."""
    if not text.strip():
        return []
    out, pos = [], 0
    while pos < len(text):
        m = _ARG_TOKEN.match(text, pos)
        if m is None:
            raise ValueError(f"bad parameter list {text!r} at column {pos + 1}")
        if m["complex"]:
            out.append(InstructionParameter.complex_(complex(float(m["re"]), float(m["im"]))))
        elif m["string"]:
            out.append(InstructionParameter.string(json.loads(m["string"])))
        elif m["num"]:
            tok = m["num"]
            if _INT_RE.match(tok):
                out.append(InstructionParameter.int_(int(tok)))
            else:
                out.append(InstructionParameter.real(float(tok)))
        else:
            out.append(InstructionParameter.var(m["ident"]))
        pos = m.end()
        if m["sep"] == "," and pos >= len(text):
            raise ValueError(f"trailing comma in {text!r}")
    return out


def render_param(p: InstructionParameter) -> str:
    if p.kind == "int":
        return str(p.value)
    if p.kind == "real":
        return repr(p.value)
    if p.kind == "complex":
        return f"complex({p.value.real!r},{p.value.imag!r})"
    if p.kind == "string":
        return json.dumps(p.value)
    return p.value


def render_instruction(i: Instruction) -> str:
    if i.name == "QMI":
        text = f"{i.qubits[0]} {i.qubits[1]} {render_param(i.params[0])};"
    elif i.name == "MEASURE":
        text = f"MEASURE {i.qubits[0]} [{i.cbits[0]}]"
    else:
        ps = f"({', '.join(render_param(p) for p in i.params)})" if i.params else ""
        text = f"{i.name}{ps} {' '.join(map(str, i.qubits))}"
    return text if i.enabled else f"{DISABLED_PREFIX} {text}"


def render_header(f: FunctionNode) -> str:
    formals = []
    if f.buffer is not None:
        formals.append(f"AcceleratorBuffer {f.buffer}")
    formals.extend(f"double {v}" for v in f.formals)
    return f"__qpu__ {f.name}({', '.join(formals)}) {{"


def _call_matches_callee(call: FunctionNode, callee: FunctionNode | None) -> bool:
    if callee is None or len(callee.formals) != len(call.args):
        return False
    expected = substitute(callee, dict(zip(callee.formals, call.args)))
    return expected.children == call.children


def _render_body(n: Node, buffer: str, defined: dict[str, FunctionNode], lines: list[str]) -> None:
    if isinstance(n, Instruction):
        lines.append(INDENT + render_instruction(n))
        return
    for c in n.children:
        if isinstance(c, FunctionNode) and c.call and _call_matches_callee(c, defined.get(c.name)):
            args = [buffer] + [render_param(p) for p in c.args]
            lines.append(f"{INDENT}{c.name}({','.join(args)})")
        else:
            # transformed call bodies no longer match their callee: spell them out
            _render_body(c, buffer, defined, lines)


def to_assembly(ir: IRContainer) -> str:
    """Deterministic source text that the dialect compiler for ``ir.language`` re-parses
    into an equivalent container."""
    lines: list[str] = []
    defined: dict[str, FunctionNode] = {}
    for f in ir.functions:
        lines.append(render_header(f))
        _render_body(f, f.buffer or "b", defined, lines)
        lines.append("}")
        defined[f.name] = f
    return "\n".join(lines) + ("\n" if lines else "")
