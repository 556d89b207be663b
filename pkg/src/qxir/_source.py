"""Splitting raw source into ``__qpu__`` kernel blocks with line/column bookkeeping."""

from __future__ import annotations

import re
from dataclasses import dataclass

from qxir.errors import ParseError

KERNEL_RE = re.compile(r"__qpu__\s+(?P<name>[A-Za-z_]\w*)\s*\((?P<formals>[^)]*)\)\s*\{(?P<body>[^}]*)\}")
_FORMAL_RE = re.compile(r"\s*(?P<type>[A-Za-z_]\w*)\s+(?P<name>[A-Za-z_]\w*)\s*\Z")


@dataclass
class SourceLine:
    line: int  # 1-based
    col: int  # 1-based column of the first non-blank character
    text: str  # stripped, comment removed unless it is a disabled-instruction marker


@dataclass
class KernelBlock:
    name: str
    buffer: str | None
    formals: list[str]
    line: int
    col: int
    body: list[SourceLine]


def line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _strip_comments(text: str) -> str:
    return "\n".join(ln.split("#", 1)[0] for ln in text.split("\n"))


def split_kernels(text: str, *, disabled_prefix: str = "#@") -> list[KernelBlock]:
    blocks = []
    pos = 0
    for m in KERNEL_RE.finditer(text):
        gap = _strip_comments(text[pos : m.start()])
        if gap.strip():
            off = pos + len(gap) - len(gap.lstrip())
            raise ParseError("unexpected text outside a __qpu__ kernel", **at(text, off))
        pos = m.end()
        line, col = line_col(text, m.start())
        buffer, formals = _parse_formals(m["formals"], text, m.start("formals"))
        body_start = m.start("body")
        first_line, _ = line_col(text, body_start)
        body = []
        for k, raw in enumerate(m["body"].split("\n")):
            ln = first_line + k
            stripped = raw.strip()
            if stripped.startswith(disabled_prefix):
                content = stripped
            else:
                content = raw.split("#", 1)[0].strip()
            if not content:
                continue
            c = len(raw) - len(raw.lstrip()) + 1
            if k == 0:
                c += line_col(text, body_start)[1] - 1
            body.append(SourceLine(ln, c, content))
        blocks.append(KernelBlock(m["name"], buffer, formals, line, col, body))
    tail = _strip_comments(text[pos:])
    if tail.strip():
        off = pos + len(tail) - len(tail.lstrip())
        raise ParseError("unexpected text outside a __qpu__ kernel", **at(text, off))
    if not blocks:
        raise ParseError("no __qpu__ kernel found", line=1, col=1)
    return blocks


def at(text: str, pos: int) -> dict:
    line, col = line_col(text, pos)
    return {"line": line, "col": col}


def _parse_formals(src: str, text: str, offset: int) -> tuple[str | None, list[str]]:
    buffer, formals = None, []
    if not src.strip():
        return buffer, formals
    for k, item in enumerate(src.split(",")):
        m = _FORMAL_RE.match(item)
        if m is None:
            raise ParseError(f"bad kernel formal {item.strip()!r}", **at(text, offset))
        if m["type"] == "AcceleratorBuffer":
            if k != 0:
                raise ParseError("AcceleratorBuffer must be the first formal", **at(text, offset))
            buffer = m["name"]
        elif m["type"] == "double":
            formals.append(m["name"])
        else:
            raise ParseError(f"unsupported formal type {m['type']!r}", **at(text, offset))
    names = formals + ([buffer] if buffer else [])
    if len(set(names)) != len(names):
        raise ParseError("repeated formal name", **at(text, offset))
    return buffer, formals
