"""On-disk form of an IRContainer: a versioned UTF-8 JSON document."""

from __future__ import annotations

import json
from typing import IO, Any

from qxir.errors import ParseError, QxirError, SchemaVersionError
from qxir.ir.nodes import FunctionNode, Instruction, InstructionParameter, IRContainer, Node

SCHEMA = "qxir/1"


def param_to_json(p: InstructionParameter) -> dict:
    if p.kind == "complex":
        return {"type": "complex", "value": [p.value.real, p.value.imag]}
    return {"type": p.kind, "value": p.value}


def param_from_json(d: Any) -> InstructionParameter:
    kind, value = d["type"], d["value"]
    if kind == "complex":
        re_, im = value
        return InstructionParameter.complex_(complex(float(re_), float(im)))
    if kind == "real":
        # JSON integers like 2 must come back as the real 2.0, never the int variant
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"real parameter needs a number, got {value!r}")
        return InstructionParameter.real(float(value))
    return InstructionParameter(kind, value)


def node_to_json(n: Node) -> dict:
    if isinstance(n, Instruction):
        return {
            "kind": "instruction",
            "name": n.name,
            "qubits": list(n.qubits),
            "params": [param_to_json(p) for p in n.params],
            "cbits": list(n.cbits),
            "enabled": n.enabled,
        }
    return {
        "kind": "function",
        "name": n.name,
        "buffer": n.buffer,
        "formals": list(n.formals),
        "call": n.call,
        "args": [param_to_json(p) for p in n.args],
        "children": [node_to_json(c) for c in n.children],
    }


def node_from_json(d: Any) -> Node:
    kind = d["kind"]
    if kind == "instruction":
        return Instruction(
            d["name"],
            tuple(d["qubits"]),
            tuple(param_from_json(p) for p in d["params"]),
            bool(d["enabled"]),
            tuple(d["cbits"]),
        )
    if kind == "function":
        return FunctionNode(
            d["name"],
            tuple(d["formals"]),
            [node_from_json(c) for c in d["children"]],
            d["buffer"],
            bool(d["call"]),
            tuple(param_from_json(p) for p in d["args"]),
        )
    raise ValueError(f"unknown node kind {kind!r}")


def to_document(ir: IRContainer) -> dict:
    return {
        "schema": SCHEMA,
        "language": ir.language,
        "functions": [node_to_json(f) for f in ir.functions],
    }


def from_document(doc: Any) -> IRContainer:
    if not isinstance(doc, dict):
        raise ParseError("document root must be an object", offset=0)
    version = doc.get("schema")
    if version != SCHEMA:
        raise SchemaVersionError(f"unsupported schema version {version!r}, expected {SCHEMA!r}")
    try:
        functions = [node_from_json(f) for f in doc["functions"]]
        if not all(isinstance(f, FunctionNode) for f in functions):
            raise ValueError("top-level entries must be functions")
        return IRContainer(functions, doc["language"])
    except QxirError as e:
        raise ParseError(f"invalid IR document: {e}") from e
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"invalid IR document: {type(e).__name__}: {e}") from e


def dumps(ir: IRContainer) -> bytes:
    return json.dumps(to_document(ir), indent=1, allow_nan=False).encode("utf-8")


def loads(data: bytes | str) -> IRContainer:
    raw = data if isinstance(data, bytes) else data.encode("utf-8")
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError("document is not UTF-8", offset=e.start) from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e.msg}", line=e.lineno, col=e.colno,
                         offset=len(text[: e.pos].encode("utf-8"))) from e
    return from_document(doc)


def persist(ir: IRContainer, sink: IO[bytes]) -> None:
    sink.write(dumps(ir))


def load(source: IO[bytes]) -> IRContainer:
    return loads(source.read())
