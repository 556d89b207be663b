"""Compiler and preprocessor registries and the ``compile`` entry point."""

from __future__ import annotations

import re
from collections.abc import Callable, Mapping
from dataclasses import dataclass, replace

from qxir._source import KERNEL_RE
from qxir.errors import CapacityError, MacroRecursionError, UnknownLanguageError
from qxir.gate_lang import GateCompiler
from qxir.ir.nodes import ANNEAL_LANGUAGE, GATE_LANGUAGE, IRContainer
from qxir.qmi_lang import QmiCompiler

MAX_MACRO_DEPTH = 32
_MACRO_RE = re.compile(r"\$([A-Za-z_]\w*)")
_QMI_LINE_RE = re.compile(r"^\s*-?\d+\s+-?\d+\s+-?\d+(\.\d+)?;", re.MULTILINE)


@dataclass(frozen=True)
class KernelSource:
    text: str
    language: str | None = None

    def __post_init__(self):
        if "__qpu__" not in self.text:
            raise ValueError("kernel source must contain at least one __qpu__ kernel")

    def resolved_language(self) -> str:
        return self.language or sniff_language(self.text)


def sniff_language(text: str) -> str:
    """Annealing if any kernel body line looks like ``i j w;``, gate-model otherwise."""
    for m in KERNEL_RE.finditer(text):
        if _QMI_LINE_RE.search(m["body"]):
            return ANNEAL_LANGUAGE
    return GATE_LANGUAGE


def _expand(text: str, defines: Mapping[str, str], depth: int) -> str:
    def one(m: re.Match) -> str:
        name = m[1]
        if name not in defines:
            return m[0]
        if depth >= MAX_MACRO_DEPTH:
            raise MacroRecursionError(f"macro ${name} still expanding after {MAX_MACRO_DEPTH} levels")
        return _expand(defines[name], defines, depth + 1)

    return _MACRO_RE.sub(one, text)


def macro_preprocessor(src: KernelSource, defines: Mapping[str, str]) -> KernelSource:
    """Replace ``$name`` inside kernel bodies with its definition, recursively."""
    if not defines:
        return src
    text = src.text
    out, pos = [], 0
    for m in KERNEL_RE.finditer(text):
        out.append(text[pos : m.start("body")])
        out.append(_expand(m["body"], defines, 0))
        pos = m.end("body")
    out.append(text[pos:])
    return replace(src, text="".join(out))


Preprocessor = Callable[[KernelSource, Mapping[str, str]], KernelSource]


class CompilerRegistry:
    """Dialect tag -> compiler, name -> preprocessor. Built once, read-only afterwards."""

    def __init__(self):
        self.compilers: dict = {}
        self.preprocessors: dict[str, Preprocessor] = {}

    def add_compiler(self, compiler) -> None:
        if compiler.language in self.compilers:
            raise ValueError(f"compiler for {compiler.language!r} already registered")
        self.compilers[compiler.language] = compiler

    def add_preprocessor(self, name: str, fn: Preprocessor) -> None:
        if name in self.preprocessors:
            raise ValueError(f"preprocessor {name!r} already registered")
        self.preprocessors[name] = fn

    def compiler(self, language: str):
        try:
            return self.compilers[language]
        except KeyError:
            raise UnknownLanguageError(
                f"no compiler for language {language!r} (available: {', '.join(sorted(self.compilers))})"
            ) from None

    def preprocessor(self, name: str) -> Preprocessor:
        try:
            return self.preprocessors[name]
        except KeyError:
            raise KeyError(f"no preprocessor named {name!r}") from None


def _default_registry() -> CompilerRegistry:
    reg = CompilerRegistry()
    reg.add_compiler(GateCompiler())
    reg.add_compiler(QmiCompiler())
    reg.add_preprocessor("macro", macro_preprocessor)
    return reg


REGISTRY = _default_registry()


def preprocess(src: KernelSource, defines: Mapping[str, str] | None = None) -> KernelSource:
    return REGISTRY.preprocessor("macro")(src, defines or {})


def register_width(ir: IRContainer) -> int:
    """Qubits (or annealing variables) needed to hold every kernel in ``ir``."""
    return max((f.nqubits() for f in ir.functions), default=0)


def compile(src: KernelSource, target=None) -> IRContainer:  # noqa: A001
    """Compile kernel source to IR; ``target`` (an AcceleratorDescriptor) bounds the register."""
    language = src.resolved_language()
    ir = REGISTRY.compiler(language).compile(src.text, target)
    if target is not None and register_width(ir) > target.max_qubits:
        raise CapacityError(
            f"kernels need {register_width(ir)} qubits but {target.name!r} offers {target.max_qubits}"
        )
    return ir
