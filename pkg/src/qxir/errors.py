"""Exception hierarchy shared by every qxir component."""

from __future__ import annotations


class QxirError(Exception):
    """Base class. ``stage`` is filled in by ``Program.build`` when a build stage fails."""

    code = "error"
    stage: str | None = None

    def __str__(self) -> str:
        msg = super().__str__()
        return f"[{self.stage}] {msg}" if self.stage else msg


class MalformedTreeError(QxirError):
    code = "malformed-tree"


class UnboundVariableError(QxirError):
    code = "unbound-variable"

    def __init__(self, name: str, message: str | None = None):
        super().__init__(message or f"unbound variable {name!r}")
        self.name = name


class ParseError(QxirError):
    """Syntax-level failure. ``line``/``col`` are 1-based; ``offset`` is a byte offset."""

    code = "parse"

    def __init__(self, message: str, *, line: int | None = None, col: int | None = None,
                 offset: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}" + (f", col {col}" if col is not None else ""))
        if offset is not None:
            where.append(f"byte {offset}")
        super().__init__(f"{message} ({'; '.join(where)})" if where else message)
        self.line = line
        self.col = col
        self.offset = offset


class SchemaVersionError(QxirError):
    code = "schema-version"


class DialectError(QxirError):
    code = "dialect"


class UnknownLanguageError(QxirError):
    code = "unknown-language"


class MacroRecursionError(QxirError):
    code = "macro-recursion"


class UnknownGateError(ParseError):
    code = "unknown-gate"


class ArityError(ParseError):
    code = "arity"


class QubitDistinctnessError(ParseError):
    code = "qubit-distinctness"


class UnresolvedKernelError(ParseError):
    code = "unresolved-kernel"


class DuplicateKernelError(ParseError):
    code = "duplicate-kernel"


class DuplicateCoefficientError(ParseError):
    code = "duplicate-coefficient"


class VariableIndexError(ParseError):
    code = "index"


class CapacityError(QxirError):
    code = "capacity"


class UnsupportedParameterError(QxirError):
    code = "unsupported-parameter"


class ModeError(QxirError):
    code = "mode"


class NoDataError(QxirError):
    code = "no-data"


class CalibrationDegenerateError(QxirError):
    code = "calibration-degenerate"


class KernelLookupError(QxirError):
    code = "lookup"


class StateError(QxirError):
    code = "state"


class TransportError(QxirError):
    """The remote server could not be reached or spoke something other than the protocol."""

    code = "transport"


class RemoteExecutionError(QxirError):
    """The server answered with an error payload; ``code`` is the server's error code."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
