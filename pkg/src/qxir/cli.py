"""Command line: compile, run, deuteron-scan, factor, serve.

Machine-readable results go to stdout, diagnostics to stderr. Exit codes: 0 success,
1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

from qxir import frontend
from qxir.backends import ExecutionOptions, get_backend
from qxir.demos import deuteron_program, deuteron_scan, factor
from qxir.errors import ParseError, QxirError, UnboundVariableError
from qxir.frontend import KernelSource
from qxir.ir import circuit_graph, dumps, problem_graph, to_assembly
from qxir.ir.nodes import GATE_LANGUAGE, LANGUAGES
from qxir.runtime import Program
from qxir.transforms import TransformationPipeline

log = logging.getLogger("qxir")


def _key_value(text: str) -> tuple[str, str]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    return name, value


def _passes(text: str) -> list[str]:
    try:
        return TransformationPipeline.parse(text).names
    except KeyError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _add_source_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", type=Path)
    p.add_argument("--lang", choices=LANGUAGES, help="source dialect (sniffed when omitted)")
    p.add_argument("--passes", type=_passes, help="comma separated pass names (default pipeline when omitted)")
    p.add_argument("--define", type=_key_value, action="append", default=[], metavar="NAME=VALUE",
                   help="macro definition for $NAME, repeatable")
    p.add_argument("--mitigate-readout", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qxir", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile kernels and print a rendering of the IR")
    _add_source_flags(p)
    p.add_argument("--emit", choices=["asm", "json", "dot"], default="asm")
    p.add_argument("--kernel", help="restrict dot output to one kernel")

    p = sub.add_parser("run", help="execute one kernel and print a buffer summary as JSON")
    _add_source_flags(p)
    p.add_argument("--kernel", required=True)
    p.add_argument("--backend", default="sv")
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--bind", type=_key_value, action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--mode", choices=["sample", "exact"], default="sample")
    p.add_argument("--strategy", choices=["brute", "sa"], default="brute")
    p.add_argument("--num-samples", type=int, default=10)
    p.add_argument("--size", type=int, help="buffer width (default: what the kernels need)")

    p = sub.add_parser("deuteron-scan", help="energy sweep of the deuteron Hamiltonian, CSV")
    p.add_argument("--backend", default="sv")
    p.add_argument("--mode", choices=["sample", "exact"], default="exact")
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--min", type=float, default=-math.pi, dest="lo")
    p.add_argument("--max", type=float, default=math.pi, dest="hi")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, help="CSV path (stdout when omitted)")

    p = sub.add_parser("factor", help="factor an odd composite N <= 255 on an annealing backend")
    p.add_argument("N", type=int)
    p.add_argument("--backend", default="ising")
    p.add_argument("--strategy", choices=["auto", "brute", "sa"], default="auto")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("serve", help="serve a local backend over HTTP")
    p.add_argument("--backend", default="sv")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--workers", type=int, default=8)
    return parser


def _source(args) -> KernelSource:
    try:
        text = args.file.read_text()
    except OSError as e:
        raise QxirError(f"cannot read {args.file}: {e}") from e
    return KernelSource(text, args.lang)


def _compile(args, target=None):
    src = frontend.preprocess(_source(args), dict(args.define))
    ir = frontend.compile(src, target)
    if args.passes is not None:
        ir = TransformationPipeline(args.passes)(ir)
    elif ir.language == GATE_LANGUAGE:
        ir = TransformationPipeline()(ir)
    return ir


def cmd_compile(args) -> int:
    ir = _compile(args)
    if args.mitigate_readout:
        from qxir.transforms import readout_mitigation_preprocess

        ir, _ = readout_mitigation_preprocess(ir, frontend.register_width(ir))
    if args.emit == "asm":
        sys.stdout.write(to_assembly(ir))
    elif args.emit == "json":
        sys.stdout.write(dumps(ir).decode("utf-8") + "\n")
    else:
        graph = circuit_graph if ir.language == GATE_LANGUAGE else problem_graph
        functions = [ir.get(args.kernel)] if args.kernel else ir.functions
        for f in functions:
            sys.stdout.write(graph(f).to_dot(f.name))
    return 0


def cmd_run(args) -> int:
    backend = get_backend(args.backend)
    opts = ExecutionOptions(shots=args.shots, seed=args.seed, mode=args.mode,
                            num_samples=args.num_samples, strategy=args.strategy)
    program = Program(backend, _source(args), defines=dict(args.define), passes=args.passes,
                      mitigate_readout=args.mitigate_readout, options=opts).build()
    kernel = program.get_kernel(args.kernel)
    bindings = dict(args.bind)
    missing = [f for f in kernel.formals if f not in bindings]
    if missing:
        raise UnboundVariableError(missing[0], f"kernel {args.kernel!r}: no --bind for {missing[0]!r}")
    values = []
    for f in kernel.formals:
        try:
            values.append(float(bindings[f]))
        except ValueError:
            raise QxirError(f"--bind {f}: {bindings[f]!r} is not a number") from None
    size = args.size or max(1, frontend.register_width(program.compiled))
    buffer = backend.create_buffer("qreg", size)
    kernel(buffer, *values)
    summary = {
        "kernel": args.kernel,
        "backend": backend.name,
        "mode": args.mode,
        "shots": len(buffer.measurements),
        "counts": buffer.counts(),
        "expectation_z": buffer.expectation_value_z() if buffer.has_data() else None,
        "exact_expectation": buffer.exact_expectation,
        "metadata": buffer.metadata,
    }
    json.dump(summary, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def cmd_deuteron_scan(args) -> int:
    program = deuteron_program(get_backend(args.backend), mode=args.mode, shots=args.shots, seed=args.seed)
    rows = deuteron_scan(program, args.lo, args.hi, args.steps, workers=args.workers)
    out = args.out.open("w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["theta", "energy"])
        for theta, energy in rows:
            w.writerow([repr(theta), repr(energy)])
    finally:
        if args.out:
            out.close()
    best = min(rows, key=lambda r: r[1])
    log.info("minimum energy %.6f at theta %.6f", best[1], best[0])
    return 0


def cmd_factor(args) -> int:
    try:
        result = factor(args.N, get_backend(args.backend), args.strategy, args.seed)
    except ValueError as e:
        raise QxirError(str(e)) from e
    doc = {"N": result.N, "factors": list(result.factors) if result.factors else None,
           "bitstring": result.bitstring, "residual": result.energy, "strategy": result.strategy}
    if result.factors is None:
        doc["message"] = "no nontrivial factors"
    json.dump(doc, sys.stdout)
    sys.stdout.write("\n")
    if result.factors is None:
        log.warning("no nontrivial factors of %d", args.N)
    return 0


def cmd_serve(args) -> int:
    from qxir.remote import serve

    server = serve(args.backend, args.port, args.host, args.workers)
    log.warning("serving %s on %s", args.backend, server.url)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return 0


COMMANDS = {"compile": cmd_compile, "run": cmd_run, "deuteron-scan": cmd_deuteron_scan,
            "factor": cmd_factor, "serve": cmd_serve}


def _location(args, e: QxirError) -> str:
    path = getattr(args, "file", None)
    if isinstance(e, ParseError) and path is not None and e.line is not None:
        return f"{path}:{e.line}:{e.col or 1}: "
    return f"{path}: " if path is not None else ""


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="qxir: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except QxirError as e:
        print(f"{_location(args, e)}error: {e}", file=sys.stderr)
        return 1
    except (KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
