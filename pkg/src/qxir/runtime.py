"""``Program``: preprocess, compile, transform and hand out executable kernels."""

from __future__ import annotations

import dataclasses
from collections.abc import Mapping, Sequence

from qxir import frontend
from qxir.backends.base import Accelerator, ExecutionOptions
from qxir.backends.buffer import MITIGATED_KEY, AcceleratorBuffer
from qxir.errors import ArityError, DialectError, KernelLookupError, QxirError, StateError
from qxir.frontend import KernelSource
from qxir.ir.nodes import GATE_LANGUAGE, FunctionNode, IRContainer, evaluate_parameters
from qxir.transforms import (
    PASSES,
    MitigationCalibration,
    TransformationPipeline,
    corrected_parity,
    readout_mitigation_preprocess,
)

MODEL_OF_LANGUAGE = {"gate-quil": "gate", "anneal-qmi": "anneal"}


class _Stage:
    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if isinstance(exc, QxirError) and exc.stage is None:
            exc.stage = self.name
        return False


class KernelFunctor:
    """Callable as ``kernel(buffer, *args)``; binds args to the kernel formals, runs on
    the program's accelerator and applies readout correction when calibrated."""

    def __init__(self, function: FunctionNode, program: Program, options: ExecutionOptions):
        self.function = function
        self.program = program
        self.options = options

    @property
    def name(self) -> str:
        return self.function.name

    @property
    def formals(self) -> tuple[str, ...]:
        return self.function.formals

    def with_options(self, **changes) -> KernelFunctor:
        return KernelFunctor(self.function, self.program, dataclasses.replace(self.options, **changes))

    def __call__(self, buffer: AcceleratorBuffer, *args: float) -> AcceleratorBuffer:
        if len(args) != len(self.formals):
            raise ArityError(f"kernel {self.name!r} takes {len(self.formals)} argument(s) "
                             f"{list(self.formals)}, got {len(args)}")
        bound = evaluate_parameters(self.function, dict(zip(self.formals, args)))
        before = len(buffer.measurements)
        self.program.accelerator.execute(buffer, bound, self.options)
        cal = self.program.calibration
        if cal is not None and self.options.mode == "sample":
            _mitigate(buffer, bound, before, cal)
        return buffer

    def __repr__(self) -> str:
        return f"KernelFunctor({self.name}({', '.join(self.formals)}))"


def _mitigate(buffer: AcceleratorBuffer, f: FunctionNode, before: int, cal: MitigationCalibration) -> None:
    writer: dict[int, int] = {}
    for inst in f.instructions():
        if inst.name == "MEASURE":
            writer[inst.cbits[0]] = inst.qubits[0]
    qubits = [writer[c] for c in sorted(writer)]
    buffer.metadata[MITIGATED_KEY] = corrected_parity(buffer.measurements[before:], qubits, cal)


class Program:
    """Kernel source bound to an accelerator.

    ``passes=None`` runs the default pipeline on gate-model source; pass ``[]`` to skip
    it. With ``mitigate_readout`` the calibration kernels run during ``build`` and are
    never exposed through ``get_kernel``/``get_kernels``.
    """

    def __init__(self, accelerator: Accelerator, source: str | KernelSource, language: str | None = None,
                 *, defines: Mapping[str, str] | None = None, passes: Sequence[str] | None = None,
                 mitigate_readout: bool = False, calibration_shots: int = 100_000,
                 options: ExecutionOptions | None = None):
        self.accelerator = accelerator
        self.source = source if isinstance(source, KernelSource) else KernelSource(source, language)
        self.defines = dict(defines or {})
        self.passes = passes
        self.mitigate_readout = mitigate_readout
        self.calibration_shots = calibration_shots
        self.options = options or ExecutionOptions()
        self.compiled: IRContainer | None = None
        self.calibration: MitigationCalibration | None = None
        self._user_kernels: list[str] = []

    def build(self) -> Program:
        with _Stage("preprocess"):
            src = frontend.preprocess(self.source, self.defines)
        with _Stage("compile"):
            ir = frontend.compile(src, self.accelerator.descriptor)
            model = MODEL_OF_LANGUAGE[ir.language]
            if model != self.accelerator.model:
                raise DialectError(f"{ir.language} kernels cannot run on the {self.accelerator.model}-model "
                                   f"accelerator {self.accelerator.name!r}")
        user = ir.names
        with _Stage("backend-transform"):
            for name in self.accelerator.transformations():
                ir = PASSES[name](ir)
        with _Stage("pipeline"):
            if self.passes is not None:
                ir = TransformationPipeline(list(self.passes))(ir)
            elif ir.language == GATE_LANGUAGE:
                ir = TransformationPipeline()(ir)
        calibration = None
        with _Stage("ir-preprocess"):
            if self.mitigate_readout:
                ir, request = readout_mitigation_preprocess(ir, frontend.register_width(ir))
                calibration = self._calibrate(ir, request)
        self.compiled, self.calibration, self._user_kernels = ir, calibration, user
        return self

    def _calibrate(self, ir: IRContainer, request) -> MitigationCalibration:
        opts = dataclasses.replace(self.options, shots=self.calibration_shots, mode="sample")
        flips: dict[int, dict[int, float]] = {0: {}, 1: {}}
        for name, qubit, prepared in request.kernels:
            buf = self.accelerator.create_buffer("calibration", max(request.qubits) + 1)
            self.accelerator.execute(buf, ir.get(name), opts)
            ones = sum(s == "1" for s in buf.measurements) / len(buf.measurements)
            flips[prepared][qubit] = ones if prepared == 0 else 1.0 - ones
        return MitigationCalibration.from_marginals(flips[0], flips[1], self.calibration_shots)

    def _require_build(self) -> IRContainer:
        if self.compiled is None:
            raise StateError("Program.build() has not been run")
        return self.compiled

    def get_kernel(self, name: str) -> KernelFunctor:
        ir = self._require_build()
        if name not in self._user_kernels:
            raise KernelLookupError(f"no kernel named {name!r}; available: {self._user_kernels}")
        return KernelFunctor(ir.get(name), self, self.options)

    def get_kernels(self) -> list[KernelFunctor]:
        self._require_build()
        return [self.get_kernel(n) for n in self._user_kernels]

    getKernel = get_kernel
    getKernels = get_kernels
