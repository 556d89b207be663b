"""qxir: compile quantum kernels from several dialects to one tree IR and run them on
pluggable local or remote accelerators."""

from qxir.backends import AcceleratorBuffer, ExecutionOptions, get_backend, getAccelerator
from qxir.frontend import KernelSource, compile, preprocess
from qxir.runtime import KernelFunctor, Program

__version__ = "0.1.0"

__all__ = [
    "AcceleratorBuffer", "ExecutionOptions", "KernelFunctor", "KernelSource", "Program",
    "compile", "getAccelerator", "get_backend", "preprocess",
]
