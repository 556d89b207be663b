"""Accelerators and the register memory model."""

from qxir.backends.base import Accelerator, AcceleratorDescriptor, ExecutionOptions
from qxir.backends.buffer import (
    AcceleratorBuffer,
    get_expectation_value_z,
    marginal,
    parity_expectation,
    reset_buffer,
)
from qxir.backends.ising import IsingAccelerator, execute_anneal
from qxir.backends.statevector import StatevectorAccelerator, execute_gate


def get_backend(name: str, **kwargs) -> Accelerator:
    """``"sv"``, ``"ising"`` or ``"remote:<url>"``."""
    if name in ("sv", "statevector"):
        return StatevectorAccelerator(**kwargs)
    if name == "ising":
        return IsingAccelerator(**kwargs)
    if name.startswith("remote:"):
        from qxir.remote import RemoteAccelerator

        return RemoteAccelerator(name[len("remote:"):], **kwargs)
    raise KeyError(f"unknown backend {name!r} (expected sv, ising or remote:<url>)")


getAccelerator = get_backend

__all__ = [
    "Accelerator", "AcceleratorBuffer", "AcceleratorDescriptor", "ExecutionOptions",
    "IsingAccelerator", "StatevectorAccelerator", "execute_anneal", "execute_gate",
    "getAccelerator", "get_backend", "get_expectation_value_z", "marginal",
    "parity_expectation", "reset_buffer",
]
