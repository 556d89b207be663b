"""Accelerator interface shared by local and remote backends."""

from __future__ import annotations

from dataclasses import dataclass

from qxir.backends.buffer import AcceleratorBuffer
from qxir.errors import CapacityError
from qxir.ir.nodes import FunctionNode


@dataclass(frozen=True)
class AcceleratorDescriptor:
    name: str
    model: str  # "gate" | "anneal"
    max_qubits: int
    transformations: tuple[str, ...] = ()

    def __post_init__(self):
        if self.model not in ("gate", "anneal"):
            raise ValueError(f"unknown accelerator model {self.model!r}")
        if self.max_qubits < 1:
            raise ValueError("max_qubits must be at least 1")

    def to_json(self) -> dict:
        return {"name": self.name, "model": self.model, "max_qubits": self.max_qubits,
                "transformations": list(self.transformations)}

    @classmethod
    def from_json(cls, d: dict) -> AcceleratorDescriptor:
        return cls(d["name"], d["model"], int(d["max_qubits"]), tuple(d.get("transformations", ())))


@dataclass
class ExecutionOptions:
    """Knobs for one execute call. ``mode`` applies to gate backends, ``strategy`` and
    ``num_samples`` to annealing backends."""

    shots: int = 10_000
    seed: int | None = None
    mode: str = "sample"  # "sample" | "exact"
    num_samples: int = 10
    strategy: str = "brute"  # "brute" | "sa"

    def __post_init__(self):
        if self.mode not in ("sample", "exact"):
            raise ValueError(f"mode must be 'sample' or 'exact', got {self.mode!r}")
        if self.strategy not in ("brute", "sa"):
            raise ValueError(f"strategy must be 'brute' or 'sa', got {self.strategy!r}")
        if self.shots < 1 or self.num_samples < 1:
            raise ValueError("shots and num_samples must be positive")

    def to_json(self) -> dict:
        return {"shots": self.shots, "seed": self.seed, "mode": self.mode,
                "num_samples": self.num_samples, "strategy": self.strategy}


class Accelerator:
    """A backend. Instances hold no per-execution state, so one instance may serve many
    concurrent ``execute`` calls on distinct buffers."""

    descriptor: AcceleratorDescriptor

    @property
    def name(self) -> str:
        return self.descriptor.name

    @property
    def model(self) -> str:
        return self.descriptor.model

    def create_buffer(self, name: str, size: int | None = None) -> AcceleratorBuffer:
        if size is None:
            if self.model != "anneal":
                raise CapacityError("gate-model buffers need an explicit size")
            size = self.descriptor.max_qubits
        if not 1 <= size <= self.descriptor.max_qubits:
            raise CapacityError(
                f"buffer size {size} outside 1..{self.descriptor.max_qubits} for {self.name!r}"
            )
        return AcceleratorBuffer(name, size)

    # name used by the host-side driver loop
    createBuffer = create_buffer

    def transformations(self) -> list[str]:
        """Names of passes this backend wants run before any user pipeline."""
        return list(self.descriptor.transformations)

    def execute(self, buffer: AcceleratorBuffer, function: FunctionNode,
                options: ExecutionOptions | None = None) -> AcceleratorBuffer:
        raise NotImplementedError

    def check_buffer(self, buffer: AcceleratorBuffer) -> None:
        if buffer.size > self.descriptor.max_qubits:
            raise CapacityError(
                f"buffer {buffer.name!r} has {buffer.size} bits, {self.name!r} supports {self.descriptor.max_qubits}"
            )
