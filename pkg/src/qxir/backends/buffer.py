"""The client-held register handle and the statistics derived from it."""

from __future__ import annotations

from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from qxir.errors import NoDataError

MITIGATED_KEY = "expectation_z_mitigated"


@dataclass
class AcceleratorBuffer:
    """Shot bit strings are rendered classical bit 0 leftmost and hold one character
    per classical bit written by the kernel, in ascending classical-bit order."""

    name: str
    size: int
    measurements: list[str] = field(default_factory=list)
    metadata: dict[str, float] = field(default_factory=dict)
    exact_expectation: float | None = None

    def append_measurements(self, strings: Sequence[str]) -> None:
        widths = {len(s) for s in strings}
        if self.measurements:
            widths.add(len(self.measurements[0]))
        if len(widths) > 1:
            raise ValueError(f"bit strings of mixed widths {sorted(widths)} in one buffer")
        self.measurements.extend(strings)

    def reset(self) -> AcceleratorBuffer:
        self.measurements.clear()
        self.metadata.clear()
        self.exact_expectation = None
        return self

    # the name used by the host-side driver loop
    reset_buffer = reset
    resetBuffer = reset

    def counts(self) -> dict[str, int]:
        return dict(sorted(Counter(self.measurements).items()))

    def energies(self) -> list[float]:
        """Per-sample energies written by annealing backends, in sample order."""
        return [self.metadata[f"energy[{k}]"] for k in range(len(self.measurements))
                if f"energy[{k}]" in self.metadata]

    def has_data(self) -> bool:
        return bool(self.measurements) or self.exact_expectation is not None

    def expectation_value_z(self, subset: Sequence[int] | None = None) -> float:
        return get_expectation_value_z(self, subset)

    # camelCase alias matching the host-side driver loop
    getExpectationValueZ = expectation_value_z


def bit_matrix(strings: Sequence[str]) -> np.ndarray:
    """(shots, width) uint8 array of the shot strings."""
    if not strings:
        return np.zeros((0, 0), dtype=np.uint8)
    raw = np.frombuffer("".join(strings).encode("ascii"), dtype=np.uint8)
    return (raw.reshape(len(strings), -1) - ord("0")).astype(np.uint8)


def parity_expectation(strings: Sequence[str], subset: Sequence[int] | None = None) -> float:
    bits = bit_matrix(strings)
    if subset is not None:
        bits = bits[:, list(subset)]
    odd = bits.sum(axis=1) % 2
    return float((len(strings) - 2 * int(odd.sum())) / len(strings))


def get_expectation_value_z(buffer: AcceleratorBuffer, subset: Sequence[int] | None = None) -> float:
    """Cached exact value if present, then a readout-mitigated value (full parity only),
    otherwise (N_even - N_odd) / N over the bits in ``subset`` (default: all)."""
    if buffer.exact_expectation is not None:
        return buffer.exact_expectation
    if subset is None and MITIGATED_KEY in buffer.metadata:
        return buffer.metadata[MITIGATED_KEY]
    if not buffer.measurements:
        raise NoDataError(f"buffer {buffer.name!r} holds no measurements")
    return parity_expectation(buffer.measurements, subset)


def marginal(strings: Sequence[str], position: int) -> tuple[float, float]:
    """Observed (p0, p1) of one bit position."""
    if not strings:
        raise NoDataError("no measurements to take a marginal of")
    ones = int(bit_matrix(strings)[:, position].sum())
    return (len(strings) - ones) / len(strings), ones / len(strings)


def reset_buffer(buffer: AcceleratorBuffer) -> AcceleratorBuffer:
    return buffer.reset()
