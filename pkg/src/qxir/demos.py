"""The two reference workloads: the deuteron parameter sweep and QUBO factoring."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np

from qxir.backends.base import Accelerator, ExecutionOptions
from qxir.errors import DialectError
from qxir.factoring import factoring_qubo
from qxir.runtime import Program

IDENTITY_COEFF = 5.906709
# measurement kernel -> Hamiltonian coefficient
DEUTERON_TERMS = {"z0": 0.218291, "z1": -6.125, "x0x1": -2.143304, "y0y1": -2.143304}


def deuteron_source() -> str:
    return resources.files("qxir.data").joinpath("deuteron.qk").read_text()


def deuteron_closed_form(theta):
    return IDENTITY_COEFF - 6.343291 * np.cos(theta) - 4.286608 * np.sin(theta)


def deuteron_program(accelerator: Accelerator, mode: str = "exact", shots: int = 10_000,
                     seed: int | None = None, **program_kwargs) -> Program:
    if accelerator.model != "gate":
        raise DialectError(f"the deuteron sweep needs a gate-model accelerator, got {accelerator.name!r}")
    opts = ExecutionOptions(shots=shots, seed=seed, mode=mode)
    return Program(accelerator, deuteron_source(), options=opts, **program_kwargs).build()


def deuteron_energy(program: Program, theta: float, point: int = 0) -> float:
    buffer = program.accelerator.create_buffer("qreg", 2)
    energy = IDENTITY_COEFF
    for k, (name, coeff) in enumerate(DEUTERON_TERMS.items()):
        kernel = program.get_kernel(name)
        if kernel.options.seed is not None:
            seed = int(np.random.SeedSequence([kernel.options.seed, point, k]).generate_state(1)[0])
            kernel = kernel.with_options(seed=seed)
        kernel(buffer, theta)
        energy += coeff * buffer.expectation_value_z()
        buffer.reset()
    return energy


def deuteron_scan(program: Program, lo: float = -math.pi, hi: float = math.pi, steps: int = 100,
                  workers: int = 1) -> list[tuple[float, float]]:
    """(theta, E) on a uniform grid including both endpoints."""
    thetas = np.linspace(lo, hi, steps)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            energies = list(pool.map(lambda a: deuteron_energy(program, float(a[1]), a[0]), enumerate(thetas)))
    else:
        energies = [deuteron_energy(program, float(t), k) for k, t in enumerate(thetas)]
    return [(float(t), float(e)) for t, e in zip(thetas, energies)]


@dataclass
class FactorResult:
    N: int
    p: int | None
    q: int | None
    bitstring: str
    energy: float
    strategy: str

    @property
    def factors(self) -> tuple[int, int] | None:
        return None if self.p is None else (self.p, self.q)


def factor(N: int, accelerator: Accelerator, strategy: str = "auto", seed: int | None = None,
           num_samples: int | None = None) -> FactorResult:
    """Build the factoring QUBO as an annealing kernel, sample it, decode the best string.

    ``p``/``q`` are None when the lowest-energy sample is not an exact factorisation
    (always the case for prime N)."""
    if accelerator.model != "anneal":
        raise DialectError(f"factoring needs an annealing accelerator, got {accelerator.name!r}")
    qubo = factoring_qubo(N)
    if qubo.num_variables == 0:  # no factor bits at all: only p = q = 1 is encoded
        return FactorResult(N, None, None, "", float(qubo.offset), "none")
    if strategy == "auto":
        strategy = "brute" if qubo.num_variables <= 24 else "sa"
    opts = ExecutionOptions(seed=seed, strategy=strategy,
                            num_samples=num_samples or (1 if strategy == "brute" else 64))
    program = Program(accelerator, qubo.to_qmi(f"factor{N}"), "anneal-qmi", options=opts).build()
    buffer = accelerator.create_buffer("q", qubo.num_variables)
    program.get_kernel(f"factor{N}")(buffer)
    energies = buffer.energies()
    best = min(range(len(energies)), key=lambda k: (energies[k], buffer.measurements[k]))
    bits = buffer.measurements[best].ljust(qubo.num_variables, "0")
    p, q = qubo.decode(bits)
    if p * q != N:
        p = q = None
    return FactorResult(N, p, q, bits, energies[best] + qubo.offset, strategy)
