"""Annealing backend: exhaustive enumeration and simulated annealing over QUBO/Ising
problems given as QMI coefficient kernels.

Binary convention: E(x) = sum_i h_i x_i + sum_{i<j} J_ij x_i x_j, x in {0,1}.
With ``spin=True`` the same coefficients act on s = 2x - 1 in {-1,+1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from qxir.backends.base import Accelerator, AcceleratorDescriptor, ExecutionOptions
from qxir.backends.buffer import AcceleratorBuffer
from qxir.errors import CapacityError, DialectError, VariableIndexError
from qxir.ir.nodes import FunctionNode

MAX_BRUTE_VARIABLES = 24
MAX_VARIABLES = 2048
_CHUNK = 1 << 20


@dataclass
class Problem:
    h: np.ndarray  # (n,)
    J: np.ndarray  # (n, n), strictly upper triangular
    spin: bool = False

    @property
    def n(self) -> int:
        return len(self.h)

    def energy(self, x: np.ndarray) -> np.ndarray:
        """Energies of a (..., n) array of 0/1 assignments."""
        v = 2.0 * x - 1.0 if self.spin else x.astype(float)
        return v @ self.h + np.einsum("...i,ij,...j->...", v, self.J, v)


def problem_from_function(f: FunctionNode, spin: bool = False) -> Problem:
    ops = f.instructions()
    if any(i.name != "QMI" for i in ops):
        raise DialectError(f"{f.name}: gate instructions cannot run on an annealing backend")
    n = f.nqubits()
    h, J = np.zeros(n), np.zeros((n, n))
    for inst in ops:
        i, j = sorted(inst.qubits)
        w = float(inst.params[0].value)
        if i == j:
            h[i] += w
        else:
            J[i, j] += w
    return Problem(h, J, spin)


def _bits_of(idx: np.ndarray, n: int) -> np.ndarray:
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.uint8)


def _lex_key(idx: np.ndarray, n: int) -> np.ndarray:
    """Integer whose order matches the rendered string x0 x1 ... x_{n-1}."""
    key = np.zeros_like(idx)
    for k in range(n):
        key |= ((idx >> k) & 1) << (n - 1 - k)
    return key


def brute_force(problem: Problem, num_samples: int) -> tuple[np.ndarray, np.ndarray]:
    """The ``num_samples`` lowest-energy assignments, ties broken by bit string."""
    n = problem.n
    if n > MAX_BRUTE_VARIABLES:
        raise CapacityError(f"brute force supports at most {MAX_BRUTE_VARIABLES} variables, got {n}")
    best_idx = np.zeros(0, dtype=np.int64)
    best_e = np.zeros(0)
    total = 1 << n
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        e = problem.energy(_bits_of(idx, n))
        if len(e) > num_samples:
            cut = np.partition(e, num_samples - 1)[num_samples - 1]
            keep = e <= cut
            idx, e = idx[keep], e[keep]
        idx = np.concatenate([best_idx, idx])
        e = np.concatenate([best_e, e])
        order = np.lexsort((_lex_key(idx, n), e))[:num_samples]
        best_idx, best_e = idx[order], e[order]
    return _bits_of(best_idx, n), best_e


@numba.njit(cache=True)
def _anneal_one(h, J, spin, x, sweeps, t_hot, t_cold, seed):
    np.random.seed(seed)
    n = h.shape[0]
    v = np.empty(n)
    for i in range(n):
        v[i] = 2.0 * x[i] - 1.0 if spin else float(x[i])
    field = h.copy()
    for i in range(n):
        for j in range(n):
            field[i] += J[i, j] * v[j]
    ratio = (t_cold / t_hot) ** (1.0 / max(sweeps - 1, 1))
    t = t_hot
    for _ in range(sweeps):
        for i in range(n):
            new = -v[i] if spin else 1.0 - v[i]
            delta = (new - v[i]) * field[i]
            if delta <= 0.0 or np.random.random() < np.exp(-delta / t):
                d = new - v[i]
                v[i] = new
                for j in range(n):
                    field[j] += J[j, i] * d
        t *= ratio
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        out[i] = 1 if v[i] > 0.5 else 0
    return out


def simulated_annealing(problem: Problem, num_restarts: int, seed: int | None = None,
                        sweeps_per_variable: int = 1000, t_cold: float = 1e-3):
    """Independent single-bit-flip Metropolis restarts with a geometric schedule from
    max|w|*n down to ``t_cold`` over ``sweeps_per_variable * n`` sweeps."""
    n = problem.n
    sym = problem.J + problem.J.T
    scale = max(np.abs(problem.h).max(initial=0.0), np.abs(problem.J).max(initial=0.0))
    t_hot = max(scale * n, t_cold * 10)
    sweeps = sweeps_per_variable * max(n, 1)
    seeds = np.random.SeedSequence(seed).generate_state(num_restarts)
    samples = np.zeros((num_restarts, n), dtype=np.uint8)
    for r in range(num_restarts):
        init = np.random.default_rng(seeds[r]).integers(0, 2, n).astype(np.uint8)
        samples[r] = _anneal_one(problem.h, sym, problem.spin, init, sweeps, t_hot, t_cold, int(seeds[r]))
    return samples, problem.energy(samples)


def execute_anneal(buffer: AcceleratorBuffer, f: FunctionNode, options: ExecutionOptions,
                   spin: bool = False, sweeps_per_variable: int = 1000) -> AcceleratorBuffer:
    problem = problem_from_function(f, spin)
    if problem.n > buffer.size:
        raise VariableIndexError(f"{f.name}: variable {problem.n - 1} outside a {buffer.size}-bit buffer")
    if options.strategy == "brute":
        samples, energies = brute_force(problem, options.num_samples)
    else:
        samples, energies = simulated_annealing(problem, options.num_samples, options.seed,
                                                sweeps_per_variable)
    buffer.append_measurements(["".join("01"[b] for b in row) for row in samples])
    offset = len(buffer.measurements) - len(samples)
    for k, e in enumerate(energies):
        buffer.metadata[f"energy[{offset + k}]"] = float(e)
    buffer.metadata["min_energy"] = min(buffer.energies())
    return buffer


class IsingAccelerator(Accelerator):
    def __init__(self, spin: bool = False, sweeps_per_variable: int = 1000,
                 max_variables: int = MAX_VARIABLES, name: str = "ising"):
        self.descriptor = AcceleratorDescriptor(name, "anneal", max_variables)
        self.spin = spin
        self.sweeps_per_variable = sweeps_per_variable

    def execute(self, buffer: AcceleratorBuffer, function: FunctionNode,
                options: ExecutionOptions | None = None) -> AcceleratorBuffer:
        return execute_anneal(buffer, function, options or ExecutionOptions(), self.spin,
                              self.sweeps_per_variable)
