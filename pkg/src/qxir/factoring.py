"""Integer factoring as a QUBO.

Odd factors are written p = 1 + sum_k 2^k p_k and q = 1 + sum_k 2^k q_k (k >= 1), the
objective (N - p q)^2 is made quadratic by replacing every product p_i q_j with an
auxiliary bit z_ij, and z_ij = p_i q_j is enforced with the penalty
P * (p_i q_j - 2 p_i z_ij - 2 q_j z_ij + 3 z_ij), P = 2 N^2. The widths cover
p <= isqrt(N) and q <= N // 3, so every nontrivial odd factor pair is reachable and
(1, N) is not.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field


def _width(limit: int) -> int:
    """Fewest bits k_1..k_w with 1 + sum 2^k >= limit."""
    w = 0
    while 2 ** (w + 1) - 1 < limit:
        w += 1
    return w


@dataclass
class FactoringQubo:
    N: int
    p_bits: list[int]  # exponent of each p variable, in variable order
    q_bits: list[int]
    products: list[tuple[int, int]]  # (p variable, q variable) behind each z variable
    linear: dict[int, int] = field(default_factory=dict)
    quadratic: dict[tuple[int, int], int] = field(default_factory=dict)
    offset: int = 0
    penalty: int = 0

    @property
    def num_variables(self) -> int:
        return len(self.p_bits) + len(self.q_bits) + len(self.products)

    @property
    def ground_energy(self) -> int:
        """QUBO energy (offset dropped) of an exact factorisation."""
        return -self.offset

    def decode(self, bits: str) -> tuple[int, int]:
        x = [int(b) for b in bits]
        na = len(self.p_bits)
        p = 1 + sum(x[v] << k for v, k in enumerate(self.p_bits))
        q = 1 + sum(x[na + v] << k for v, k in enumerate(self.q_bits))
        return p, q

    def energy(self, bits: str) -> int:
        x = [int(b) for b in bits]
        return (sum(w * x[i] for i, w in self.linear.items())
                + sum(w * x[i] * x[j] for (i, j), w in self.quadratic.items()))

    def to_qmi(self, name: str | None = None) -> str:
        name = name or f"factor{self.N}"
        lines = [f"__qpu__ {name}() {{"]
        lines += [f"    {i} {i} {w};" for i, w in sorted(self.linear.items()) if w]
        lines += [f"    {i} {j} {w};" for (i, j), w in sorted(self.quadratic.items()) if w]
        lines.append("}")
        return "\n".join(lines) + "\n"


def factoring_qubo(N: int) -> FactoringQubo:
    if N < 3 or N % 2 == 0 or N > 255:
        raise ValueError(f"N must be odd and within 3..255, got {N}")
    a = _width(math.isqrt(N))
    b = _width(N // 3)
    p_bits = list(range(1, a + 1))
    q_bits = list(range(1, b + 1))
    p_vars = list(range(a))
    q_vars = list(range(a, a + b))
    products = [(pv, qv) for pv in p_vars for qv in q_vars]
    z0 = a + b

    # pq = 1 + sum_v coeff[v] * x_v once z = p q holds
    coeff = {pv: 2**k for pv, k in zip(p_vars, p_bits)}
    coeff.update({qv: 2**k for qv, k in zip(q_vars, q_bits)})
    for m, (pv, qv) in enumerate(products):
        coeff[z0 + m] = coeff[pv] * coeff[qv]

    rest = N - 1
    lin: dict[int, int] = defaultdict(int)
    quad: dict[tuple[int, int], int] = defaultdict(int)
    # (rest - sum c x)^2 with x^2 = x
    for v, c in coeff.items():
        lin[v] += c * c - 2 * rest * c
    vs = sorted(coeff)
    for i, u in enumerate(vs):
        for v in vs[i + 1 :]:
            quad[(u, v)] += 2 * coeff[u] * coeff[v]
    penalty = 2 * N * N
    for m, (pv, qv) in enumerate(products):
        z = z0 + m
        quad[(pv, qv)] += penalty
        quad[(pv, z)] -= 2 * penalty
        quad[(qv, z)] -= 2 * penalty
        lin[z] += 3 * penalty
    return FactoringQubo(N, p_bits, q_bits, products, dict(lin), dict(quad), rest * rest, penalty)
