"""Exhaustively check that every ground state of the factoring QUBO decodes to a valid
odd factor pair, for every odd composite N whose QUBO fits the brute-force limit.

    python scripts/verify_factoring.py --max 127
"""

import argparse
import time

from qxir.backends.ising import MAX_BRUTE_VARIABLES, Problem, brute_force
from qxir.factoring import factoring_qubo

import numpy as np

KEEP = 256  # more than any instance has ground states; checked below


def problem_of(qubo) -> Problem:
    n = qubo.num_variables
    h, J = np.zeros(n), np.zeros((n, n))
    for i, w in qubo.linear.items():
        h[i] = w
    for (i, j), w in qubo.quadratic.items():
        J[i, j] = w
    return Problem(h, J)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max", type=int, default=127)
    args = ap.parse_args()

    failures = 0
    for N in range(9, args.max + 1, 2):
        if all(N % d for d in range(3, N, 2)):
            continue
        qubo = factoring_qubo(N)
        if qubo.num_variables > MAX_BRUTE_VARIABLES:
            print(f"{N:>4}: {qubo.num_variables} variables, beyond brute force; skipped")
            continue
        t0 = time.perf_counter()
        bits, energies = brute_force(problem_of(qubo), KEEP)
        ground = bits[energies == energies.min()]
        assert len(ground) < KEEP, "ground-state set truncated"
        pairs = {qubo.decode("".join(map(str, row))) for row in ground}
        ok = energies.min() == qubo.ground_energy and all(p * q == N and p > 1 and q > 1 for p, q in pairs)
        failures += not ok
        print(f"{N:>4}: {qubo.num_variables:>2} vars, {len(ground)} ground states {sorted(pairs)} "
              f"{'ok' if ok else 'FAIL'} ({time.perf_counter() - t0:.1f} s)")
    print("all valid" if not failures else f"{failures} failures")


if __name__ == "__main__":
    main()
