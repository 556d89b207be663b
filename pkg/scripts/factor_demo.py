"""Factor odd integers by sampling the factoring QUBO on the Ising backend.

    python scripts/factor_demo.py 15 21 35 221
    python scripts/factor_demo.py --all --max 127
"""

import argparse
import time

from qxir.backends import get_backend
from qxir.demos import factor
from qxir.factoring import factoring_qubo


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("N", type=int, nargs="*", default=[15])
    ap.add_argument("--all", action="store_true", help="every odd N from 9 to --max")
    ap.add_argument("--max", type=int, default=63)
    ap.add_argument("--strategy", choices=["auto", "brute", "sa"], default="auto")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    numbers = range(9, args.max + 1, 2) if args.all else args.N
    ising = get_backend("ising")
    print(f"{'N':>4} {'vars':>5} {'strategy':>8} {'factors':>10} {'residual':>9} {'time':>7}")
    for N in numbers:
        t0 = time.perf_counter()
        r = factor(N, ising, args.strategy, args.seed)
        found = f"{r.p}x{r.q}" if r.factors else "-"
        print(f"{N:>4} {factoring_qubo(N).num_variables:>5} {r.strategy:>8} {found:>10} "
              f"{r.energy:>9.0f} {time.perf_counter() - t0:>6.2f}s")


if __name__ == "__main__":
    main()
