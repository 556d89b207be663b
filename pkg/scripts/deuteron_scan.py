"""Sweep the deuteron ansatz angle and compare the curve with exact diagonalisation.

    python scripts/deuteron_scan.py --steps 200 --out scan.csv
    python scripts/deuteron_scan.py --mode sample --shots 10000 --seed 1
"""

import argparse
import csv
import math
import time

import numpy as np

from qxir.backends import get_backend
from qxir.demos import DEUTERON_TERMS, IDENTITY_COEFF, deuteron_closed_form, deuteron_program, deuteron_scan

PAULI = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]]), "Y": np.array([[0, -1j], [1j, 0]]),
         "Z": np.diag([1, -1])}
# measurement kernel -> Pauli string on (qubit 1, qubit 0)
TERM_PAULIS = {"z0": "IZ", "z1": "ZI", "x0x1": "XX", "y0y1": "YY"}


def hamiltonian() -> np.ndarray:
    h = IDENTITY_COEFF * np.eye(4, dtype=complex)
    for name, coeff in DEUTERON_TERMS.items():
        hi, lo = TERM_PAULIS[name]
        h += coeff * np.kron(PAULI[hi], PAULI[lo])
    return h


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--backend", default="sv")
    ap.add_argument("--mode", choices=["exact", "sample"], default="exact")
    ap.add_argument("--shots", type=int, default=10_000)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--steps", type=int, default=100)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out")
    args = ap.parse_args()

    program = deuteron_program(get_backend(args.backend), args.mode, args.shots, args.seed)
    t0 = time.perf_counter()
    rows = deuteron_scan(program, -math.pi, math.pi, args.steps, args.workers)
    elapsed = time.perf_counter() - t0
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta", "energy", "closed_form"])
            w.writerows((t, e, deuteron_closed_form(t)) for t, e in rows)

    theta, e_min = min(rows, key=lambda r: r[1])
    eig = np.linalg.eigvalsh(hamiltonian()).min()
    dev = max(abs(e - deuteron_closed_form(t)) for t, e in rows)
    print(f"{len(rows)} points in {elapsed:.3f} s ({args.mode})")
    print(f"minimum E = {e_min:.6f} at theta = {theta:.4f}")
    print(f"smallest eigenvalue = {eig:.6f}, gap = {e_min - eig:.2e}")
    print(f"max deviation from closed form = {dev:.2e}")


if __name__ == "__main__":
    main()
