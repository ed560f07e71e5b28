"""Tabulate measured vs predicted per-period rotation over an energy grid.

    python3 scripts/montgomery_check.py --inertia 3,2,1 --n 20
"""
import argparse
import math
import time

import numpy as np

from eulertop import InertiaSpec, momentum_from_invariants, phase_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--inertia", default="3,2,1")
    ap.add_argument("--p", type=float, default=1.0)
    ap.add_argument("--n", type=int, default=20, help="number of energies")
    ap.add_argument("--margin", type=float, default=0.01, help="distance from the equilibrium energies")
    ap.add_argument("--band", type=float, default=1e-3, help="excluded half-width around the separatrix energy")
    args = ap.parse_args()

    I = InertiaSpec(*map(float, args.inertia.split(",")))
    p = args.p
    lo, hi = p * p / (2 * I.largest) + args.margin, p * p / (2 * I.smallest) - args.margin
    sep = I.separatrix_energy(p)
    energies = [K for K in np.linspace(lo, hi, args.n + 4) if abs(K - sep) >= args.band][: args.n]

    print(f"{'K':>8} {'T':>10} {'A/p^2':>10} {'formula':>10} {'measured':>10} {'residual':>10}")
    t0 = time.perf_counter()
    for K in energies:
        r = phase_report(momentum_from_invariants(I, p, K), None, I)
        print(f"{r.K:8.4f} {r.T:10.4f} {r.geometric_phase:10.6f} {r.delta_theta_formula:10.6f} "
              f"{r.delta_theta_measured:10.6f} {r.residual:10.2e}")
    print(f"{len(energies)} orbits in {time.perf_counter() - t0:.1f} s; "
          f"separatrix energy {sep:.4f}, angles in radians (2pi = {2 * math.pi:.6f})")


if __name__ == "__main__":
    main()
