"""Observed order of the rotation-angle residual and of the integrator under step halving."""
import argparse
import math

import numpy as np

from eulertop import BodyState, InertiaSpec, integrate, momentum_from_invariants, phase_report
from eulertop.so3 import rotation_about, rotation_distance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--inertia", default="3,2,1")
    ap.add_argument("--energies", default="0.2,0.3,0.45")
    ap.add_argument("--levels", type=int, default=5, help="number of step sizes, starting at 200 steps per turn")
    args = ap.parse_args()
    I = InertiaSpec(*map(float, args.inertia.split(",")))
    turn = 2 * math.pi * I.middle

    print("residual |measured - formula| vs steps per turn")
    for K in map(float, args.energies.split(",")):
        P0 = momentum_from_invariants(I, 1.0, K)
        prev = None
        for k in range(args.levels):
            n = 200 * 2 ** k
            r = phase_report(P0, None, I, h=turn / n).residual
            order = "" if prev is None else f"  order {math.log2(prev / r):5.2f}"
            print(f"  K={K:.3f} n={n:6d} residual {r:.3e}{order}")
            prev = r

    print("end-state error at t=10 against a run with 64x smaller steps")
    state = BodyState(momentum_from_invariants(I, 1.0, 0.22), rotation_about(np.array([0.6, 0.0, 0.8]), 0.9))
    ref = integrate(state, I, 10.0 / 6400, 6400)
    prev = None
    for n in (100, 200, 400, 800):
        tr = integrate(state, I, 10.0 / n, n)
        err = max(np.max(np.abs(tr.P[-1] - ref.P[-1])), rotation_distance(tr.S[-1], ref.S[-1]))
        ratio = "" if prev is None else f"  ratio {prev / err:6.2f}"
        print(f"  n={n:4d} error {err:.3e}{ratio}")
        prev = err


if __name__ == "__main__":
    main()
