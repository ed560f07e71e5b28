"""Geometric phase of orbits approaching the separatrix, against twice the lune angle."""
import argparse
import math

from eulertop import InertiaSpec
from eulertop.composition import heteroclinic_data, near_separatrix_phase_limit, reorientation_composite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--inertia", default="3,2,1")
    ap.add_argument("--epsilons", default="5e-2,3e-2,1e-2,3e-3,1e-3,3e-4,1e-4,1e-5")
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()
    I = InertiaSpec(*map(float, args.inertia.split(",")))
    eps = [float(x) for x in args.epsilons.split(",")]

    d = heteroclinic_data(I)
    comp = reorientation_composite(I)
    print(f"slope c = {d.slope:.6f}, lune angle {math.degrees(d.lune_angle):.4f} deg, 2 alpha = {d.geometric_phase:.6f}")
    print(f"half-turn composite: axis {comp.axis.round(12)}, angle {comp.angle:.12f}")
    for family in ("e1", "e3"):
        print(f"family {family}")
        for row in near_separatrix_phase_limit(I, 1.0, eps, family=family, workers=args.workers):
            print(f"  eps {row.epsilon:8.1e}  T {row.T:9.3f}  A/p^2 {row.geometric_phase:9.6f}  "
                  f"distance {row.distance:9.3e}  residual {row.residual:.1e}")


if __name__ == "__main__":
    main()
