"""Renormalised Dunce's cap integral as the external invariants are scaled.

Runs the forest formula at d = 4 with the renormalisation point fixed and
prints MC and quadrature estimates for each scale factor.
"""

import argparse
import json
from pathlib import Path

from parafeyn.catalogue import dunce
from parafeyn.kinematics import KinematicConfig
from parafeyn.renormalization import RenormScheme, renormalised_integral

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def load(name):
    return KinematicConfig.from_json(json.loads((FIXTURES / f"{name}.json").read_text()), n_legs=4)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scales", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0, 4.0])
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--depth", type=int, default=15)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    g = dunce()
    base, point = load("dunce_kin"), load("dunce_renorm")
    scheme = RenormScheme(point)
    print(f"{'scale':>8} {'mc':>12} {'mc err':>10} {'quad':>12} {'quad err':>10}")
    for lam in args.scales:
        kin = KinematicConfig(base.d, base.masses,
                              {k: lam * v for k, v in base.invariants.items()}, base.n_legs)
        mc = renormalised_integral(g, scheme, kin, samples=args.samples, seed=args.seed, jobs=args.jobs)
        q = renormalised_integral(g, scheme, kin, method="quad", depth=args.depth, jobs=args.jobs)
        print(f"{lam:8.3f} {mc.value:12.6f} {mc.error_estimate:10.2e} {q.value:12.6f} {q.error_estimate:10.2e}")


if __name__ == "__main__":
    main()
