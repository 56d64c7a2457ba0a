"""Scan a blowup chart towards the exceptional divisor.

For every flag of the chosen fixture graph (default chart), evaluates the
bare and the subtracted chart integrands on a grid of the other coordinates
while all marked coordinates go to zero, and prints the maxima and their
successive ratios.  A simple pole shows up as ratio 2, a bounded integrand
as ratio 1.
"""

import argparse
import itertools
import json
from pathlib import Path

import numpy as np

from parafeyn.catalogue import fixture
from parafeyn.compactified import default_chart, flags
from parafeyn.errors import DivergenceError
from parafeyn.kinematics import KinematicConfig
from parafeyn.renormalization import local_subtracted_integrand, unsubtracted_chart_integrand


def default_kinematics(g, d):
    masses = {e.colour: 1.0 for e in g.edges}
    legs = range(1, g.n_legs + 1)
    inv = {s: 1.0 + 0.1 * len(s) for r in range(1, g.n_legs) for s in itertools.combinations(legs, r)
           if g.n_legs not in s}
    return KinematicConfig(d, masses, inv, g.n_legs)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graph", default="dunce", help="fixture name (dunce, nested_bigons, ...)")
    ap.add_argument("--kinematics", type=Path, help="kinematics JSON (default: unit masses)")
    ap.add_argument("--d", type=int, default=4)
    ap.add_argument("--steps", type=int, default=20)
    ap.add_argument("--grid", type=int, default=12)
    args = ap.parse_args()

    g = fixture(args.graph)
    if args.kinematics:
        kin = KinematicConfig.from_json(json.loads(args.kinematics.read_text()), n_legs=g.n_legs, d=args.d)
    else:
        kin = default_kinematics(g, args.d)
    skipped = 0
    for flag in flags(g):
        chart = default_chart(g, flag)
        try:
            sub = local_subtracted_integrand(g, chart, kin, args.d)
        except DivergenceError:
            # some level is convergent (or worse than logarithmic); nothing to subtract there
            skipped += 1
            continue
        bare = unsubtracted_chart_integrand(g, chart, kin, args.d)
        marked = [chart.coordinates.index(m) for m in chart.marked]
        free = [i for i in range(len(chart.coordinates)) if i not in marked]
        axis = np.linspace(0.05, 1.0, args.grid)
        pts = np.array(list(itertools.product(axis, repeat=len(free)))) if free else np.zeros((1, 0))
        print(f"flag {flag.as_lists()}  affine x{chart.affine_edge}  marked {list(chart.marked)}")
        print(f"{'j':>4} {'max bare':>14} {'ratio':>8} {'max subtracted':>16} {'ratio':>8}")
        prev = None
        for j in range(1, args.steps + 1):
            y = np.empty((pts.shape[0], len(chart.coordinates)))
            y[:, free] = pts
            y[:, marked] = 2.0 ** -j
            b = float(np.abs(bare(y)).max())
            s = float(np.abs(sub(y)).max())
            rb = f"{b / prev[0]:8.4f}" if prev else f"{'':>8}"
            rs = f"{s / prev[1]:8.4f}" if prev else f"{'':>8}"
            print(f"{j:>4} {b:14.6e} {rb} {s:16.6e} {rs}")
            prev = (b, s)
    print(f"{skipped} flag(s) with non-logarithmic levels skipped")


if __name__ == "__main__":
    main()
