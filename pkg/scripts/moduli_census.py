"""Cell census of the moduli spaces X_{n,k}: f-vectors, Euler characteristics and timings."""

import argparse
import time

from parafeyn.errors import ScaleGuardError
from parafeyn.moduli import ModuliConfig, build_poset, colour_capacity, f_vector


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=2)
    ap.add_argument("--max-k", type=int, default=3)
    ap.add_argument("--max-cells", type=int, default=50_000)
    args = ap.parse_args()

    config = ModuliConfig(max(args.max_n, 1), max(args.max_k, 1), args.max_cells)
    print(f"{'n':>2} {'k':>2} {'cap':>4} {'cells':>7} {'euler':>6} {'secs':>7}  f-vector")
    for n in range(1, args.max_n + 1):
        for k in range(0, args.max_k + 1):
            t0 = time.perf_counter()
            try:
                poset = build_poset(n, k, config)
            except ScaleGuardError as exc:
                print(f"{n:>2} {k:>2} {colour_capacity(n, k):>4}  skipped: {exc}")
                continue
            fv = f_vector(poset)
            euler = sum((-1) ** i * c for i, c in enumerate(fv))
            dt = time.perf_counter() - t0
            print(f"{n:>2} {k:>2} {colour_capacity(n, k):>4} {len(poset.cells):>7} {euler:>6} {dt:7.2f}  {fv}")


if __name__ == "__main__":
    main()
