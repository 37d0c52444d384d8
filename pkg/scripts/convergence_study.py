"""Grid convergence of sector eigenvalues against the closed form.

    python3 scripts/convergence_study.py --n -1 --grids 250 500 1000 2000 4000
"""

import argparse

import numpy as np

from monopole_lab import spectral


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n", type=int, default=-1)
    ap.add_argument("--sectors", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--grids", type=int, nargs="+", default=[250, 500, 1000, 2000, 4000])
    args = ap.parse_args()

    s = args.n / 2
    print("m,grid,eigenvalue,exact,abs_error")
    for m in args.sectors:
        l = max(abs(s), abs(m - s))
        exact = l * (l + 1) - s * s
        errs = []
        for g in args.grids:
            e = spectral.solve_sector(spectral.reduce_sector(args.n, m, g), 1)[0]
            errs.append(abs(e - exact))
            print(f"{m},{g},{e!r},{exact!r},{errs[-1]:.3e}")
        if exact != 0:
            slope = -np.polyfit(np.log(args.grids), np.log(errs), 1)[0]
            print(f"# sector {m}: observed order {slope:.3f}")


if __name__ == "__main__":
    main()
