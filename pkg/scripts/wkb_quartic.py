"""Bohr-Sommerfeld levels of U = x^4 against a finite-difference oracle."""

import argparse

from monopole_lab import semiclassics


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--nodes", type=int, default=6000)
    args = ap.parse_args()
    w = semiclassics.WellProblem(lambda x: x**4, domain=(-6.0, 6.0))
    bs = semiclassics.bohr_sommerfeld_levels(w, args.n_max)
    fd = semiclassics.fd_schrodinger_levels(w, args.n_max + 1, args.nodes)
    print("q,E_bs,E_fd,rel_diff")
    for q, (a, b) in enumerate(zip(bs, fd)):
        print(f"{q},{a:.10f},{b:.10f},{(a - b) / b:+.4%}")


if __name__ == "__main__":
    main()
