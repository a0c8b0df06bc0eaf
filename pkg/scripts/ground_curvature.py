"""Curvature of the ground-state functional near the symmetric point n1 = n2."""
import argparse

from eigenmoduli import ModelSpec, build_dft_family, oracle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", default="1")
    ap.add_argument("--U", default="1")
    ap.add_argument("--Uprime", default="0")
    args = ap.parse_args()
    fam = build_dft_family(ModelSpec.dimer(t=args.t, U=args.U, Uprime=args.Uprime))
    fit = oracle.ground_curvature(fam)
    for key, val in fit.items():
        print(f"{key:26s} {val}")


if __name__ == "__main__":
    main()
