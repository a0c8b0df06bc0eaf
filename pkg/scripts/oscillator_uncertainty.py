"""Uncertainty products in the truncated oscillator."""
import argparse

from eigenmoduli import build_oscillator_family, oracle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--truncation", type=int, default=64)
    ap.add_argument("--samples", type=int, default=10_000)
    args = ap.parse_args()
    fam = build_oscillator_family(args.truncation)
    rep = oracle.verify_uncertainty(fam, count=args.samples)
    for k, (p, e) in enumerate(zip(rep.eigen_products, rep.eigen_errors)):
        print(f"k={k}  dx2*dp2 = {p:.12f}  (k+1/2)^2 = {(k + 0.5) ** 2:.4f}  error {e:.1e}")
    print(f"random states: min product {rep.min_random_product:.4f}, {rep.violations} below 1/4")
    print("PASS" if rep.passed else "FAIL")


if __name__ == "__main__":
    main()
