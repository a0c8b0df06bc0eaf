"""Toy dimer functional under every elimination formulation, with timings."""
import argparse
import itertools
import time

from eigenmoduli import ModelSpec, build_dft_family, compute_functional


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2, help="number of bosons")
    ap.add_argument("--time-limit", type=float, default=600.0)
    args = ap.parse_args()
    fam = build_dft_family(ModelSpec.dimer(n=args.n))
    ref = None
    for form, radicals, strategy in itertools.product(("complex", "real"), ("adjoin", "rescale"),
                                                      ("normal", "sugar")):
        t0 = time.perf_counter()
        res = compute_functional(fam, form=form, radicals=radicals, strategy=strategy,
                                 time_limit=args.time_limit, budget=None)
        ref = ref or res.principal
        st = res.stats
        print(f"{form:8s}{radicals:9s}{strategy:7s}{time.perf_counter() - t0:8.2f}s  {res.summary()}  "
              f"pairs {st['pairs_reduced']}, max coeff {st['max_coefficient_bits']} bits, "
              f"same f {res.principal == ref}")
    print("f =", ref)


if __name__ == "__main__":
    main()
