"""Command-line entry point: ``eigenmoduli {functional,sample,verify,spectrum}``.

Exit status: 0 success/pass, 1 computation or verification failure
(budget exhausted, non-principal ideal, failed check), 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import oracle
from .config import DEFAULT, Tolerances
from .family import FamilyError, HamiltonianFamily, ModelSpec, build_dft_family, build_oscillator_family
from .moduli import (EmptyEliminationError, compute_functional, functional_from_dict,
                     functional_to_dict)
from .polyring.groebner import DEFAULT_BUDGET, BudgetExceeded
from .polyring.serialize import FormatError

log = logging.getLogger("eigenmoduli")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    model: Path
    out: Path
    seed: int = 0
    samples: int = 10_000
    lambda_count: int = 100
    lambda_range: float = 5.0
    budget: Optional[int] = DEFAULT_BUDGET
    strategy: str = "normal"
    time_limit: Optional[float] = None
    form: str = "complex"
    radicals: str = "adjoin"
    functional: Optional[Path] = None
    lam: Optional[List[str]] = None
    tolerances: Tolerances = field(default_factory=Tolerances)


# ---------------------------------------------------------------------------
# model files

def load_model_document(path: Path) -> dict:
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read model file {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:  # Python < 3.11
                import tomli as tomllib

            return tomllib.loads(raw.decode())
        return json.loads(raw)
    except Exception as exc:  # parse errors from either format
        raise UsageError(f"cannot parse model file {path}: {exc}") from exc


def build_family(doc: dict) -> HamiltonianFamily:
    try:
        if doc.get("kind") == "oscillator":
            return build_oscillator_family(int(doc["truncation"]))
        return build_dft_family(ModelSpec.from_dict(doc))
    except (KeyError, TypeError, ValueError, FamilyError) as exc:
        raise UsageError(f"invalid model: {exc}") from exc


def parse_lambda(items: List[str], M: int) -> list:
    vals = []
    for x in items:
        try:
            vals.append(Fraction(x))
        except ValueError:
            try:
                vals.append(float(x))
            except ValueError as exc:
                raise UsageError(f"bad lambda component {x!r}") from exc
    if len(vals) != M:
        raise UsageError(f"lambda needs {M} components, got {len(vals)}")
    return vals


def _lambda_grid(cfg: RunConfig, family: HamiltonianFamily) -> np.ndarray:
    return oracle.random_potentials(family, cfg.lambda_count, cfg.seed, cfg.lambda_range)


# ---------------------------------------------------------------------------
# output helpers

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    return x


def write_json(path: Path, doc: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n")


def write_csv(path: Path, header: List[str], rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


# ---------------------------------------------------------------------------
# commands

def cmd_functional(cfg: RunConfig) -> int:
    family = build_family(load_model_document(cfg.model))
    if family.kind != "dft":
        raise UsageError("the functional command needs a lattice (dft) model")
    try:
        result = compute_functional(family, budget=cfg.budget, strategy=cfg.strategy,
                                    time_limit=cfg.time_limit, form=cfg.form, radicals=cfg.radicals)
    except BudgetExceeded as exc:
        write_json(cfg.out / "functional_budget.json",
                   {"error": "budget exceeded", "budget": exc.budget, "time_limit": exc.time_limit,
                    "statistics": exc.stats.as_dict(),
                    "family": family.descriptor()})
        print(f"FAILED: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except EmptyEliminationError as exc:
        print(f"FAILED: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        # formulation not applicable to this family (mixed radicals, M > N, ...)
        raise UsageError(str(exc)) from exc
    write_json(cfg.out / "functional.json", functional_to_dict(result))
    st = result.stats
    print(result.summary())
    print(f"generators {len(result.generators)}; minors {st['minors']}; pairs reduced "
          f"{st['pairs_reduced']}; reduction steps {st['reduction_steps']}; "
          f"wall {st['wall_time']:.2f}s")
    if result.is_principal:
        print(f"f = {result.principal}")
        return EXIT_OK
    print("elimination ideal is not principal; all generators written", file=sys.stderr)
    return EXIT_FAIL


CLOUD_HEADER_PREFIX = ["source", "index", "branch"]


def cmd_sample(cfg: RunConfig) -> int:
    family = build_family(load_model_document(cfg.model))
    if cfg.samples < 1:
        raise UsageError("--samples must be at least 1")
    labels = list(family.labels)
    lam_labels = [f"lambda_{x}" for x in labels]
    header = CLOUD_HEADER_PREFIX + lam_labels + labels
    levels = family.N // 2 if family.kind == "oscillator" else None
    cloud = oracle.sample_cloud(family, cfg.samples, cfg.seed, levels)
    rows = [["sample", i, ""] + [""] * family.M + list(r) for i, r in enumerate(cloud)]
    if family.kind == "dft":
        for a, lam in enumerate(_lambda_grid(cfg, family)):
            _, pts = oracle.eigen_points(family, lam, cfg.tolerances)
            for p in pts:
                rows.append(["eigen", a, p.provenance["branch"]] + list(lam) + list(p.rho))
    write_csv(cfg.out / "cloud.csv", header, rows)
    print(f"wrote {cfg.samples} cloud rows and {len(rows) - cfg.samples} branch rows "
          f"to {cfg.out / 'cloud.csv'}")
    if family.kind == "dft" and family.M == 3:
        tr = oracle.trace_boundary(family, tol=cfg.tolerances)
        write_csv(cfg.out / "trace.csv", ["branch", "theta", "delta_v", "delta_n", "F"], tr.rows())
        write_csv(cfg.out / "cusps.csv", ["branch", "theta", "delta_v", "delta_n", "F"],
                  [[c.branch, c.theta, c.delta_v, c.dn, c.F] for c in tr.cusps])
        print(f"boundary trace: {len(tr.cusps)} cusp candidate(s)")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    family = build_family(load_model_document(cfg.model))
    tol = cfg.tolerances
    checks = {}
    if family.kind == "oscillator":
        rep = oracle.verify_uncertainty(family, cfg.samples, cfg.seed, tol=tol)
        checks["uncertainty"] = {
            "passed": bool(rep.passed), "eigen_products": rep.eigen_products,
            "max_eigen_error": max(rep.eigen_errors), "min_random_product": rep.min_random_product,
            "violations": rep.violations, "ground_saturation_error": rep.ground_saturation_error}
    else:
        if cfg.functional is None:
            raise UsageError("verify needs --functional for lattice models")
        try:
            result = functional_from_dict(json.loads(cfg.functional.read_text()))
        except (OSError, ValueError, FormatError) as exc:
            raise UsageError(f"cannot load functional document: {exc}") from exc
        if len(result.labels) != family.M:
            raise UsageError("functional document and model have different coordinates")
        grid = _lambda_grid(cfg, family)
        cloud = oracle.sample_cloud(family, cfg.samples, cfg.seed)
        var = oracle.verify_variety(result, family, grid, cloud, tol)
        checks["variety"] = {"passed": bool(var.passed), "max_relative_residual": var.max_eigen_residual,
                             "threshold": tol.variety,
                             "sample_fraction_above_separation": var.separated_fraction,
                             "separation": tol.separation}
        bnd = oracle.verify_variational_bound(family, grid, cloud, tol)
        checks["variational_bound"] = {"passed": bnd.passed, "worst_margin": bnd.worst_margin,
                                       "violations": bnd.violations}
        nv = oracle.verify_normal_vector(result, family, grid, tol=tol)
        checks["normal_vector"] = {"passed": nv.passed, "max_defect": nv.max_defect,
                                   "checked": nv.checked, "skipped_singular": nv.skipped_singular,
                                   "skipped_degenerate": nv.skipped_degenerate}
    ok = all(c["passed"] for c in checks.values())
    write_json(cfg.out / "verify.json", {"model": str(cfg.model), "seed": cfg.seed,
                                         "passed": ok, "checks": checks})
    for name, c in checks.items():
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {name}")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_spectrum(cfg: RunConfig) -> int:
    family = build_family(load_model_document(cfg.model))
    lam = parse_lambda(cfg.lam or ["1"] + ["0"] * (family.M - 1), family.M)
    from .family import assemble

    spec = oracle.eigendecompose(assemble(family, lam), cfg.tolerances)
    for k, e in enumerate(spec.values):
        flag = "  (degenerate)" if spec.degenerate[k] else ""
        print(f"{k:4d}  {float(e)!r}{flag}")
    write_json(cfg.out / "spectrum.json", {"lambda": [str(x) for x in lam],
                                           "eigenvalues": spec.values,
                                           "degenerate": spec.degenerate})
    return EXIT_OK


COMMANDS = {"functional": cmd_functional, "sample": cmd_sample, "verify": cmd_verify,
            "spectrum": cmd_spectrum}


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eigenmoduli", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--model", required=True, type=Path, help="model file (JSON or TOML)")
        s.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--samples", type=int, default=10_000)
        s.add_argument("--lambda-grid", default="100:5",
                       help="COUNT:RANGE, potentials uniform in [-RANGE, RANGE]")
        s.add_argument("--budget", default=str(DEFAULT_BUDGET),
                       help="reduction-step budget, or 'none'")
        s.add_argument("--time-limit", type=float, help="elimination wall-clock limit in seconds")
        s.add_argument("--strategy", choices=("normal", "sugar"), default="normal")
        s.add_argument("--form", choices=("complex", "real"), default="complex",
                       help="real: identify psibar with psi (real symmetric families)")
        s.add_argument("--radicals", choices=("adjoin", "rescale"), default="adjoin",
                       help="rescale: diagonal congruence to rational entries instead of s_p variables")
        s.add_argument("--functional", type=Path, help="functional document (verify)")
        s.add_argument("--lambda", dest="lam", nargs="+", help="lambda components (spectrum)")
        for f in fields(Tolerances):
            s.add_argument("--tol-" + f.name.replace("_", "-"), dest="tol_" + f.name, type=float)
    return p


def config_from_args(args) -> RunConfig:
    try:
        count, _, rng = args.lambda_grid.partition(":")
        lam_count, lam_range = int(count), float(rng or 5.0)
    except ValueError as exc:
        raise UsageError(f"bad --lambda-grid {args.lambda_grid!r}") from exc
    if lam_count < 1:
        raise UsageError("--lambda-grid count must be positive")
    try:
        budget = None if args.budget.lower() == "none" else int(args.budget)
    except ValueError as exc:
        raise UsageError(f"bad --budget {args.budget!r}") from exc
    if args.time_limit is not None and args.time_limit <= 0:
        raise UsageError("--time-limit must be positive")
    tols = {f.name: getattr(args, "tol_" + f.name) for f in fields(Tolerances)
            if getattr(args, "tol_" + f.name) is not None}
    return RunConfig(
        command=args.command, model=args.model.resolve(), out=args.out.resolve(), seed=args.seed,
        samples=args.samples, lambda_count=lam_count, lambda_range=lam_range, budget=budget,
        strategy=args.strategy, time_limit=args.time_limit, form=args.form, radicals=args.radicals,
        functional=args.functional.resolve() if args.functional else None,
        lam=args.lam, tolerances=DEFAULT.override(**tols))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
