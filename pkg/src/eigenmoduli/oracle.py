"""Numerical side of the construction.

Everything here is independent of the symbolic elimination: a cyclic Jacobi
eigensolver, Haar-random moduli clouds, and checks of the variational bound,
variety membership, normal vectors, boundary cusps and uncertainty products.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .family import FamilyError, HamiltonianFamily, assemble
from .fock import Operator
from .polyring.mpoly import residual


# ---------------------------------------------------------------------------
# eigensolver

@dataclass(eq=False)
class SpectrumResult:
    values: np.ndarray          # ascending
    vectors: np.ndarray         # columns, orthonormal
    degenerate: np.ndarray      # per level: a neighbour lies within the degeneracy gap
    norm: float
    sweeps: int = 0

    def vector(self, k: int) -> np.ndarray:
        return self.vectors[:, k]


def _matrix_of(op) -> np.ndarray:
    return op.float_view if isinstance(op, Operator) else np.asarray(op)


def jacobi_eigh(A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Cyclic Jacobi for a Hermitian matrix; returns (values, vectors, sweeps) unsorted."""
    A = np.array(A, dtype=complex if np.iscomplexobj(A) else float)
    n = A.shape[0]
    V = np.eye(n, dtype=A.dtype)
    fro = np.linalg.norm(A)
    if n < 2 or fro == 0.0:
        return np.diag(A).real.copy(), V, 0
    sweeps = 0
    polished = False
    while sweeps < max_sweeps:
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * fro:
            # quadratic convergence: one extra sweep takes vectors to rounding level
            if polished or off == 0.0:
                break
            polished = True
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                c = A[p, q]
                r = abs(c)
                if r <= 1e-300 or r <= 1e-18 * fro:
                    continue
                phase = c / r
                a, b = A[p, p].real, A[q, q].real
                theta = (b - a) / (2.0 * r)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                cs = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * cs
                ph = np.conj(phase)
                # V_block = [[cs, sn], [-ph*sn, ph*cs]]
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = cs * Ap - ph * sn * Aq
                A[:, q] = sn * Ap + ph * cs * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = cs * Ap - np.conj(ph) * sn * Aq
                A[q, :] = sn * Ap + np.conj(ph) * cs * Aq
                A[p, q] = A[q, p] = 0.0
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = cs * Vp - ph * sn * Vq
                V[:, q] = sn * Vp + ph * cs * Vq
    return np.diag(A).real.copy(), V, sweeps


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v) > 1e-8 * np.max(np.abs(v))))
    ph = v[k] / abs(v[k])
    out = v * np.conj(ph)
    out[k] = abs(v[k])
    return out


def eigendecompose(op, tol: Tolerances = DEFAULT) -> SpectrumResult:
    A = _matrix_of(op)
    scale = max(np.max(np.abs(A), initial=0.0), np.finfo(float).tiny)
    if np.max(np.abs(A - A.conj().T), initial=0.0) > tol.hermiticity * scale:
        raise ValueError("eigendecompose needs a Hermitian matrix")
    w, V, sweeps = jacobi_eigh(A, tol.jacobi_offdiag)
    order = np.argsort(w, kind="stable")
    w = w[order]
    V = V[:, order]
    V = np.stack([_fix_phase(V[:, k]) for k in range(V.shape[1])], axis=1)
    if not np.iscomplexobj(A):
        V = V.real
    norm = max(float(np.max(np.abs(w), initial=0.0)), 1e-300)
    gaps = np.diff(w)
    close = gaps < tol.degeneracy * max(norm, 1.0)
    deg = np.zeros(len(w), dtype=bool)
    deg[:-1] |= close
    deg[1:] |= close
    return SpectrumResult(w, V, deg, norm, sweeps)


# ---------------------------------------------------------------------------
# moduli points

@dataclass(eq=False)
class ModuliPoint:
    rho: np.ndarray
    provenance: dict = field(default_factory=dict)
    normalized: bool = True


def expectations(family: HamiltonianFamily, states: np.ndarray) -> np.ndarray:
    """rho for each row of ``states`` (rows normalized first); shape (count, M)."""
    S = np.atleast_2d(np.asarray(states))
    nrm = np.einsum("si,si->s", S.conj(), S).real
    out = np.empty((S.shape[0], family.M))
    for i, op in enumerate(family.operators):
        out[:, i] = np.einsum("si,ij,sj->s", S.conj(), op.float_view, S).real / nrm
    return out


def moduli_point(family: HamiltonianFamily, state, provenance: Optional[dict] = None) -> ModuliPoint:
    psi = np.asarray(state)
    if psi.shape != (family.N,):
        raise ValueError(f"state must have {family.N} components")
    if not np.any(psi):
        raise ValueError("zero state has no moduli point")
    return ModuliPoint(expectations(family, psi)[0], provenance or {"source": "state"})


def random_states(N: int, count: int, seed: int = 0, levels: Optional[int] = None) -> np.ndarray:
    """Haar-uniform unit vectors: normalized standard complex Gaussians.

    With ``levels`` only the first ``levels`` components are populated.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    k = N if levels is None else levels
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((count, k)) + 1j * rng.standard_normal((count, k))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    if k < N:
        z = np.concatenate([z, np.zeros((count, N - k), dtype=complex)], axis=1)
    return z


def sample_cloud(family: HamiltonianFamily, count: int, seed: int = 0,
                 levels: Optional[int] = None) -> np.ndarray:
    return expectations(family, random_states(family.N, count, seed, levels))


def sample_moduli(family: HamiltonianFamily, count: int, seed: int = 0,
                  levels: Optional[int] = None) -> List[ModuliPoint]:
    cloud = sample_cloud(family, count, seed, levels)
    return [ModuliPoint(r, {"source": "random_sample", "seed": seed, "index": i})
            for i, r in enumerate(cloud)]


def eigen_points(family: HamiltonianFamily, lam, tol: Tolerances = DEFAULT):
    spec = eigendecompose(assemble(family, lam), tol)
    pts = []
    for k in range(family.N):
        rho = expectations(family, spec.vector(k))[0]
        pts.append(ModuliPoint(rho, {"source": "eigenstate", "lambda": list(map(float, lam)),
                                     "branch": k, "energy": float(spec.values[k]),
                                     "degenerate": bool(spec.degenerate[k])}))
    return spec, pts


def ground_state_point(family: HamiltonianFamily, lam, tol: Tolerances = DEFAULT) -> ModuliPoint:
    spec, pts = eigen_points(family, lam, tol)
    p = pts[0]
    p.provenance["source"] = "ground"
    return p


def random_potentials(family: HamiltonianFamily, count: int, seed: int = 0,
                      vrange: float = 5.0) -> np.ndarray:
    """lambda = (1, V_1, ..., V_q) with V_i uniform in [-vrange, vrange] (dft families)."""
    rng = np.random.default_rng(seed)
    V = rng.uniform(-vrange, vrange, size=(count, family.M - 1))
    return np.concatenate([np.ones((count, 1)), V], axis=1)


def tilted(family: HamiltonianFamily, lam, energy: float) -> np.ndarray:
    """lambda with the energy absorbed, so that lambda~ . rho = 0 on the eigenstate."""
    return np.asarray(lam, dtype=float) - energy * family.identity_coordinates()


# ---------------------------------------------------------------------------
# checks

@dataclass
class BoundReport:
    passed: bool
    worst_margin: float                 # min over lambda of margin / scale
    margins: List[float]
    saturation_distance: List[float]
    violations: List[dict]


def verify_variational_bound(family: HamiltonianFamily, lambda_grid, samples,
                             tol: Tolerances = DEFAULT) -> BoundReport:
    cloud = np.array([p.rho for p in samples]) if isinstance(samples, list) else np.asarray(samples)
    margins, dist, bad = [], [], []
    for lam in np.atleast_2d(lambda_grid):
        spec, pts = eigen_points(family, lam, tol)
        e0 = spec.values[0]
        energies = cloud @ np.asarray(lam, dtype=float)
        i = int(np.argmin(energies))
        scale = max(1.0, spec.norm)
        m = float((energies[i] - e0) / scale)
        margins.append(m)
        dist.append(float(np.linalg.norm(cloud[i] - pts[0].rho)))
        if m < -tol.variational:
            bad.append({"lambda": list(map(float, lam)), "margin": m, "sample": i})
    return BoundReport(not bad, min(margins), margins, dist, bad)


@dataclass
class VarietyReport:
    passed: bool
    max_eigen_residual: float
    eigen_residuals: np.ndarray          # (draws, branches)
    sample_residuals: Optional[np.ndarray]
    separated_fraction: Optional[float]


def verify_variety(relation, family: HamiltonianFamily, lambda_draws, samples=None,
                   tol: Tolerances = DEFAULT) -> VarietyReport:
    """Relative residual |f(rho)| / sum|terms| at every eigen-branch point.

    The verdict uses the eigen points only; residuals at ``samples`` are
    recorded as a separation diagnostic.
    """
    f = getattr(relation, "relation", relation)
    draws = np.atleast_2d(lambda_draws)
    res = np.empty((len(draws), family.N))
    for a, lam in enumerate(draws):
        _, pts = eigen_points(family, lam, tol)
        for k, p in enumerate(pts):
            res[a, k] = _rel(f, p.rho)
    sres = frac = None
    if samples is not None:
        cloud = np.array([p.rho for p in samples]) if isinstance(samples, list) else np.asarray(samples)
        sres = np.array([_rel(f, r) for r in cloud])
        frac = float(np.mean(sres > tol.separation))
    mx = float(res.max())
    return VarietyReport(mx < tol.variety, mx, res, sres, frac)


def _rel(f, rho) -> float:
    v, s = residual(f, rho)
    return abs(v) / s if s else abs(v)


def gradient_at(f, rho):
    """(gradient, scale) with scale = norm of the per-component term magnitudes."""
    g = np.empty(f.nvars)
    s = np.empty(f.nvars)
    for i in range(f.nvars):
        g[i], s[i] = residual(f.diff(i), rho)
    return g, float(np.linalg.norm(s))


@dataclass
class NormalReport:
    passed: bool
    max_defect: float
    checked: int
    skipped_singular: int
    skipped_degenerate: int
    defects: List[dict]


def verify_normal_vector(relation, family: HamiltonianFamily, lambda_draws,
                         branches: Optional[Sequence[int]] = None,
                         tol: Tolerances = DEFAULT) -> NormalReport:
    f = getattr(relation, "relation", relation)
    grads = [f.diff(i) for i in range(f.nvars)]
    out, sing, degn = [], 0, 0
    for lam in np.atleast_2d(lambda_draws):
        spec, pts = eigen_points(family, lam, tol)
        for k in (range(family.N) if branches is None else branches):
            if spec.degenerate[k]:
                degn += 1
                continue
            rho = pts[k].rho
            gv = np.empty(f.nvars)
            gs = np.empty(f.nvars)
            for i, d in enumerate(grads):
                gv[i], gs[i] = residual(d, rho)
            gnorm = np.linalg.norm(gv)
            if gnorm <= tol.singular_gradient * max(np.linalg.norm(gs), 1e-300):
                sing += 1
                continue
            lt = tilted(family, lam, spec.values[k])
            u = gv / gnorm
            w = lt / np.linalg.norm(lt)
            defect = float(np.linalg.norm(u - np.dot(u, w) * w))
            out.append({"lambda": list(map(float, lam)), "branch": k, "defect": defect})
    mx = max((d["defect"] for d in out), default=0.0)
    return NormalReport(mx < tol.normal_vector, mx, len(out), sing, degn, out)


def jacobian_cokernel_gap(J: np.ndarray) -> float:
    """Smallest singular value of an M x 2N matrix relative to its largest.

    Taken from an SVD directly: going through the eigenvalues of J J^H squares
    the condition number and cannot resolve gaps much below 1e-8.
    """
    sv = np.linalg.svd(np.asarray(J), compute_uv=False)
    return float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0


# ---------------------------------------------------------------------------
# boundary tracing for two-site models

@dataclass
class Cusp:
    branch: int
    index: int
    theta: float
    delta_v: float
    dn: float
    F: float


@dataclass
class BoundaryTrace:
    theta: np.ndarray
    delta_v: np.ndarray
    dn: np.ndarray              # (points, branches): n2 - n1
    F: np.ndarray               # (points, branches)
    cusps: List[Cusp]
    closed: List[bool]          # branch maps to itself under lambda -> -lambda

    def cusps_on(self, branch: int) -> List[Cusp]:
        return [c for c in self.cusps if c.branch == branch]

    def rows(self):
        for k in range(self.F.shape[1]):
            for i in range(len(self.theta)):
                yield k, self.theta[i], self.delta_v[i], self.dn[i, k], self.F[i, k]


def potential_sweep(count: int = 2000) -> np.ndarray:
    """Angles theta in [0, pi); lambda = (cos theta, sin theta / 2, -sin theta / 2).

    This covers every potential difference V1 - V2 = tan theta once, including
    the projective limit theta = pi/2 where the potential dominates.
    """
    return np.arange(count) * (math.pi / count)


def _sweep_lambda(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), 0.5 * math.sin(theta), -0.5 * math.sin(theta)])


def trace_boundary(family: HamiltonianFamily, sweep=None, tol: Tolerances = DEFAULT) -> BoundaryTrace:
    """(dn, F) per eigen-branch along a projective sweep of V1 - V2.

    Cusp candidates are vertices where the traced curve reverses direction:
    consecutive displacement vectors have a negative dot product.  At an
    ordinary cusp both coordinate derivatives vanish together, so the
    tangent flips by 180 degrees there.
    """
    if family.kind != "dft" or family.M != 3:
        raise FamilyError("boundary tracing needs a two-site dft family")
    theta = potential_sweep() if sweep is None else np.asarray(sweep, dtype=float)
    npts, N = len(theta), family.N
    dn = np.empty((npts, N))
    F = np.empty((npts, N))
    for i, th in enumerate(theta):
        _, pts = eigen_points(family, _sweep_lambda(th), tol)
        for k, p in enumerate(pts):
            F[i, k] = p.rho[0]
            dn[i, k] = p.rho[2] - p.rho[1]
    with np.errstate(divide="ignore"):
        c = np.cos(theta)
        dv = np.where(np.abs(c) < 1e-15, np.inf, np.tan(theta))
    closed = [2 * k == N - 1 for k in range(N)]
    span = theta[-1] - theta[0] if npts > 1 else 0.0
    full_period = npts > 2 and abs(span + (theta[1] - theta[0]) - math.pi) < 1e-9
    cusps = []
    for k in range(N):
        periodic = closed[k] and full_period
        for i in _reversals(dn[:, k], F[:, k], periodic):
            cusps.append(Cusp(k, i, float(theta[i]), float(dv[i]), float(dn[i, k]), float(F[i, k])))
    return BoundaryTrace(theta, dv, dn, F, cusps, closed)


def _reversals(x: np.ndarray, y: np.ndarray, periodic: bool) -> List[int]:
    n = len(x)
    if periodic:
        dx = np.roll(x, -1) - x
        dy = np.roll(y, -1) - y
        idx = range(n)
    else:
        dx = np.diff(x)
        dy = np.diff(y)
        idx = range(1, n - 1)
    hits = []
    for i in idx:
        a = (dx[i - 1], dy[i - 1])
        b = (dx[i % len(dx)], dy[i % len(dy)])
        if a[0] * b[0] + a[1] * b[1] < 0:
            hits.append(i)
    # a cusp falling between samples can flag two neighbouring vertices
    merged = []
    for i in hits:
        if merged and (i - merged[-1] <= 2 or (periodic and merged[0] + n - i <= 2 and i != merged[0])):
            continue
        merged.append(i)
    return merged


def critical_potentials(trace: BoundaryTrace, branch: int) -> List[float]:
    """V1 - V2 at the off-centre cusps of a branch (where F and dn peak together)."""
    return [c.delta_v for c in trace.cusps_on(branch) if abs(c.dn) > 1e-6]


def ground_curvature(family: HamiltonianFamily, window: float = 0.05, points: int = 41) -> dict:
    """Fit F = F0 + a * dn^2 on the ground boundary near dn = 0 (two-site models)."""
    th = np.linspace(-window, window, points)
    dn = np.empty(points)
    F = np.empty(points)
    for i, t in enumerate(th):
        p = ground_state_point(family, _sweep_lambda(t))
        F[i] = p.rho[0]
        dn[i] = p.rho[2] - p.rho[1]
    A = np.stack([np.ones(points), dn ** 2, dn ** 4], axis=1)
    coef, *_ = np.linalg.lstsq(A, F, rcond=None)
    # n1 n2 = (n^2 - dn^2) / 4, so a slope in n1 n2 is -4a; at n = 2 the
    # deviation 1 - n1 n2 equals dn^2 / 4 and carries the coefficient 4a
    out = {"F0": float(coef[0]), "quadratic_in_dn": float(coef[1]),
           "slope_in_n1n2": float(-4.0 * coef[1]),
           "coefficient_of_deviation": float(4.0 * coef[1]), "total_particles": family.conserved_total}
    spec = family.spec
    if spec is not None and spec.q == 2:
        # two competing reference forms for the n1 n2 coefficient; reported, not asserted
        t = float(spec.hopping[0][1])
        dU = float(spec.onsite - spec.intersite[0][1])
        r = math.sqrt(dU * dU + 16 * t * t)
        out["reference_closed_form"] = 4 * t * t * r / (16 * t * t - 2 * dU * (r - dU))
        out["reference_expansion"] = -t * t - dU / 2
        out["F0_closed_form"] = float(spec.onsite) - 0.5 * (dU + r) if spec.n == 2 else None
    return out


# ---------------------------------------------------------------------------
# oscillator

@dataclass
class UncertaintyReport:
    passed: bool
    eigen_products: List[float]
    eigen_errors: List[float]
    min_random_product: float
    violations: int
    ground_saturation_error: float


def uncertainty_products(family: HamiltonianFamily, states: np.ndarray) -> np.ndarray:
    rho = expectations(family, states)
    i = {lab: k for k, lab in enumerate(family.labels)}
    dx2 = rho[:, i["x2"]] - rho[:, i["x"]] ** 2
    dp2 = rho[:, i["p2"]] - rho[:, i["p"]] ** 2
    return dx2 * dp2


def verify_uncertainty(family: HamiltonianFamily, count: int = 10_000, seed: int = 0,
                       levels: int = 6, tol: Tolerances = DEFAULT) -> UncertaintyReport:
    if family.kind != "oscillator":
        raise FamilyError("uncertainty checks need the oscillator family")
    D = family.N
    lam = [0.5, 0.5, 0, 0, 0]
    spec = eigendecompose(assemble(family, lam), tol)
    vecs = spec.vectors[:, :levels].T
    prods = uncertainty_products(family, vecs)
    errs = [abs(p - (k + 0.5) ** 2) for k, p in enumerate(prods)]
    rnd = uncertainty_products(family, random_states(D, count, seed, levels=D // 2))
    viol = int(np.sum(rnd < 0.25 - tol.uncertainty_bound))
    g = abs(prods[0] - 0.25)
    ok = max(errs) < tol.uncertainty_eigen and viol == 0 and g < tol.uncertainty_ground
    return UncertaintyReport(ok, [float(p) for p in prods], [float(e) for e in errs],
                             float(rnd.min()), viol, float(g))
