"""Independent sympy oracle for the two-site boson functional.

The matrices are written out by hand in the occupation basis
|n,0>, |n-1,1>, ..., |0,n> (hopping t = 1, U = 1, U' = 0), not taken from
the package.  The eigen-moduli curve is the projective dual of the
determinant hypersurface det(l0 H0 + l1 N1 + l2 N2) = 0: rho lies on it iff
the pencil of lambda with lambda . rho = 0 is tangent to that hypersurface,
i.e. the determinant restricted to the pencil has a repeated root.
"""
import sympy as sp

F, n1, n2 = sp.symbols("F n1 n2")


def dimer_matrices(n):
    # <k-1, n-k+1| a2^dag a1 |k, n-k> = sqrt(k (n-k+1)); onsite U/2 sum n_i (n_i - 1)
    N = n + 1
    H0 = sp.zeros(N, N)
    for s in range(N):
        k = n - s
        H0[s, s] = sp.Rational(k * (k - 1) + (n - k) * (n - k - 1), 2)
        if s + 1 < N:
            H0[s, s + 1] = H0[s + 1, s] = -sp.sqrt(k * (n - k + 1))
    N1 = sp.diag(*[n - s for s in range(N)])
    N2 = sp.diag(*[s for s in range(N)])
    return H0, N1, N2


def dual_curve(n):
    """Primitive integer coefficients ``{(a, b, c): int}`` of f(F, n1, n2)."""
    u = sp.Symbol("u")
    H0, N1, N2 = dimer_matrices(n)
    a, b = (n1, -F, 0), (n2, 0, -F)  # both annihilate rho; v = 1 fixes the pencil scale
    lam = [u * a[i] + b[i] for i in range(3)]
    det = sp.expand((lam[0] * H0 + lam[1] * N1 + lam[2] * N2).det())
    disc = sp.Poly(sp.discriminant(det, u), F, n1, n2)
    # the pencil basis degenerates at F = 0, which contributes a spurious power of F
    Fp = sp.Poly(F, F, n1, n2)
    while True:
        q, r = sp.div(disc, Fp)
        if not r.is_zero:
            break
        disc = q
    _, disc = disc.primitive()
    terms = {m: int(c) for m, c in disc.terms()}
    lead = terms[(disc.total_degree(), 0, 0)]
    return {m: (c if lead > 0 else -c) for m, c in terms.items()}


def matches(f, terms) -> bool:
    """Our primitive relation equals the oracle up to sign."""
    ours = {m: int(c) for m, c in f.terms.items()}
    lead = ours.get((f.total_degree(), 0, 0))
    if lead is None:
        return False
    return ours == ({m: c for m, c in terms.items()} if lead > 0 else {m: -c for m, c in terms.items()})
