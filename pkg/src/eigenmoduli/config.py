"""Central tolerance record used by the numeric checks and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    jacobi_offdiag: float = 1e-12       # relative off-diagonal Frobenius norm at convergence
    eigen_residual: float = 1e-10       # ||Hv - Ev|| / ||H||
    orthonormality: float = 1e-12
    degeneracy: float = 1e-10           # gap / ||H|| below which levels count as degenerate
    hermiticity: float = 1e-12
    variational: float = 1e-9           # allowed negative margin, relative to the scale
    variety: float = 1e-8               # |f(rho)| / sum|terms| at eigen points
    separation: float = 1e-4            # residual that random states should exceed
    separation_fraction: float = 0.99
    normal_vector: float = 1e-6         # sine of the angle between grad f and lambda~
    singular_gradient: float = 1e-10    # relative gradient norm treated as a singular point
    cokernel: float = 1e-9              # smallest singular value / ||J|| at eigenstates
    uncertainty_eigen: float = 1e-6
    uncertainty_bound: float = 1e-9
    uncertainty_ground: float = 1e-10

    def override(self, **kw) -> "Tolerances":
        names = {f.name for f in fields(self)}
        bad = set(kw) - names
        if bad:
            raise KeyError(f"unknown tolerance(s): {sorted(bad)}")
        return replace(self, **{k: float(v) for k, v in kw.items()})


DEFAULT = Tolerances()
