import itertools
import json
import random
from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq

from eigenmoduli.family import HamiltonianFamily, ModelSpec, build_dft_family
from eigenmoduli.fock import Operator, diagonal, identity
from eigenmoduli.moduli import (NonExactFamilyError, compute_functional, expectation_relations,
                                family_ring, functional_from_dict, functional_to_dict,
                                minor_generators, radical_relations, rationalize,
                                symbolic_jacobian)
from eigenmoduli.oracle import eigendecompose, eigen_points, gradient_at, jacobian_cokernel_gap
from eigenmoduli.family import assemble
from eigenmoduli.polyring import MPoly, evaluate
from eigenmoduli.surd import Surd

import dual_oracle


def _value(p, point):
    return sum(p.term_values(point))


def test_identity_family_jacobian():
    fam = HamiltonianFamily((identity(3),), ("I",))
    J = symbolic_jacobian(fam)
    R = J.ring
    assert J.shape == (1, 6)
    assert list(J.entries[0]) == [R.psibar(k) for k in range(3)] + [R.psi(k) for k in range(3)]
    assert sorted(minor_generators(J), key=str) == sorted(J.entries[0], key=str)
    (rel,) = expectation_relations(fam)
    assert rel == sum((R.psibar(k) * R.psi(k) for k in range(3)), -R.rho(0))


def test_toy_jacobian_shape(toy):
    J = symbolic_jacobian(toy)
    assert J.shape == (3, 6)
    assert J.ring.primes == (2,)
    for row in J.entries:
        for j, e in enumerate(row):
            block = range(0, 3) if j < 3 else range(3, 6)
            for m in e.terms:
                assert sum(m[k] for k in block) == 1 and sum(m[:6]) == 1


def test_jacobian_cokernel_at_eigenvectors(toy):
    J = symbolic_jacobian(toy)
    spec = eigendecompose(assemble(toy, [1, 0, 0]))
    psi = spec.vector(0)
    assert jacobian_cokernel_gap(J.substitute(psi)) < 1e-10


def test_cokernel_separates_eigenvectors(toy):
    J = symbolic_jacobian(toy)
    rng = np.random.default_rng(3)
    for lam in np.c_[np.ones(20), rng.uniform(-5, 5, (20, 2))]:
        spec = eigendecompose(assemble(toy, lam))
        for k in range(3):
            assert jacobian_cokernel_gap(J.substitute(spec.vector(k))) < 1e-9
    z = rng.standard_normal((200, 3)) + 1j * rng.standard_normal((200, 3))
    gaps = [jacobian_cokernel_gap(J.substitute(v / np.linalg.norm(v))) for v in z]
    assert np.mean(np.array(gaps) > 1e-3) > 0.95


def test_minor_generators(toy):
    J = symbolic_jacobian(toy)
    minors = minor_generators(J)
    assert len(minors) == 20
    for m in minors:
        assert {sum(e[:6]) for e in m.terms} == {3}
    # vanish at eigen data
    rng = np.random.default_rng(11)
    for lam in np.c_[np.ones(20), rng.uniform(-5, 5, (20, 2))]:
        spec = eigendecompose(assemble(toy, lam))
        for k in range(3):
            v = spec.vector(k)
            point = list(np.conj(v)) + list(v) + [np.sqrt(2)] + [0.0] * 3
            for m in minors:
                assert abs(_value(m, point)) < 1e-10


def test_expectation_relations(toy):
    R = family_ring(toy)
    rels = expectation_relations(toy, R)
    pb, p = R.psibar, R.psi
    assert rels[1] == 2 * pb(0) * p(0) + pb(1) * p(1) - R.rho(1)
    assert radical_relations(R) == [R.radical(2) ** 2 - 2]
    spec, pts = eigen_points(toy, [1.0, 0.7, -1.3])
    for k in range(3):
        v = spec.vector(k)
        point = list(np.conj(v)) + list(v) + [np.sqrt(2)] + list(pts[k].rho)
        for r in rels:
            assert abs(_value(r, point)) < 1e-12


def test_oscillator_rejected(oscillator):
    with pytest.raises(NonExactFamilyError):
        symbolic_jacobian(oscillator)


def test_toy_functional_summary(toy_functional):
    f = toy_functional
    assert f.summary() == "degree 6, homogeneous, principal"
    assert f.labels == ("F", "n1", "n2")
    assert f.stats["minors"] == 20


def test_toy_functional_matches_dual_curve(toy_functional):
    assert dual_oracle.matches(toy_functional.principal, dual_oracle.dual_curve(2))


def test_hand_written_matrices_agree_with_builder(toy):
    for n in (2, 3):
        fam = toy if n == 2 else build_dft_family(ModelSpec.dimer(n=3))
        for mine, op in zip(dual_oracle.dimer_matrices(n), fam.operators):
            assert np.allclose(np.array(mine, dtype=float), op.float_view, atol=1e-14)


def test_toy_functional_swap_symmetry(toy_functional):
    f = toy_functional.principal
    swapped = MPoly(3, {(a, c, b): v for (a, b, c), v in f.terms.items()})
    assert swapped == f


def test_toy_functional_exact_homogeneity(toy_functional):
    f = toy_functional.principal
    rng = random.Random(5)
    for _ in range(10):
        pt = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(3)]
        c = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        assert evaluate(f, [c * v for v in pt]) == mpq(c) ** 6 * evaluate(f, pt)


def test_exact_points_on_variety(toy_functional):
    f = toy_functional.principal
    # localized states |2,0> and |0,2> are the V -> -inf/+inf ground states
    assert evaluate(f, [1, 2, 0]) == 0
    assert evaluate(f, [1, 0, 2]) == 0
    # |1,1> is the middle branch at infinite potential difference: a singular point
    assert evaluate(f, [0, 1, 1]) == 0
    assert all(evaluate(f.diff(i), [0, 1, 1]) == 0 for i in range(3))


def test_euler_consistency(toy, toy_functional):
    f = toy_functional.principal
    spec, pts = eigen_points(toy, [1.0, 1.2, -0.4])
    for p in pts:
        g, scale = gradient_at(f, p.rho)
        assert abs(np.dot(g, p.rho)) < 1e-8 * scale * np.linalg.norm(p.rho)


def test_functional_document_round_trip(toy_functional):
    doc = json.loads(json.dumps(functional_to_dict(toy_functional)))
    back = functional_from_dict(doc)
    assert back.principal == toy_functional.principal
    assert back.degree == 6 and back.homogeneous and back.is_principal
    assert back.descriptor["model"]["n"] == 2


def test_qubit_family_functional():
    # eigenstates of a real qubit Hamiltonian are pure states in the x-z plane
    sz = diagonal([1, -1])
    sx = Operator([[0, 1], [1, 0]])
    fam = HamiltonianFamily((sz, sx, identity(2)), ("z", "x", "c"))
    res = compute_functional(fam)
    z, x, c = MPoly.gens("zxc")
    assert res.is_principal
    assert res.principal == (z ** 2 + x ** 2 - c ** 2).primitive()


def test_rationalize_toy(toy):
    fam, w = rationalize(toy)
    assert w == (1, 2, 1)
    assert all(x.is_rational() for op in fam.operators for row in op.exact for x in row)
    # psi = D phi with D = diag(sqrt(w)) carries rho over unchanged
    D = np.sqrt(np.array(w, dtype=float))
    rng = np.random.default_rng(3)
    for _ in range(5):
        phi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        for a, b in zip(fam.operators, toy.operators):
            lhs = np.vdot(phi, a.float_view @ phi)
            rhs = np.vdot(D * phi, b.float_view @ (D * phi))
            assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))


def test_rationalize_rejects_mixed_entry():
    op = Operator([[0, Surd.sqrt(2) + 1], [Surd.sqrt(2) + 1, 0]])
    with pytest.raises(ValueError, match="mixes"):
        rationalize(HamiltonianFamily((op, identity(2)), ("a", "c")))


def test_rationalize_rejects_irrational_cycle():
    # the product of couplings around the triangle is sqrt(2): no congruence clears it
    r2 = Surd.sqrt(2)
    op = Operator([[0, 1, r2], [1, 0, 1], [r2, 1, 0]])
    with pytest.raises(ValueError, match="rational"):
        rationalize(HamiltonianFamily((op, identity(3)), ("a", "c")))


def test_real_form_jacobian(toy):
    J = symbolic_jacobian(toy, "real")
    assert J.shape == (3, 3)
    assert not any(n.startswith("pb") for n in J.ring.names)
    assert len(minor_generators(J)) == 1


def test_real_form_needs_enough_columns():
    ops = (diagonal([1, 0]), Operator([[0, 1], [1, 0]]), diagonal([0, 1]))
    fam = HamiltonianFamily(ops, ("a", "b", "c"))
    with pytest.raises(ValueError, match="M <= N"):
        compute_functional(fam, form="real")


VARIANTS = [v for v in itertools.product(("complex", "real"), ("adjoin", "rescale"), ("normal", "sugar"))
            if v != ("complex", "adjoin", "normal")]


@pytest.mark.parametrize("form,radicals,strategy", VARIANTS)
def test_formulations_agree(toy, toy_functional, form, radicals, strategy):
    res = compute_functional(toy, form=form, radicals=radicals, strategy=strategy)
    assert res.principal == toy_functional.principal
    assert res.stats["form"] == form and res.stats["radical_handling"] == radicals
