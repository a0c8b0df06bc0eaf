import itertools
import math

import numpy as np
import pytest

from eigenmoduli.fock import (BOSE, FERMI, CapacityError, EmptySectorError, Operator, diagonal,
                              enumerate_basis, expectation, hopping_operator, identity,
                              interaction_operator, number_operator, sector_dimension,
                              transfer_operator)
from eigenmoduli.surd import Surd, split_square


def test_toy_basis_order():
    b = enumerate_basis(2, 2, BOSE)
    assert b.states == ((2, 0), (1, 1), (0, 2))
    assert b.index[(1, 1)] == 1


@pytest.mark.parametrize("q,n,stat,dim", [(2, 2, BOSE, 3), (3, 2, BOSE, 6), (4, 2, FERMI, 6),
                                          (2, 3, BOSE, 4), (5, 3, BOSE, 35), (6, 3, FERMI, 20)])
def test_dimensions(q, n, stat, dim):
    b = enumerate_basis(q, n, stat)
    assert b.dim == dim == sector_dimension(q, n, stat)
    assert all(sum(s) == n for s in b.states)
    assert list(b.states) == sorted(b.states, reverse=True)
    if stat == FERMI:
        assert all(set(s) <= {0, 1} for s in b.states)


def test_sector_errors():
    with pytest.raises(EmptySectorError):
        enumerate_basis(2, 3, FERMI)
    with pytest.raises(CapacityError):
        enumerate_basis(12, 12, BOSE)
    with pytest.raises(ValueError):
        enumerate_basis(0, 1)


def test_number_operator():
    b = enumerate_basis(2, 2)
    assert number_operator(b, 1) == diagonal([2, 1, 0])
    with pytest.raises(IndexError):
        number_operator(b, 3)
    f = enumerate_basis(4, 2, FERMI)
    for i in range(1, 5):
        n = number_operator(f, i)
        assert n.is_diagonal()
        assert set(np.diag(n.float_view)) <= {0.0, 1.0}


@pytest.mark.parametrize("q,n,stat", [(2, 2, BOSE), (3, 3, BOSE), (4, 2, FERMI), (5, 3, FERMI)])
def test_total_number_is_scalar(q, n, stat):
    b = enumerate_basis(q, n, stat)
    total = number_operator(b, 1)
    for i in range(2, q + 1):
        total = total + number_operator(b, i)
    assert total == identity(b.dim).scale(n)


def test_bose_hopping_amplitude():
    b = enumerate_basis(2, 2)
    a12 = transfer_operator(b, 1, 2)
    assert a12.entry(b.index[(1, 1)], b.index[(0, 2)]) == Surd.sqrt(2)
    h = hopping_operator(b, 1, 2)
    assert h.is_symmetric()
    with pytest.raises(ValueError):
        hopping_operator(b, 1, 1)


def _jordan_wigner(q):
    """Dense a_i on the full 2^q space, |n_1..n_q> = prod_ascending (a_i^dag)^{n_i} |0>."""
    Z = np.diag([1.0, -1.0])
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])  # |0><1| in (|0>, |1>) order
    ops = []
    for i in range(q):
        mats = [Z] * i + [lower] + [np.eye(2)] * (q - i - 1)
        m = mats[0]
        for x in mats[1:]:
            m = np.kron(m, x)
        ops.append(m)
    return ops


def _jw_index(state):
    return int("".join(map(str, state)), 2)


def _jw_vector(state, q):
    v = np.zeros(2 ** q)
    v[_jw_index(state)] = 1.0
    return v


def test_jordan_wigner_oracle_convention():
    # the kron construction must reproduce the ordered-product state definition
    q = 3
    a = _jordan_wigner(q)
    vac = _jw_vector((0, 0, 0), q)
    for s in itertools.product((0, 1), repeat=q):
        v = vac
        for i in reversed(range(q)):
            if s[i]:
                v = a[i].T @ v
        assert np.allclose(v, _jw_vector(s, q))


def test_fermi_sign_example():
    b = enumerate_basis(3, 2, FERMI)
    a31 = transfer_operator(b, 3, 1)
    assert a31.entry(b.index[(0, 1, 1)], b.index[(1, 1, 0)]) == Surd.rational(-1)


@pytest.mark.parametrize("q,n", [(3, 2), (4, 2), (5, 3), (4, 3)])
def test_fermi_transfer_matches_jordan_wigner(q, n):
    b = enumerate_basis(q, n, FERMI)
    a = _jordan_wigner(q)
    for i, j in itertools.permutations(range(1, q + 1), 2):
        ref = a[i - 1].T @ a[j - 1]
        got = transfer_operator(b, i, j).float_view
        for r, s in enumerate(b.states):
            for c, t in enumerate(b.states):
                assert got[r, c] == ref[_jw_index(s), _jw_index(t)]


def test_interaction_operator():
    b = enumerate_basis(2, 2)
    assert interaction_operator(b, 1, 1) == diagonal([1, 0, 0])
    assert interaction_operator(b, 1, 2) == diagonal([0, 1, 0])
    f = enumerate_basis(4, 2, FERMI)
    assert interaction_operator(f, 2, 2).is_zero()


@pytest.mark.parametrize("q,n,stat", [(2, 3, BOSE), (3, 3, BOSE), (4, 2, FERMI)])
def test_operators_symmetric_and_number_conserving(q, n, stat):
    b = enumerate_basis(q, n, stat)
    total = number_operator(b, 1)
    for i in range(2, q + 1):
        total = total + number_operator(b, i)
    for i, j in itertools.combinations(range(1, q + 1), 2):
        for op in (hopping_operator(b, i, j), interaction_operator(b, i, j)):
            assert op.is_symmetric()
            assert op.commutator(total).is_zero()


def test_radicands_are_realizable_products():
    b = enumerate_basis(3, 3, BOSE)
    seen = set()
    for i, j in itertools.permutations(range(1, 4), 2):
        seen |= transfer_operator(b, i, j).radicands()
    products = {(s[i] + 1) * s[j] for s in b.states
                for i, j in itertools.permutations(range(3), 2) if s[j]}
    assert seen - {1} == {split_square(m)[1] for m in products} - {1}


def test_float_view_matches_exact():
    b = enumerate_basis(3, 4, BOSE)
    op = hopping_operator(b, 1, 2) + hopping_operator(b, 2, 3)
    for r in range(b.dim):
        for c in range(b.dim):
            x = float(op.entry(r, c))
            assert op.float_view[r, c] == pytest.approx(x, rel=1e-15, abs=0)


def test_expectation():
    assert expectation(identity(3), np.array([1.0, 0, 0])) == 1.0
    assert expectation(diagonal([2, 1, 0]), np.array([1.0, 0, 0])) == 2.0
    with pytest.raises(ValueError):
        expectation(identity(3), np.ones(2))
    bad = Operator(matrix=np.array([[0, 1j], [0, 0]]))
    with pytest.raises(ValueError):
        expectation(bad, np.array([1.0, 1.0]))


def test_expectation_toy_ground_vector(toy):
    h0 = toy.operators[0]
    w, v = np.linalg.eigh(h0.float_view)
    assert expectation(h0, v[:, 0]) == pytest.approx((1 - math.sqrt(17)) / 2, abs=1e-12)
