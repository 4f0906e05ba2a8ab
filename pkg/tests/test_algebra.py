import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frobrane.algebra import (
    check_frobenius,
    direct_sum,
    group_algebra_z2,
    irreducible_module,
    is_simple,
    make_algebra,
    matrix_algebra,
    representation_matrix,
    scalar_algebra,
)
from frobrane.errors import BadInvolution, NoUnit, NotAssociative, NotSimple
from frobrane.numcore import HermitianSpace


def test_scalar_algebra():
    A = make_algebra(HermitianSpace(1), np.ones((1, 1, 1)))
    assert np.allclose(A.unit, [1])


def test_matrix_units_2x2():
    A = matrix_algebra(2)
    B = make_algebra(A.space, A.c)
    assert np.allclose(B.unit, np.eye(2).reshape(-1))


def test_no_unit():
    c = np.zeros((2, 2, 2))
    c[0, 0, 0] = 1
    c[0, 0, 1] = 1
    with pytest.raises(NoUnit):
        make_algebra(HermitianSpace(2), c)


def test_not_associative():
    # basis (1, x, y) with x x = y, x y = x, y x = 0: (x x) x = 0 but x (x x) = x
    c = np.zeros((3, 3, 3))
    for p in range(3):
        c[p, 0, p] = c[p, p, 0] = 1
    c[2, 1, 1] = 1
    c[1, 1, 2] = 1
    with pytest.raises(NotAssociative):
        make_algebra(HermitianSpace(3), c)


def test_bad_involution():
    A = matrix_algebra(2)
    # plain conjugation of coordinates is not anti-multiplicative on matrices
    with pytest.raises(BadInvolution):
        make_algebra(A.space, A.c, involution=np.eye(4))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_matrix_algebra_data(n):
    A = matrix_algebra(n)
    assert A.dim == n * n
    assert np.isclose(A.theta(A.unit), n)
    assert np.isclose(A.space.norm(A.unit), (n * n) ** 0.25)
    assert is_simple(A)


def test_non_simple_controls():
    C = scalar_algebra()
    assert not is_simple(direct_sum(C, C))
    assert not is_simple(group_algebra_z2())


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("seed", [0, 5])
def test_irreducible_module(n, seed):
    A = matrix_algebra(n)
    F = irreducible_module(A, seed)
    assert F.dim == n
    assert np.linalg.matrix_rank(representation_matrix(F.action)) == n * n
    # the action is a unital representation
    assert np.allclose(F.action.left_operator(A.unit), np.eye(n))
    a, b = np.eye(n * n)[0], np.eye(n * n)[-1]
    lhs = F.action.left_operator(A.mul(a, b))
    rhs = F.action.left_operator(a) @ F.action.left_operator(b)
    assert np.allclose(lhs, rhs)


def test_irreducible_module_rejects_non_simple():
    C = scalar_algebra()
    with pytest.raises(NotSimple):
        irreducible_module(direct_sum(C, C))


def test_frobenius_matrix_algebra_is_trace_form():
    A = matrix_algebra(2)
    F = check_frobenius(A)
    rng = np.random.default_rng(1)
    a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    assert np.isclose(F(a, b), np.trace(a.reshape(2, 2) @ b.reshape(2, 2)))
    assert F.min_singular_value > 1e-6


def test_frobenius_scalar():
    F = check_frobenius(scalar_algebra())
    assert np.allclose(F.sigma, [[1]])


@given(st.integers(1, 4), st.integers(0, 2**31))
def test_matrix_algebra_is_associative_under_random_elements(n, seed):
    A = matrix_algebra(n)
    rng = np.random.default_rng(seed)
    x, y, z = (rng.standard_normal(n * n) + 1j * rng.standard_normal(n * n) for _ in range(3))
    assert np.allclose(A.mul(A.mul(x, y), z), A.mul(x, A.mul(y, z)))
    assert np.allclose(A.star(A.mul(x, y)), A.mul(A.star(y), A.star(x)))
    assert np.isclose(A.theta(A.mul(x, y)), A.theta(A.mul(y, x)))
