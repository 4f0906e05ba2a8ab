import numpy as np
import pytest

from frobrane.algebra import matrix_algebra, scalar_algebra
from frobrane.bimodule import (
    balanced_tensor,
    bimodule_direct_sum,
    conjugate_dual,
    hom_bimodule,
    is_faithfully_balanced,
    is_invertible,
    make_bimodule,
    regular_bimodule,
    scalar_bimodule,
    tensor_over,
)
from frobrane.errors import MiddleMismatch, NotRepresentation, NotSimpleAlgebras
from frobrane.algebra import direct_sum


def test_scalar_bimodule_valid():
    M = scalar_bimodule(3)
    make_bimodule(M.left_alg, M.right_alg, M.space, M.left_action, M.right_action)


def test_hom_bimodule_valid():
    M = hom_bimodule(3, 2)
    make_bimodule(M.left_alg, M.right_alg, M.space, M.left_action, M.right_action)


def test_sign_flip_breaks_representation():
    M = hom_bimodule(3, 2)
    L = np.array(M.left_action.coeffs)
    L[0, 0, 0] = -L[0, 0, 0]
    with pytest.raises(NotRepresentation):
        make_bimodule(M.left_alg, M.right_alg, M.space, L, M.right_action)


def test_tensor_hom_composition():
    M = hom_bimodule(3, 2)
    N = hom_bimodule(2, 1)
    bt = balanced_tensor(M, N)
    assert bt.bimodule.dim == 3
    assert bt.relation_rank == 9


def test_regular_is_unit_for_tensor():
    A = matrix_algebra(2)
    T = tensor_over(regular_bimodule(A), regular_bimodule(A))
    assert T.dim == A.dim


def test_scalar_middle_gives_plain_tensor():
    M = hom_bimodule(2, 1)
    N = hom_bimodule(1, 3)
    assert tensor_over(M, N).dim == M.dim * N.dim


def test_middle_mismatch():
    with pytest.raises(MiddleMismatch):
        tensor_over(hom_bimodule(2, 2), hom_bimodule(3, 3))


def test_faithfully_balanced_examples():
    assert is_faithfully_balanced(hom_bimodule(3, 2))
    R = regular_bimodule(matrix_algebra(2))
    assert not is_faithfully_balanced(bimodule_direct_sum(R, R))
    assert is_faithfully_balanced(scalar_bimodule(1))


def test_invertible_examples():
    M = hom_bimodule(3, 2)
    assert is_invertible(M)
    assert not is_invertible(bimodule_direct_sum(M, M))
    assert is_invertible(scalar_bimodule(1))


def test_invertible_needs_simple():
    C = scalar_algebra()
    S = direct_sum(C, C)
    from frobrane.bimodule import regular_bimodule as reg

    with pytest.raises(NotSimpleAlgebras):
        is_invertible(reg(S))


def test_conjugate_dual_is_a_bimodule_and_inverse():
    M = hom_bimodule(3, 2)
    D = conjugate_dual(M)
    make_bimodule(D.left_alg, D.right_alg, D.space, D.left_action, D.right_action)
    assert tensor_over(M, D).dim == 9
    assert tensor_over(D, M).dim == 4
