from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dihom.linalg import QQ, EchelonBasis, PrimeField, SparseMatrix, get_field, image_basis, kernel_basis, rank, solve


def test_field_parsing():
    assert get_field(None) is QQ
    assert get_field("rationals") is QQ
    assert get_field("GF(7)") == PrimeField(7)
    assert get_field(3) == PrimeField(3)
    with pytest.raises(ValueError):
        get_field("9")


def test_rationals_stay_exact():
    assert QQ.coerce(Fraction(4, 2)) == 2 and type(QQ.coerce(Fraction(4, 2))) is int
    assert QQ.coerce("1/3") == Fraction(1, 3)
    with pytest.raises(TypeError):
        QQ.coerce(0.5)


def test_rank_depends_on_field():
    # [[1, 1], [1, -1]] has determinant -2
    M = SparseMatrix.from_dense([[1, 1], [1, -1]])
    assert rank(M) == 2
    assert rank(M, PrimeField(2)) == 1
    assert rank(M, PrimeField(3)) == 2


def test_kernel_and_image():
    M = SparseMatrix.from_dense([[1, 2, 3], [2, 4, 6]])
    ker = kernel_basis(M)
    assert len(ker) == 2
    for vec in ker:
        assert M.apply(vec) == {}
    assert image_basis(M) == [{0: 1, 1: 2}]


def test_solve():
    M = SparseMatrix.from_dense([[1, 1], [0, 2]])
    x = solve(M, {0: 3, 1: 4})
    assert M.apply(x) == {0: 3, 1: 4}
    assert solve(SparseMatrix.from_dense([[1], [1]]), {0: 1}) is None


def test_canonical_is_a_normal_form():
    b = EchelonBasis()
    b.add({0: 1, 1: 1})
    assert b.canonical({0: 2, 2: 5}) == b.canonical({1: -2, 2: 5})


small = st.integers(-3, 3)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=5))
def test_rank_nullity(rows):
    M = SparseMatrix.from_dense(rows)
    assert rank(M) + len(kernel_basis(M)) == M.ncols
    assert rank(M) == rank(M.transpose())
