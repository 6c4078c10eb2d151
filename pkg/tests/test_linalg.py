from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from stronghom.linalg import (Mat, determinant, hermite_rows, integer_kernel, nullspace, rref,
                              smith_normal_form, solve_integer, solve_rational)

small = st.integers(min_value=-9, max_value=9)


@st.composite
def int_matrices(draw, max_rows=5, max_cols=5):
    m = draw(st.integers(0, max_rows))
    n = draw(st.integers(0, max_cols))
    rows = draw(st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m))
    return Mat(rows, m, n)


def test_shapes_survive_empty_dimensions():
    a = Mat.zeros(0, 3)
    assert a.T.shape == (3, 0)
    assert (Mat.zeros(2, 0) @ a).shape == (2, 3)
    assert a.columns() == [(), (), ()]


@settings(max_examples=150, deadline=None)
@given(int_matrices())
def test_smith_form_is_a_factorization(a):
    S, U, V, Vinv = smith_normal_form(a, want_vinv=True)
    assert U @ a @ V == S
    assert V @ Vinv == Mat.identity(a.ncols)
    if a.nrows:
        assert abs(determinant(U)) == 1
    diag = [S[i, i] for i in range(min(a.shape))]
    for i in range(a.nrows):
        for j in range(a.ncols):
            if i != j:
                assert S[i, j] == 0
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    assert diag[len(nz):] == [0] * (len(diag) - len(nz))


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_rref_matches_sympy(a):
    R, piv = rref(a)
    if a.nrows and a.ncols:
        ref, spiv = sympy.Matrix(a.tolist()).rref()
        assert list(spiv) == piv
        assert [[Fraction(int(x.p), int(x.q)) for x in ref.row(i)] for i in range(len(piv))] == R


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_nullspace_is_annihilated_and_complete(a):
    N = nullspace(a)
    assert (a @ N).is_zero()
    assert N.ncols == a.ncols - len(rref(a)[1])


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_hermite_rows_span_the_same_lattice(a):
    H = hermite_rows(a.rows, a.ncols)
    for r in a.rows:
        assert solve_integer(Mat(H, len(H), a.ncols).T, r) is not None if H else not any(r)
    for h in H:
        assert solve_integer(a.T, h) is not None


def test_integer_kernel_and_solving():
    a = Mat([[2, 4, 6], [1, 1, 1]])
    K = integer_kernel(a)
    assert (a @ K).is_zero() and K.ncols == 1
    assert solve_integer(Mat([[2]]), [3]) is None
    assert solve_integer(Mat([[2, 3]]), [1]) is not None
    assert solve_rational(Mat([[2]]), [3]) == (Fraction(3, 2),)
    assert solve_rational(Mat([[0]]), [1]) is None


def test_determinant_golden():
    assert determinant(Mat([[1, 2], [3, 4]])) == -2
    assert determinant(Mat([[2, 0, 0], [0, 3, 0], [0, 0, 4]])) == 24


def test_ragged_input_rejected():
    with pytest.raises(ValueError):
        Mat([[1, 2], [3]])
