import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose, assert_array_equal

from netflippa.exceptions import InvalidInputError
from netflippa.spectra import (
    TOL_EIG,
    eigh_sym,
    eigh_topk,
    eigvals_sym,
    leading_eigval,
    op_norm,
    two_inf_norm,
)
from oracles import jacobi_eigenvalues, max_row_norm

TRIANGLE_L0 = (np.ones((3, 3)) / 3 - np.eye(3)) / np.sqrt(3)


def _sym(rng, n):
    m = rng.standard_normal((n, n))
    return (m + m.T) / 2


def test_identity_and_diagonal():
    assert_array_equal(eigvals_sym(np.eye(3)), [1, 1, 1])
    assert_allclose(eigvals_sym(np.diag([3.0, 1.0, 2.0])), [3, 2, 1])


def test_triangle_modularity_eigenvalues():
    # exact roots of the characteristic polynomial
    x = sp.symbols("x")
    third = sp.Rational(1, 3)
    exact = (sp.ones(3, 3) * third - sp.eye(3)) / sp.sqrt(3)
    roots = sp.roots(exact.charpoly(x).as_expr(), x)
    expected = sorted((float(r) for r, mult in roots.items() for _ in range(mult)), reverse=True)
    assert_allclose(expected, [0, -1 / math.sqrt(3), -1 / math.sqrt(3)], atol=1e-15)
    assert_allclose(eigvals_sym(TRIANGLE_L0), expected, atol=1e-12)
    assert op_norm(TRIANGLE_L0) == pytest.approx(1 / math.sqrt(3), abs=1e-12)


def test_rejects_nonfinite_and_nonsquare():
    m = np.eye(2)
    m[0, 0] = np.nan
    with pytest.raises(InvalidInputError):
        eigvals_sym(m)
    with pytest.raises(InvalidInputError):
        eigvals_sym(np.ones((2, 3)))
    with pytest.raises(InvalidInputError):
        eigvals_sym(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_topk_examples():
    w, v = eigh_topk(np.diag([5.0, 2.0, 1.0]), 1)
    assert_allclose(w, [5.0])
    assert_allclose(v[:, 0], [1, 0, 0])

    ones = np.ones((2, 2))
    w, v = eigh_topk(ones, 1)
    assert w[0] == pytest.approx(2.0)
    assert_allclose(v[:, 0], [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-12)
    assert np.linalg.norm(ones @ v[:, 0] - w[0] * v[:, 0]) < TOL_EIG


@pytest.mark.parametrize("k", [0, 4, 2.5])
def test_topk_out_of_range(k):
    with pytest.raises(InvalidInputError):
        eigh_topk(np.eye(3), k)


def test_topk_full_matches_eigvals():
    # LAPACK's values-only and values+vectors paths differ only in the last bits
    m = _sym(np.random.default_rng(3), 40)
    w, _ = eigh_topk(m, 40)
    assert_allclose(w, eigvals_sym(m), rtol=0, atol=TOL_EIG * max(1.0, op_norm(m)))


def test_sign_convention():
    m = _sym(np.random.default_rng(4), 12)
    _, v = eigh_topk(m, 5)
    for col in v.T:
        first = col[np.flatnonzero(col)[0]]
        assert first > 0


def test_decomposition_contract():
    rng = np.random.default_rng(5)
    for n in (1, 2, 7, 30):
        m = _sym(rng, n)
        dec = eigh_sym(m)
        scale = max(1.0, op_norm(m))
        assert np.all(np.diff(dec.eigenvalues) <= 0)
        V, lam = dec.eigenvectors, dec.eigenvalues
        for j in range(n):
            assert np.linalg.norm(m @ V[:, j] - lam[j] * V[:, j]) <= TOL_EIG * scale
        assert np.max(np.abs(V.T @ V - np.eye(n))) <= TOL_EIG
        assert abs(lam.sum() - np.trace(m)) <= TOL_EIG * n
        assert np.max(np.abs(V @ np.diag(lam) @ V.T - m)) <= TOL_EIG * n * scale


def test_op_norm_examples():
    assert op_norm(np.diag([-4.0, 3.0])) == 4.0
    assert op_norm(np.zeros((3, 3))) == 0.0


def test_op_norm_all_plus_signs_unchanged():
    m = _sym(np.random.default_rng(6), 9)
    assert op_norm(np.ones_like(m) * m) == op_norm(m)


def test_leading_eigval():
    m = _sym(np.random.default_rng(7), 25)
    assert leading_eigval(m) == pytest.approx(eigvals_sym(m)[0], abs=1e-12)


def test_two_inf_norm_examples():
    assert two_inf_norm(np.eye(3)) == 1.0
    assert two_inf_norm(np.full((1, 4), 2.0)) == 4.0
    m = np.random.default_rng(8).standard_normal((5, 5))
    assert two_inf_norm(m) == pytest.approx(max_row_norm(m.tolist()), rel=1e-14)


def test_jacobi_oracle_agrees_for_small_matrices():
    rng = np.random.default_rng(9)
    for n in range(1, 7):
        for _ in range(20):
            m = _sym(rng, n)
            assert_allclose(eigvals_sym(m), jacobi_eigenvalues(m.tolist()), atol=1e-8)


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (5, 5), elements=finite), st.floats(0.1, 10))
def test_scaling_property(raw, c):
    m = (raw + raw.T) / 2
    tol = 1e-9 * max(1.0, c * np.abs(m).sum())
    assert_allclose(eigvals_sym(c * m), c * eigvals_sym(m), atol=tol)
    assert_allclose(eigvals_sym(-c * m), -c * eigvals_sym(m)[::-1], atol=tol)
