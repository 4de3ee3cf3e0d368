import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgecurv.errors import DegenerateGram, SingularMetric
from hodgecurv.linalg import (bracket, check_positive, end_inner, end_norm,
                              gram_matrix, gram_project_complement, h_adjoint,
                              nilpotency_index)
from hodgecurv.nilpotent import random_metric

E12 = np.array([[0, 1], [0, 0]], dtype=complex)
E21 = E12.T.copy()


def _rand(rng, r):
    return rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))


def test_adjoint_identity_metric_is_conjugate_transpose():
    A = _rand(np.random.default_rng(0), 4)
    np.testing.assert_allclose(h_adjoint(A, np.eye(4)), A.conj().T)


def test_adjoint_weighted_unit():
    h = np.diag([2.0, 1.0]).astype(complex)
    Astar = h_adjoint(E12, h)
    np.testing.assert_allclose(Astar, 2 * E21)
    rng = np.random.default_rng(1)
    for _ in range(100):
        x, y = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        # <x, y>_h = y^H h x
        assert np.conj(y) @ h @ (E12 @ x) == pytest.approx(np.conj(Astar @ y) @ h @ x)


def test_adjoint_reverses_products():
    rng = np.random.default_rng(2)
    for r in (2, 3, 5):
        A, B, h = _rand(rng, r), _rand(rng, r), random_metric(r, rng)
        np.testing.assert_allclose(h_adjoint(A @ B, h), h_adjoint(B, h) @ h_adjoint(A, h), atol=1e-10)


def test_end_inner_examples():
    A = _rand(np.random.default_rng(3), 3)
    assert end_inner(A, A, np.eye(3)) == pytest.approx(np.linalg.norm(A) ** 2)
    assert end_inner(E12, E21, np.diag([3.0, 0.5])) == 0


def test_end_inner_hermitian_and_positive():
    rng = np.random.default_rng(4)
    for _ in range(500):
        r = int(rng.integers(1, 6))
        A, B, h = _rand(rng, r), _rand(rng, r), random_metric(r, rng)
        assert end_inner(A, B, h) == pytest.approx(np.conj(end_inner(B, A, h)), rel=1e-10, abs=1e-10)
        val = end_inner(A, A, h)
        assert val.real > 0 and abs(val.imag) < 1e-10 * val.real


def test_check_positive():
    with pytest.raises(SingularMetric):
        check_positive(np.diag([1.0, -1.0]))
    with pytest.raises(SingularMetric):
        check_positive(np.zeros((2, 2)))
    h = check_positive(np.array([[2, 1 + 1e-14j], [1, 2]]))
    np.testing.assert_array_equal(h, h.conj().T)


def test_projection_annihilates_span():
    rng = np.random.default_rng(5)
    h = random_metric(3, rng)
    basis = [_rand(rng, 3) for _ in range(2)]
    A = 0.3 * basis[0] - 2j * basis[1]
    assert np.linalg.norm(gram_project_complement(A, basis, h)) < 1e-10


def test_projection_of_orthogonal_unit():
    np.testing.assert_allclose(gram_project_complement(E21, [E12], np.eye(2)), E21, atol=1e-15)


def test_projection_self_adjoint():
    rng = np.random.default_rng(6)
    for _ in range(100):
        r = int(rng.integers(2, 5))
        h = random_metric(r, rng)
        basis = [_rand(rng, r) for _ in range(int(rng.integers(1, 4)))]
        A, B = _rand(rng, r), _rand(rng, r)
        lhs = end_inner(gram_project_complement(A, basis, h), B, h)
        rhs = end_inner(A, gram_project_complement(B, basis, h), h)
        assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(lhs))


def test_projection_degenerate_basis():
    with pytest.raises(DegenerateGram):
        gram_project_complement(E21, [E12, E12], np.eye(2))
    with pytest.raises(DegenerateGram):
        gram_project_complement(E21, [np.zeros((2, 2))], np.eye(2))


def test_gram_matrix_entries():
    rng = np.random.default_rng(7)
    h = random_metric(3, rng)
    basis = [_rand(rng, 3) for _ in range(3)]
    g = gram_matrix(basis, h)
    for i in range(3):
        for j in range(3):
            assert g[i, j] == pytest.approx(end_inner(basis[i], basis[j], h))


def test_nilpotency_index_examples():
    assert nilpotency_index(np.zeros((3, 3))) == 0
    for r in range(2, 7):
        assert nilpotency_index(np.eye(r, k=1)) == r - 1
    assert nilpotency_index(np.eye(3)) is None


@settings(max_examples=200, deadline=None)
@given(r=st.integers(2, 6), seed=st.integers(0, 2**32 - 1))
def test_commutator_with_adjoint_self_adjoint_traceless(r, seed):
    rng = np.random.default_rng(seed)
    A, h = _rand(rng, r), random_metric(r, rng)
    C = bracket(h_adjoint(A, h), A)
    assert abs(np.trace(C)) < 1e-10 * max(1.0, np.linalg.norm(C))
    np.testing.assert_allclose(h_adjoint(C, h), C, atol=1e-9 * max(1.0, np.linalg.norm(C)))
    assert end_norm(A, h) ** 2 == pytest.approx(end_inner(A, A, h).real)
