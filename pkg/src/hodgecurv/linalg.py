"""Dense complex kernels relative to a Hermitian form h on the fibre.

Vectors are columns; the fibre inner product is ``<x, y>_h = y^H h x``. The
adjoint of an endomorphism is then ``A* = h^{-1} A^H h`` and End(H) carries the
Hilbert-Schmidt pairing ``(A, B) = Tr(A B*)``.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateGram, SingularMetric

__all__ = [
    "hermitian_part", "check_positive", "h_adjoint", "end_inner", "end_norm",
    "gram_matrix", "gram_project_complement", "nilpotency_index", "bracket",
    "GRAM_CONDITION_MAX", "NILPOTENT_TOL",
]

GRAM_CONDITION_MAX = 1e12
NILPOTENT_TOL = 1e-9


def hermitian_part(h):
    h = np.asarray(h, dtype=complex)
    return (h + h.conj().T) / 2


def check_positive(h):
    """Symmetrize ``h`` and verify positive definiteness by Cholesky.

    Returns the symmetrized form; raises :class:`SingularMetric` on failure.
    """
    h = hermitian_part(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise SingularMetric(f"metric must be square, got shape {h.shape}")
    try:
        np.linalg.cholesky(h)
    except np.linalg.LinAlgError:
        raise SingularMetric("Hermitian form is not positive definite") from None
    return h


def h_adjoint(A, h):
    h = check_positive(h)
    A = np.asarray(A, dtype=complex)
    return np.linalg.solve(h, A.conj().T @ h)


def end_inner(A, B, h):
    """Hilbert-Schmidt pairing Tr(A B*) on End(H), linear in A, antilinear in B."""
    return complex(np.trace(np.asarray(A, dtype=complex) @ h_adjoint(B, h)))


def end_norm(A, h):
    return float(np.sqrt(max(end_inner(A, A, h).real, 0.0)))


def bracket(A, B):
    return A @ B - B @ A


def gram_matrix(basis, h):
    n = len(basis)
    g = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            g[i, j] = end_inner(basis[i], basis[j], h)
    return g


def gram_project_complement(A, basis, h, cond_max=GRAM_CONDITION_MAX, gram=None):
    """Orthogonal projection of ``A`` onto the complement of ``span(basis)``.

    Parameters
    ----------
    A : (r, r) array
    basis : sequence of (r, r) arrays
        Must be linearly independent in End(H).
    h : (r, r) array
        Positive-definite fibre metric.
    cond_max : float
        Largest acceptable Gram condition number.
    gram : array, optional
        Precomputed ``gram_matrix(basis, h)``.

    Raises
    ------
    DegenerateGram
        If the Gram matrix condition number exceeds ``cond_max``.
    """
    A = np.asarray(A, dtype=complex)
    if len(basis) == 0:
        return A.copy()
    g = gram_matrix(basis, h) if gram is None else gram
    cond = np.linalg.cond(g) if np.any(g) else np.inf
    if not np.isfinite(cond) or cond > cond_max:
        raise DegenerateGram("spanning set is numerically dependent", cond)
    y = np.array([end_inner(A, b, h) for b in basis])
    # (A - sum_j c_j b_j, b_i) = 0  <=>  sum_j g[j, i] c_j = y_i
    c = np.linalg.solve(g.T, y)
    return A - sum(cj * bj for cj, bj in zip(c, basis))


def nilpotency_index(A, tol=NILPOTENT_TOL):
    """Smallest k with A^(k+1) numerically zero, or None if A^r is not.

    The zero test is scale aware: ||A^(k+1)|| <= tol * max(1, ||A||^(k+1)).
    """
    A = np.asarray(A, dtype=complex)
    r = A.shape[0]
    scale = np.linalg.norm(A)
    P = np.eye(r, dtype=complex)
    for k in range(r):
        P = P @ A
        if np.linalg.norm(P) <= tol * max(1.0, scale ** (k + 1)):
            return k
    return None
