"""Graded decompositions of nilpotent endomorphisms and the trace inequality chain.

For a nilpotent A with A^(k+1) = 0, a grading V = V_0 + ... + V_k with
A(V_p) in V_(p+1) and A(V_k) = 0 gives level maps A_p : V_p -> V_(p+1) and
per-level traces a_p = Tr(A_p* A_p). When the levels are h-orthogonal,

    ||[A*, A]||  >=  sum_p |a_p - a_(p-1)| / sqrt(r)
                 >=  max_p a_p / sqrt(r)
                 >=  (sum_p a_p) / (k sqrt(r)),

with a_(-1) = a_k = 0. The chain is asserted only for h-orthogonal strict
gradings; for other gradings it is measured and reported.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotNilpotent, NotRepresentable
from .linalg import bracket, check_positive, end_norm, h_adjoint, nilpotency_index

__all__ = [
    "GradedNilpotent", "TraceProfile", "ChainReport", "make_graded",
    "jordan_grading", "orthogonal_strict_grading", "trace_profile",
    "commutator_chain_check", "hsc_bound_from_traces", "level_projector",
    "random_graded_instance", "random_nilpotent", "random_metric", "shift_block",
]

GRADING_TOL = 1e-10
CHAIN_SLACK = 1e-9


@dataclass
class GradedNilpotent:
    A: np.ndarray
    h: np.ndarray
    levels: list  # level p -> (r, d_p) array of basis columns
    is_strictly_graded: bool
    is_h_orthogonal: bool

    @property
    def k(self):
        return len(self.levels) - 1

    @property
    def r(self):
        return self.A.shape[0]

    @property
    def dims(self):
        return [X.shape[1] for X in self.levels]


@dataclass
class TraceProfile:
    a: np.ndarray  # a_0 .. a_k
    gram_corrected: bool  # levels not h-orthogonal; a_p still uses the restricted metric

    @property
    def total(self):
        return float(self.a.sum())


@dataclass
class ChainReport:
    lhs: float
    m1: float
    m2: float
    m3: float
    margins: tuple  # (lhs - m1, m1 - m2, m2 - m3)
    asserted: bool
    holds: bool

    @property
    def min_margin(self):
        return min(self.margins)


def shift_block(n):
    """Single Jordan block with A e_(i+1) = e_i."""
    return np.eye(n, k=1, dtype=complex)


def _orth(M, tol):
    """Orthonormal basis of the column span of M (Euclidean)."""
    if M.shape[1] == 0:
        return M
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return U[:, :rank]


def _null(M, tol):
    _, s, Vh = np.linalg.svd(M)
    rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    return Vh[rank:].conj().T


def _span_residual(Y, X):
    """Norm of the part of the columns of Y outside span(X)."""
    if X.shape[1] == 0:
        return float(np.linalg.norm(Y))
    c, *_ = np.linalg.lstsq(X, Y, rcond=None)
    return float(np.linalg.norm(Y - X @ c))


def make_graded(A, h, levels, tol=GRADING_TOL):
    """Wrap a candidate grading, computing its strictness and orthogonality flags.

    Raises ValueError if the levels do not form a basis of the whole space.
    """
    A = np.asarray(A, dtype=complex)
    h = check_positive(h)
    r = A.shape[0]
    levels = [np.asarray(X, dtype=complex).reshape(r, -1) for X in levels]
    stacked = np.hstack(levels)
    if stacked.shape[1] != r or np.linalg.matrix_rank(stacked, tol=1e-8 * max(1.0, np.linalg.norm(stacked))) != r:
        raise ValueError("levels must form a basis of the fibre")
    scaleA = max(1.0, np.linalg.norm(A))
    strict = True
    for p, X in enumerate(levels):
        if X.shape[1] == 0:
            continue
        target = levels[p + 1] if p + 1 < len(levels) else np.zeros((r, 0), dtype=complex)
        res = _span_residual(A @ X, target)
        if res > tol * scaleA * max(1.0, np.linalg.norm(X)):
            strict = False
            break
    orth = True
    hn = np.linalg.norm(h)
    for p in range(len(levels)):
        for q in range(p + 1, len(levels)):
            Xp, Xq = levels[p], levels[q]
            if Xp.shape[1] == 0 or Xq.shape[1] == 0:
                continue
            cross = np.linalg.norm(Xp.conj().T @ h @ Xq)
            if cross > tol * hn * np.linalg.norm(Xp) * np.linalg.norm(Xq):
                orth = False
    return GradedNilpotent(A, h, levels, strict, orth)


def jordan_grading(A, h=None, tol=GRADING_TOL):
    """Grading from Jordan chains x, Ax, ..., A^(L-1) x with A^s x on level s.

    Chains are found by the kernel filtration ker A^i, taking at each height
    the complement of ker A^(i-1) plus the images of longer chains. Every
    chain starts on level 0, so the longest one spans levels 0..k.
    """
    A = np.asarray(A, dtype=complex)
    r = A.shape[0]
    h = np.eye(r, dtype=complex) if h is None else h
    k = nilpotency_index(A)
    if k is None:
        raise NotNilpotent("matrix has no vanishing power up to its size")
    if k == 0:
        return make_graded(A, h, [np.eye(r, dtype=complex)], tol)
    powers = [np.eye(r, dtype=complex)]
    for _ in range(k + 1):
        powers.append(powers[-1] @ A)
    kernels = [np.zeros((r, 0), dtype=complex)]
    for i in range(1, k + 1):
        kernels.append(_null(powers[i], tol))
    kernels.append(np.eye(r, dtype=complex))
    heads = []  # (vector, chain length)
    for i in range(k + 1, 0, -1):
        images = [powers[L - i] @ x for x, L in heads]
        below = np.hstack([kernels[i - 1]] + [v[:, None] for v in images])
        Q = _orth(below, tol)
        K = kernels[i]
        P = K - Q @ (Q.conj().T @ K)
        need = K.shape[1] - Q.shape[1]
        if need <= 0:
            continue
        U, s, _ = np.linalg.svd(P, full_matrices=False)
        for c in range(need):
            heads.append((U[:, c], i))
    levels = []
    for p in range(k + 1):
        cols = []
        for x, L in heads:
            if p < L:
                v = powers[p] @ x
                cols.append(v / np.linalg.norm(v))
        levels.append(np.array(cols).T if cols else np.zeros((r, 0), dtype=complex))
    return make_graded(A, h, levels, tol)


def _h_orthonormalize(X, h):
    if X.shape[1] == 0:
        return X
    g = X.conj().T @ h @ X
    L = np.linalg.cholesky((g + g.conj().T) / 2)
    return X @ np.linalg.inv(L).conj().T


def orthogonal_strict_grading(A, h, tol=GRADING_TOL):
    """Try to turn the Jordan grading into an h-orthogonal strict grading.

    Levels are processed from the top (V_k) down; each V_p is replaced by its
    h-orthogonal complement against the levels above it and made h-orthonormal.
    This keeps the flag V_p + ... + V_k, so only strictness can break; if it
    does, :class:`NotRepresentable` is raised.
    """
    h = check_positive(h)
    base = jordan_grading(A, h, tol)
    k = base.k
    new = [None] * (k + 1)
    for p in range(k, -1, -1):
        X = base.levels[p]
        above = [new[q] for q in range(p + 1, k + 1) if new[q].shape[1]]
        if above:
            Y = np.hstack(above)  # already h-orthonormal
            X = X - Y @ (Y.conj().T @ h @ X)
        new[p] = _h_orthonormalize(X, h)
    g = make_graded(base.A, h, new, tol)
    if not g.is_strictly_graded:
        raise NotRepresentable("orthogonalizing the Jordan levels breaks A(V_p) in V_(p+1)")
    return g


def level_projector(g, p):
    """h-orthogonal projector onto V_p."""
    X = g.levels[p]
    gram = X.conj().T @ g.h @ X
    return X @ np.linalg.solve(gram, X.conj().T @ g.h)


def trace_profile(g):
    """a_p = Tr(A_p* A_p), using the metric restricted to each level."""
    a = np.zeros(g.k + 1)
    for p, X in enumerate(g.levels):
        if X.shape[1] == 0:
            continue
        Y = g.A @ X
        gram = X.conj().T @ g.h @ X
        a[p] = max(np.trace(np.linalg.solve(gram, Y.conj().T @ g.h @ Y)).real, 0.0)
    return TraceProfile(a, gram_corrected=not g.is_h_orthogonal)


def commutator_chain_check(g, slack=CHAIN_SLACK):
    A, h, r, k = g.A, g.h, g.r, g.k
    lhs = end_norm(bracket(h_adjoint(A, h), A), h)
    a = trace_profile(g).a.copy()
    if k >= 0:
        a[k] = 0.0  # A(V_k) = 0
    padded = np.concatenate([[0.0], a])
    sqrt_r = np.sqrt(r)
    m1 = float(np.sum(np.abs(np.diff(padded)))) / sqrt_r
    if k >= 1:
        m2 = float(np.max(a[:k])) / sqrt_r
        m3 = float(np.sum(a)) / (k * sqrt_r)
    else:
        m2 = m3 = 0.0
    margins = (lhs - m1, m1 - m2, m2 - m3)
    asserted = g.is_h_orthogonal and g.is_strictly_graded
    holds = min(margins) >= -slack
    return ChainReport(lhs, m1, m2, m3, margins, asserted, holds)


def hsc_bound_from_traces(g):
    """-(sum a_p)^2 / (k^2 r): upper bound for the diagonal curvature pairing."""
    if g.k == 0:
        return 0.0
    total = trace_profile(g).total
    return -(total ** 2) / (g.k ** 2 * g.r)


# random instances -----------------------------------------------------------

def random_metric(rank, rng):
    B = rng.normal(size=(rank, rank)) + 1j * rng.normal(size=(rank, rank))
    h = B @ B.conj().T / rank + 0.2 * np.eye(rank)
    return (h + h.conj().T) / 2


def random_graded_instance(rank, rng):
    """Random A with an h-orthogonal strict grading built in.

    Level sizes are a random composition of ``rank`` into k + 1 positive parts
    (1 <= k <= rank - 1); A is block-subdiagonal in an h-orthonormal basis.
    """
    h = random_metric(rank, rng)
    k = int(rng.integers(1, rank))
    cuts = np.sort(rng.choice(np.arange(1, rank), size=k, replace=False))
    dims = np.diff(np.concatenate([[0], cuts, [rank]]))
    L = np.linalg.cholesky(h)
    Z = rng.normal(size=(rank, rank)) + 1j * rng.normal(size=(rank, rank))
    Q, _ = np.linalg.qr(Z)
    E = np.linalg.inv(L).conj().T @ Q  # E^H h E = I
    blocks = np.zeros((rank, rank), dtype=complex)
    offs = np.concatenate([[0], np.cumsum(dims)])
    for p in range(k):
        rows = slice(offs[p + 1], offs[p + 2])
        cols = slice(offs[p], offs[p + 1])
        shape = (dims[p + 1], dims[p])
        blocks[rows, cols] = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    A = E @ blocks @ np.linalg.inv(E)
    levels = [E[:, offs[p]:offs[p + 1]] for p in range(k + 1)]
    return make_graded(A, h, levels, tol=1e-8)


def random_nilpotent(rank, rng, density=0.6):
    """Random strictly upper-triangular matrix conjugated by a random basis change."""
    U = np.triu(rng.normal(size=(rank, rank)) + 1j * rng.normal(size=(rank, rank)), k=1)
    U *= rng.random((rank, rank)) < density
    S = np.eye(rank) + 0.4 * (rng.normal(size=(rank, rank)) + 1j * rng.normal(size=(rank, rank))) / np.sqrt(rank)
    return S @ U @ np.linalg.inv(S)
