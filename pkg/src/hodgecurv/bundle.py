"""Higgs bundles on a coordinate chart.

A bundle is given by m Higgs-field components theta_1..theta_m (r x r matrices
of holomorphic expressions) and a Hermitian metric h (r x r matrix of
expressions) on a chart domain.

Conventions (shared by every module):

* Chern connection ``D_j = d_j + Gamma_j`` with ``Gamma_j = h^{-1} d_j h``.
* Chern curvature ``Theta^h_{j kbar} = -dbar_k (h^{-1} d_j h)``.
* Higgs connection ``D^h + theta + theta*``. Its curvature splits into
    (1,1):  ``Theta^h_{j kbar} - [theta_k*, theta_j]``
    (2,0):  ``d_j theta_k + [Gamma_j, theta_k] - d_k theta_j - [Gamma_k, theta_j]``
  and the (0,2) block is the h-adjoint of the (2,0) block. The bundle is flat
  when both blocks vanish.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import expr as E
from .domain import ChartDomain
from .errors import DegenerateGram, SingularEval, SingularMetric, ValidationError
from .linalg import (GRAM_CONDITION_MAX, NILPOTENT_TOL, bracket, check_positive,
                     gram_matrix, h_adjoint)
from .parser import parse_expr

__all__ = [
    "HiggsBundle", "ConnectionSample", "ValidationReport", "connection_sample",
    "validate", "is_admissible", "nilpotency_order", "chern_curvature_h",
    "flatness_blocks", "flatness_residual", "end_connection_derivative",
]


def _to_expr(x):
    if isinstance(x, str):
        return parse_expr(x)
    return E.as_expr(x)


def _to_text(x):
    return x if isinstance(x, str) else E.to_text(E.as_expr(x))


@dataclass(frozen=True, eq=False)
class HiggsBundle:
    """Higgs field and fibre metric on a chart.

    Entries of ``theta`` and ``h`` may be expression text or :class:`Expr`
    trees; both forms are retained (text is what gets written to files).
    """

    name: str
    theta: tuple
    h: tuple
    domain: ChartDomain
    sample_count: int = 100
    seed: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        m = len(self.theta)
        r = len(self.h)
        problems = []
        if r == 0:
            problems.append("h must be a non-empty square matrix")
        if any(len(row) != r for row in self.h):
            problems.append(f"h must be {r}x{r}")
        for j, th in enumerate(self.theta):
            if len(th) != r or any(len(row) != r for row in th):
                problems.append(f"theta[{j}] must be {r}x{r}")
        if self.domain.dim != m:
            problems.append(f"domain has {self.domain.dim} coordinates but theta has {m} components")
        if problems:
            raise ValidationError(problems)
        theta_text = tuple(tuple(tuple(_to_text(x) for x in row) for row in th) for th in self.theta)
        h_text = tuple(tuple(_to_text(x) for x in row) for row in self.h)
        theta = tuple(tuple(tuple(_to_expr(x) for x in row) for row in th) for th in self.theta)
        h = tuple(tuple(_to_expr(x) for x in row) for row in self.h)
        object.__setattr__(self, "theta_text", theta_text)
        object.__setattr__(self, "h_text", h_text)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "h", h)
        too_far = [
            loc for loc, e in self._entries() if E.max_coord(e) >= m
        ]
        if too_far:
            raise ValidationError([f"{loc}: uses a coordinate beyond t{m}" for loc in too_far])

    def _entries(self):
        for j, th in enumerate(self.theta):
            for a, row in enumerate(th):
                for b, e in enumerate(row):
                    yield f"theta[{j}][{a}][{b}]", e
        for a, row in enumerate(self.h):
            for b, e in enumerate(row):
                yield f"h[{a}][{b}]", e

    def __eq__(self, other):
        if not isinstance(other, HiggsBundle):
            return NotImplemented
        return (self.name, self.theta_text, self.h_text, self.domain,
                self.sample_count, self.seed) == (
                other.name, other.theta_text, other.h_text, other.domain,
                other.sample_count, other.seed)

    __hash__ = object.__hash__

    @property
    def m(self):
        return len(self.theta)

    @property
    def r(self):
        return len(self.h)

    def points(self, count=None, seed=None):
        return self.domain.sample(self.sample_count if count is None else count,
                                  self.seed if seed is None else seed)

    # symbolic derivative tables, built once per bundle
    @cached_property
    def dh(self):
        return tuple(E.diff_matrix(self.h, j) for j in range(self.m))

    @cached_property
    def dbar_h(self):
        return tuple(E.diff_matrix(self.h, k, anti=True) for k in range(self.m))

    @cached_property
    def ddbar_h(self):
        """``ddbar_h[j][k] = dbar_k d_j h``."""
        return tuple(tuple(E.diff_matrix(self.dh[j], k, anti=True) for k in range(self.m))
                     for j in range(self.m))

    @cached_property
    def dtheta(self):
        """``dtheta[j][k] = d_j theta_k``."""
        return tuple(tuple(E.diff_matrix(self.theta[k], j) for k in range(self.m))
                     for j in range(self.m))

    def theta_at(self, t):
        return [E.evaluate_matrix(th, t) for th in self.theta]

    def h_at(self, t):
        """Metric at ``t``, symmetrized and checked positive definite."""
        return check_positive(E.evaluate_matrix(self.h, t))


@dataclass
class ConnectionSample:
    """All pointwise data of the Chern and Higgs connections at ``t``."""

    t: np.ndarray
    h: np.ndarray
    hinv: np.ndarray
    theta: list
    theta_star: list
    gamma: list
    dtheta: list
    curvature: np.ndarray  # (m, m, r, r): Theta^h_{j kbar}

    @property
    def m(self):
        return len(self.theta)


def connection_sample(bundle, t):
    t = np.asarray(t, dtype=complex)
    h = bundle.h_at(t)
    hinv = np.linalg.inv(h)
    m, r = bundle.m, bundle.r
    dh = [E.evaluate_matrix(d, t) for d in bundle.dh]
    dbar_h = [E.evaluate_matrix(d, t) for d in bundle.dbar_h]
    gamma = [hinv @ d for d in dh]
    curv = np.empty((m, m, r, r), dtype=complex)
    for j in range(m):
        for k in range(m):
            ddh = E.evaluate_matrix(bundle.ddbar_h[j][k], t)
            curv[j, k] = hinv @ dbar_h[k] @ gamma[j] - hinv @ ddh
    theta = bundle.theta_at(t)
    theta_star = [h_adjoint(th, h) for th in theta]
    dtheta = [[E.evaluate_matrix(bundle.dtheta[j][k], t) for k in range(m)] for j in range(m)]
    return ConnectionSample(t, h, hinv, theta, theta_star, gamma, dtheta, curv)


def chern_curvature_h(bundle, t):
    """Chern curvature components Theta^h_{j kbar}(t), shape (m, m, r, r)."""
    return connection_sample(bundle, t).curvature


@dataclass
class ValidationReport:
    holomorphic: bool
    non_holomorphic: list
    max_commutator: float
    worst_pair: tuple | None
    positive: bool
    problems: list

    @property
    def valid(self):
        return not self.problems


def validate(bundle, points=None, tol=1e-9):
    """Check the Higgs axioms at sample points; never raises on mathematical failure."""
    problems = []
    bad = []
    for j, th in enumerate(bundle.theta):
        for a, row in enumerate(th):
            for b, e in enumerate(row):
                if not E.is_holomorphic(e):
                    bad.append(f"theta[{j}][{a}][{b}]")
    if bad:
        problems.append("Higgs field not holomorphic: " + ", ".join(bad))
    if points is None:
        points = bundle.points()
    max_comm, max_rel, worst = 0.0, 0.0, None
    positive = True
    for t in points:
        try:
            th = bundle.theta_at(t)
        except SingularEval as exc:
            problems.append(f"theta singular at {t.tolist()}: {exc}")
            break
        for j, l in itertools.combinations(range(bundle.m), 2):
            c = np.linalg.norm(bracket(th[j], th[l]))
            scale = max(1.0, np.linalg.norm(th[j]) * np.linalg.norm(th[l]))
            if c / scale > max_rel:
                max_rel, worst = c / scale, (j, l)
            max_comm = max(max_comm, c)
        try:
            bundle.h_at(t)
        except (SingularMetric, SingularEval):
            positive = False
    if max_rel > tol:
        j, l = worst
        problems.append(f"[theta_{j + 1}, theta_{l + 1}] != 0 (norm {max_comm:.6g})")
    if not positive:
        problems.append("h is not positive definite at every sample")
    return ValidationReport(not bad, bad, float(max_comm), worst, positive, problems)


def is_admissible(bundle, t, cond_max=GRAM_CONDITION_MAX):
    """Whether theta_1(t)..theta_m(t) are independent in End(H).

    Returns ``(admissible, condition_number)``.
    """
    h = bundle.h_at(t)
    g = gram_matrix(bundle.theta_at(t), h)
    if not np.any(np.abs(g) > 0):
        return False, float("inf")
    cond = float(np.linalg.cond(g))
    return bool(np.isfinite(cond) and cond <= cond_max), cond


def require_admissible(bundle, t, cond_max=GRAM_CONDITION_MAX):
    ok, cond = is_admissible(bundle, t, cond_max)
    if not ok:
        raise DegenerateGram(f"Higgs field components are dependent at t={np.asarray(t).tolist()}", cond)
    return cond


def nilpotency_order(bundle, points=None, tol=NILPOTENT_TOL):
    """Smallest k with every (k+1)-fold product of theta components zero, else None.

    The components commute, so only non-decreasing index tuples are checked.
    The search stops at k = r - 1.
    """
    if points is None:
        points = bundle.points()
    thetas = [bundle.theta_at(t) for t in points]
    for k in range(bundle.r):
        ok = True
        for th in thetas:
            scale = max(1.0, max(np.linalg.norm(x) for x in th) ** (k + 1)) if th else 1.0
            for idx in itertools.combinations_with_replacement(range(bundle.m), k + 1):
                P = th[idx[0]]
                for i in idx[1:]:
                    P = P @ th[i]
                if np.linalg.norm(P) > tol * scale:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return k
    return None


def flatness_blocks(sample):
    """Norms of the (1,1) and (2,0) Higgs-curvature blocks at one sample.

    Returns ``(res11, res20)`` as (m, m) arrays of Frobenius norms; ``res20``
    is filled for j < k only.
    """
    m = sample.m
    res11 = np.zeros((m, m))
    res20 = np.zeros((m, m))
    th, ths, gam, dth = sample.theta, sample.theta_star, sample.gamma, sample.dtheta
    for j in range(m):
        for k in range(m):
            res11[j, k] = np.linalg.norm(sample.curvature[j, k] - bracket(ths[k], th[j]))
            if j < k:
                block = (dth[j][k] + bracket(gam[j], th[k])
                         - dth[k][j] - bracket(gam[k], th[j]))
                res20[j, k] = np.linalg.norm(block)
    return res11, res20


def flatness_residual(bundle, t):
    """Largest Frobenius norm among the Higgs-curvature blocks at ``t``."""
    res11, res20 = flatness_blocks(connection_sample(bundle, t))
    return float(max(res11.max(initial=0.0), res20.max(initial=0.0)))


def end_connection_derivative(bundle, j, A, t):
    """(D_j A)(t) = (d_j A)(t) + [Gamma_j(t), A(t)] for an expression matrix A."""
    t = np.asarray(t, dtype=complex)
    h = bundle.h_at(t)
    gamma = np.linalg.solve(h, E.evaluate_matrix(bundle.dh[j], t))
    dA = E.evaluate_matrix(E.diff_matrix(A, j), t)
    return dA + bracket(gamma, E.evaluate_matrix(A, t))
