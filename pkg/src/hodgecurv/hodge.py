"""Hodge metric on the base and its curvature.

The Hodge (semi-)metric is ``G_{j kbar} = (theta_j, theta_k)`` in the
Hilbert-Schmidt pairing of End(H). Tangent vectors pair as
``(u, v)_H = sum_{p,q} G_{p qbar} u^p conj(v^q)``.

Curvature of the base is returned as the pairing tensor
``R[j, k, l, p] = (Theta_{j kbar} d_l, d_p)_H`` and is computed by three
independent routes:

``direct``
    Chern curvature of G itself, from exact symbolic derivatives of the
    expression-level entries of G.
``subbundle``
    Gauss-Griffiths formula for T_B viewed as a subbundle of End(H).
``flat``
    The commutator form valid for flat Higgs bundles.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as E
from .bundle import (connection_sample, flatness_blocks, require_admissible)
from .errors import NotFlat
from .linalg import (bracket, check_positive, end_inner, gram_matrix,
                     gram_project_complement)

__all__ = [
    "BaseCurvatureSample", "hodge_metric", "hodge_metric_exprs", "kahler_residual",
    "base_curvature_direct", "base_curvature_subbundle", "base_curvature_flat_formula",
    "curvature_all_routes", "bisectional_form", "bisectional_values",
    "scalar_trace_check", "holomorphic_sectional_curvature", "hsc_from_sample",
    "pair", "routes_agree",
]


@dataclass
class BaseCurvatureSample:
    route: str
    t: np.ndarray
    G: np.ndarray
    R: np.ndarray  # (m, m, m, m)

    @property
    def m(self):
        return self.G.shape[0]

    def hermitian_defect(self):
        """max |R[j,k,l,p] - conj(R[k,j,p,l])|."""
        return float(np.max(np.abs(self.R - np.conj(self.R.transpose(1, 0, 3, 2))), initial=0.0))


def hodge_metric_exprs(bundle):
    """Expression-level Hodge metric; cached on the bundle.

    ``G_{j kbar} = Tr(theta_j adj(h) theta_k^H h) / det(h)``.
    """
    cache = bundle._cache
    if "G" not in cache:
        adj = E.adjugate(bundle.h)
        det = E.det(bundle.h)
        G = []
        for j in range(bundle.m):
            left = E.matmul(bundle.theta[j], adj)
            row = []
            for k in range(bundle.m):
                right = E.matmul(E.conj_transpose(bundle.theta[k]), bundle.h)
                row.append(E.quot(E.trace(E.matmul(left, right)), det))
            G.append(tuple(row))
        cache["G"] = tuple(G)
    return cache["G"]


def _metric_derivs(bundle):
    cache = bundle._cache
    if "dG" not in cache:
        G = hodge_metric_exprs(bundle)
        dG = tuple(E.diff_matrix(G, l) for l in range(bundle.m))
        dbarG = tuple(E.diff_matrix(G, l, anti=True) for l in range(bundle.m))
        ddG = tuple(tuple(E.diff_matrix(dG[j], k, anti=True) for k in range(bundle.m))
                    for j in range(bundle.m))
        cache["dG"] = dG
        cache["dbarG"] = dbarG
        cache["ddG"] = ddG
    return cache["dG"], cache["dbarG"], cache["ddG"]


def hodge_metric(bundle, t):
    """Numeric Hodge metric at ``t`` (Hermitian, possibly degenerate)."""
    h = bundle.h_at(t)
    G = gram_matrix(bundle.theta_at(t), h)
    return (G + G.conj().T) / 2


def pair(G, u, v):
    """(u, v)_H = sum G_{p qbar} u^p conj(v^q)."""
    return complex(np.asarray(u) @ G @ np.conj(np.asarray(v)))


def kahler_residual(bundle, t):
    """max over j, k, l of |d_l G_{j kbar} - d_j G_{l kbar}| at ``t``."""
    m = bundle.m
    if m < 2:
        return 0.0
    dG, _, _ = _metric_derivs(bundle)
    vals = np.array([E.evaluate_matrix(d, t) for d in dG])  # vals[l, j, k] = d_l G_{j kbar}
    res = vals - vals.transpose(1, 0, 2)
    return float(np.max(np.abs(res)))


def base_curvature_direct(bundle, t):
    """Chern curvature of G from its symbolic derivatives.

    With ``H = G^T`` (so that ``(u, v)_H = v^H H u``),
    ``(Theta_{j kbar} d_l, d_p)_H = (H Theta_{j kbar})[p, l]`` and
    ``H Theta_{j kbar} = -dbar_k d_j H + (dbar_k H) H^{-1} (d_j H)``.
    """
    t = np.asarray(t, dtype=complex)
    m = bundle.m
    G = check_positive(E.evaluate_matrix(hodge_metric_exprs(bundle), t))
    dG, dbarG, ddG = _metric_derivs(bundle)
    H = G.T
    Hinv = np.linalg.inv(H)
    dH = [E.evaluate_matrix(dG[j], t).T for j in range(m)]
    dbarH = [E.evaluate_matrix(dbarG[k], t).T for k in range(m)]
    R = np.empty((m, m, m, m), dtype=complex)
    for j in range(m):
        for k in range(m):
            HTheta = -E.evaluate_matrix(ddG[j][k], t).T + dbarH[k] @ Hinv @ dH[j]
            R[j, k] = HTheta.T  # R[j,k,l,p] = HTheta[p,l]
    return BaseCurvatureSample("direct", t, G, R)


def _projected_derivatives(cs):
    """P-perp of D_j theta_l for all j, l, plus the Gram matrix."""
    m = cs.m
    gram = gram_matrix(cs.theta, cs.h)
    out = [[None] * m for _ in range(m)]
    for j in range(m):
        for l in range(m):
            D = cs.dtheta[j][l] + bracket(cs.gamma[j], cs.theta[l])
            out[j][l] = gram_project_complement(D, cs.theta, cs.h, gram=gram)
    return out, gram


def _second_fundamental(cs, proj):
    m = cs.m
    S = np.empty((m, m, m, m), dtype=complex)
    for j in range(m):
        for k in range(m):
            for l in range(m):
                for p in range(m):
                    S[j, k, l, p] = end_inner(proj[j][l], proj[k][p], cs.h)
    return S


def base_curvature_subbundle(bundle, t, cs=None):
    """Curvature of T_B as a holomorphic subbundle of End(H)."""
    t = np.asarray(t, dtype=complex)
    require_admissible(bundle, t)
    cs = cs or connection_sample(bundle, t)
    m = cs.m
    proj, gram = _projected_derivatives(cs)
    S = _second_fundamental(cs, proj)
    R = np.empty((m, m, m, m), dtype=complex)
    for j in range(m):
        for k in range(m):
            for l in range(m):
                ambient = bracket(cs.curvature[j, k], cs.theta[l])
                for p in range(m):
                    R[j, k, l, p] = end_inner(ambient, cs.theta[p], cs.h) - S[j, k, l, p]
    G = (gram + gram.conj().T) / 2
    return BaseCurvatureSample("subbundle", t, G, R)


def base_curvature_flat_formula(bundle, t, cs=None, tol=1e-9):
    """Commutator form of the base curvature; requires flatness at ``t``.

    ``R[j,k,l,p] = -([theta_k*, theta_l], [theta_j*, theta_p]) - (P D_j theta_l, P D_k theta_p)``
    with P the projection onto the complement of span(theta).
    """
    t = np.asarray(t, dtype=complex)
    cs = cs or connection_sample(bundle, t)
    res11, res20 = flatness_blocks(cs)
    residual = max(res11.max(initial=0.0), res20.max(initial=0.0))
    if residual > tol:
        raise NotFlat(f"flatness residual {residual:.6g} exceeds {tol:g} at t={t.tolist()}")
    require_admissible(bundle, t)
    m = cs.m
    proj, gram = _projected_derivatives(cs)
    S = _second_fundamental(cs, proj)
    comm = [[bracket(cs.theta_star[k], cs.theta[l]) for l in range(m)] for k in range(m)]
    R = np.empty((m, m, m, m), dtype=complex)
    for j in range(m):
        for k in range(m):
            for l in range(m):
                for p in range(m):
                    R[j, k, l, p] = -end_inner(comm[k][l], comm[j][p], cs.h) - S[j, k, l, p]
    G = (gram + gram.conj().T) / 2
    return BaseCurvatureSample("flat", t, G, R)


def curvature_all_routes(bundle, t, tol=1e-9):
    """Run every applicable route at ``t``; the flat route is omitted when not flat."""
    cs = connection_sample(bundle, t)
    out = {
        "direct": base_curvature_direct(bundle, t),
        "subbundle": base_curvature_subbundle(bundle, t, cs),
    }
    try:
        out["flat"] = base_curvature_flat_formula(bundle, t, cs, tol)
    except NotFlat:
        pass
    return out


def routes_agree(a, b, rtol=1e-6, atol=1e-9):
    """Elementwise |a - b| <= atol + rtol * |b| on the pairing tensors.

    Returns ``(ok, worst_excess)`` where the excess is the largest
    ``|a - b| - (atol + rtol |b|)`` (negative when everything agrees).
    """
    diff = np.abs(a.R - b.R)
    allow = atol + rtol * np.abs(b.R)
    excess = float(np.max(diff - allow))
    return excess <= 0, excess


def bisectional_values(sample, xi, v):
    """Complex values of sum (Theta_{j kbar} v, v)_H xi^j conj(xi^k) for rows of ``xi``, ``v``."""
    xi = np.atleast_2d(np.asarray(xi, dtype=complex))
    v = np.atleast_2d(np.asarray(v, dtype=complex))
    return np.einsum("jklp,nj,nk,nl,np->n", sample.R, xi, xi.conj(), v, v.conj())


def bisectional_form(sample, xi, v):
    """Real part of the bisectional pairing; the imaginary part is a diagnostic.

    Returns ``(value, imag)``.
    """
    z = complex(bisectional_values(sample, xi, v)[0])
    return z.real, z.imag


def scalar_trace_check(sample):
    """Re sum_{j,k} (Theta_{j kbar} d_k, d_j)_H."""
    m = sample.m
    return float(sum(sample.R[j, k, k, j] for j in range(m) for k in range(m)).real)


def hsc_from_sample(sample, v):
    """Holomorphic sectional curvature (Theta(v, vbar) v, v)_H / (v, v)_H^2."""
    v = np.atleast_2d(np.asarray(v, dtype=complex))
    num = bisectional_values(sample, v, v).real
    norm2 = np.einsum("np,pq,nq->n", v, sample.G, v.conj()).real
    return num / norm2 ** 2


def holomorphic_sectional_curvature(bundle, t, v):
    """HSC of the Hodge metric at ``t`` in direction ``v`` (direct route)."""
    return float(hsc_from_sample(base_curvature_direct(bundle, t), v)[0])
