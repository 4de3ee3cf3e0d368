"""Closed-form scalar expressions in complex coordinates t1..tm and their conjugates.

Expressions are immutable trees. The node set is deliberately small (constants,
coordinates, sums, products, quotients, integer powers and conjugation) so that
Wirtinger differentiation is total and exact:

    d/dt  = (d/dx - i d/dy) / 2,     d/dtbar = (d/dx + i d/dy) / 2.

Only local simplifications are applied at construction time (constant folding,
absorption of 0 and 1, flattening of nested sums/products, conj(conj(e)) -> e),
which keeps derivative trees small without attempting a canonical form.

Coordinates are 0-based in the Python API and printed 1-based (``t1`` is index 0).

Examples
--------
>>> t = coord(0)
>>> y = (t - conj(t)) / 2j
>>> e = y ** -1
>>> complex(evaluate(wirtinger_d(wirtinger_d(e, 0), 0, anti=True), [1j]))
(0.5+0j)
"""
from __future__ import annotations

import math
import numbers

import numpy as np

from .errors import SingularEval

__all__ = [
    "Expr", "Const", "Coord", "Add", "Mul", "Quot", "Power", "Conj",
    "const", "coord", "conj", "add", "mul", "quot", "power",
    "wirtinger_d", "evaluate", "to_text", "is_holomorphic", "ZERO", "ONE",
    "as_expr", "expr_matrix", "matmul", "mat_add", "mat_sub", "conj_transpose",
    "trace", "det", "adjugate", "commutator", "diff_matrix", "evaluate_matrix",
]


class Expr:
    """Base class of expression nodes. Use the module-level constructors."""

    __slots__ = ()

    # arithmetic sugar -------------------------------------------------------
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, mul(const(-1), as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), mul(const(-1), self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return quot(self, as_expr(other))

    def __rtruediv__(self, other):
        return quot(as_expr(other), self)

    def __neg__(self):
        return mul(const(-1), self)

    def __pow__(self, n):
        if not isinstance(n, numbers.Integral):
            raise TypeError("only integer powers are supported")
        return power(self, int(n))

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"<{type(self).__name__} {to_text(self)}>"

    def children(self):
        return ()

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        value = complex(value)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise ValueError(f"non-finite constant {value!r}")
        object.__setattr__(self, "value", value)


class Coord(Expr):
    """The coordinate t^index, or its conjugate when ``conjugated`` is set."""

    __slots__ = ("index", "conjugated")

    def __init__(self, index, conjugated=False):
        if index < 0:
            raise ValueError("coordinate index must be non-negative")
        object.__setattr__(self, "index", int(index))
        object.__setattr__(self, "conjugated", bool(conjugated))


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        object.__setattr__(self, "terms", tuple(terms))

    def children(self):
        return self.terms


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors):
        object.__setattr__(self, "factors", tuple(factors))

    def children(self):
        return self.factors


class Quot(Expr):
    __slots__ = ("num", "den")

    def __init__(self, num, den):
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def children(self):
        return (self.num, self.den)


class Power(Expr):
    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", int(exponent))

    def children(self):
        return (self.base,)


class Conj(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg):
        object.__setattr__(self, "arg", arg)

    def children(self):
        return (self.arg,)


ZERO = Const(0)
ONE = Const(1)


def _is_const(e, value=None):
    return isinstance(e, Const) and (value is None or e.value == value)


def as_expr(x):
    if isinstance(x, Expr):
        return x
    if isinstance(x, numbers.Number):
        return const(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


def const(value):
    value = complex(value)
    if value == 0:
        return ZERO
    if value == 1:
        return ONE
    return Const(value)


def coord(index, conjugated=False):
    return Coord(index, conjugated)


def add(*terms):
    flat = []
    total = 0j
    for term in terms:
        term = as_expr(term)
        parts = term.terms if isinstance(term, Add) else (term,)
        for part in parts:
            if isinstance(part, Const):
                total += part.value
            else:
                flat.append(part)
    if total != 0:
        flat.append(Const(total))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(flat)


def mul(*factors):
    flat = []
    scale = 1 + 0j
    for factor in factors:
        factor = as_expr(factor)
        parts = factor.factors if isinstance(factor, Mul) else (factor,)
        for part in parts:
            if isinstance(part, Const):
                scale *= part.value
            else:
                flat.append(part)
    if scale == 0:
        return ZERO
    if not flat:
        return const(scale)
    if scale != 1:
        flat.insert(0, Const(scale))
    if len(flat) == 1:
        return flat[0]
    return Mul(flat)


def quot(num, den):
    num, den = as_expr(num), as_expr(den)
    if isinstance(den, Const):
        if den.value == 0:
            raise SingularEval("division by the constant zero")
        return mul(const(1 / den.value), num)
    if _is_const(num, 0):
        return ZERO
    return Quot(num, den)


def power(base, n):
    base = as_expr(base)
    n = int(n)
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Const):
        if base.value == 0:
            if n < 0:
                raise SingularEval("negative power of the constant zero")
            return ZERO
        return const(base.value ** n)
    if isinstance(base, Power):
        return power(base.base, base.exponent * n)
    return Power(base, n)


def conj(e):
    e = as_expr(e)
    if isinstance(e, Const):
        return const(e.value.conjugate())
    if isinstance(e, Coord):
        return Coord(e.index, not e.conjugated)
    if isinstance(e, Conj):
        return e.arg
    return Conj(e)


def is_holomorphic(e):
    """Structural holomorphy: no conjugation node and no conjugated coordinate."""
    seen = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Conj) or (isinstance(node, Coord) and node.conjugated):
            return False
        stack.extend(node.children())
    return True


def max_coord(e):
    """Largest coordinate index appearing in ``e`` (-1 if none)."""
    best = -1
    seen = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Coord):
            best = max(best, node.index)
        stack.extend(node.children())
    return best


# differentiation ------------------------------------------------------------

def wirtinger_d(e, j, anti=False):
    """Exact Wirtinger derivative d/dt^j (or d/dtbar^j when ``anti``) of ``e``."""
    return _diff(as_expr(e), int(j), bool(anti), {})


def _diff(e, j, anti, memo):
    key = (id(e), anti)
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(e, Const):
        out = ZERO
    elif isinstance(e, Coord):
        out = ONE if (e.index == j and e.conjugated == anti) else ZERO
    elif isinstance(e, Add):
        out = add(*(_diff(t, j, anti, memo) for t in e.terms))
    elif isinstance(e, Mul):
        terms = []
        for i, f in enumerate(e.factors):
            df = _diff(f, j, anti, memo)
            if not _is_const(df, 0):
                terms.append(mul(*e.factors[:i], df, *e.factors[i + 1:]))
        out = add(*terms)
    elif isinstance(e, Quot):
        dn = _diff(e.num, j, anti, memo)
        dd = _diff(e.den, j, anti, memo)
        out = add(quot(dn, e.den), mul(const(-1), quot(mul(e.num, dd), power(e.den, 2))))
    elif isinstance(e, Power):
        db = _diff(e.base, j, anti, memo)
        out = mul(const(e.exponent), power(e.base, e.exponent - 1), db)
    elif isinstance(e, Conj):
        out = conj(_diff(e.arg, j, not anti, memo))
    else:  # pragma: no cover
        raise TypeError(f"unknown node {type(e).__name__}")
    # keep e alive in the memo so ids are not recycled mid-walk
    memo[key] = (e, out)
    return out


# evaluation -----------------------------------------------------------------

def evaluate(e, t, domain=None):
    """Evaluate ``e`` at ``t``.

    ``t`` has shape ``(m,)`` for a single point or ``(m, N)`` for N points at
    once. Raises :class:`SingularEval` on a zero denominator and, if a domain
    is given, :class:`DomainError` for points outside it.
    """
    t = np.asarray(t, dtype=complex)
    if domain is not None:
        domain.require(t)
    out = _eval(as_expr(e), t, {})
    if t.ndim == 2:
        return np.broadcast_to(np.asarray(out, dtype=complex), t.shape[1:]).copy()
    return complex(out)


def _eval(e, t, cache):
    key = id(e)
    hit = cache.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(e, Const):
        val = e.value
    elif isinstance(e, Coord):
        if e.index >= t.shape[0]:
            raise ValueError(f"coordinate t{e.index + 1} not present in a {t.shape[0]}-dimensional point")
        val = np.conj(t[e.index]) if e.conjugated else t[e.index]
    elif isinstance(e, Add):
        val = _eval(e.terms[0], t, cache)
        for term in e.terms[1:]:
            val = val + _eval(term, t, cache)
    elif isinstance(e, Mul):
        val = _eval(e.factors[0], t, cache)
        for factor in e.factors[1:]:
            val = val * _eval(factor, t, cache)
    elif isinstance(e, Quot):
        den = _eval(e.den, t, cache)
        if np.any(den == 0):
            raise SingularEval(f"zero denominator in {to_text(e.den)}")
        val = _eval(e.num, t, cache) / den
    elif isinstance(e, Power):
        base = _eval(e.base, t, cache)
        if e.exponent < 0:
            if np.any(base == 0):
                raise SingularEval(f"zero base raised to {e.exponent} in {to_text(e)}")
            val = 1 / base ** (-e.exponent)
        else:
            val = base ** e.exponent
    elif isinstance(e, Conj):
        val = np.conj(_eval(e.arg, t, cache))
    else:  # pragma: no cover
        raise TypeError(f"unknown node {type(e).__name__}")
    if not np.all(np.isfinite(val)):
        raise SingularEval(f"non-finite value in {to_text(e)}")
    cache[key] = (e, val)
    return val


# printing -------------------------------------------------------------------

def _fmt_const(c):
    re_, im_ = c.real, c.imag
    if im_ == 0:
        return f"({re_!r})"
    sign = "-" if math.copysign(1.0, im_) < 0 else "+"
    if re_ == 0:
        return f"({'-' if sign == '-' else ''}{abs(im_)!r}i)"
    return f"({re_!r}{sign}{abs(im_)!r}i)"


def to_text(e):
    """Render ``e`` in the expression grammar accepted by :func:`parse_expr`."""
    if isinstance(e, Const):
        return _fmt_const(e.value)
    if isinstance(e, Coord):
        name = f"t{e.index + 1}"
        return f"conj({name})" if e.conjugated else name
    if isinstance(e, Add):
        return "(" + " + ".join(to_text(t) for t in e.terms) + ")"
    if isinstance(e, Mul):
        return "(" + "*".join(to_text(f) for f in e.factors) + ")"
    if isinstance(e, Quot):
        return f"({to_text(e.num)}/{to_text(e.den)})"
    if isinstance(e, Power):
        return f"({to_text(e.base)})^{e.exponent}"
    if isinstance(e, Conj):
        return f"conj({to_text(e.arg)})"
    raise TypeError(f"unknown node {type(e).__name__}")  # pragma: no cover


# matrices of expressions ----------------------------------------------------
# Matrices are tuples of row tuples; they stay small (rank <= 16).

def expr_matrix(rows):
    return tuple(tuple(as_expr(x) for x in row) for row in rows)


def _shape(a):
    return len(a), len(a[0]) if a else 0


def matmul(a, b):
    n, k = _shape(a)
    k2, p = _shape(b)
    if k != k2:
        raise ValueError(f"shape mismatch {n}x{k} @ {k2}x{p}")
    return tuple(
        tuple(add(*(mul(a[i][s], b[s][j]) for s in range(k))) for j in range(p))
        for i in range(n)
    )


def mat_add(a, b):
    return tuple(tuple(add(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a, b):
    return tuple(tuple(add(x, mul(const(-1), y)) for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c, a):
    c = as_expr(c)
    return tuple(tuple(mul(c, x) for x in row) for row in a)


def conj_transpose(a):
    n, p = _shape(a)
    return tuple(tuple(conj(a[i][j]) for i in range(n)) for j in range(p))


def commutator(a, b):
    return mat_sub(matmul(a, b), matmul(b, a))


def trace(a):
    return add(*(a[i][i] for i in range(len(a))))


def _minor_det(a, rows, cols, memo):
    """Determinant of the submatrix on ``rows`` x ``cols`` by Laplace expansion."""
    key = (rows, cols)
    if key in memo:
        return memo[key]
    if len(rows) == 1:
        out = a[rows[0]][cols[0]]
    else:
        r0, rest = rows[0], rows[1:]
        terms = []
        for pos, c in enumerate(cols):
            entry = a[r0][c]
            if _is_const(entry, 0):
                continue
            sub = _minor_det(a, rest, cols[:pos] + cols[pos + 1:], memo)
            if _is_const(sub, 0):
                continue
            sign = -1 if pos % 2 else 1
            terms.append(mul(const(sign), entry, sub))
        out = add(*terms)
    memo[key] = out
    return out


def det(a):
    n = len(a)
    return _minor_det(a, tuple(range(n)), tuple(range(n)), {})


def adjugate(a):
    """Classical adjoint, so that ``a @ adjugate(a) == det(a) * I``."""
    n = len(a)
    if n == 1:
        return ((ONE,),)
    memo = {}
    full = tuple(range(n))
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            rows = full[:j] + full[j + 1:]
            cols = full[:i] + full[i + 1:]
            minor = _minor_det(a, rows, cols, memo)
            out[i][j] = mul(const(-1 if (i + j) % 2 else 1), minor)
    return tuple(tuple(row) for row in out)


def diff_matrix(a, j, anti=False):
    memo = {}
    return tuple(tuple(_diff(x, int(j), bool(anti), memo) for x in row) for row in a)


def evaluate_matrix(a, t):
    """Evaluate an expression matrix at a single point; returns a complex ndarray."""
    t = np.asarray(t, dtype=complex)
    cache = {}
    out = np.empty(_shape(a), dtype=complex)
    for i, row in enumerate(a):
        for j, x in enumerate(row):
            out[i, j] = _eval(x, t, cache)
    return out
