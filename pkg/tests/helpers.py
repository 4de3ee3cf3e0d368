"""Shared oracles for the test suite: random expressions and finite differences."""
import numpy as np

from hodgecurv import expr as E


def random_expr(rng, depth, m=2, holomorphic=False):
    """Random expression tree; denominators are kept away from zero."""
    if depth <= 0 or rng.random() < 0.2:
        roll = rng.random()
        if roll < 0.35:
            return E.const(complex(round(rng.normal(), 3), round(rng.normal(), 3)))
        j = int(rng.integers(m))
        if holomorphic or roll < 0.7:
            return E.coord(j)
        return E.conj(E.coord(j))
    kind = rng.choice(["add", "mul", "quot", "power", "conj"])
    if kind == "conj" and holomorphic:
        kind = "add"
    sub = lambda: random_expr(rng, depth - 1, m, holomorphic)  # noqa: E731
    if kind == "add":
        return E.add(sub(), sub())
    if kind == "mul":
        return E.mul(sub(), sub())
    if kind == "quot":
        d = sub()
        if holomorphic:
            # |t| <= 1 on the sample box, so 4 + t^2 stays away from zero
            den = E.add(E.const(4), E.power(E.coord(int(rng.integers(m))), 2))
            return E.quot(sub(), den) if d is None else E.quot(d, den)
        return E.quot(sub(), E.add(E.const(5), E.mul(d, E.conj(d))))
    if kind == "power":
        return E.power(sub(), int(rng.integers(0, 4)))
    return E.conj(sub())


def random_point(rng, m=2, radius=0.7):
    return (rng.uniform(-radius, radius, m) + 1j * rng.uniform(-radius, radius, m)) / np.sqrt(2)


def _fd_axis(f, t, j, direction, step):
    e = np.zeros(t.shape, dtype=complex)
    e[j] = direction  # also broadcasts over a trailing sample axis
    vals = [f(t + s * step * e) for s in (2, 1, -1, -2)]
    return (-vals[0] + 8 * vals[1] - 8 * vals[2] + vals[3]) / (12 * step)


def fd_wirtinger(f, t, j, anti=False, step=1e-5):
    """4-point central differences in Re and Im, recombined as (d_x -+ i d_y)/2."""
    t = np.asarray(t, dtype=complex)
    dx = _fd_axis(f, t, j, 1.0, step)
    dy = _fd_axis(f, t, j, 1j, step)
    return (dx + 1j * dy) / 2 if anti else (dx - 1j * dy) / 2


def close(a, b, rtol=1e-6, atol=1e-9):
    return abs(a - b) <= atol + rtol * abs(b)
