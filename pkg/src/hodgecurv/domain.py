"""Chart domains: per-coordinate boxes with an optional half-plane bound."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .errors import DomainError

__all__ = ["CoordinateRange", "ChartDomain"]


@dataclass(frozen=True)
class CoordinateRange:
    """Constraint on one coordinate: Re t in ``re``, Im t in ``im``.

    ``half_plane`` optionally adds Im t >= c (c > 0); the sampled box is then
    clipped to it.
    """

    re: tuple[float, float] = (-1.0, 1.0)
    im: tuple[float, float] = (-1.0, 1.0)
    half_plane: float | None = None

    def __post_init__(self):
        for name in ("re", "im"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ValueError(f"{name} range must satisfy lo <= hi, got {lo}, {hi}")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if self.half_plane is not None:
            if not self.half_plane > 0:
                raise ValueError("half-plane bound must be positive")
            if self.half_plane > self.im[1]:
                raise ValueError("half-plane bound excludes the whole box")

    @property
    def im_effective(self):
        lo, hi = self.im
        if self.half_plane is not None:
            lo = max(lo, self.half_plane)
        return lo, hi

    def contains(self, z, slack=1e-12):
        lo, hi = self.im_effective
        return ((self.re[0] - slack <= z.real) & (z.real <= self.re[1] + slack)
                & (lo - slack <= z.imag) & (z.imag <= hi + slack))

    def to_json(self):
        out = {"re": list(self.re), "im": list(self.im)}
        if self.half_plane is not None:
            out["half_plane"] = self.half_plane
        return out


@dataclass(frozen=True)
class ChartDomain:
    coords: tuple[CoordinateRange, ...]

    @property
    def dim(self):
        return len(self.coords)

    def contains(self, t):
        t = np.asarray(t, dtype=complex)
        if t.shape[0] != self.dim:
            return False
        return bool(np.all([c.contains(t[j]) for j, c in enumerate(self.coords)]))

    def require(self, t):
        t = np.asarray(t, dtype=complex)
        if t.shape[0] != self.dim:
            raise DomainError(f"point has {t.shape[0]} coordinates, chart has {self.dim}")
        if not self.contains(t):
            raise DomainError(f"point {t.tolist()} lies outside the chart domain")

    def sample(self, count, seed=0):
        """Deterministic scrambled-Halton points, returned with shape ``(count, m)``."""
        if count <= 0:
            return np.empty((0, self.dim), dtype=complex)
        sampler = qmc.Halton(d=2 * self.dim, scramble=True, seed=seed)
        u = sampler.random(count)
        lower, upper = [], []
        for c in self.coords:
            lower.append(c.re[0])
            upper.append(c.re[1])
        for c in self.coords:
            lo, hi = c.im_effective
            lower.append(lo)
            upper.append(hi)
        lower, upper = np.array(lower), np.array(upper)
        x = lower + u * (upper - lower)
        return x[:, :self.dim] + 1j * x[:, self.dim:]

    def to_json(self):
        return [c.to_json() for c in self.coords]

    @classmethod
    def from_json(cls, data):
        coords = []
        for item in data:
            coords.append(CoordinateRange(
                re=tuple(item.get("re", (-1.0, 1.0))),
                im=tuple(item.get("im", (-1.0, 1.0))),
                half_plane=item.get("half_plane"),
            ))
        return cls(tuple(coords))
