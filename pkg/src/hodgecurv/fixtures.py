"""Built-in harmonic-bundle fixtures and the JSON bundle file format.

File format (one JSON document)::

    {
      "name": "uniformizing",
      "base_dim": 1,
      "rank": 2,
      "domain": [{"re": [-2.0, 2.0], "im": [0.2, 5.0]}],
      "theta": [[["0", "0.5"], ["0", "0"]]],
      "h": [["((t1 - conj(t1))/(2i))^-1", "0"], ["0", "((t1 - conj(t1))/(2i))"]],
      "samples": {"count": 100, "seed": 0}
    }

``theta`` holds m row-major r x r matrices of expression strings; each domain
entry may also carry ``"half_plane": c`` (Im t >= c > 0).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import expr as E
from .bundle import HiggsBundle, flatness_residual
from .domain import ChartDomain, CoordinateRange
from .errors import (ParseError, SingularEval, SingularMetric, UnknownFixture,
                     ValidationError)
from .linalg import check_positive
from .parser import parse_expr

__all__ = [
    "FixtureSpec", "CATALOG", "fixture_names", "get_fixture", "list_fixtures",
    "bundle_to_json", "dumps_bundle", "bundle_from_json", "load_bundle",
    "emit_fixture", "FLAT_TOL",
]

FLAT_TOL = 1e-9
HERMITIAN_TOL = 1e-9
_SQRT_HALF = "0.7071067811865476"


def _y(j):
    return f"((t{j} - conj(t{j}))/(2i))"


def _zeros(r):
    return [["0"] * r for _ in range(r)]


def _diag(entries):
    r = len(entries)
    out = _zeros(r)
    for i, e in enumerate(entries):
        out[i][i] = e
    return out


def _unit(r, i, j, value="1"):
    out = _zeros(r)
    out[i][j] = value
    return out


_HALF_PLANE = CoordinateRange(re=(-2.0, 2.0), im=(0.2, 5.0))
_UNIT_BOX = CoordinateRange(re=(-1.0, 1.0), im=(-1.0, 1.0))


@dataclass(frozen=True)
class FixtureSpec:
    name: str
    description: str
    theta: tuple
    h: tuple
    domain: tuple
    flat: bool
    admissible: bool
    k: int | None
    expected_hsc: float | None = None  # in direction d/dt1

    @property
    def m(self):
        return len(self.theta)

    @property
    def r(self):
        return len(self.h)

    @property
    def hsc_bound(self):
        if not self.k:
            return None
        return -1.0 / (self.k ** 2 * self.r)

    def build(self):
        return HiggsBundle(self.name, self.theta, self.h, ChartDomain(self.domain))


def _product_theta():
    a = _unit(4, 0, 1, "0.5")
    b = _unit(4, 2, 3, "0.5")
    return (a, b)


def _sym2_theta():
    out = _zeros(3)
    out[0][1] = _SQRT_HALF
    out[1][2] = _SQRT_HALF
    return (out,)


_SPECS = [
    FixtureSpec(
        "zero", "theta = 0, h = identity; Hodge semi-metric only",
        (_zeros(2),), _diag(["1", "1"]), (_HALF_PLANE,),
        flat=True, admissible=False, k=0),
    FixtureSpec(
        "uniformizing", "theta = e12/2, h = diag(1/y, y) on the upper half-plane",
        (_unit(2, 0, 1, "0.5"),), _diag([f"{_y(1)}^-1", _y(1)]), (_HALF_PLANE,),
        flat=True, admissible=True, k=1, expected_hsc=-2.0),
    FixtureSpec(
        "sym2", "theta = (e12 + e23)/sqrt(2), h = diag(y^-2, 1, y^2)",
        _sym2_theta(), _diag([f"{_y(1)}^-2", "1", f"{_y(1)}^2"]), (_HALF_PLANE,),
        flat=True, admissible=True, k=2, expected_hsc=-0.5),
    FixtureSpec(
        "product", "direct sum of two uniformizing bundles in t1 and t2",
        _product_theta(),
        _diag([f"{_y(1)}^-1", _y(1), f"{_y(2)}^-1", _y(2)]),
        (_HALF_PLANE, _HALF_PLANE),
        flat=True, admissible=True, k=1, expected_hsc=-2.0),
    FixtureSpec(
        "nonflat-control", "theta = e12, h = identity; Higgs curvature has norm sqrt(2)",
        (_unit(2, 0, 1),), _diag(["1", "1"]), (_UNIT_BOX,),
        flat=False, admissible=True, k=1),
    FixtureSpec(
        "nonadmissible-control", "theta_1 = theta_2 = e12, h = identity",
        (_unit(2, 0, 1), _unit(2, 0, 1)), _diag(["1", "1"]), (_UNIT_BOX, _UNIT_BOX),
        flat=False, admissible=False, k=1),
    FixtureSpec(
        "nonkahler-control",
        "theta = (e12, e13), h = diag(1 + |t2|^2, 1, 1); nonzero (2,0) Higgs curvature",
        (_unit(3, 0, 1), _unit(3, 0, 2)), _diag(["1 + t2*conj(t2)", "1", "1"]),
        (CoordinateRange(re=(0.5, 1.5), im=(0.5, 1.5)),) * 2,
        flat=False, admissible=True, k=1),
]

CATALOG = {spec.name: spec for spec in _SPECS}


def fixture_names():
    return list(CATALOG)


def _spec(name):
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownFixture(name) from None


@lru_cache(maxsize=None)
def get_fixture(name, check=True):
    """Build a catalog fixture; flat fixtures are self-checked on first load."""
    spec = _spec(name)
    bundle = spec.build()
    if check and spec.flat:
        worst = max(flatness_residual(bundle, t) for t in bundle.points())
        if worst >= FLAT_TOL:
            raise RuntimeError(f"fixture {name!r} failed its flatness self-check ({worst:.3e})")
    return bundle


def list_fixtures():
    """One record per fixture with its expected invariants."""
    rows = []
    for spec in _SPECS:
        rows.append({
            "name": spec.name,
            "base_dim": spec.m,
            "rank": spec.r,
            "flat": spec.flat,
            "admissible": spec.admissible,
            "k": spec.k,
            "expected_hsc": spec.expected_hsc,
            "hsc_bound": spec.hsc_bound,
            "description": spec.description,
        })
    return rows


# file format ----------------------------------------------------------------

def bundle_to_json(bundle):
    return {
        "name": bundle.name,
        "base_dim": bundle.m,
        "rank": bundle.r,
        "domain": bundle.domain.to_json(),
        "theta": [[list(row) for row in th] for th in bundle.theta_text],
        "h": [list(row) for row in bundle.h_text],
        "samples": {"count": bundle.sample_count, "seed": bundle.seed},
    }


def dumps_bundle(bundle):
    return json.dumps(bundle_to_json(bundle), indent=2) + "\n"


def _parse_entry(text, loc):
    if not isinstance(text, str):
        raise ValidationError([f"{loc}: expected an expression string, got {type(text).__name__}"])
    try:
        return parse_expr(text)
    except ParseError as exc:
        raise ParseError(f"{loc}: {exc.args[0].split(' at line')[0]}", exc.line, exc.column,
                         exc.expected) from None


def bundle_from_json(data):
    """Build and structurally validate a bundle from a decoded JSON document."""
    if not isinstance(data, dict):
        raise ValidationError(["top level must be a JSON object"])
    problems = [f"missing key {key!r}" for key in ("theta", "h", "domain") if key not in data]
    if problems:
        raise ValidationError(problems)
    theta_src, h_src = data["theta"], data["h"]
    if not _nested_lists(h_src, 2) or not _nested_lists(theta_src, 3):
        raise ValidationError(["theta must be a list of matrices and h a matrix (lists of rows)"])
    # parse everything first so syntax errors carry their entry location
    for j, th in enumerate(theta_src):
        for a, row in enumerate(th):
            for b, x in enumerate(row):
                _parse_entry(x, f"theta[{j}][{a}][{b}]")
    for a, row in enumerate(h_src):
        for b, x in enumerate(row):
            _parse_entry(x, f"h[{a}][{b}]")
    if "base_dim" in data and data["base_dim"] != len(theta_src):
        problems.append(f"base_dim is {data['base_dim']} but theta has {len(theta_src)} components")
    if "rank" in data and data["rank"] != len(h_src):
        problems.append(f"rank is {data['rank']} but h is {len(h_src)}x{len(h_src)}")
    if problems:
        raise ValidationError(problems)
    samples = data.get("samples", {})
    try:
        domain = ChartDomain.from_json(data["domain"])
        count, seed = int(samples.get("count", 100)), int(samples.get("seed", 0))
    except (TypeError, ValueError, AttributeError) as exc:
        raise ValidationError([f"bad domain or samples entry: {exc}"]) from None
    if count < 1 or seed < 0:
        raise ValidationError(["samples.count must be positive and samples.seed non-negative"])
    bundle = HiggsBundle(
        name=str(data.get("name", "unnamed")),
        theta=tuple(tuple(tuple(row) for row in th) for th in theta_src),
        h=tuple(tuple(row) for row in h_src),
        domain=domain,
        sample_count=count,
        seed=seed,
    )
    _structural_check(bundle)
    return bundle


def _nested_lists(x, depth):
    if depth == 0:
        return True
    return isinstance(x, list) and all(_nested_lists(v, depth - 1) for v in x)


def _structural_check(bundle):
    problems = []
    bad = [loc for loc, e in bundle._entries() if loc.startswith("theta") and not E.is_holomorphic(e)]
    if bad:
        problems.append("Higgs field not holomorphic: " + ", ".join(bad))
    non_herm = set()
    not_positive = False
    for t in bundle.points():
        try:
            hv = E.evaluate_matrix(bundle.h, t)
            bundle.theta_at(t)
        except SingularEval as exc:
            problems.append(f"singular evaluation at t={np.round(t, 6).tolist()}: {exc}")
            break
        scale = max(1.0, float(np.max(np.abs(hv))))
        diff = np.abs(hv - hv.conj().T)
        for a, b in zip(*np.nonzero(diff > HERMITIAN_TOL * scale)):
            if a <= b:
                non_herm.add((int(a), int(b)))
        try:
            check_positive(hv)
        except SingularMetric:
            not_positive = True
    for a, b in sorted(non_herm):
        problems.append(f"h not Hermitian: h[{a}][{b}] != conj(h[{b}][{a}])")
    if not_positive and not non_herm:
        problems.append("h is not positive definite on the domain")
    if problems:
        raise ValidationError(problems)


def load_bundle(path):
    """Read, parse and validate a bundle file.

    Raises ParseError for syntax errors (JSON or expression) and
    ValidationError for structural violations.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return bundle_from_json(data)


def emit_fixture(name, path):
    bundle = get_fixture(name, check=False)
    Path(path).write_text(dumps_bundle(bundle), encoding="utf-8")
    return bundle
