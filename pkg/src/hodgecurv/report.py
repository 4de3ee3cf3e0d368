"""Certification pipeline and the nilpotent harness, with JSON/text/CSV rendering.

Every record names the claim it tests. Records whose hypotheses are not met
(non-admissible or non-flat bundles) are kept in the report but not asserted,
so a failure is never attributed to a claim that does not apply.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .bundle import (connection_sample, flatness_blocks, is_admissible,
                     nilpotency_order, validate)
from .errors import DegenerateGram, NotNilpotent, NotRepresentable
from .hodge import (base_curvature_direct, base_curvature_flat_formula,
                    base_curvature_subbundle, bisectional_values,
                    hsc_from_sample, kahler_residual, routes_agree,
                    scalar_trace_check)
from .nilpotent import (commutator_chain_check, hsc_bound_from_traces,
                        jordan_grading, orthogonal_strict_grading,
                        random_metric, random_nilpotent, shift_block)

__all__ = [
    "CertifyOptions", "CheckRecord", "CertificationReport", "certify",
    "run_nilpotent_harness", "render_json", "render_text", "render_csv",
    "format_number",
]

SIG_DIGITS = 12


def format_number(x):
    """Round to 12 significant digits; non-finite values become strings."""
    if x is None or isinstance(x, (bool, np.bool_)):
        return None if x is None else bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return float(f"{x:.{SIG_DIGITS}g}")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, int, np.floating, np.integer, np.bool_, bool)) or obj is None:
        return format_number(obj)
    return obj


@dataclass
class CertifyOptions:
    samples: int | None = None  # flatness / admissibility sample count (default: file)
    seed: int | None = None
    tol_abs: float = 1e-9
    tol_rel: float = 1e-6
    curvature_samples: int = 50
    form_samples: int = 20
    form_pairs: int = 1000
    directions: int = 500
    chain_points: int = 5
    sign_slack: float = 1e-10
    hsc_slack: float = 1e-8


@dataclass
class CheckRecord:
    check: str
    claim: str
    statistic: str
    value: float | None
    tolerance: float | None
    passed: bool | None  # None when skipped
    asserted: bool
    note: str = ""
    extra: dict = field(default_factory=dict)


@dataclass
class CertificationReport:
    bundle: str
    seed: int
    samples: int
    records: list
    per_sample: list = field(default_factory=list)  # rows for the CSV dump

    @property
    def verdict(self):
        return all(r.passed for r in self.records if r.asserted)

    def record(self, name):
        for r in self.records:
            if r.check == name:
                return r
        raise KeyError(name)

    def to_dict(self):
        return _clean({
            "tool": "hodgecurv",
            "version": __version__,
            "bundle": self.bundle,
            "seed": self.seed,
            "samples": self.samples,
            "verdict": "pass" if self.verdict else "fail",
            "checks": [asdict(r) for r in self.records],
        })


def _skip(records, names, reason):
    for check, claim, stat in names:
        records.append(CheckRecord(check, claim, stat, None, None, None, False, reason))


_CURVATURE_CHECKS = [
    ("curvature-routes", "base curvature: direct Chern formula = subbundle formula = flat commutator formula",
     "max elementwise excess over atol + rtol|ref|"),
    ("bisectional", "holomorphic bisectional curvature of the Hodge metric is semi-negative",
     "max bisectional form"),
    ("scalar-trace", "sum over j,k of (Theta_{j kbar} d_k, d_j) is non-positive", "max value"),
    ("hsc-coordinate", "holomorphic sectional curvature <= -1/(k^2 rank) along coordinate directions",
     "max HSC"),
    ("hsc-direction", "holomorphic sectional curvature <= -1/(k^2 rank) in arbitrary directions",
     "max HSC"),
    ("trace-chain", "||[A*, A]|| >= sum|a_p - a_(p-1)|/sqrt(r) >= max a_p/sqrt(r) >= sum a_p/(k sqrt(r))",
     "min margin"),
]


def certify(bundle, options=None):
    """Run every check on ``bundle``; never raises on mathematical failure."""
    opt = options or CertifyOptions()
    seed = bundle.seed if opt.seed is None else opt.seed
    n = bundle.sample_count if opt.samples is None else opt.samples
    points = bundle.points(n, seed)
    rng = np.random.default_rng(seed)
    records = []
    rep = CertificationReport(bundle.name, seed, n, records)

    v = validate(bundle, points, tol=opt.tol_abs)
    records.append(CheckRecord(
        "higgs-axioms", "theta holomorphic, [theta_j, theta_l] = 0, h positive definite",
        "max commutator norm", v.max_commutator, opt.tol_abs, v.valid, True,
        "; ".join(v.problems)))

    conds = []
    for t in points:
        conds.append(is_admissible(bundle, t)[1])
    admissible = all(np.isfinite(c) and c <= 1e12 for c in conds)
    worst_cond = max(conds) if conds else 0.0
    note = "" if admissible else (
        f"DegenerateGram (condition {worst_cond:.3e}); "
        "non-admissible: Hodge semi-metric only; curvature checks skipped")
    records.append(CheckRecord(
        "admissibility", "theta_1..theta_m independent in End(H) at every sample",
        "max Gram condition number", worst_cond, 1e12, admissible, False, note))

    k = nilpotency_order(bundle, points)
    records.append(CheckRecord(
        "nilpotency", "order k with every (k+1)-fold product of theta vanishing",
        "k", k, None, k is not None, False,
        "" if k is not None else "not nilpotent within rank; sectional bound skipped"))

    flat_vals = []
    for t in points:
        res11, res20 = flatness_blocks(connection_sample(bundle, t))
        flat_vals.append(max(res11.max(initial=0.0), res20.max(initial=0.0)))
    flat_max = max(flat_vals) if flat_vals else 0.0
    flat = flat_max < opt.tol_abs
    records.append(CheckRecord(
        "flatness", "Higgs curvature (D^h + theta + theta*)^2 vanishes",
        "max Frobenius residual", flat_max, opt.tol_abs, flat, True))

    curv_pts = points[:opt.curvature_samples]
    kahler = max((kahler_residual(bundle, t) for t in curv_pts), default=0.0)
    records.append(CheckRecord(
        "kahler", "Hodge metric is Kahler (d_l G_{j kbar} = d_j G_{l kbar})",
        "max residual", kahler, opt.tol_abs, kahler < opt.tol_abs, flat,
        "" if flat else "not flat: recorded, not asserted"))

    if not admissible:
        _skip(records, _CURVATURE_CHECKS, note)
        return rep
    if not flat:
        _curvature_identity_only(bundle, curv_pts, opt, records)
        _skip(records, _CURVATURE_CHECKS[1:], "not flat: the sign and bound checks assume flatness")
        return rep

    samples = {}
    excess, herm = -np.inf, 0.0
    for i, t in enumerate(curv_pts):
        cs = connection_sample(bundle, t)
        routes = {
            "direct": base_curvature_direct(bundle, t),
            "subbundle": base_curvature_subbundle(bundle, t, cs),
            "flat": base_curvature_flat_formula(bundle, t, cs, opt.tol_abs),
        }
        samples[i] = routes
        for a, b in (("subbundle", "direct"), ("flat", "direct"), ("flat", "subbundle")):
            excess = max(excess, routes_agree(routes[a], routes[b], opt.tol_rel, opt.tol_abs)[1])
        herm = max(herm, max(s.hermitian_defect() for s in routes.values()))
        for name, s in routes.items():
            for idx in np.ndindex(s.R.shape):
                rep.per_sample.append((i, t, name, idx, s.R[idx]))
    records.append(CheckRecord(
        *_CURVATURE_CHECKS[0], excess, 0.0, excess <= 0 and herm < opt.tol_abs, True,
        extra={"hermitian_defect": herm, "samples": len(curv_pts)}))

    m = bundle.m
    form_idx = list(range(min(opt.form_samples, len(curv_pts))))
    worst_form, worst_imag = -np.inf, 0.0
    for i in form_idx:
        xi = _random_vectors(rng, opt.form_pairs, m)
        vv = _random_vectors(rng, opt.form_pairs, m)
        vals = bisectional_values(samples[i]["direct"], xi, vv)
        worst_form = max(worst_form, float(vals.real.max()))
        worst_imag = max(worst_imag, float(np.abs(vals.imag).max()))
    records.append(CheckRecord(
        *_CURVATURE_CHECKS[1], worst_form, opt.sign_slack,
        worst_form <= opt.sign_slack and worst_imag < opt.tol_abs, True,
        extra={"max_imag": worst_imag, "pairs": opt.form_pairs * len(form_idx)}))

    trace_max = max(scalar_trace_check(s["direct"]) for s in samples.values())
    records.append(CheckRecord(
        *_CURVATURE_CHECKS[2], trace_max, opt.sign_slack, trace_max <= opt.sign_slack, True))

    if k is None or k == 0:
        _skip(records, _CURVATURE_CHECKS[3:5], "nilpotency order unavailable")
    else:
        bound = -1.0 / (k * k * bundle.r)
        coord_hsc = max(float(hsc_from_sample(s["direct"], np.eye(m)).max()) for s in samples.values())
        records.append(CheckRecord(
            *_CURVATURE_CHECKS[3], coord_hsc, bound + opt.hsc_slack,
            coord_hsc <= bound + opt.hsc_slack, True, extra={"bound": bound, "k": k, "rank": bundle.r}))
        dir_hsc = -np.inf
        for i in form_idx:
            dirs = _random_vectors(rng, opt.directions, m)
            dir_hsc = max(dir_hsc, float(hsc_from_sample(samples[i]["direct"], dirs).max()))
        records.append(CheckRecord(
            *_CURVATURE_CHECKS[4], dir_hsc, bound + opt.hsc_slack,
            dir_hsc <= bound + opt.hsc_slack, True,
            "arbitrary directions extend the coordinate-direction statement",
            extra={"bound": bound, "k": k, "rank": bundle.r}))

    records.append(_trace_chain_record(bundle, curv_pts[:opt.chain_points], samples, opt))
    return rep


def _curvature_identity_only(bundle, pts, opt, records):
    """For admissible non-flat bundles the subbundle identity still applies."""
    excess = -np.inf
    for t in pts:
        a = base_curvature_subbundle(bundle, t)
        b = base_curvature_direct(bundle, t)
        excess = max(excess, routes_agree(a, b, opt.tol_rel, opt.tol_abs)[1])
    records.append(CheckRecord(
        _CURVATURE_CHECKS[0][0], "base curvature: direct Chern formula = subbundle formula",
        _CURVATURE_CHECKS[0][2], excess, 0.0, excess <= 0, True,
        "flat formula omitted: bundle not flat"))


def _trace_chain_record(bundle, pts, samples, opt):
    margin, bound_gap = np.inf, np.inf
    checked = not_rep = 0
    for i, t in enumerate(pts):
        h = bundle.h_at(t)
        for j, A in enumerate(bundle.theta_at(t)):
            if not np.any(A):
                continue
            try:
                g = orthogonal_strict_grading(A, h)
            except (NotRepresentable, NotNilpotent):
                not_rep += 1
                continue
            checked += 1
            chain = commutator_chain_check(g)
            margin = min(margin, chain.min_margin)
            measured = samples[i]["direct"].R[j, j, j, j].real
            bound_gap = min(bound_gap, hsc_bound_from_traces(g) - measured)
    ok = checked > 0 and margin >= -1e-9 and bound_gap >= -opt.hsc_slack
    note = f"{checked} graded instances checked, {not_rep} without an orthogonal strict grading"
    return CheckRecord(
        *_CURVATURE_CHECKS[5], margin if checked else None, -1e-9, ok if checked else None,
        checked > 0, note, extra={"min_bound_gap": bound_gap if checked else None})


def _random_vectors(rng, n, m):
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


# nilpotent harness ----------------------------------------------------------

def run_nilpotent_harness(rank, trials, seed):
    """Random nilpotent endomorphisms through both grading routes.

    The chain is asserted only for gradings that are h-orthogonal and strict;
    the Jordan grading of a generic instance is measured and reported.
    Returns ``(report_dict, passed)``.
    """
    if not 1 <= rank <= 16:
        raise ValueError("rank must be between 1 and 16")
    eq = commutator_chain_check(jordan_grading(shift_block(2)))
    general = {"count": 0, "holds": 0, "min_margin": None, "errors": 0}
    ortho = {"count": 0, "min_margin": None, "failures": 0, "not_representable": 0}
    children = np.random.SeedSequence(seed).spawn(trials) if trials else []
    for child in children:
        rng = np.random.default_rng(child)
        A = random_nilpotent(rank, rng)
        h = random_metric(rank, rng)
        try:
            g = jordan_grading(A, h)
            c = commutator_chain_check(g)
            general["count"] += 1
            general["holds"] += int(c.holds)
            general["min_margin"] = _min(general["min_margin"], c.min_margin)
        except NotNilpotent:
            general["errors"] += 1
            continue
        try:
            g = orthogonal_strict_grading(A, h)
        except (NotRepresentable, NotNilpotent):
            ortho["not_representable"] += 1
            continue
        c = commutator_chain_check(g)
        ortho["count"] += 1
        ortho["failures"] += int(not c.holds)
        ortho["min_margin"] = _min(ortho["min_margin"], c.min_margin)
    passed = ortho["failures"] == 0 and abs(eq.lhs - eq.m1) <= 1e-9
    report = _clean({
        "tool": "hodgecurv",
        "version": __version__,
        "rank": rank,
        "trials": trials,
        "seed": seed,
        "equality_case": {"lhs": eq.lhs, "m1": eq.m1, "expected": math.sqrt(2)},
        "jordan_grading": general,
        "orthogonal_strict": ortho,
        "verdict": "pass" if passed else "fail",
    })
    return report, passed


def _min(a, b):
    return b if a is None else min(a, b)


# rendering ------------------------------------------------------------------

def render_json(report):
    data = report if isinstance(report, dict) else report.to_dict()
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def _fmt(x):
    if x is None:
        return "-"
    if isinstance(x, str):
        return x
    return f"{x:.12g}"


def render_text(report):
    if isinstance(report, dict):
        return _render_harness_text(report)
    data = report.to_dict()
    lines = [f"bundle {data['bundle']}  seed {data['seed']}  samples {data['samples']}"]
    header = ("check", "status", "value", "tolerance", "statistic")
    rows = []
    for r in data["checks"]:
        if r["passed"] is None:
            status = "SKIP"
        elif not r["asserted"]:
            status = "info"
        else:
            status = "PASS" if r["passed"] else "FAIL"
        rows.append((r["check"], status, _fmt(r["value"]), _fmt(r["tolerance"]), r["statistic"]))
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    for row in (header, *rows):
        lines.append("  ".join(str(x).ljust(w) for x, w in zip(row, widths)).rstrip())
    for r in data["checks"]:
        if r["note"]:
            lines.append(f"  {r['check']}: {r['note']}")
    lines.append(f"verdict: {data['verdict']}")
    return "\n".join(lines) + "\n"


def _render_harness_text(data):
    lines = [f"nilpotent harness  rank {data['rank']}  trials {data['trials']}  seed {data['seed']}"]
    eq = data["equality_case"]
    lines.append(f"equality case      lhs {_fmt(eq['lhs'])}  m1 {_fmt(eq['m1'])}")
    g, o = data["jordan_grading"], data["orthogonal_strict"]
    lines.append(f"jordan grading     {g['count']} run, {g['holds']} hold, "
                 f"min margin {_fmt(g['min_margin'])} (reported only)")
    lines.append(f"orthogonal strict  {o['count']} run, {o['failures']} fail, "
                 f"min margin {_fmt(o['min_margin'])}, {o['not_representable']} not representable")
    lines.append(f"verdict: {data['verdict']}")
    return "\n".join(lines) + "\n"


def render_csv(report):
    """Per-sample curvature pairings, one row per (sample, route, j, k, l, p)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    m = None
    for i, t, route, idx, val in report.per_sample:
        if m is None:
            m = len(t)
            writer.writerow(["sample"] + [f"{part}_t{c + 1}" for c in range(m) for part in ("re", "im")]
                            + ["route", "j", "k", "l", "p", "re", "im"])
        coords = [_fmt(x) for z in t for x in (z.real, z.imag)]
        writer.writerow([i] + coords + [route] + [x + 1 for x in idx] + [_fmt(val.real), _fmt(val.imag)])
    return buf.getvalue()
