"""Command-line driver.

Exit codes: 0 pass, 1 a mathematical check failed, 2 input or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ParseError, UnknownFixture, ValidationError
from .fixtures import emit_fixture, list_fixtures, load_bundle
from .report import (CertifyOptions, certify, format_number, render_csv,
                     render_json, render_text, run_nilpotent_harness)

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="hodgecurv", description="Certify curvature of Hodge metrics of Higgs bundles.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="certify a bundle file")
    c.add_argument("file")
    c.add_argument("--samples", type=int, help="sample count (default: from the file)")
    c.add_argument("--seed", type=int, help="sampling seed (default: from the file)")
    c.add_argument("--tol-abs", type=float, default=1e-9)
    c.add_argument("--tol-rel", type=float, default=1e-6)
    c.add_argument("--report", choices=("json", "text"), default="text")
    c.add_argument("--out", help="write the report here instead of stdout")
    c.add_argument("--csv", help="write per-sample curvature values as CSV")

    f = sub.add_parser("fixtures", help="list or emit built-in fixtures")
    fsub = f.add_subparsers(dest="action", required=True, parser_class=_Parser)
    fl = fsub.add_parser("list")
    fl.add_argument("--report", choices=("json", "text"), default="text")
    fe = fsub.add_parser("emit")
    fe.add_argument("name")
    fe.add_argument("path")

    n = sub.add_parser("nilpotent-harness", help="random trace-chain harness")
    n.add_argument("--rank", type=int, required=True)
    n.add_argument("--trials", type=int, required=True)
    n.add_argument("--seed", type=int, required=True)
    n.add_argument("--report", choices=("json", "text"), default="text")
    return p


def _write(text, path=None):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _check(args):
    if args.samples is not None and args.samples < 1:
        raise ValueError("--samples must be positive")
    bundle = load_bundle(args.file)
    opts = CertifyOptions(samples=args.samples, seed=args.seed,
                          tol_abs=args.tol_abs, tol_rel=args.tol_rel)
    rep = certify(bundle, opts)
    _write(render_json(rep) if args.report == "json" else render_text(rep), args.out)
    if args.csv:
        _write(render_csv(rep), args.csv)
    return EXIT_PASS if rep.verdict else EXIT_FAIL


def _fixtures(args):
    if args.action == "emit":
        emit_fixture(args.name, args.path)
        return EXIT_PASS
    rows = list_fixtures()
    if args.report == "json":
        clean = [{k: format_number(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v
                  for k, v in row.items()} for row in rows]
        _write(json.dumps(clean, indent=2) + "\n")
        return EXIT_PASS
    header = ("name", "m", "r", "flat", "admissible", "k", "expected HSC", "bound")
    table = [header]
    for row in rows:
        table.append((row["name"], row["base_dim"], row["rank"], row["flat"], row["admissible"],
                      "-" if row["k"] is None else row["k"],
                      "-" if row["expected_hsc"] is None else f"{row['expected_hsc']:.12g}",
                      "-" if row["hsc_bound"] is None else f"{row['hsc_bound']:.12g}"))
    widths = [max(len(str(x)) for x in col) for col in zip(*table)]
    lines = ["  ".join(str(x).ljust(w) for x, w in zip(r, widths)).rstrip() for r in table]
    _write("\n".join(lines) + "\n")
    return EXIT_PASS


def _harness(args):
    if args.trials < 0:
        raise ValueError("--trials must be non-negative")
    report, passed = run_nilpotent_harness(args.rank, args.trials, args.seed)
    _write(render_json(report) if args.report == "json" else render_text(report))
    return EXIT_PASS if passed else EXIT_FAIL


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"check": _check, "fixtures": _fixtures, "nilpotent-harness": _harness}[args.command]
    try:
        return handler(args)
    except (ParseError, ValidationError, UnknownFixture, OSError, ValueError) as exc:
        print(f"hodgecurv: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
