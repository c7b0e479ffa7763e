"""Command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 infeasible targets,
4 solver did not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

import numpy as np

from . import algebra
from .ensemble import ConvergenceError, InfeasibleError, read_levels, solve_ensemble
from .opcalc import ParseError, normal_order
from .statistics import bose, fermi, occupancy_direct

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_NO_CONVERGENCE = 4

MAX_VERIFY_ORDER = 64
FORMATS = ("csv", "json", "plain")


class UsageError(Exception):
    pass


def fmt_num(value: float, kind: str) -> str:
    """17 significant digits for machine formats, 6 for plain text."""
    return f"{value:.6g}" if kind == "plain" else f"{value:.17g}"


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _plain_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h))
              for i, h in enumerate(header)]
    lines = ["  ".join(str(h).ljust(w) for h, w in zip(header, widths)).rstrip()]
    for r in rows:
        lines.append("  ".join(str(v).ljust(w) for v, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def cmd_verify(n_min: int, n_max: int, tol: float, fmt: str = "plain", out=None) -> int:
    out = out or sys.stdout
    if not 1 <= n_min <= n_max <= MAX_VERIFY_ORDER:
        raise UsageError(f"need 1 <= n-min <= n-max <= {MAX_VERIFY_ORDER}, got {n_min}..{n_max}")
    if not tol > 0:
        raise UsageError(f"tol must be positive, got {tol}")
    records = []
    for n in range(n_min, n_max + 1):
        report = algebra.verify_relations(n, tol)
        for chk in report.checks:
            records.append((n, chk.name, "PASS" if chk.passed else "FAIL", chk.deviation))
    ok = all(r[2] == "PASS" for r in records)
    header = ("n", "identity", "status", "max_deviation")
    if fmt == "json":
        doc = {
            "tol": tol,
            "passed": ok,
            "rows": [dict(zip(header, r)) for r in records],
        }
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        rows = [(n, name, status, fmt_num(dev, fmt)) for n, name, status, dev in records]
        if fmt == "csv":
            out.write(_csv_text(header, rows))
        else:
            out.write(_plain_table(header, rows))
            out.write(f"overall: {'PASS' if ok else 'FAIL'}\n")
    return EXIT_OK if ok else 1


def table_rows(n: int, x_min: float, x_max: float, steps: int) -> list[tuple[float, float, float, float | None]]:
    """Grid rows ``(x, occupancy, fermi, bose or None)``, x ascending and inclusive."""
    rows = []
    for x in np.linspace(x_min, x_max, steps):
        x = float(x)
        rows.append((x, occupancy_direct(x, n), fermi(x), bose(x) if x > 0 else None))
    return rows


def cmd_table(n: int, x_min: float, x_max: float, steps: int, fmt: str = "csv", out=None) -> int:
    out = out or sys.stdout
    if n < 2:
        raise UsageError(f"n must be >= 2, got {n}")
    if steps < 2:
        raise UsageError(f"steps must be >= 2, got {steps}")
    if not (np.isfinite(x_min) and np.isfinite(x_max) and x_min < x_max):
        raise UsageError(f"need finite x-min < x-max, got {x_min}, {x_max}")
    rows = table_rows(n, x_min, x_max, steps)
    header = ("x", "occupancy", "fermi", "bose")
    if fmt == "json":
        doc = {"n": n, "columns": list(header), "rows": [list(r) for r in rows]}
        out.write(json.dumps(doc) + "\n")
        return EXIT_OK
    text_rows = [
        tuple("" if v is None else fmt_num(v, fmt) for v in r) for r in rows
    ]
    out.write(_csv_text(header, text_rows) if fmt == "csv" else _plain_table(header, text_rows))
    return EXIT_OK


def cmd_normal_order(n: int, expr_text: str, fmt: str = "plain", out=None) -> int:
    out = out or sys.stdout
    if not 1 <= n <= algebra.MAX_EXACT_ORDER:
        raise UsageError(f"normal-order needs 1 <= n <= {algebra.MAX_EXACT_ORDER}, got {n}")
    nf = normal_order(expr_text, n)
    if fmt == "json":
        doc = {"n": n, "expr": expr_text, "text": nf.to_text(), "terms": nf.to_records()}
        out.write(json.dumps(doc) + "\n")
    elif fmt == "csv":
        rows = [(r["a"], r["b"], r["numerator"], r["denominator"]) for r in nf.to_records()]
        out.write(_csv_text(("a", "b", "numerator", "denominator"), rows))
    else:
        out.write(nf.to_text() + "\n")
    return EXIT_OK


def cmd_ensemble(n: int, levels_path: str, particles: float, energy: float,
                 tol: float = 1e-10, fmt: str = "plain", out=None) -> int:
    out = out or sys.stdout
    if n < 2:
        raise UsageError(f"n must be >= 2, got {n}")
    try:
        levels = read_levels(levels_path)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    sol = solve_ensemble(levels, particles, energy, n, tol)
    names = levels.names or tuple(str(i) for i in range(len(levels)))
    if fmt == "json":
        doc = {
            "n": n,
            "b": sol.b,
            "c": sol.c,
            "levels": [
                {"name": nm, "energy": e, "degeneracy": g, "occupancy": o}
                for nm, e, g, o in zip(names, levels.energies, levels.degeneracies, sol.occupancies)
            ],
            "achieved_P": sol.achieved_P,
            "achieved_E": sol.achieved_E,
            "iterations": sol.iterations,
            "method": sol.method,
        }
        out.write(json.dumps(doc, indent=2) + "\n")
        return EXIT_OK
    summary = [("b", sol.b), ("c", sol.c), ("achieved_P", sol.achieved_P),
               ("achieved_E", sol.achieved_E)]
    level_rows = [(nm, fmt_num(e, fmt), g, fmt_num(o, fmt))
                  for nm, e, g, o in zip(names, levels.energies, levels.degeneracies, sol.occupancies)]
    if fmt == "csv":
        out.write(_csv_text(("quantity", "value"),
                            [(k, fmt_num(v, fmt)) for k, v in summary]
                            + [("iterations", sol.iterations), ("method", sol.method)]))
        out.write("\n")
        out.write(_csv_text(("level", "energy", "degeneracy", "occupancy"), level_rows))
    else:
        for k, v in summary:
            out.write(f"{k:<11} {fmt_num(v, fmt)}\n")
        out.write(f"{'iterations':<11} {sol.iterations} ({sol.method})\n\n")
        out.write(_plain_table(("level", "energy", "degeneracy", "occupancy"), level_rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genexcl",
        description="Generalized ladder algebras: identity checks, occupancy tables, "
                    "normal ordering and ensemble fitting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check the operator identities for a range of n")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--tol", type=float, default=algebra.DEFAULT_TOL)
    p.add_argument("--format", choices=FORMATS, default="plain")

    p = sub.add_parser("table", help="tabulate occupancy against Fermi and Bose functions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x-min", type=float, required=True)
    p.add_argument("--x-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--format", choices=FORMATS, default="csv")

    p = sub.add_parser("normal-order", help="normal-order an expression in e and e+")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("expr", help='expression, e.g. "[e, e+]"; put "--" before one starting with "-"')
    p.add_argument("--format", choices=FORMATS, default="plain")

    p = sub.add_parser("ensemble", help="fit Lagrange factors to particle and energy totals")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--levels", required=True, help="CSV file with header energy,degeneracy")
    p.add_argument("--particles", type=float, required=True)
    p.add_argument("--energy", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--format", choices=FORMATS, default="plain")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "verify":
            return cmd_verify(args.n_min, args.n_max, args.tol, args.format)
        if args.command == "table":
            return cmd_table(args.n, args.x_min, args.x_max, args.steps, args.format)
        if args.command == "normal-order":
            return cmd_normal_order(args.n, args.expr, args.format)
        if args.command == "ensemble":
            return cmd_ensemble(args.n, args.levels, args.particles, args.energy,
                                args.tol, args.format)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"{parser.prog} {args.command}: parse error {exc}", file=sys.stderr)
        print(exc.diagnostic(), file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        print(f"{parser.prog} {args.command}: infeasible [{exc.bound}]: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConvergenceError as exc:
        print(f"{parser.prog} {args.command}: no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    parser.error(f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
