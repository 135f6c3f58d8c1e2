"""Command-line interface.

Usage:
    dotweb report --n 3 --m 1 --theta 0.6981 [--oracle]
    dotweb curve --n 4 --m 2 --measures delta_u,c_ud --step 0.01
    dotweb table1 [--rows 5,2] [--measure delta_u]
    dotweb validate

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 computation error.
Every command writes CSV (default) or JSON to stdout or ``--out FILE``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from .errors import DotwebError
from .extrema import DEFAULT_ROWS, TABLE_MEASURES, TABLE_TOL, compare_row, default_window, load_reference, table1
from .measures import MEASURE_FIELDS, MEASURES, measure_curves, report
from .oracle import oracle_report
from .sector import SystemConfig

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2, 3
ORACLE_TOL = 1e-9

REPORT_COLUMNS = ["source", "theta"] + list(MEASURE_FIELDS.values())


class UsageError(Exception):
    pass


# -- serialization ---------------------------------------------------------

def fmt_float(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool) or not isinstance(x, float):
        return str(x)
    return format(x, ".17g")


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt_float(row.get(c)) for c in columns])
    return buf.getvalue()


def parse_csv(text: str) -> list:
    """Inverse of :func:`to_csv`: empty cells become None, numbers are parsed."""
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in rec.items():
            if v == "":
                row[k] = None
                continue
            try:
                row[k] = int(v)
            except ValueError:
                try:
                    row[k] = float(v)
                except ValueError:
                    row[k] = v
        out.append(row)
    return out


def record(command: str, config: dict, rows: list, **extra) -> dict:
    rec = {"schema_version": SCHEMA_VERSION, "command": command, "config": config, "rows": rows}
    rec.update(extra)
    return rec


def emit(args, rec: dict, columns: list):
    if args.format == "json":
        text = json.dumps(rec, indent=2) + "\n"
    else:
        text = to_csv(columns, rec["rows"])
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- argument helpers ------------------------------------------------------

def _config(args) -> SystemConfig:
    try:
        return SystemConfig(args.n, args.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _measure_list(text) -> list:
    names = [s.strip() for s in text.split(",") if s.strip()] if text else list(MEASURES)
    unknown = [s for s in names if s not in MEASURE_FIELDS]
    if unknown:
        raise UsageError(f"unknown measure(s) {unknown}; choose from {', '.join(MEASURES)}")
    return names


def _pair(text: str) -> tuple:
    try:
        n, m = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--rows expects N,M, got {text!r}") from exc
    return n, m


# -- commands --------------------------------------------------------------

def cmd_report(args) -> int:
    cfg = _config(args)
    rows = [dict(source="closed_form", **report(cfg, args.theta).as_dict())]
    extra = {}
    status = EXIT_OK
    if args.oracle:
        rows.append(dict(source="oracle", **oracle_report(cfg.n_dots, cfg.m_up, args.theta).as_dict()))
        diffs = [
            abs(rows[0][f] - rows[1][f])
            for f in MEASURE_FIELDS.values()
            if rows[0][f] is not None and rows[1][f] is not None
        ]
        worst = max(diffs, default=0.0)
        extra = {"max_abs_diff": worst, "agree": worst <= ORACLE_TOL}
        if worst > ORACLE_TOL:
            status = EXIT_FAIL
    conf = {"n": cfg.n_dots, "m": cfg.m_up, "theta": float(args.theta)}
    emit(args, record("report", conf, rows, **extra), REPORT_COLUMNS)
    return status


def cmd_curve(args) -> int:
    cfg = _config(args)
    names = _measure_list(args.measures)
    if not args.step > 0:
        raise UsageError("--step must be positive")
    theta_max = default_window(cfg) if args.theta_max is None else args.theta_max
    if theta_max < 0:
        raise UsageError("--theta-max must be non-negative")
    count = int(math.floor(theta_max / args.step + 1e-9)) + 1
    thetas = [i * args.step for i in range(count)]
    curves = measure_curves(cfg, thetas, names)
    rows = []
    for i, th in enumerate(thetas):
        row = {"theta": th}
        for k in names:
            row[k] = None if curves[k] is None else float(curves[k][i])
        rows.append(row)
    conf = {"n": cfg.n_dots, "m": cfg.m_up, "theta_max": theta_max, "step": args.step, "measures": names}
    emit(args, record("curve", conf, rows), ["theta"] + names)
    return EXIT_OK


def cmd_table1(args) -> int:
    rows_in = [_pair(r) for r in args.rows] if args.rows else list(DEFAULT_ROWS)
    for n, m in rows_in:
        try:
            SystemConfig(n, m)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    measures = _measure_list(args.measure) if args.measure else list(TABLE_MEASURES)
    reference = load_reference()
    results = table1(rows_in, measures)
    out, any_fail = [], False
    for res in results:
        cmp = compare_row(res, reference)
        row = {"n": res.n, "m": res.m}
        for name in measures:
            r = res.maxima[name]
            row[name] = r.value
            row[f"{name}_theta"] = r.theta_star
            row[f"{name}_ref"] = cmp[name][1] if name in cmp else None
        if cmp:
            ok = all(c[2] for c in cmp.values())
            row["status"] = "PASS" if ok else "FAIL"
            any_fail |= not ok
        else:
            row["status"] = "NOREF"
        out.append(row)
    columns = ["n", "m"]
    for name in measures:
        columns += [name, f"{name}_ref", f"{name}_theta"]
    columns.append("status")
    conf = {"rows": [list(r) for r in rows_in], "measures": measures, "tolerance": TABLE_TOL}
    emit(args, record("table1", conf, out), columns)
    return EXIT_FAIL if any_fail else EXIT_OK


def cmd_validate(args) -> int:
    from .validation import run_all

    checks = run_all()
    rows = [
        {"check": c.name, "status": "PASS" if c.passed else "FAIL", "violations": c.violations, "detail": c.detail}
        for c in checks
    ]
    failed = [c for c in checks if not c.passed]
    if args.format == "text":
        lines = [c.detail if c.name in ("EPR reachability", "monogamy", "residual tangle zero for M=1")
                 else f"{c.name}: {'PASS' if c.passed else 'FAIL'} ({c.detail})" for c in checks]
        lines.append(f"overall: {'FAIL' if failed else 'PASS'}")
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        emit(args, record("validate", {}, rows), ["check", "status", "violations", "detail"])
    return EXIT_FAIL if failed else EXIT_OK


# -- entry point -----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dotweb", description="Entanglement dynamics of equivalent-neighbor spin qubits.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, formats=("csv", "json"), default="csv"):
        sp.add_argument("--format", choices=formats, default=default)
        sp.add_argument("--out", metavar="FILE", help="write output here instead of stdout")

    sp = sub.add_parser("report", help="all measures at one time")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--oracle", action="store_true", help="add the brute-force result and compare")
    common(sp)
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("curve", help="measures on a uniform time grid")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--theta-max", type=float, default=None, help="default: one period")
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--measures", default=None, help=f"comma list from {','.join(MEASURES)}")
    common(sp)
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("table1", help="maxima over time versus the reference table")
    sp.add_argument("--rows", action="append", metavar="N,M", help="repeatable; default: all reference rows")
    sp.add_argument("--measure", default=None, help="comma list of measures to include")
    common(sp)
    sp.set_defaults(func=cmd_table1)

    sp = sub.add_parser("validate", help="run the invariant suite")
    common(sp, ("text", "csv", "json"), "text")
    sp.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dotweb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DotwebError, ArithmeticError, ValueError) as exc:
        print(f"dotweb: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
