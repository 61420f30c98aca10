"""Command-line surface: expansions, verification runs, sweeps, plot data.

Exit codes: 0 all requested checks pass, 2 when the only failures are
nonexistent Eisenstein series, 1 otherwise; 64 usage errors, 65 config
validation errors.  Reports are deterministic for a fixed invocation and
serialize high-precision reals as decimal strings.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

import mpmath as mp

from .divpoly import ZeroReport, divisor_polynomial, verify_theorem
from .errors import ConfigValidation, DoesNotExist, EisZerosError, UnknownGroup
from .forms import eisenstein_infinity, hauptmodul, upsilon, default_truncation
from .geometry import crit_and_c, trace_boundary
from .groups import group_spec
from .petersson import QuadratureSpec, orthogonality_replay

SCHEMA_VERSION = "1"
DECIMAL_DIGITS = 30

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_DOES_NOT_EXIST = 2
EXIT_USAGE = 64
EXIT_CONFIG = 65


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); remap to 64
        raise _UsageError(message)


def _fmt_real(x) -> str | None:
    if x is None:
        return None
    return mp.nstr(mp.mpf(x), DECIMAL_DIGITS)


def report_to_dict(report: ZeroReport) -> dict:
    roots = []
    for r in report.roots:
        roots.append({
            "re": _fmt_real(r.re),
            "im": _fmt_real(r.im),
            "certified_radius": _fmt_real(r.certified_radius),
            "multiplicity": r.multiplicity,
            "boundary_preimage": (
                None if r.boundary_preimage is None else {
                    "x": _fmt_real(r.boundary_preimage["x"]),
                    "y": _fmt_real(r.boundary_preimage["y"]),
                    "arc_id": r.boundary_preimage["arc_id"],
                }
            ),
        })
    return {
        "schema_version": SCHEMA_VERSION,
        "decimal_digits": DECIMAL_DIGITS,
        "group": report.group,
        "weight": report.weight,
        "status": report.status,
        "dim": report.dim,
        "degree": report.degree,
        "interval_endpoint": _fmt_real(report.interval_endpoint),
        "counts": report.counts,
        "roots": roots,
        "c_value": report.c_value,
        "theorem_pass": report.theorem_pass,
        "corollary_note": report.corollary_note,
        "hauptmodul_comparison": report.hauptmodul_comparison,
        "eisenstein_comparison": report.eisenstein_comparison,
        "notes": list(report.notes),
    }


def _parse_weights(text: str) -> list[int]:
    weights: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            weights.extend(range(int(lo), int(hi) + 1))
        elif part:
            weights.append(int(part))
    weights = sorted({w for w in weights})
    if not weights:
        raise _UsageError("no weights given")
    for w in weights:
        if w < 2 or w % 2:
            raise _UsageError(f"weights must be even and >= 2, got {w}")
    return weights


def _emit(payload, output: str | None):
    text = json.dumps(payload, indent=2, sort_keys=False)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_csv(rows, header, output: str | None):
    fh = open(output, "w", newline="", encoding="utf-8") if output else sys.stdout
    try:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if output:
            fh.close()


def _series_lines(series, terms: int):
    for n, c in series.items():
        if n >= series.valuation + terms:
            break
        yield f"{n}\t{c}"


def build_parser() -> _Parser:
    parser = _Parser(prog="eiszeros", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, weight=False, weights=False, terms=False):
        p.add_argument("--group", required=True, help="builtin name or config JSON path")
        if weight:
            p.add_argument("--weight", type=int, required=True, help="even weight 2k")
        if weights:
            p.add_argument("--weights", required=True, help="e.g. 4..40 or 4,8,12")
        if terms:
            p.add_argument("--terms", type=int, default=16)
        p.add_argument("--truncation", type=int, default=None)
        p.add_argument("--precision-bits", type=int, default=256)
        p.add_argument("--samples-per-arc", type=int, default=256)
        p.add_argument("--quad-tol", type=float, default=1e-7)
        p.add_argument("--output", default=None)

    common(sub.add_parser("expand", help="q-expansion of the Eisenstein series"), weight=True, terms=True)
    common(sub.add_parser("hauptmodul", help="canonical hauptmodul expansion"), terms=True)
    common(sub.add_parser("upsilon", help="extremal form expansion"), weight=True, terms=True)
    common(sub.add_parser("divpoly", help="divisor polynomial coefficients"), weight=True)
    p = sub.add_parser("verify", help="certified theorem report for one weight")
    common(p, weight=True)
    p.add_argument("--no-preimages", action="store_true")
    p = sub.add_parser("sweep", help="reports for a weight range plus summary")
    common(p, weights=True)
    p.add_argument("--preimages", action="store_true")
    common(sub.add_parser("crit", help="sign-change points and c value (CSV)"))
    common(sub.add_parser("trace", help="boundary samples of j (CSV)"))
    common(sub.add_parser("petersson", help="orthogonality replay residual"), weight=True)
    return parser


def _check_precision(bits: int):
    if bits < 64:
        raise _UsageError("precision_bits must be >= 64")


def run_command(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_precision(getattr(args, "precision_bits", 256))
        group = group_spec(args.group)

        if args.command == "expand":
            k = _even_weight(args.weight) // 2
            t = args.truncation or max(args.terms + 1, 16)
            try:
                series = eisenstein_infinity(group, k, t)
            except DoesNotExist as e:
                print(f"does_not_exist: {e}")
                return EXIT_DOES_NOT_EXIST
            for line in _series_lines(series, args.terms):
                print(line)
            return EXIT_OK

        if args.command == "hauptmodul":
            t = args.truncation or max(args.terms + 1, 16)
            h = hauptmodul(group, t)
            for line in _series_lines(h.series, args.terms):
                print(line)
            record = h.comparison_record()
            if record is not None:
                _emit(record, args.output)
            return EXIT_OK

        if args.command == "upsilon":
            k = _even_weight(args.weight) // 2
            series = upsilon(group, k, args.truncation)
            for line in _series_lines(series, args.terms):
                print(line)
            return EXIT_OK

        if args.command == "divpoly":
            k = _even_weight(args.weight) // 2
            try:
                poly = divisor_polynomial(group, k, args.truncation)
            except DoesNotExist as e:
                print(f"does_not_exist: {e}")
                return EXIT_DOES_NOT_EXIST
            for i, c in enumerate(poly.coeffs):
                print(f"{i}\t{c}")
            return EXIT_OK

        if args.command == "verify":
            k = _even_weight(args.weight) // 2
            report = verify_theorem(
                group, k,
                truncation=args.truncation,
                precision_bits=args.precision_bits,
                samples_per_arc=args.samples_per_arc,
                with_preimages=not args.no_preimages,
            )
            _emit(report_to_dict(report), args.output)
            if report.status == "does_not_exist":
                return EXIT_DOES_NOT_EXIST
            return EXIT_OK if report.theorem_pass else EXIT_FAIL

        if args.command == "sweep":
            weights = _parse_weights(args.weights)
            reports = []
            max_exceptions = 0
            missing = []
            failed = []
            for w in weights:
                report = verify_theorem(
                    group, w // 2,
                    truncation=args.truncation,
                    precision_bits=args.precision_bits,
                    samples_per_arc=args.samples_per_arc,
                    with_preimages=args.preimages,
                )
                reports.append(report_to_dict(report))
                if report.status == "does_not_exist":
                    missing.append(w)
                else:
                    max_exceptions = max(max_exceptions, report.counts["exceptions"])
                    if not report.theorem_pass:
                        failed.append(w)
            payload = {
                "schema_version": SCHEMA_VERSION,
                "group": group.name,
                "weights": weights,
                "summary": {
                    "max_exceptions": max_exceptions,
                    "does_not_exist_weights": missing,
                    "failed_weights": failed,
                    "all_pass": not failed,
                },
                "reports": reports,
            }
            _emit(payload, args.output)
            if failed:
                return EXIT_FAIL
            return EXIT_DOES_NOT_EXIST if missing else EXIT_OK

        if args.command == "crit":
            crit, c = crit_and_c(group, args.samples_per_arc)
            rows = [
                (p.arc_index, f"{p.t:.12f}", f"{p.z.real:.12f}", f"{p.z.imag:.12f}",
                 p.kind, p.sign_change, p.class_id)
                for p in crit.points
            ]
            _emit_csv(rows, ["arc_index", "t", "x", "y", "kind", "sign_change", "class_id"], args.output)
            print(f"c = {c}", file=sys.stderr)
            return EXIT_OK

        if args.command == "trace":
            trace = trace_boundary(group, args.precision_bits, args.samples_per_arc)
            rows = []
            for arc in trace.arcs:
                for s in arc.samples:
                    rows.append((f"arc{arc.arc_index}", f"{s.t:.12f}", f"{s.x:.12f}", f"{s.y:.12f}",
                                 repr(s.j.real), repr(s.j.imag), repr(s.dy_dt),
                                 repr(s.djz_dt.real), repr(s.djz_dt.imag)))
            for vert in trace.verticals:
                for s in vert.samples:
                    rows.append((f"vertical_{vert.side}", f"{s.t:.12f}", f"{s.x:.12f}", f"{s.y:.12f}",
                                 repr(s.j.real), repr(s.j.imag), repr(s.dy_dt),
                                 repr(s.djz_dt.real), repr(s.djz_dt.imag)))
            _emit_csv(rows, ["piece", "t", "x", "y", "re_j", "im_j", "dy_dt", "re_djz", "im_djz"],
                      args.output)
            print(f"max |Im j| = {trace.max_abs_im_j:.3e}; skipped {len(trace.skipped)} samples",
                  file=sys.stderr)
            return EXIT_OK

        if args.command == "petersson":
            k = _even_weight(args.weight) // 2
            try:
                rep = orthogonality_replay(group, k, QuadratureSpec(target_tol=args.quad_tol))
            except DoesNotExist as e:
                print(f"does_not_exist: {e}")
                return EXIT_DOES_NOT_EXIST
            payload = {
                "schema_version": SCHEMA_VERSION,
                "group": rep.group,
                "weight": rep.weight,
                "q_factors": list(rep.q_factors),
                "q_factors_omitted": list(rep.q_factors_omitted),
                "inner_value": {"re": repr(rep.inner_value.real), "im": repr(rep.inner_value.imag)},
                "relative_residual": repr(rep.relative_residual),
                "error_estimate": repr(rep.error_estimate),
            }
            _emit(payload, args.output)
            return EXIT_OK

        raise _UsageError(f"unknown command {args.command!r}")
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigValidation, UnknownGroup) as e:
        print(f"config error: {e}", file=sys.stderr)
        if isinstance(e, ConfigValidation):
            for problem in e.problems:
                print(f"  - {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except EisZerosError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL


def _even_weight(w: int) -> int:
    if w < 2 or w % 2:
        raise _UsageError(f"weight must be even and >= 2, got {w}")
    return w


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
