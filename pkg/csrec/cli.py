"""
Command-line front end.

    python -m csrec seifert --fibers "3/2,5/2,7/2"
    python -m csrec fig8 --p 6
    python -m csrec twist --n -1 --p 6 --q 1 --eigenvalue longitude
    python -m csrec riley --two-bridge 5/3
    python -m csrec pair --input data/m6_fig8.json
    python -m csrec cross --p 6 --input data/m6_fig8.json

Exit codes: 0 all checks pass, 1 a reciprocity check failed, 2 input error,
3 numerical failure.
"""

import argparse
import json
import sys
from typing import List, Optional

import pandas as pd
from mpmath import mp

from csrec import __version__, console
from csrec.config import Settings
from csrec.errors import CsrecError, InputError, NumericalFailure
from csrec.manifold import bundled_path, load_manifold
from csrec.numeric import format_ap
from csrec.repvar import TwistSurgerySpec, TwoBridgeSpec, conjugation_closed, enumerate_variety, \
    riley_polynomial, riley_roots
from csrec.seifert import SeifertSpec
from csrec.verify import (VerificationReport, check_fig8, check_homology, check_seifert,
                          check_torus_bundle, cross_check)

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


def _common(parser: argparse.ArgumentParser):
    parser.add_argument('--json', action='store_true', help='Print the result as JSON on stdout')
    parser.add_argument('--csv', type=str, default=None, help='Write the per-row table to this CSV file')
    parser.add_argument('--digits', type=int, default=None, help='Working precision in decimal digits')
    parser.add_argument('--tol', type=float, default=1e-6, help='Pass tolerance (default 1e-6)')
    parser.add_argument('--threads', type=int, default=None, help='Worker threads')
    parser.add_argument('--quiet', action='store_true', help='Suppress status lines')
    parser.add_argument('--verbose', action='store_true', help='Show progress bars')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='csrec', description='Chern-Simons reciprocity checks')
    parser.add_argument('--version', action='version', version=f"csrec {__version__}")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('seifert', help='Exact check for a Seifert manifold or torus-bundle values')
    p.add_argument('--fibers', type=str, help='"p1/q1,p2/q2,p3/q3"')
    p.add_argument('--torus-values', type=str, help='Comma-separated CS values, e.g. "0,1/2"')
    _common(p)

    p = sub.add_parser('fig8', help='Saddle-point check for p/1 surgery on the figure-eight knot')
    p.add_argument('--p', type=int, required=True)
    _common(p)

    p = sub.add_parser('twist', help='Representation variety of a twist-knot surgery')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--p', type=int, required=True)
    p.add_argument('--q', type=int, default=1)
    p.add_argument('--eigenvalue', choices=('printed', 'longitude'), default='printed')
    p.add_argument('--allow-odd', action='store_true', help='Enumerate odd p as well')
    _common(p)

    p = sub.add_parser('riley', help='Riley polynomial of a 2-bridge knot')
    p.add_argument('--two-bridge', type=str, required=True, help='"p/q"')
    _common(p)

    p = sub.add_parser('pair', help='Homology pairing for a manifold JSON file')
    p.add_argument('--input', type=str, default=bundled_path('m6_fig8.json'))
    _common(p)

    p = sub.add_parser('cross', help='Saddle values against homology pairings')
    p.add_argument('--p', type=int, required=True)
    p.add_argument('--input', type=str, default=bundled_path('m6_fig8.json'))
    _common(p)
    return parser


def _settings(args) -> Settings:
    settings = Settings.from_env(threads=args.threads)
    if args.digits is not None:
        settings = settings.with_digits(args.digits)
    return settings


def _display_digits(args) -> int:
    return min(args.digits, 20) if args.digits else 20


def _emit_report(report: VerificationReport, args) -> int:
    if args.csv:
        report.to_frame().to_csv(args.csv, index=False)
        console.ok(f"Table saved to {args.csv}")
    if args.json:
        print(report.to_json())
    else:
        print(f"{report.manifold} [{report.method}]")
        for row in report.rows:
            print('  ' + '  '.join(f"{k}={v}" for k, v in row.items()))
        print(f"  scaled sum: {report.scaled}")
        print(f"  distance: {report.distance:.3e}   |Im|: {report.imag:.3e}")
        for note in report.notes:
            print(f"  note: {note}")
    if report.passed:
        console.ok(f"{report.manifold}: reciprocity holds ({report.method})")
        return EXIT_OK
    if report.failures:
        console.fail(f"{report.manifold}: {report.failures} representation(s) failed numerically")
        return EXIT_NUMERIC
    console.fail(f"{report.manifold}: reciprocity check failed (distance {report.distance:.3e})")
    return EXIT_FAILED


def cmd_seifert(args) -> int:
    if args.torus_values:
        values = [v.strip() for v in args.torus_values.split(',') if v.strip()]
        try:
            report = check_torus_bundle(values)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad torus value list: {exc}")
        return _emit_report(report, args)
    if not args.fibers:
        raise InputError("seifert needs --fibers or --torus-values")
    spec = SeifertSpec.parse(args.fibers)
    console.info(f"Seifert spec {spec}, r = {spec.r}")
    return _emit_report(check_seifert(spec), args)


def cmd_fig8(args) -> int:
    settings = _settings(args)
    console.info(f"Solving the saddle system for p = {args.p} at {settings.digits} digits")
    return _emit_report(check_fig8(args.p, settings, args.tol, _display_digits(args)), args)


def cmd_twist(args) -> int:
    settings = _settings(args)
    spec = TwistSurgerySpec(args.n, args.p, args.q, args.eigenvalue, args.allow_odd).validate()
    if not spec.theorem_backed:
        console.warn(f"p = {spec.p} is odd; reciprocity is only conjectured here")
    points = enumerate_variety(spec, settings)
    digits = _display_digits(args)
    rows = [pt.to_dict(digits) for pt in points]
    if args.csv:
        pd.DataFrame(rows).to_csv(args.csv, index=False)
        console.ok(f"Table saved to {args.csv}")
    if args.json:
        print(json.dumps({'spec': vars(spec), 'points': rows,
                          'conjugation_closed': conjugation_closed(points)}, indent=2))
    else:
        print(f"M_{spec.p}/{spec.q}(K_{spec.n}): {len(points)} irreducible point(s)")
        for row in rows:
            print(f"  #{row['index']}: m={row['m']}  z={row['z']}  conj->#{row['partner']}")
    if conjugation_closed(points):
        console.ok("point set is closed under complex conjugation")
    else:
        console.warn("point set is not closed under complex conjugation")
    return EXIT_OK


def cmd_riley(args) -> int:
    settings = _settings(args)
    try:
        p, q = (int(x) for x in args.two_bridge.split('/'))
    except ValueError:
        raise InputError(f"cannot parse 2-bridge knot {args.two_bridge!r}; expected 'p/q'")
    spec = TwoBridgeSpec(p, q)
    poly = riley_polynomial(spec)
    found = riley_roots(spec, settings)
    digits = _display_digits(args)
    coeffs = [int(c) for c in poly.all_coeffs()]
    roots_out = [{'zeta': format_ap(r, digits), 'conjugate': k} for r, k in found]
    if args.json:
        print(json.dumps({'knot': f"b({p},{q})", 'coefficients': coeffs, 'roots': roots_out}, indent=2))
    else:
        print(f"b({p},{q}): Riley polynomial {poly.as_expr()}")
        for i, row in enumerate(roots_out):
            print(f"  zeta_{i} = {row['zeta']}  conj->{row['conjugate']}")
    return EXIT_OK


def cmd_pair(args) -> int:
    settings = _settings(args)
    manifold = load_manifold(args.input, settings)
    console.info(f"{manifold.name}: {len(manifold.representations)} representation(s)")
    return _emit_report(check_homology(manifold, settings, args.tol, _display_digits(args)), args)


def cmd_cross(args) -> int:
    settings = _settings(args)
    manifold = load_manifold(args.input, settings)
    return _emit_report(cross_check(args.p, manifold, settings, args.tol, _display_digits(args)), args)


COMMANDS = {
    'seifert': cmd_seifert,
    'fig8': cmd_fig8,
    'twist': cmd_twist,
    'riley': cmd_riley,
    'pair': cmd_pair,
    'cross': cmd_cross,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    console.configure(quiet=args.quiet, verbose=args.verbose)
    try:
        with mp.workprec(_settings(args).precision):
            return COMMANDS[args.command](args)
    except InputError as exc:
        console.fail(f"input error: {exc}")
        return EXIT_INPUT
    except NumericalFailure as exc:
        console.fail(f"numerical failure: {exc}")
        return EXIT_NUMERIC
    except CsrecError as exc:
        console.fail(str(exc))
        return exc.exit_code
    except ValueError as exc:
        console.fail(f"input error: {exc}")
        return EXIT_INPUT


if __name__ == '__main__':
    sys.exit(main())
