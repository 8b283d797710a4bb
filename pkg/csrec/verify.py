"""
Reciprocity checks across the three routes.

Every check brings its sum into the common frame 24 * sum CS (mod 1):
  saddle:   (6/pi^2) sum T
  seifert:  6 sum 4CS            (exact)
  homology: 12 sum 2CS
and returns a VerificationReport with per-representation rows.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Dict, List, Optional, Sequence

import mpmath
import pandas as pd
from mpmath import mp

from csrec import console
from csrec.algebra import QmodZ
from csrec.config import DEFAULT_SETTINGS, Settings
from csrec.errors import NumericalFailure
from csrec.homology import cs_doubled
from csrec.manifold import ManifoldInput
from csrec.numeric import distance_mod, distance_to_integer, format_ap, reduce_mod, to_ap
from csrec.saddle import check_surgery_coefficient, cs_terms, reciprocity_sum_fig8
from csrec.seifert import (SeifertSpec, closed_form_odd_even, enumerate_labels, four_cs,
                           reciprocity_sum_seifert, sum_four_cs, torus_bundle_check)

METHODS = ('saddle', 'seifert', 'torus', 'homology', 'cross')


@dataclass
class VerificationReport:
    manifold: str
    method: str
    rows: List[Dict] = field(default_factory=list)
    total: str = '0'
    scaled: str = '0'
    distance: float = 0.0
    imag: float = 0.0
    passed: bool = True
    tolerance: Optional[float] = None
    imag_tolerance: Optional[float] = None
    precision: Optional[int] = None
    notes: List[str] = field(default_factory=list)
    failures: int = 0

    @property
    def residue(self) -> str:
        """Signed offset of the scaled sum from its nearest integer (real part)."""
        if self.method in ('seifert', 'torus'):
            value = QmodZ.of(self.scaled).value
            return str(value - 1 if value > Fraction(1, 2) else value)
        x = to_ap(self.scaled).real
        return mpmath.nstr(x - mpmath.nint(x), 6)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> 'VerificationReport':
        return cls(**doc)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.rows)
        frame.insert(0, 'manifold', self.manifold)
        frame.insert(1, 'method', self.method)
        return frame


def _numeric_verdict(report: VerificationReport, scaled: mpmath.mpc, tolerance: float, digits: int,
                     imag_tolerance: float):
    distance, imag = distance_to_integer(scaled)
    report.scaled = format_ap(scaled, digits)
    report.distance = float(distance)
    report.imag = float(imag)
    report.tolerance = tolerance
    report.imag_tolerance = imag_tolerance
    report.passed = report.passed and distance < tolerance and imag < imag_tolerance


# --- figure-eight saddle route ------------------------------------------------

def check_fig8(p: int, settings: Settings = DEFAULT_SETTINGS, tolerance: float = 1e-6,
               digits: int = 20, imag_tolerance: float = 1e-8) -> VerificationReport:
    """(6/pi^2) sum T over all solutions; passes iff it is an integer with |Im| below `imag_tolerance`."""
    check_surgery_coefficient(p)
    points = cs_terms(p, settings)
    result = reciprocity_sum_fig8(p, settings, points)
    report = VerificationReport(manifold=f"M_{p}/1(figure-eight)", method='saddle',
                                rows=[pt.to_dict(digits) for pt in points],
                                precision=settings.precision)
    with mp.workprec(settings.precision):
        report.total = format_ap(mpmath.fsum(pt.T for pt in points), digits)
    if result.count != abs(p):
        report.notes.append(f"solution count {result.count} differs from |p| = {abs(p)}")
    _numeric_verdict(report, result.total, tolerance, digits, imag_tolerance)
    return report


# --- Seifert route ---------------------------------------------------------------

def check_seifert(spec: SeifertSpec) -> VerificationReport:
    """Exact: passes iff 6 sum 4CS = 0 in Q/Z."""
    rows = []
    for label in enumerate_labels(spec):
        rows.append({
            'j': ','.join(str(j) for j in label.j),
            'n': ','.join(str(n) for n in label.n),
            'lambda': str(label.lam),
            'four_cs': str(four_cs(label, spec)),
        })
    residue = reciprocity_sum_seifert(spec)
    report = VerificationReport(manifold=f"M(0;(o,0);{spec})", method='seifert', rows=rows,
                                total=str(sum_four_cs(spec)), scaled=str(residue),
                                passed=residue.is_zero())
    report.distance = float(min(residue.value, 1 - residue.value))
    if spec.odd_even:
        closed = closed_form_odd_even(spec)
        if closed != QmodZ(sum_four_cs(spec)):
            report.passed = False
            report.notes.append(f"closed form {closed} disagrees with the enumeration")
        else:
            report.notes.append(f"closed form agrees: {closed}")
    return report


def check_torus_bundle(cs_values: Sequence) -> VerificationReport:
    values = [QmodZ.of(v) for v in cs_values]
    total = sum((v.value for v in values), Fraction(0))
    report = VerificationReport(manifold='torus bundle', method='torus',
                                rows=[{'cs': str(v)} for v in values],
                                total=str(QmodZ(total)), scaled=str(QmodZ(24 * total)),
                                passed=torus_bundle_check(values))
    if not report.passed:
        report.notes.append("a value lies outside (1/2)Z")
    return report


# --- homology route ----------------------------------------------------------------

def _pair_one(args):
    entry, manifold, settings = args
    try:
        value = cs_doubled(entry.matrices, manifold.cell, settings, v0=manifold.v0)
        return entry, value, None
    except NumericalFailure as exc:
        return entry, None, exc


def pair_all(manifold: ManifoldInput, settings: Settings = DEFAULT_SETTINGS):
    """(entry, 2CS or None, error or None) per representation, in input order."""
    jobs = [(entry, manifold, settings) for entry in manifold.representations]
    with mp.workprec(settings.precision):
        if settings.threads > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=settings.threads) as pool:
                return list(console.progress(pool.map(_pair_one, jobs), desc='pairing', total=len(jobs)))
        return [_pair_one(job) for job in console.progress(jobs, desc='pairing')]


def check_homology(manifold: ManifoldInput, settings: Settings = DEFAULT_SETTINGS,
                   tolerance: float = 1e-6, digits: int = 20,
                   imag_tolerance: float = 1e-8) -> VerificationReport:
    """12 sum 2CS over the supplied representations; passes iff it is an integer."""
    report = VerificationReport(manifold=manifold.name, method='homology', precision=settings.precision)
    with mp.workprec(settings.precision):
        total = mpmath.mpc(0)
        for entry, value, error in pair_all(manifold, settings):
            if error is not None:
                report.failures += 1
                report.passed = False
                report.rows.append({'id': entry.id, 'two_cs': '', 'error': str(error)})
                continue
            total += value
            report.rows.append({'id': entry.id, 'two_cs': format_ap(value, digits),
                                'imag': mpmath.nstr(value.imag, 6), 'error': ''})
        report.total = format_ap(total, digits)
        _numeric_verdict(report, 12 * total, tolerance, digits, imag_tolerance)
    if not manifold.representations:
        report.notes.append("no representations supplied; the sum is vacuous")
    return report


# --- saddle vs homology ------------------------------------------------------------

# T / (2 pi^2) is compared with 2CS directly, with sign +1 and no conjugation.
CONVENTION = 'sign +1, direct'


def _invariants(matrices):
    A, B = matrices[0], matrices[1]
    return A.trace() ** 2, (A @ B.inverse()).trace()


def _saddle_invariants(point):
    return point.z + 2 + 1 / point.z, point.w + 1


def _same_invariants(a, b, tolerance: float) -> bool:
    return all(abs(x - y) < tolerance * max(1, abs(y)) for x, y in zip(a, b))


def _group_saddles(points, tolerance: float):
    """Saddle points sharing (tr a^2, tr ab^-1); z and 1/z always land together."""
    groups = []
    for pt in points:
        inv = _saddle_invariants(pt)
        for key, members in groups:
            if _same_invariants(inv, key, tolerance):
                members.append(pt)
                break
        else:
            groups.append((inv, [pt]))
    return groups


def _expected(point) -> mpmath.mpc:
    return point.T / (2 * mpmath.pi ** 2)


def _best_assignment(reps, members):
    """One-to-one pairing within a group that minimises the worst gap modulo 1."""
    if len(reps) <= len(members):
        options = (list(zip(reps, chosen)) for chosen in permutations(members, len(reps)))
    else:
        options = (list(zip(chosen, members)) for chosen in permutations(reps, len(members)))
    best, best_worst = [], None
    for pairs in options:
        worst = max((distance_mod(_expected(pt), value, 1) for (_, value), pt in pairs),
                    default=mpmath.mpf(0))
        if best_worst is None or worst < best_worst:
            best, best_worst = pairs, worst
    return best


def cross_check(p: int, manifold: ManifoldInput, settings: Settings = DEFAULT_SETTINGS,
                tolerance: float = 1e-6, digits: int = 20) -> VerificationReport:
    """
    Pair every saddle point with exactly one representation and compare
    T/(2 pi^2) with 2CS modulo 1.

    Saddle points and representations are grouped by tr(a)^2 = z + 2 + 1/z and
    tr(ab^-1) = w + 1. Inside a group (the two sign lifts of a representation,
    the saddle points z and 1/z) the pairing is the permutation with the
    smallest worst discrepancy. The check passes only when the pairing is a
    bijection onto all solutions and every discrepancy is below `tolerance`.
    """
    points = cs_terms(p, settings)
    report = VerificationReport(manifold=manifold.name, method='cross', precision=settings.precision,
                                tolerance=tolerance)
    with mp.workprec(settings.precision):
        paired = [(entry, value) for entry, value, error in pair_all(manifold, settings) if error is None]
        report.failures = len(manifold.representations) - len(paired)
        groups = _group_saddles(points, 1e-6)
        by_group: Dict[int, list] = {}
        unmatched = []
        for n, (entry, value) in enumerate(paired):
            inv = _invariants(entry.matrices)
            hit = next((g for g, (key, _) in enumerate(groups) if _same_invariants(key, inv, 1e-6)), None)
            if hit is None:
                unmatched.append(entry)
            else:
                by_group.setdefault(hit, []).append((n, value))

        matched: Dict[int, tuple] = {}
        for g, (_, members) in enumerate(groups):
            reps = by_group.get(g, [])
            if len(reps) != len(members):
                report.notes.append(f"saddle points {[pt.index for pt in members]} carry "
                                    f"{len(reps)} representation(s) for {len(members)} solution(s)")
            for (n, value), pt in _best_assignment(reps, members):
                matched[n] = (pt, distance_mod(_expected(pt), value, 1))

        rows, worst = [], mpmath.mpf(0)
        for n, (entry, value) in enumerate(paired):
            if n not in matched:
                rows.append({'id': entry.id, 'two_cs': format_ap(value, digits), 'saddle_index': None,
                             'expected': '', 'discrepancy': None})
                continue
            pt, gap = matched[n]
            worst = max(worst, gap)
            rows.append({'id': entry.id, 'two_cs': format_ap(value, digits), 'saddle_index': pt.index,
                         'expected': format_ap(reduce_mod(_expected(pt), 1), digits),
                         'discrepancy': float(gap)})
    covered = sorted(row['saddle_index'] for row in rows if row['saddle_index'] is not None)
    missing = sorted(set(pt.index for pt in points) - set(covered))
    report.rows = rows
    report.distance = float(worst)
    report.scaled = mpmath.nstr(worst, 6)
    report.passed = (len(matched) == len(paired) and report.failures == 0
                     and covered == [pt.index for pt in points] and worst < tolerance and bool(paired))
    report.notes.append(f"convention: {CONVENTION}")
    if unmatched:
        report.notes.append(f"{len(unmatched)} representation(s) matched no saddle point")
    if missing:
        report.notes.append(f"saddle point(s) {missing} matched no representation")
    return report
