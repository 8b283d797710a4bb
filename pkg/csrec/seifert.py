"""
Exact Chern-Simons sums for Seifert manifolds with three singular fibers,
M(0; (o, 0); (p1, q1), (p2, q2), (p3, q3)).

Irreducible SL2(C) representations are labelled by half-integers
n_k = (j_k + 1)/2, j_k in [0 .. p_k - 2], and lambda in {0, 1/2}. Each label
has 4 CS = 4 sum_k r_k n_k^2 / p_k in Q/Z, with p_k s_k - q_k r_k = 1.
Everything here is Fraction arithmetic.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, List, Optional, Sequence, Tuple

import pandas as pd
import sympy

from csrec.algebra import QmodZ, ext_gcd_pair
from csrec.errors import InputError

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class SeifertSpec:
    """Three exceptional fibers (p_k, q_k); bezout overrides the (s_k, r_k) pairs."""
    fibers: Tuple[Tuple[int, int], Tuple[int, int], Tuple[int, int]]
    bezout: Optional[Tuple[Tuple[int, int], ...]] = field(default=None, compare=False)

    def __post_init__(self):
        fibers = tuple((int(p), int(q)) for p, q in self.fibers)
        if len(fibers) != 3:
            raise InputError(f"expected three fibers, got {len(fibers)}")
        for p, q in fibers:
            if p < 2:
                raise InputError(f"fiber ({p}, {q}) needs p >= 2")
            if sympy.gcd(p, q) != 1:
                raise InputError(f"fiber ({p}, {q}) is not coprime")
        object.__setattr__(self, 'fibers', fibers)
        if self.bezout is None:
            object.__setattr__(self, 'bezout', tuple(ext_gcd_pair(p, q) for p, q in fibers))
        for (p, q), (s, r) in zip(fibers, self.bezout):
            if p * s - q * r != 1:
                raise InputError(f"({s}, {r}) is not a Bezout pair for ({p}, {q})")

    @classmethod
    def parse(cls, text: str) -> 'SeifertSpec':
        """'3/2,5/2,7/2' -> ((3, 2), (5, 2), (7, 2))."""
        try:
            fibers = []
            for part in text.split(','):
                p, q = part.strip().split('/')
                fibers.append((int(p), int(q)))
        except ValueError:
            raise InputError(f"cannot parse Seifert spec {text!r}; expected 'p1/q1,p2/q2,p3/q3'")
        return cls(tuple(fibers))

    @property
    def p(self) -> Tuple[int, int, int]:
        return tuple(p for p, _ in self.fibers)

    @property
    def q(self) -> Tuple[int, int, int]:
        return tuple(q for _, q in self.fibers)

    @property
    def r(self) -> Tuple[int, int, int]:
        return tuple(r for _, r in self.bezout)

    @property
    def s(self) -> Tuple[int, int, int]:
        return tuple(s for s, _ in self.bezout)

    @property
    def odd_even(self) -> bool:
        """All p_k odd and all q_k even."""
        return all(p % 2 == 1 for p in self.p) and all(q % 2 == 0 for q in self.q)

    def shifted(self, k: int, times: int = 1) -> 'SeifertSpec':
        """Same manifold with (s_k, r_k) replaced by (s_k + t q_k, r_k + t p_k)."""
        bezout = list(self.bezout)
        s, r = bezout[k]
        p, q = self.fibers[k]
        bezout[k] = (s + times * q, r + times * p)
        return SeifertSpec(self.fibers, tuple(bezout))

    def __str__(self) -> str:
        return ','.join(f"{p}/{q}" for p, q in self.fibers)


@dataclass(frozen=True)
class SeifertRepLabel:
    j: Tuple[int, int, int]
    lam: Fraction

    @property
    def n(self) -> Tuple[Fraction, Fraction, Fraction]:
        return tuple(Fraction(jk + 1, 2) for jk in self.j)

    @property
    def parity(self) -> str:
        return ''.join('e' if jk % 2 == 0 else 'o' for jk in self.j)


def _branch_indices(p: int, parity: str) -> List[int]:
    start = 0 if parity == 'e' else 1
    return list(range(start, p - 1, 2))


def enumerate_labels(spec: SeifertSpec) -> List[SeifertRepLabel]:
    """Labels for lambda = 1/2 (j_k even iff q_k odd) then lambda = 0 (all j_k odd)."""
    labels = []
    half_parities = ['e' if q % 2 else 'o' for q in spec.q]
    for lam, parities in ((HALF, half_parities), (Fraction(0), ['o', 'o', 'o'])):
        ranges = [_branch_indices(p, eps) for p, eps in zip(spec.p, parities)]
        for j in product(*ranges):
            labels.append(SeifertRepLabel(j=tuple(j), lam=lam))
    return labels


def four_cs_value(label: SeifertRepLabel, spec: SeifertSpec) -> Fraction:
    """4 sum r_k n_k^2 / p_k before reduction."""
    return 4 * sum((Fraction(r) * n * n / p for r, n, p in zip(spec.r, label.n, spec.p)), Fraction(0))


def four_cs(label: SeifertRepLabel, spec: SeifertSpec) -> QmodZ:
    return QmodZ(four_cs_value(label, spec))


def sum_four_cs(spec: SeifertSpec) -> Fraction:
    return sum((four_cs_value(label, spec) for label in enumerate_labels(spec)), Fraction(0))


def reciprocity_sum_seifert(spec: SeifertSpec) -> QmodZ:
    """24 sum CS = 6 sum 4CS in Q/Z; zero when reciprocity holds."""
    return QmodZ(6 * sum_four_cs(spec))


def closed_form_odd_even(spec: SeifertSpec) -> QmodZ:
    """(4/3) prod (p_j - 1)/2 sum r_k (p_k + 1)/2, for p_k odd and q_k even."""
    if not spec.odd_even:
        raise InputError(f"closed form needs every p_k odd and q_k even, got {spec}")
    return QmodZ(closed_form_value(spec))


def closed_form_value(spec: SeifertSpec) -> Fraction:
    """Unreduced closed form; equals sum_four_cs(spec) in the odd/even case."""
    prod_ = Fraction(1)
    for p in spec.p:
        prod_ *= Fraction(p - 1, 2)
    return Fraction(4, 3) * prod_ * sum((Fraction(r * (p + 1), 2) for r, p in zip(spec.r, spec.p)), Fraction(0))


def torus_bundle_check(cs_values: Iterable) -> bool:
    """Every CS value lies in (1/2)Z, so 24 times their sum vanishes."""
    return all(QmodZ.of(v).value in (0, HALF) for v in cs_values)


def census(specs: Sequence[SeifertSpec]) -> pd.DataFrame:
    """One row per spec: label count, sum of 4CS, reciprocity residue and closed form."""
    rows = []
    for spec in specs:
        labels = enumerate_labels(spec)
        total = sum_four_cs(spec)
        residue = reciprocity_sum_seifert(spec)
        closed = closed_form_odd_even(spec) if spec.odd_even else None
        rows.append({
            'spec': str(spec),
            'r': ','.join(str(r) for r in spec.r),
            'labels': len(labels),
            'sum_4cs': str(total),
            'sum_4cs_mod_1': str(QmodZ(total)),
            'residue': str(residue),
            'passed': residue.is_zero(),
            'closed_form': str(closed) if closed is not None else '',
            'closed_form_agrees': (closed == QmodZ(total)) if closed is not None else None,
        })
    return pd.DataFrame(rows)
