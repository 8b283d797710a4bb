"""
Group-homology route to the doubled Chern-Simons invariant.

Pipeline for a closed 3-manifold M with a deficiency-zero presentation
<x_1..x_g | r_1..r_g>, boundary data d3 and a representation rho:

    O_M --d3--> Z[pi]^g --c2--> 2-cycle C --cone at v0--> 3-chain O'
    2CS(rho) = sum coeff * (-1/(2 pi^2)) * L(lambda(tuple))   mod 1

All group-ring identities are checked after applying rho, on tuples of
matrices compared entrywise within a tolerance.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from csrec.config import DEFAULT_SETTINGS, Settings
from csrec.errors import (ChainCheckFailure, DegenerateAfterRetries, DegenerateTuple,
                          InputError, NumericalFailure)
from csrec.numeric import (FlattenedSimplex, SL2Matrix, l_hat, log_principal, reduce_mod,
                           simplex_from_flattening)

Word = Tuple[int, ...]
Representation = Tuple[SL2Matrix, ...]
MatrixTuple = Tuple[SL2Matrix, ...]


# --- words -------------------------------------------------------------------

def reduce_word(letters: Iterable[int]) -> Word:
    """Free reduction of a word in signed generator indices."""
    out: List[int] = []
    for x in letters:
        x = int(x)
        if x == 0:
            raise InputError("generator index 0 is not allowed")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def word_inverse(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def word_power(word: Sequence[int], n: int) -> Word:
    base = tuple(word) if n >= 0 else word_inverse(word)
    return reduce_word(base * abs(n))


def concat(*words: Sequence[int]) -> Word:
    letters: List[int] = []
    for w in words:
        letters.extend(w)
    return reduce_word(letters)


def exponent_sum(word: Sequence[int], generator: int) -> int:
    return sum(1 if x == generator else -1 if x == -generator else 0 for x in word)


# --- presentations and group rings -------------------------------------------

@dataclass(frozen=True)
class Presentation:
    generators: int
    relators: Tuple[Word, ...]
    name: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'relators', tuple(reduce_word(r) for r in self.relators))

    def validate(self, deficiency_zero: bool = True) -> 'Presentation':
        if self.generators < 1:
            raise InputError("a presentation needs at least one generator")
        if deficiency_zero and len(self.relators) != self.generators:
            raise InputError(
                f"{self.name or 'presentation'}: {self.generators} generators but "
                f"{len(self.relators)} relators")
        for r in self.relators:
            if not r:
                raise InputError("empty relator")
            if any(abs(x) > self.generators for x in r):
                raise InputError(f"relator {r} uses an unknown generator")
        return self


class GroupRingElem:
    """Finite Z-combination of freely reduced words; zero coefficients dropped."""

    __slots__ = ('terms',)

    def __init__(self, terms: Optional[Dict[Word, int]] = None):
        clean: Dict[Word, int] = {}
        for word, c in (terms or {}).items():
            w = reduce_word(word)
            clean[w] = clean.get(w, 0) + int(c)
        self.terms = {w: c for w, c in clean.items() if c != 0}

    @classmethod
    def word(cls, word: Sequence[int], coeff: int = 1) -> 'GroupRingElem':
        return cls({tuple(word): coeff})

    @classmethod
    def one(cls) -> 'GroupRingElem':
        return cls({(): 1})

    def __add__(self, other: 'GroupRingElem') -> 'GroupRingElem':
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return GroupRingElem(out)

    def __neg__(self) -> 'GroupRingElem':
        return GroupRingElem({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: 'GroupRingElem') -> 'GroupRingElem':
        return self + (-other)

    def __mul__(self, other) -> 'GroupRingElem':
        if isinstance(other, int):
            return GroupRingElem({w: c * other for w, c in self.terms.items()})
        out: Dict[Word, int] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = concat(w1, w2)
                out[w] = out.get(w, 0) + c1 * c2
        return GroupRingElem(out)

    def __rmul__(self, other: int) -> 'GroupRingElem':
        return self * other

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupRingElem) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"GroupRingElem({self.terms})"

    def augmentation(self) -> int:
        return sum(self.terms.values())

    def items(self):
        return sorted(self.terms.items())

    def is_zero(self) -> bool:
        return not self.terms


def fox_derivative(word: Sequence[int], generator: int) -> GroupRingElem:
    """
    d(uv)/dx = du/dx + u dv/dx,  dx/dx = 1,  dx^-1/dx = -x^-1.
    """
    terms: Dict[Word, int] = {}
    prefix: Word = ()
    for x in reduce_word(word):
        if x == generator:
            terms[prefix] = terms.get(prefix, 0) + 1
        elif x == -generator:
            key = concat(prefix, (x,))
            terms[key] = terms.get(key, 0) - 1
        prefix = prefix + (x,)
    return GroupRingElem(terms)


def boundary2(pres: Presentation) -> List[List[GroupRingElem]]:
    """Fox matrix: entry (i, j) = d r_i / d x_j (generators 1-based)."""
    return [[fox_derivative(r, j) for j in range(1, pres.generators + 1)] for r in pres.relators]


@dataclass(frozen=True)
class CellStructure:
    """Reduced cellular chain complex of the universal cover, rank 1, g, g, 1."""
    presentation: Presentation
    d3: Tuple[GroupRingElem, ...]
    name: str = ''
    d2: List[List[GroupRingElem]] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if len(self.d3) != len(self.presentation.relators):
            raise InputError("d3 needs one group-ring entry per relator")
        object.__setattr__(self, 'd2', boundary2(self.presentation))


# --- evaluation under rho ----------------------------------------------------

def word_matrix(word: Sequence[int], rho: Representation) -> SL2Matrix:
    result = SL2Matrix.identity()
    inverses: Dict[int, SL2Matrix] = {}
    for x in word:
        if x > 0:
            g = rho[x - 1]
        else:
            g = inverses.get(-x)
            if g is None:
                g = inverses[-x] = rho[-x - 1].inverse()
        result = result @ g
    return result


def evaluate(e: GroupRingElem, rho: Representation) -> List[Tuple[int, SL2Matrix]]:
    """Group-ring element -> formal sum of (coefficient, matrix)."""
    return [(c, word_matrix(w, rho)) for w, c in e.items()]


def conjugate_rep(rho: Representation, P: SL2Matrix) -> Representation:
    P_inv = P.inverse()
    return tuple(P @ g @ P_inv for g in rho)


def conj_rep(rho: Representation) -> Representation:
    """Complex-conjugate representation."""
    return tuple(g.conj() for g in rho)


def random_sl2(rng: np.random.Generator, scale: float = 1.0) -> SL2Matrix:
    """Pseudorandom SL2(C) matrix near the identity scale."""
    while True:
        a, b, c = (complex(*(scale * rng.standard_normal(2))) for _ in range(3))
        if abs(a) > 0.2:
            break
    A, B, C = mpmath.mpc(a), mpmath.mpc(b), mpmath.mpc(c)
    return SL2Matrix(A, B, C, (1 + B * C) / A)


def relator_residual(pres: Presentation, rho: Representation) -> mpmath.mpf:
    """max over relators of |rho(r) - I| (entrywise)."""
    identity = SL2Matrix.identity()
    worst = mpmath.mpf(0)
    for r in pres.relators:
        g = word_matrix(r, rho)
        worst = max([worst] + [abs(x - y) for x, y in zip(g.entries(), identity.entries())])
    return worst


# --- tuple chains ------------------------------------------------------------

class TupleChain:
    """Integer combination of tuples (g_0, ..., g_k) of SL2 matrices."""

    def __init__(self, terms: Optional[Iterable[Tuple[int, MatrixTuple]]] = None):
        self.terms: List[Tuple[int, MatrixTuple]] = [(int(c), tuple(t)) for c, t in (terms or []) if c != 0]

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __add__(self, other: 'TupleChain') -> 'TupleChain':
        return TupleChain(self.terms + other.terms)

    def __neg__(self) -> 'TupleChain':
        return TupleChain([(-c, t) for c, t in self.terms])

    def __sub__(self, other: 'TupleChain') -> 'TupleChain':
        return self + (-other)

    def scaled(self, n: int) -> 'TupleChain':
        return TupleChain([(n * c, t) for c, t in self.terms])

    def is_empty(self) -> bool:
        return not self.terms

    def boundary(self) -> 'TupleChain':
        """d(y_0..y_n) = sum_i (-1)^i (y_0..^y_i..y_n)."""
        out: List[Tuple[int, MatrixTuple]] = []
        for c, t in self.terms:
            for i in range(len(t)):
                out.append(((-1) ** i * c, t[:i] + t[i + 1:]))
        return TupleChain(out)

    def simplify(self, tolerance: float = 1e-12) -> 'TupleChain':
        """Merge numerically equal tuples and drop zero coefficients."""
        keyed = sorted(self.terms, key=lambda ct: float(ct[1][0].a.real) if ct[1] else 0.0)
        merged: List[List] = []
        window_start = 0
        for c, t in keyed:
            key = float(t[0].a.real) if t else 0.0
            scale = max(1.0, abs(key))
            # drop merged entries that are too far behind in the sort key
            while window_start < len(merged) and merged[window_start][2] < key - 1e-6 * scale:
                window_start += 1
            for entry in merged[window_start:]:
                if _tuples_close(entry[1], t, tolerance):
                    entry[0] += c
                    break
            else:
                merged.append([c, t, key])
        return TupleChain([(c, t) for c, t, _ in merged if c != 0])

    def equals(self, other: 'TupleChain', tolerance: float = 1e-12) -> bool:
        return (self - other).simplify(tolerance).is_empty()


def _tuples_close(t1: MatrixTuple, t2: MatrixTuple, tolerance: float) -> bool:
    return len(t1) == len(t2) and all(g.close_to(h, tolerance) for g, h in zip(t1, t2))


def chain_c1(context: Sequence[int], generator: int, rho: Representation) -> TupleChain:
    """c_1(A a_j) = (rho(A), rho(A x_j))."""
    A = word_matrix(context, rho)
    return TupleChain([(1, (A, A @ rho[generator - 1]))])


def c1_of_boundary2(relator: Sequence[int], context: Sequence[int], rho: Representation,
                    generators: int) -> TupleChain:
    """c_1(d_2(A b)) for the relator r: sum_j sum_u n_u (rho(Au), rho(Au x_j))."""
    out = TupleChain()
    for j in range(1, generators + 1):
        for w, c in fox_derivative(relator, j).items():
            out = out + chain_c1(concat(context, w), j, rho).scaled(c)
    return out


def chain_c2(relator: Sequence[int], context: Sequence[int], rho: Representation,
             apex: Optional[SL2Matrix] = None) -> TupleChain:
    """
    c_2(A b) = sum_m eps_m (rho(A) t, rho(A w'_m), rho(A w''_m)) where
    w'_m = x_1^e_1..x_m^((e_m - 1)/2), w''_m = x_1^e_1..x_m^((e_m + 1)/2).

    apex=None means t = I. Any t keeps d c_2 = c_1 d_2 once rho(r) = I.
    """
    A = word_matrix(context, rho)
    first = A if apex is None else A @ apex
    prefix = A
    terms: List[Tuple[int, MatrixTuple]] = []
    for x in relator:
        g = rho[abs(x) - 1]
        if x > 0:
            nxt = prefix @ g
            terms.append((1, (first, prefix, nxt)))
        else:
            nxt = prefix @ g.inverse()
            terms.append((-1, (first, nxt, prefix)))
        prefix = nxt
    return TupleChain(terms)


def two_cycle(cell: CellStructure, rho: Representation,
              apex: Optional[SL2Matrix] = None) -> TupleChain:
    """c_2(d_3(O_M)), unsimplified."""
    out = TupleChain()
    for relator, d3_entry in zip(cell.presentation.relators, cell.d3):
        for w, c in d3_entry.items():
            out = out + chain_c2(relator, w, rho, apex).scaled(c)
    return out


def check_cell(cell: CellStructure, rho: Representation, tolerance: float = 1e-12):
    """
    d1 d2 = 0 and d2 d3 = 0 after evaluation under rho.

    Raises ChainCheckFailure naming the failing identity.
    """
    pres = cell.presentation
    identity = SL2Matrix.identity()
    for i, r in enumerate(pres.relators, 1):
        if not word_matrix(r, rho).close_to(identity, max(tolerance, 1e-10)):
            raise ChainCheckFailure(f"relator {i} does not evaluate to the identity")
    for j in range(pres.generators):
        total: List[Tuple[int, MatrixTuple]] = []
        for i, d3_entry in enumerate(cell.d3):
            for c, g in evaluate(d3_entry * cell.d2[i][j], rho):
                total.append((c, (g,)))
        if not TupleChain(total).simplify(tolerance).is_empty():
            raise ChainCheckFailure(f"d2 d3 != 0 in column {j + 1}")


# --- Hopf map and the cocycle ------------------------------------------------

def hopf(g: SL2Matrix) -> Tuple[mpmath.mpc, mpmath.mpc]:
    """Image of [1:0]: the first column [a : c]."""
    return g.a, g.c


def hopf_equal(g: SL2Matrix, h: SL2Matrix, tolerance: float = 1e-9) -> bool:
    a1, c1 = hopf(g)
    a2, c2 = hopf(h)
    scale = mpmath.sqrt(abs(a1) ** 2 + abs(c1) ** 2) * mpmath.sqrt(abs(a2) ** 2 + abs(c2) ** 2)
    return abs(a1 * c2 - c1 * a2) <= tolerance * scale


def is_h_nondegenerate(t: MatrixTuple, tolerance: float = 1e-9) -> bool:
    return all(not hopf_equal(t[i], t[j], tolerance)
               for i in range(len(t)) for j in range(i + 1, len(t)))


def _ptolemy(g: SL2Matrix, h: SL2Matrix) -> mpmath.mpc:
    """det(g e_1, h e_1)."""
    return g.a * h.c - g.c * h.a


def lambda_hat(t: MatrixTuple, tolerance: float = 1e-9, coeff: int = 1) -> FlattenedSimplex:
    """
    Flattened simplex of an h-nondegenerate 4-tuple.

    With c_ij = log det(g_i e_1, g_j e_1) (principal logs):
        w0 = c_01 + c_23 - c_02 - c_13,  w1 = c_02 + c_13 - c_03 - c_12,
    so z = ((h0-h1)(h2-h3)) / ((h0-h2)(h1-h3)) and exp(w0) + exp(-w1) = 1
    exactly by the Pluecker relation. The flattening is therefore even
    (p and q both even), which makes the extended dilogarithm well defined
    modulo 2 pi^2 and the pairing well defined modulo 1.
    """
    if len(t) != 4:
        raise InputError("lambda_hat needs a 4-tuple")
    if not is_h_nondegenerate(t, tolerance):
        raise DegenerateTuple("tuple has coinciding Hopf images")
    logs = {}
    for i in range(4):
        for j in range(i + 1, 4):
            logs[i, j] = log_principal(_ptolemy(t[i], t[j]))
    w0 = logs[0, 1] + logs[2, 3] - logs[0, 2] - logs[1, 3]
    w1 = logs[0, 2] + logs[1, 3] - logs[0, 3] - logs[1, 2]
    simplex = simplex_from_flattening(w0, w1, coeff=coeff)
    if simplex.p % 2 or simplex.q % 2:
        raise NumericalFailure(f"odd flattening [{simplex.z}; {simplex.p}, {simplex.q}]")
    return simplex


def pairing_value(chain: TupleChain, tolerance: float = 1e-9) -> mpmath.mpc:
    """sum coeff * (-1/(2 pi^2)) * L(lambda(tuple)), not reduced."""
    total = mpmath.mpc(0)
    for c, t in chain:
        total += l_hat(lambda_hat(t, tolerance, coeff=c))
    return -total / (2 * mpmath.pi ** 2)


def pairing_2cs(chain: TupleChain, tolerance: float = 1e-9) -> mpmath.mpc:
    """Pairing of the doubled cocycle with a 3-cycle, real part in [0, 1)."""
    return reduce_mod(pairing_value(chain, tolerance), 1)


# --- the 3-chain -------------------------------------------------------------

def choose_v0(cycle: TupleChain, rng: np.random.Generator, tolerance: float = 1e-9,
              attempts: int = 50) -> SL2Matrix:
    """Pseudorandom v0 whose Hopf image avoids every vertex of the cycle."""
    vertices = [g for _, t in cycle for g in t]
    for _ in range(attempts):
        v0 = random_sl2(rng)
        if all(not hopf_equal(v0, g, tolerance) for g in vertices):
            return v0
    raise DegenerateTuple("no admissible v0 found")


def build_c3(cycle: TupleChain, v0: Optional[SL2Matrix] = None,
             rng: Optional[np.random.Generator] = None,
             settings: Settings = DEFAULT_SETTINGS) -> TupleChain:
    """
    Cone of a 2-cycle from v0: O' = sum n_i (v0, g0, g1, g2).

    With d(v0, s) = s - (v0, ds) and dC = 0 this gives dO' = C, which is
    checked on tuples before returning.
    """
    if cycle.is_empty():
        return TupleChain()
    if not cycle.boundary().simplify(settings.chain_tol).is_empty():
        raise ChainCheckFailure("c2(d3(O_M)) is not a 2-cycle")
    if v0 is None:
        v0 = choose_v0(cycle, rng if rng is not None else np.random.default_rng(settings.seed),
                       settings.degeneracy_tol)
    cone = TupleChain([(c, (v0,) + t) for c, t in cycle])
    if not cone.boundary().equals(cycle, settings.chain_tol):
        raise ChainCheckFailure("boundary of the cone differs from the 2-cycle")
    return cone


def cs_doubled(rho: Representation, cell: CellStructure,
               settings: Settings = DEFAULT_SETTINGS, v0: Optional[SL2Matrix] = None,
               retry: bool = True, seed: Optional[int] = None,
               check: bool = True) -> mpmath.mpc:
    """
    2CS(rho) in C/Z, real part in [0, 1).

    Each attempt draws a fresh apex (and, after the first, a conjugator for
    rho); a degenerate tuple triggers the next attempt.
    """
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    if check:
        check_cell(cell, rho, settings.chain_tol)
    last_error: Optional[Exception] = None
    attempts = settings.max_retries + 1 if retry else 1
    for attempt in range(attempts):
        rho_k = rho if attempt == 0 else conjugate_rep(rho, random_sl2(rng))
        apex = random_sl2(rng)
        raw = two_cycle(cell, rho_k, apex)
        try:
            if not all(is_h_nondegenerate(t, settings.degeneracy_tol) for _, t in raw):
                raise DegenerateTuple(f"attempt {attempt}: degenerate tuple in c2(d3(O_M))")
            cycle = raw.simplify(settings.chain_tol)
            c3 = build_c3(cycle, v0 if attempt == 0 else None, rng, settings)
            return pairing_2cs(c3, settings.degeneracy_tol)
        except DegenerateTuple as exc:
            last_error = exc
            if not retry:
                raise
    raise DegenerateAfterRetries(attempts, last_error)
