"""
Exact algebra: residues mod 1, Chebyshev and Laurent polynomials,
resultant elimination, numeric root extraction and Bezout pairs.

Polynomials with exact coefficients are sympy Polys over ZZ or QQ in the
symbols m, z, u (u = m^2) and zeta. Laurent polynomials are stored as a
sparse exponent map and converted to Polys by shifting exponents.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple, Union

import mpmath
import numpy as np
import sympy
from mpmath import mp

from csrec.errors import InputError, NonConvergence

M, Z, U, ZETA = sympy.symbols('m z u zeta')

Rational = Fraction


# --- residues mod 1 ----------------------------------------------------------

@dataclass(frozen=True)
class QmodZ:
    """Exact rational residue in [0, 1)."""
    value: Fraction = Fraction(0)

    def __post_init__(self):
        v = Fraction(self.value)
        object.__setattr__(self, 'value', v - (v.numerator // v.denominator))

    def __add__(self, other: 'QmodZ') -> 'QmodZ':
        return QmodZ(self.value + QmodZ.of(other).value)

    def __sub__(self, other: 'QmodZ') -> 'QmodZ':
        return QmodZ(self.value - QmodZ.of(other).value)

    def __neg__(self) -> 'QmodZ':
        return QmodZ(-self.value)

    def scale(self, n: int) -> 'QmodZ':
        return QmodZ(self.value * n)

    def is_zero(self) -> bool:
        return self.value == 0

    @staticmethod
    def of(x: Union['QmodZ', Fraction, int, str]) -> 'QmodZ':
        if isinstance(x, QmodZ):
            return x
        return QmodZ(Fraction(x))

    def __str__(self) -> str:
        return str(self.value)


def qmodz_add(a: QmodZ, b: QmodZ) -> QmodZ:
    return QmodZ.of(a) + QmodZ.of(b)


def qmodz_scale(a: QmodZ, n: int) -> QmodZ:
    return QmodZ.of(a).scale(n)


# --- integers ----------------------------------------------------------------

def ext_gcd_pair(p: int, q: int) -> Tuple[int, int]:
    """
    Bezout pair (s, r) with p*s - q*r = 1 and 0 <= r < |p|.

    p = 0 forces q = +-1 and returns (0, -q).
    """
    if sympy.gcd(p, q) != 1:
        raise InputError(f"({p}, {q}) are not coprime")
    if p == 0:
        return 0, -q
    modulus = abs(p)
    r = (-pow(q, -1, modulus)) % modulus if modulus > 1 else 0
    s, rem = divmod(1 + q * r, p)
    if rem != 0:
        raise InputError(f"no Bezout pair for ({p}, {q})")
    return s, r


# --- Chebyshev polynomials ---------------------------------------------------

@lru_cache(maxsize=None)
def chebyshev_s(k: int) -> sympy.Poly:
    """S_k(z): S_0 = 0, S_1 = 1, S_{k+1} = z S_k - S_{k-1}; S_{-k} = -S_k."""
    if k < 0:
        return -chebyshev_s(-k)
    if k == 0:
        return sympy.Poly(0, Z, domain='ZZ')
    if k == 1:
        return sympy.Poly(1, Z, domain='ZZ')
    zpoly = sympy.Poly(Z, Z, domain='ZZ')
    return zpoly * chebyshev_s(k - 1) - chebyshev_s(k - 2)


# --- Laurent polynomials -----------------------------------------------------

class LaurentPoly:
    """
    Sparse Laurent polynomial in (m, z): {(deg_m, deg_z): Fraction}.

    Zero coefficients are never stored.
    """

    __slots__ = ('terms',)

    def __init__(self, terms: Optional[Dict[Tuple[int, int], Fraction]] = None):
        clean = {}
        for key, c in (terms or {}).items():
            c = Fraction(c)
            if c != 0:
                clean[(int(key[0]), int(key[1]))] = c
        self.terms = clean

    @classmethod
    def constant(cls, c) -> 'LaurentPoly':
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, deg_m: int = 0, deg_z: int = 0, c=1) -> 'LaurentPoly':
        return cls({(deg_m, deg_z): c})

    @classmethod
    def from_z_poly(cls, poly: sympy.Poly, deg_m: int = 0) -> 'LaurentPoly':
        """Embed a univariate Poly in z, multiplied by m^deg_m."""
        terms = {}
        for (e,), c in poly.terms():
            terms[(deg_m, e)] = Fraction(int(sympy.numer(c)), int(sympy.denom(c)))
        return cls(terms)

    def __add__(self, other) -> 'LaurentPoly':
        other = _as_laurent(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self) -> 'LaurentPoly':
        return LaurentPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> 'LaurentPoly':
        return self + (-_as_laurent(other))

    def __rsub__(self, other) -> 'LaurentPoly':
        return _as_laurent(other) - self

    def __mul__(self, other) -> 'LaurentPoly':
        other = _as_laurent(other)
        out: Dict[Tuple[int, int], Fraction] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                out[key] = out.get(key, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> 'LaurentPoly':
        if n < 0:
            raise ValueError("negative powers of a Laurent polynomial are not polynomials")
        result = LaurentPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        try:
            other = _as_laurent(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"LaurentPoly({self.as_expr()})"

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, deg_m: int, deg_z: int) -> Fraction:
        return self.terms.get((deg_m, deg_z), Fraction(0))

    def min_degrees(self) -> Tuple[int, int]:
        if not self.terms:
            return 0, 0
        return min(k[0] for k in self.terms), min(k[1] for k in self.terms)

    def as_expr(self) -> sympy.Expr:
        return sum((sympy.Rational(c.numerator, c.denominator) * M ** a * Z ** b
                    for (a, b), c in sorted(self.terms.items())), sympy.Integer(0))

    def evaluate(self, m, z) -> mpmath.mpc:
        m = mpmath.mpc(m)
        z = mpmath.mpc(z)
        total = mpmath.mpc(0)
        for (a, b), c in self.terms.items():
            total += mpmath.mpf(c.numerator) / c.denominator * m ** a * z ** b
        return total

    def derivative(self, var: str) -> 'LaurentPoly':
        idx = 0 if var == 'm' else 1
        out = {}
        for key, c in self.terms.items():
            e = key[idx]
            if e != 0:
                new = (key[0] - 1, key[1]) if idx == 0 else (key[0], key[1] - 1)
                out[new] = c * e
        return LaurentPoly(out)

    def is_even_in_m(self) -> bool:
        return all(a % 2 == 0 for a, _ in self.terms)

    def halve_m(self) -> 'LaurentPoly':
        """Rewrite a polynomial in m^2 as one in u = m^2 (stored in the m slot)."""
        if not self.is_even_in_m():
            raise ValueError("polynomial has odd powers of m")
        return LaurentPoly({(a // 2, b): c for (a, b), c in self.terms.items()})

    def to_poly(self, first=M, second=Z) -> Tuple[sympy.Poly, int, int]:
        """
        Multiply through by first^-a second^-b so all exponents are >= 0.

        Returns (Poly in (first, second), a, b); the original equals
        Poly * first^a * second^b.
        """
        a, b = self.min_degrees()
        expr = sum((sympy.Rational(c.numerator, c.denominator) * first ** (i - a) * second ** (j - b)
                    for (i, j), c in self.terms.items()), sympy.Integer(0))
        return sympy.Poly(expr, first, second, domain='QQ'), a, b


def _as_laurent(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPoly.constant(x)
    if isinstance(x, sympy.Poly) and x.gens == (Z,):
        return LaurentPoly.from_z_poly(x)
    raise TypeError(f"cannot use {type(x).__name__} as a Laurent polynomial")


# --- elimination -------------------------------------------------------------

def resultant(f: sympy.Poly, g: sympy.Poly, eliminate: sympy.Symbol) -> sympy.Poly:
    """
    Sylvester resultant of f and g with respect to `eliminate`, as a Poly in
    the remaining generators of f and g.
    """
    if f.is_zero or g.is_zero:
        raise InputError("resultant of a zero polynomial")
    gens = [x for x in dict.fromkeys(tuple(f.gens) + tuple(g.gens)) if x != eliminate]
    if eliminate not in f.gens or eliminate not in g.gens:
        raise InputError(f"both polynomials must involve {eliminate}")
    if f.degree(eliminate) + g.degree(eliminate) == 0:
        raise InputError(f"degenerate degrees in {eliminate}")
    res = sympy.resultant(f.as_expr(), g.as_expr(), eliminate)
    res = sympy.expand(res)
    if not gens:
        gens = [Z]
    return sympy.Poly(res, *gens, domain='QQ')


# --- numeric roots -----------------------------------------------------------

def _coefficients(f) -> List[mpmath.mpf]:
    if isinstance(f, sympy.Poly):
        if len(f.gens) != 1:
            raise InputError("roots() needs a univariate polynomial")
        return [mpmath.mpf(int(sympy.numer(c))) / int(sympy.denom(c)) for c in f.all_coeffs()]
    return [mpmath.mpmathify(c) for c in f]


def _relative_residual(coeffs, x) -> mpmath.mpf:
    value = mpmath.polyval(coeffs, x)
    scale = mpmath.polyval([abs(c) for c in coeffs], abs(x))
    return abs(value) / scale if scale else abs(value)


def _newton_polish(coeffs, x, steps: int = 8):
    for _ in range(steps):
        value, deriv = mpmath.polyval(coeffs, x, derivative=True)
        if deriv == 0:
            break
        step = value / deriv
        x = x - step
        if abs(step) <= mpmath.eps * max(1, abs(x)):
            break
    return x


def _aberth(coeffs, rng: np.random.Generator, max_iter: int = 400, perturb: bool = False):
    n = len(coeffs) - 1
    lead = coeffs[0]
    # Cauchy bound for roots
    radius = 1 + max(abs(c / lead) for c in coeffs[1:])
    if perturb:
        radius *= mpmath.mpf(0.5 + rng.random())
    offset = mpmath.mpf(rng.random()) if perturb else mpmath.mpf('0.4')
    x = [radius * mpmath.expj(2 * mpmath.pi * k / n + offset) for k in range(n)]
    tol = mpmath.eps * 16
    for _ in range(max_iter):
        converged = True
        for i in range(n):
            xi = x[i]
            value, deriv = mpmath.polyval(coeffs, xi, derivative=True)
            if value == 0:
                continue
            ratio = value / deriv if deriv != 0 else mpmath.mpc(mpmath.inf)
            correction = mpmath.fsum(1 / (xi - x[j]) for j in range(n) if j != i)
            denom = 1 - ratio * correction
            delta = ratio / denom if denom != 0 else ratio
            if not mpmath.isfinite(abs(delta)):
                return None
            if abs(delta) > tol * max(1, abs(xi)):
                converged = False
            x[i] = xi - delta
        if converged:
            return x
    return None


def _companion_roots(coeffs):
    n = len(coeffs) - 1
    lead = coeffs[0]
    companion = mpmath.zeros(n, n)
    for j in range(n):
        companion[0, j] = -coeffs[j + 1] / lead
    for i in range(1, n):
        companion[i, i - 1] = 1
    eigenvalues = mpmath.eig(companion, left=False, right=False)
    return list(eigenvalues)


def _squarefree_roots(coeffs, tol, rng: np.random.Generator, restarts: int = 3):
    n = len(coeffs) - 1
    if n == 1:
        return [mpmath.mpc(-coeffs[1] / coeffs[0])]
    if n == 2:
        a, b, c = coeffs
        disc = mpmath.sqrt(mpmath.mpc(b * b - 4 * a * c))
        q = -(b + (disc if mpmath.re(mpmath.conj(b) * disc) >= 0 else -disc)) / 2
        if q == 0:
            return [mpmath.mpc(0), mpmath.mpc(0)]
        return [mpmath.mpc(q / a), mpmath.mpc(c / q)]
    attempts = [False] + [True] * restarts
    for perturb in attempts:
        found = _aberth(coeffs, rng, perturb=perturb)
        if found is None:
            continue
        found = [_newton_polish(coeffs, x) for x in found]
        if all(_relative_residual(coeffs, x) < tol for x in found):
            return found
    found = [_newton_polish(coeffs, mpmath.mpc(x)) for x in _companion_roots(coeffs)]
    if all(_relative_residual(coeffs, x) < tol for x in found):
        return found
    raise NonConvergence(f"root finder did not converge for a degree-{n} factor")


def roots(f, precision: Optional[int] = None, cluster_tol: float = 1e-8,
          seed: int = 0) -> List[Tuple[mpmath.mpc, int]]:
    """
    All complex roots of a univariate polynomial with exact coefficients,
    with multiplicities, sorted by (Re, Im).

    Multiplicities come from the square-free decomposition; each square-free
    factor is solved by Aberth iteration (perturbed restarts, then companion
    eigenvalues) and Newton-polished. Roots closer than cluster_tol are merged.
    """
    if not isinstance(f, sympy.Poly):
        f = sympy.Poly(list(f), Z)
    if f.is_zero or f.degree() < 1:
        raise InputError("roots() needs a polynomial of degree >= 1")
    bits = precision or mp.prec
    rng = np.random.default_rng(seed)
    found: List[Tuple[mpmath.mpc, int]] = []
    with mp.workprec(bits + 32):
        tol = mpmath.mpf(10) ** (-(int(bits * 0.30103) - 5))
        _, factors = sympy.sqf_list(f)
        for factor, multiplicity in factors:
            if factor.degree() < 1:
                continue
            for x in _squarefree_roots(_coefficients(factor), tol, rng):
                found.append((x, multiplicity))
    found = [(+x, mult) for x, mult in found]
    merged: List[List] = []
    for x, mult in found:
        for entry in merged:
            if abs(entry[0] - x) < cluster_tol * max(1, abs(x)):
                entry[1] += mult
                break
        else:
            merged.append([x, mult])
    merged.sort(key=lambda e: (float(e[0].real), float(e[0].imag)))
    return [(mpmath.mpc(x), mult) for x, mult in merged]


def poly_eval(f: sympy.Poly, *values) -> mpmath.mpc:
    """Evaluate a Poly with exact coefficients at mpmath values."""
    total = mpmath.mpc(0)
    for monom, c in f.terms():
        term = mpmath.mpf(int(sympy.numer(c))) / int(sympy.denom(c))
        for v, e in zip(values, monom):
            term = term * mpmath.mpc(v) ** e
        total += term
    return total


def poly_coefficient_polys(f: sympy.Poly, var: sympy.Symbol) -> List[sympy.Poly]:
    """Coefficients of f as a polynomial in var (highest power first), as Polys in the other gens."""
    others = [g for g in f.gens if g != var]
    as_var = sympy.Poly(f.as_expr(), var)
    out = []
    for c in as_var.all_coeffs():
        out.append(sympy.Poly(c, *others, domain='QQ') if others else c)
    return out
