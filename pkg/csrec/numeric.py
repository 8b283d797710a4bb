"""
Arbitrary-precision special functions for CS evaluation.

Every multivalued expression in csrec goes through log_principal, so the
branch of log is the same everywhere: arg in (-pi, pi].

Values are mpmath mpc numbers at the working precision of the current
mpmath context; use working_precision() to set it for a computation.
"""

from contextlib import contextmanager
from dataclasses import dataclass
from typing import Tuple, Union

import mpmath
from mpmath import mp

from csrec.errors import InputError, NumericalFailure

ComplexAP = mpmath.mpc
Number = Union[int, float, complex, str, mpmath.mpf, mpmath.mpc]


@contextmanager
def working_precision(bits: int):
    """Run the enclosed block at `bits` mantissa bits (never below double precision)."""
    if bits < 53:
        raise InputError(f"working precision must be at least 53 bits, got {bits}")
    with mp.workprec(bits):
        yield


def to_ap(x: Number) -> ComplexAP:
    """Convert ints, floats, complex, decimal strings and mpmath values to mpc."""
    if isinstance(x, str):
        s = x.strip().replace(' ', '')
        # accept "a+bj", "a+bi" and plain reals
        s = s.replace('i', 'j')
        if "j" in s:
            return _parse_complex_string(s)
        return mpmath.mpc(mpmath.mpf(s))
    return mpmath.mpc(x)


def _parse_complex_string(s: str) -> ComplexAP:
    body = s[:-1] if s.endswith('j') else s
    # split at the last sign that is not an exponent sign
    for k in range(len(body) - 1, 0, -1):
        if body[k] in '+-' and body[k - 1] not in 'eE':
            re_part, im_part = body[:k], body[k:]
            if im_part in ('+', '-'):
                im_part += '1'
            return mpmath.mpc(mpmath.mpf(re_part), mpmath.mpf(im_part))
    if body in ('', '+', '-'):
        body += '1'
    return mpmath.mpc(0, mpmath.mpf(body))


def format_ap(z: ComplexAP, digits: int = 20) -> str:
    """Decimal string 'a+bj' with `digits` significant digits per part."""
    z = mpmath.mpc(z)
    re_s = mpmath.nstr(z.real, digits)
    im_s = mpmath.nstr(abs(z.imag), digits)
    sign = '-' if z.imag < 0 else '+'
    return f"{re_s}{sign}{im_s}j"


def check_finite(z: ComplexAP, what: str = 'value') -> ComplexAP:
    if not (mpmath.isfinite(z.real) and mpmath.isfinite(z.imag)):
        raise NumericalFailure(f"non-finite {what}: {z}")
    return z


def log_principal(z: Number) -> ComplexAP:
    """log|z| + i arg z with arg in (-pi, pi]."""
    z = to_ap(z)
    if z == 0:
        raise InputError("log of zero")
    return check_finite(mpmath.mpc(mpmath.log(z)), 'log')


def li2(z: Number) -> ComplexAP:
    """
    Principal dilogarithm Li_2(z) = -int_0^z log(1-t)/t dt.

    On the cut [1, inf) the value is the one whose imaginary part is
    -pi*log(z), i.e. the branch obtained from log_principal(1 - t).
    """
    z = to_ap(z)
    if z == 0:
        return mpmath.mpc(0)
    if z == 1:
        return mpmath.mpc(mpmath.zeta(2))
    return check_finite(mpmath.mpc(mpmath.polylog(2, z)), 'Li2')


def rogers(z: Number) -> ComplexAP:
    """R(z) = Li_2(z) + log(z) log(1-z)/2 - pi^2/6."""
    z = to_ap(z)
    if z == 0 or z == 1:
        raise InputError(f"Rogers dilogarithm undefined at {z}")
    return li2(z) + log_principal(z) * log_principal(1 - z) / 2 - mpmath.pi ** 2 / 6


@dataclass(frozen=True)
class FlattenedSimplex:
    """
    A flattened ideal simplex [z; p, q] with integer multiplicity.

    The flattening is (w0, w1) = (log z + p*pi*i, -log(1-z) + q*pi*i).
    """
    z: ComplexAP
    p: int = 0
    q: int = 0
    coeff: int = 1

    def validate(self, tolerance: float = 1e-12) -> 'FlattenedSimplex':
        if abs(self.z) < tolerance or abs(1 - self.z) < tolerance:
            raise InputError(f"degenerate cross-ratio z = {self.z}")
        return self

    @property
    def w0(self) -> ComplexAP:
        return log_principal(self.z) + self.p * mpmath.pi * 1j

    @property
    def w1(self) -> ComplexAP:
        return -log_principal(1 - self.z) + self.q * mpmath.pi * 1j


def l_hat(s: FlattenedSimplex) -> ComplexAP:
    """
    Extended Rogers dilogarithm of a flattened simplex, times its multiplicity:

        R(z; p, q) = R(z) + (pi*i/2) (p log(1-z) + q log z)

    defined modulo pi^2, and modulo 2 pi^2 when p and q are both even.
    """
    if s.coeff == 0:
        return mpmath.mpc(0)
    s.validate()
    log_z = log_principal(s.z)
    log_1mz = log_principal(1 - s.z)
    value = rogers(s.z) + mpmath.pi * 1j / 2 * (s.p * log_1mz + s.q * log_z)
    return s.coeff * value


def simplex_from_flattening(w0: ComplexAP, w1: ComplexAP, tolerance: float = 1e-9,
                            coeff: int = 1) -> FlattenedSimplex:
    """
    Recover [z; p, q] from a flattening (w0, w1) satisfying
    +-exp(w0) +-exp(-w1) = 1.
    """
    e0 = mpmath.exp(w0)
    e1 = mpmath.exp(-w1)
    candidates = []
    for p_parity in (0, 1):
        for q_parity in (0, 1):
            total = (-1) ** p_parity * e0 + (-1) ** q_parity * e1
            scale = max(1, abs(e0), abs(e1))
            if abs(total - 1) < tolerance * scale:
                candidates.append(((-1) ** p_parity * e0, p_parity, q_parity))
    if len(candidates) != 1:
        raise NumericalFailure(f"bad flattening w0={w0}, w1={w1} ({len(candidates)} parity matches)")
    z, p_parity, q_parity = candidates[0]
    # p, q measured against the principal logs used by l_hat
    p = _integer_offset(w0 - log_principal(z))
    q = _integer_offset(w1 + log_principal(1 - z))
    if p % 2 != p_parity or q % 2 != q_parity:
        raise NumericalFailure(f"flattening parity mismatch for z={z}")
    return FlattenedSimplex(z=mpmath.mpc(z), p=p, q=q, coeff=coeff)


def _integer_offset(delta: ComplexAP, tolerance: float = 1e-6) -> int:
    """k such that delta = k*pi*i."""
    k = mpmath.mpf(delta.imag) / mpmath.pi
    k_int = int(mpmath.nint(k))
    if abs(k - k_int) > tolerance or abs(delta.real) > tolerance * max(1, abs(delta.imag)):
        raise NumericalFailure(f"flattening offset {delta} is not an integer multiple of pi*i")
    return k_int


def distance_to_integer(x: Number) -> Tuple[mpmath.mpf, mpmath.mpf]:
    """(|Re x - nearest integer|, |Im x|)."""
    x = to_ap(x)
    re = mpmath.mpf(x.real)
    return abs(re - mpmath.nint(re)), abs(mpmath.mpf(x.imag))


def reduce_mod(x: Number, modulus: Number = 1) -> ComplexAP:
    """Real part reduced into [0, modulus); imaginary part untouched."""
    x = to_ap(x)
    m = mpmath.mpf(modulus)
    re = mpmath.mpf(x.real)
    re = re - m * mpmath.floor(re / m)
    if re >= m:
        re -= m
    return mpmath.mpc(re, x.imag)


def distance_mod(x: Number, y: Number, modulus: Number = 1) -> mpmath.mpf:
    """Distance between x and y in C / (modulus Z)."""
    d = to_ap(x) - to_ap(y)
    m = mpmath.mpf(modulus)
    re = mpmath.mpf(d.real)
    re = re - m * mpmath.nint(re / m)
    return mpmath.sqrt(re ** 2 + mpmath.mpf(d.imag) ** 2)


@dataclass(frozen=True)
class SL2Matrix:
    """2x2 complex matrix (a b / c d) with determinant 1 up to tolerance."""
    a: ComplexAP
    b: ComplexAP
    c: ComplexAP
    d: ComplexAP

    @classmethod
    def of(cls, a: Number, b: Number, c: Number, d: Number) -> 'SL2Matrix':
        return cls(to_ap(a), to_ap(b), to_ap(c), to_ap(d))

    @classmethod
    def identity(cls) -> 'SL2Matrix':
        return cls.of(1, 0, 0, 1)

    @classmethod
    def from_rows(cls, rows) -> 'SL2Matrix':
        (a, b), (c, d) = rows
        return cls.of(a, b, c, d)

    def __matmul__(self, other: 'SL2Matrix') -> 'SL2Matrix':
        return SL2Matrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> 'SL2Matrix':
        det = self.det()
        return SL2Matrix(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def det(self) -> ComplexAP:
        return self.a * self.d - self.b * self.c

    def trace(self) -> ComplexAP:
        return self.a + self.d

    def conj(self) -> 'SL2Matrix':
        return SL2Matrix(*(mpmath.conj(x) for x in self.entries()))

    def entries(self) -> Tuple[ComplexAP, ComplexAP, ComplexAP, ComplexAP]:
        return self.a, self.b, self.c, self.d

    def norm(self) -> mpmath.mpf:
        return max(abs(x) for x in self.entries())

    def close_to(self, other: 'SL2Matrix', tolerance: float) -> bool:
        scale = max(1, self.norm(), other.norm())
        return all(abs(x - y) <= tolerance * scale for x, y in zip(self.entries(), other.entries()))

    def power(self, n: int) -> 'SL2Matrix':
        base = self if n >= 0 else self.inverse()
        result = SL2Matrix.identity()
        for _ in range(abs(n)):
            result = result @ base
        return result

    def check_det(self, tolerance: float = 1e-10) -> 'SL2Matrix':
        if abs(self.det() - 1) > tolerance:
            raise InputError(f"matrix determinant {self.det()} is not 1")
        return self

    def to_rows(self, digits: int = 20):
        return [[format_ap(self.a, digits), format_ap(self.b, digits)],
                [format_ap(self.c, digits), format_ap(self.d, digits)]]
