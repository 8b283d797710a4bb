"""
Figure-eight knot surgeries through the potential function

    V(z, w) = -Li2(zw) + Li2(z/w) + (p/4) Log(z)^2 - Log(z) Log(w).

1. solve_system: stationary points of V for p/1 surgery, from the cleared system
       (1 - zw) z^(p/2) = w - z,     (1 - zw)(1 - z/w) = z
2. flattening_integers: integers (c, d) that make the stationary equations
   hold on the principal branch
3. cs_terms / reciprocity_sum_fig8: T = V + 2 pi i (c log z + d log w) for
   every solution and the scaled sum (6/pi^2) sum T, expected in Z
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import mpmath
import sympy
from mpmath import mp

from csrec import console
from csrec.algebra import Z, roots
from csrec.config import DEFAULT_SETTINGS, Settings
from csrec.errors import InputError, NonIntegerFlattening, NumericalFailure
from csrec.numeric import distance_to_integer, format_ap, li2, log_principal, to_ap


def _two_pi_i():
    return 2 * mpmath.pi * 1j


@dataclass
class SaddlePoint:
    z: mpmath.mpc
    w: mpmath.mpc
    c: int
    d: int
    T: mpmath.mpc
    residual: mpmath.mpf = mpmath.mpf(0)
    index: int = 0

    @property
    def in_bijection(self) -> bool:
        """Member of the Im z >= 0 half that indexes irreducible representations."""
        return self.z.imag >= -mpmath.mpf(10) ** (-mp.dps // 2)

    @property
    def scaled(self) -> mpmath.mpc:
        """(6/pi^2) T, i.e. 24 CS of this point."""
        return 6 * self.T / mpmath.pi ** 2

    def to_dict(self, digits: int = 20) -> dict:
        return {
            'index': self.index,
            'z': format_ap(self.z, digits),
            'w': format_ap(self.w, digits),
            'c': self.c,
            'd': self.d,
            'T': format_ap(self.T, digits),
            'im_z_nonnegative': self.in_bijection,
            'stationarity_residual': mpmath.nstr(self.residual, 3),
        }


class FigureEightSum(NamedTuple):
    total: mpmath.mpc
    distance: mpmath.mpf
    imag: mpmath.mpf
    count: int


def check_surgery_coefficient(p: int):
    if p % 2 != 0:
        raise InputError(f"p={p} must be even")
    if abs(p) < 6:
        raise InputError(f"|p|={abs(p)} must be at least 6")


def potential(z, w, p: int) -> mpmath.mpc:
    """Principal-branch value of V; a representative in C / pi^2 Z."""
    z, w = to_ap(z), to_ap(w)
    if z == 0 or w == 0:
        raise InputError("potential needs z, w != 0")
    log_z = log_principal(z)
    return -li2(z * w) + li2(z / w) + mpmath.mpf(p) / 4 * log_z ** 2 - log_z * log_principal(w)


def grad_potential(z, w, p: int) -> Tuple[mpmath.mpc, mpmath.mpc]:
    """(dV/dz, dV/dw)."""
    z, w = to_ap(z), to_ap(w)
    if z == 0 or w == 0:
        raise InputError("gradient needs z, w != 0")
    if z * w == 1 or z == w:
        raise InputError(f"gradient is singular at z={z}, w={w}")
    log_z = log_principal(z)
    a = log_principal(1 - z * w)
    b = log_principal(1 - z / w)
    dz = (a - b + mpmath.mpf(p) / 2 * log_z - log_principal(w)) / z
    dw = (a + b - log_z) / w
    return dz, dw


def stationarity_polynomial(p: int) -> sympy.Poly:
    """
    w = N/D with N = z + z^P, D = 1 + z^(P+1), P = p/2, substituted into the
    second equation and cleared:

        -z^2 (1 + z^(2P)) + z^P (1 - z - 2z^2 - z^3 + z^4)

    divided by its lowest power of z. Degree |p| for |p| >= 6.
    """
    check_surgery_coefficient(p)
    P = p // 2
    terms = {}
    for exponent, c in ((2, -1), (2 * P + 2, -1), (P, 1), (P + 1, -1),
                        (P + 2, -2), (P + 3, -1), (P + 4, 1)):
        terms[exponent] = terms.get(exponent, 0) + c
    terms = {e: c for e, c in terms.items() if c}
    low = min(terms)
    return sympy.Poly.from_dict({(e - low,): c for e, c in terms.items()}, Z, domain='ZZ')


def _cleared_residuals(z, w, p: int) -> Tuple[mpmath.mpf, mpmath.mpf]:
    zp = z ** (p // 2)
    e1 = (1 - z * w) * zp - (w - z)
    e2 = (1 - z * w) * (1 - z / w) - z
    s1 = max(1, abs(z * w * zp), abs(zp), abs(w), abs(z))
    s2 = max(1, abs(z * w), abs(z / w), abs(z) ** 2)
    return abs(e1) / s1, abs(e2) / s2


def _pairs_over_root(args) -> List[Tuple[mpmath.mpc, mpmath.mpc]]:
    z, p, tolerance = args
    P = p // 2
    zP = z ** P
    N = z + zP
    D = 1 + zP * z
    scale = max(1, abs(zP * z))
    if abs(N) < tolerance * scale and abs(D) < tolerance * scale:
        # w drops out of the first equation; take both roots of the second
        disc = mpmath.sqrt((z - z ** 2 - 1) ** 2 - 4 * z * z)
        candidates = [(-(z - z ** 2 - 1) + disc) / (2 * z), (-(z - z ** 2 - 1) - disc) / (2 * z)]
    elif abs(D) < tolerance * scale:
        return []
    else:
        candidates = [N / D]
    out = []
    for w in candidates:
        if w == 0:
            continue
        r1, r2 = _cleared_residuals(z, w, p)
        if r1 < tolerance and r2 < tolerance:
            out.append((z, w))
    return out


def solve_system(p: int, settings: Settings = DEFAULT_SETTINGS) -> List[Tuple[mpmath.mpc, mpmath.mpc]]:
    """All (z, w) solving both equations, sorted by (Re z, Im z, Re w, Im w)."""
    check_surgery_coefficient(p)
    poly = stationarity_polynomial(p)
    with mp.workprec(settings.precision):
        found = roots(poly, settings.precision, settings.cluster_tol, settings.seed)
        jobs = [(z, p, settings.residual_tol) for z, _ in found if z != 0]
        if settings.threads > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=settings.threads) as pool:
                batches = list(pool.map(_pairs_over_root, jobs))
        else:
            batches = [_pairs_over_root(job) for job in jobs]
    pairs = [pair for batch in batches for pair in batch]
    pairs.sort(key=lambda zw: (float(zw[0].real), float(zw[0].imag), float(zw[1].real), float(zw[1].imag)))
    return pairs


def _nearest_integer(value: mpmath.mpc, tolerance: float) -> int:
    k = int(mpmath.nint(value.real))
    if abs(value - k) >= tolerance:
        raise NonIntegerFlattening(mpmath.nstr(value, 12), tolerance)
    return k


def flattening_integers(z, w, p: int, tolerance: float = 1e-6) -> Tuple[int, int]:
    """c = round(-z dV/dz / 2 pi i), d = round(-w dV/dw / 2 pi i)."""
    z, w = to_ap(z), to_ap(w)
    dz, dw = grad_potential(z, w, p)
    c = _nearest_integer(-z * dz / _two_pi_i(), tolerance)
    d = _nearest_integer(-w * dw / _two_pi_i(), tolerance)
    return c, d


def saddle_point(z, w, p: int, settings: Settings = DEFAULT_SETTINGS) -> SaddlePoint:
    c, d = flattening_integers(z, w, p, settings.flattening_tol)
    dz, dw = grad_potential(z, w, p)
    residual = max(abs(dz + _two_pi_i() * c / z), abs(dw + _two_pi_i() * d / w))
    if residual > 1e-9:
        raise NumericalFailure(f"stationarity certificate failed at z={z}: residual {residual}")
    T = potential(z, w, p) + _two_pi_i() * (c * log_principal(z) + d * log_principal(w))
    return SaddlePoint(z=z, w=w, c=c, d=d, T=T, residual=residual)


def cs_terms(p: int, settings: Settings = DEFAULT_SETTINGS) -> List[SaddlePoint]:
    """Every solution of the system with its flattening and T value."""
    pairs = solve_system(p, settings)
    with mp.workprec(settings.precision):
        points = [saddle_point(z, w, p, settings) for z, w in console.progress(pairs, desc='saddle points')]
    for i, pt in enumerate(points):
        pt.index = i
    return points


def bijection_set(p: int, settings: Settings = DEFAULT_SETTINGS) -> List[SaddlePoint]:
    return [pt for pt in cs_terms(p, settings) if pt.in_bijection]


def reciprocity_sum_fig8(p: int, settings: Settings = DEFAULT_SETTINGS,
                         points: Optional[List[SaddlePoint]] = None) -> FigureEightSum:
    """(6/pi^2) sum T over all solutions, its distance to Z, and |Im|."""
    if points is None:
        points = cs_terms(p, settings)
    with mp.workprec(settings.precision):
        total = mpmath.fsum(pt.T for pt in points) * 6 / mpmath.pi ** 2
        distance, imag = distance_to_integer(total)
    return FigureEightSum(total=total, distance=distance, imag=imag, count=len(points))
