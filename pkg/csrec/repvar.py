"""
SL2(C) character varieties of surgeries on twist knots, and Riley
polynomials of 2-bridge knots.

Twist knot K_n: pi = <a, b | W a = b W>, W = w^n, w = b a^-1 b^-1 a.
Points (m, z) use rho(a) = (m 1 / 0 1/m), rho(b) = (m 0 / 2-z 1/m), so
that z = tr rho(a b^-1) and F(m, z) = 0 is the knot relation.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import mpmath
import sympy
from mpmath import mp

from csrec.algebra import (M, U, Z, ZETA, LaurentPoly, chebyshev_s, poly_coefficient_polys,
                           poly_eval, resultant, roots)
from csrec.config import DEFAULT_SETTINGS, Settings
from csrec.errors import InputError, NonConvergence, PositiveDimensional
from csrec.homology import Word, concat, word_power
from csrec.numeric import SL2Matrix, format_ap, to_ap

EIGENVALUE_MODES = ('printed', 'longitude')


@dataclass(frozen=True)
class TwistSurgerySpec:
    """M_{p/q}(K_n). eigenvalue selects E_gamma ('printed') or the longitude ('longitude')."""
    n: int
    p: int
    q: int
    eigenvalue: str = 'printed'
    allow_odd: bool = False

    def validate(self) -> 'TwistSurgerySpec':
        if self.n == 0:
            raise InputError("twist knot index n must be nonzero")
        if sympy.gcd(self.p, self.q) != 1:
            raise InputError(f"p={self.p} and q={self.q} are not coprime")
        if self.p % 2 != 0 and not self.allow_odd:
            raise InputError(f"p={self.p} is odd; pass allow_odd to enumerate anyway")
        if self.eigenvalue not in EIGENVALUE_MODES:
            raise InputError(f"eigenvalue must be one of {EIGENVALUE_MODES}")
        return self

    @property
    def theorem_backed(self) -> bool:
        return self.p % 2 == 0


@dataclass
class RepPoint:
    m: mpmath.mpc
    z: mpmath.mpc
    residuals: Tuple[mpmath.mpf, mpmath.mpf]
    irreducible: bool = True
    partner: Optional[int] = None
    index: int = 0

    @property
    def trace_a(self) -> mpmath.mpc:
        return self.m + 1 / self.m

    def to_dict(self, digits: int = 20) -> dict:
        return {
            'index': self.index,
            'm': format_ap(self.m, digits),
            'z': format_ap(self.z, digits),
            'residual_F': mpmath.nstr(self.residuals[0], 3),
            'residual_surgery': mpmath.nstr(self.residuals[1], 3),
            'irreducible': self.irreducible,
            'partner': self.partner,
        }


@dataclass(frozen=True)
class TwoBridgeSpec:
    p: int
    q: int

    def validate(self) -> 'TwoBridgeSpec':
        if self.p < 3 or self.p % 2 == 0:
            raise InputError(f"2-bridge normal form needs odd p >= 3, got {self.p}")
        if not 0 < self.q < self.p or sympy.gcd(self.p, self.q) != 1:
            raise InputError(f"b({self.p},{self.q}) is not a valid normal form")
        return self


# --- twist knot polynomials ----------------------------------------------------

def _s(k: int) -> LaurentPoly:
    return LaurentPoly.from_z_poly(chebyshev_s(k))


def twist_F(n: int) -> LaurentPoly:
    """F = S_n(S_n - S_{n-1})(m^2 + m^-2) - z S_n(S_n - S_{n-1}) + 1."""
    if n == 0:
        raise InputError("n must be nonzero")
    A = _s(n) * (_s(n) - _s(n - 1))
    return A * (LaurentPoly.monomial(2, 0) + LaurentPoly.monomial(-2, 0)) \
        - LaurentPoly.monomial(0, 1) * A + 1


def twist_E(n: int) -> LaurentPoly:
    """E = -(z-2) S_n^2 m^4 - (z-2)(S_n - S_{n-1}) m^2 + (S_n - S_{n-1})^2, as printed."""
    if n == 0:
        raise InputError("n must be nonzero")
    zm2 = LaurentPoly.monomial(0, 1) - 2
    diff = _s(n) - _s(n - 1)
    return -(zm2 * _s(n) * _s(n) * LaurentPoly.monomial(4, 0)) \
        - zm2 * diff * LaurentPoly.monomial(2, 0) + diff * diff


def twist_word(n: int) -> Word:
    """W = w^n with w = b a^-1 b^-1 a (a = 1, b = 2)."""
    return word_power((2, -1, -2, 1), n)


def swap_ab(word: Word) -> Word:
    return tuple({1: 2, 2: 1, -1: -2, -2: -1}[x] for x in word)


def longitude_word(n: int) -> Word:
    """Preferred longitude swap(W) W; commutes with a and has exponent sum 0."""
    W = twist_word(n)
    return concat(swap_ab(W), W)


def _laurent_matrices():
    m = LaurentPoly.monomial(1, 0)
    mi = LaurentPoly.monomial(-1, 0)
    t = 2 - LaurentPoly.monomial(0, 1)
    zero, one = LaurentPoly(), LaurentPoly.constant(1)
    a = ((m, one), (zero, mi))
    a_inv = ((mi, -one), (zero, m))
    b = ((m, zero), (t, mi))
    b_inv = ((mi, zero), (-t, m))
    return {1: a, -1: a_inv, 2: b, -2: b_inv}


def _mat_mul(x, y):
    return tuple(tuple(x[i][0] * y[0][j] + x[i][1] * y[1][j] for j in range(2)) for i in range(2))


def word_laurent_matrix(word: Word):
    """rho(word) with entries in Z[m^+-1, z]."""
    gens = _laurent_matrices()
    one, zero = LaurentPoly.constant(1), LaurentPoly()
    result = ((one, zero), (zero, one))
    for x in word:
        result = _mat_mul(result, gens[x])
    return result


def twist_longitude(n: int) -> LaurentPoly:
    """(1,1) entry of rho(longitude): its eigenvalue on e_1 whenever F(m, z) = 0."""
    return word_laurent_matrix(longitude_word(n))[0][0]


def surgery_eigenvalue(spec: TwistSurgerySpec) -> LaurentPoly:
    return twist_longitude(spec.n) if spec.eigenvalue == 'longitude' else twist_E(spec.n)


# --- matrices and irreducibility -----------------------------------------------

def rep_from_point(pt: RepPoint, convention: str = 'trace') -> Tuple[SL2Matrix, SL2Matrix]:
    """
    (rho(a), rho(b)). convention='trace' gives lower-left 2 - z (z = tr rho(ab^-1));
    convention='printed' gives lower-left -z.
    """
    m = to_ap(pt.m)
    if m == 0:
        raise InputError("m must be nonzero")
    lower = 2 - pt.z if convention == 'trace' else -pt.z
    A = SL2Matrix(m, mpmath.mpc(1), mpmath.mpc(0), 1 / m)
    B = SL2Matrix(m, mpmath.mpc(0), to_ap(lower), 1 / m)
    return A, B


def _eigenvectors(A: SL2Matrix):
    tr = A.trace()
    disc = mpmath.sqrt(tr * tr - 4 * A.det())
    vectors = []
    for lam in ((tr + disc) / 2, (tr - disc) / 2):
        v1 = (A.b, lam - A.a)
        v2 = (lam - A.d, A.c)
        v = v1 if abs(v1[0]) + abs(v1[1]) >= abs(v2[0]) + abs(v2[1]) else v2
        vectors.append(v)
    return vectors


def is_irreducible(A: SL2Matrix, B: SL2Matrix, tolerance: float = 1e-9) -> bool:
    """True iff A and B have no common eigenvector."""
    scale = max(1, A.norm())
    if abs(A.b) < tolerance * scale and abs(A.c) < tolerance * scale \
            and abs(A.a - A.d) < tolerance * scale:
        # A scalar: every eigenvector of B is shared
        return False
    for v in _eigenvectors(A):
        bv = (B.a * v[0] + B.b * v[1], B.c * v[0] + B.d * v[1])
        wedge = abs(bv[0] * v[1] - bv[1] * v[0])
        norm_v = mpmath.sqrt(abs(v[0]) ** 2 + abs(v[1]) ** 2)
        norm_bv = mpmath.sqrt(abs(bv[0]) ** 2 + abs(bv[1]) ** 2)
        if wedge <= tolerance * norm_bv * norm_v:
            return False
    return True


# --- enumeration -----------------------------------------------------------------

def surgery_equation(spec: TwistSurgerySpec) -> LaurentPoly:
    """m^p S^q - 1 (q >= 0) or m^p - S^|q| (q < 0), S the selected eigenvalue."""
    S = surgery_eigenvalue(spec)
    if spec.q >= 0:
        return LaurentPoly.monomial(spec.p, 0) * S ** spec.q - 1
    return LaurentPoly.monomial(spec.p, 0) - S ** (-spec.q)


def eliminate_m(spec: TwistSurgerySpec) -> Tuple[sympy.Poly, sympy.Poly, sympy.Poly, sympy.Symbol]:
    """
    (H, G, R, var). For even surgery equations var is u = m^2, H = u*F and
    G the cleared surgery equation in (u, z); otherwise var is m and H = m^2 F.
    R(z) = Res_var(H, G).
    """
    F = twist_F(spec.n)
    Phi = surgery_equation(spec)
    if Phi.is_even_in_m():
        var, F, Phi = U, F.halve_m(), Phi.halve_m()
    else:
        var = M
    H, _, _ = F.to_poly(var, Z)
    G, _, _ = Phi.to_poly(var, Z)
    R = resultant(H, G, var)
    return H, G, R, var


def _orbit_representative(m: mpmath.mpc, tolerance: float) -> mpmath.mpc:
    r = abs(m)
    if r < 1 - tolerance:
        return 1 / m
    if abs(r - 1) <= tolerance and mpmath.arg(m) < -tolerance:
        return 1 / m
    return m


def _newton_pair(F: LaurentPoly, G: LaurentPoly, m, z, tolerance, steps: int = 50):
    Fm, Fz = F.derivative('m'), F.derivative('z')
    Gm, Gz = G.derivative('m'), G.derivative('z')
    for _ in range(steps):
        f, g = F.evaluate(m, z), G.evaluate(m, z)
        if abs(f) < tolerance * 1e-6 and abs(g) < tolerance * 1e-6:
            break
        j11, j12 = Fm.evaluate(m, z), Fz.evaluate(m, z)
        j21, j22 = Gm.evaluate(m, z), Gz.evaluate(m, z)
        det = j11 * j22 - j12 * j21
        if det == 0:
            break
        dm = (f * j22 - g * j12) / det
        dz = (j11 * g - j21 * f) / det
        m, z = m - dm, z - dz
        if abs(dm) + abs(dz) < mpmath.eps * 4 * (abs(m) + abs(z)):
            break
    return m, z


def _residuals(spec: TwistSurgerySpec, F: LaurentPoly, S: LaurentPoly, m, z):
    surgery = m ** spec.p * S.evaluate(m, z) ** spec.q - 1
    return abs(F.evaluate(m, z)), abs(surgery)


def _solve_quadratic(a, b, c):
    disc = mpmath.sqrt(b * b - 4 * a * c)
    q = -(b + disc) / 2 if abs(b + disc) >= abs(b - disc) else -(b - disc) / 2
    if q == 0:
        return [mpmath.mpc(0), mpmath.mpc(0)]
    return [q / a, c / q]


def _points_over_root(args):
    spec, H_coeffs, G, var, F, S, Phi, z0, settings = args
    tolerance = settings.residual_tol
    values = [poly_eval(c, z0) if isinstance(c, sympy.Poly) else mpmath.mpc(c) for c in H_coeffs]
    out = []
    if abs(values[0]) < mpmath.mpf(10) ** (-settings.digits):
        return out
    # in m, H = A m^4 + (1 - zA) m^2 + A is even
    lead, mid, const = values if var == U else values[::2]
    candidates = _solve_quadratic(lead, mid, const)
    for u0 in candidates:
        if u0 == 0:
            continue
        root_m = mpmath.sqrt(u0)
        for m0 in (root_m, -root_m):
            probe = u0 if var == U else m0
            g_val = poly_eval(G, probe, z0)
            g_scale = max(1, abs(probe)) ** G.degree(var) * max(1, abs(z0)) ** G.degree(Z)
            if abs(g_val) > 1e-6 * g_scale:
                continue
            m, z = _newton_pair(F, Phi, m0, mpmath.mpc(z0), tolerance)
            res = _residuals(spec, F, S, m, z)
            if res[0] < tolerance and res[1] < tolerance:
                out.append((m, z, res))
    return out


def enumerate_variety(spec: TwistSurgerySpec, settings: Settings = DEFAULT_SETTINGS,
                      keep_reducible: bool = False) -> List[RepPoint]:
    """
    Orbits of {F = 0, m^p S^q = 1} under (m, z) ~ (1/m, z), irreducible ones only
    unless keep_reducible. Sorted by (Re z, Im z, Re m, Im m).
    """
    spec.validate()
    F = twist_F(spec.n)
    S = surgery_eigenvalue(spec)
    Phi = surgery_equation(spec)
    with mp.workprec(settings.precision):
        H, G, R, var = eliminate_m(spec)
        if R.is_zero:
            raise PositiveDimensional(f"resultant vanishes identically for {spec}")
        if R.degree() < 1:
            return []
        H_coeffs = poly_coefficient_polys(H, var)
        if len(H_coeffs) != (3 if var == U else 5):
            raise NonConvergence(f"unexpected degree {len(H_coeffs) - 1} of H in {var}")
        z_roots = [z0 for z0, _ in roots(R, settings.precision, settings.cluster_tol, settings.seed)]
        jobs = [(spec, H_coeffs, G, var, F, S, Phi, z0, settings) for z0 in z_roots]
        if settings.threads > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=settings.threads) as pool:
                batches = list(pool.map(_points_over_root, jobs))
        else:
            batches = [_points_over_root(job) for job in jobs]

        dedup_tol = settings.cluster_tol
        points: List[RepPoint] = []
        for batch in batches:
            for m, z, res in batch:
                m = _orbit_representative(m, 1e-12)
                duplicate = any(
                    abs(z - pt.z) < dedup_tol * max(1, abs(z))
                    and (abs(m - pt.m) < dedup_tol * max(1, abs(m))
                         or abs(1 / m - pt.m) < dedup_tol * max(1, abs(m)))
                    for pt in points)
                if duplicate:
                    continue
                pt = RepPoint(m=+m, z=+z, residuals=res)
                pt.irreducible = is_irreducible(*rep_from_point(pt))
                points.append(pt)
    if not keep_reducible:
        points = [pt for pt in points if pt.irreducible]
    points.sort(key=lambda pt: (float(pt.z.real), float(pt.z.imag), float(pt.m.real), float(pt.m.imag)))
    for i, pt in enumerate(points):
        pt.index = i
    _pair_conjugates(points, dedup_tol)
    return points


def _pair_conjugates(points: List[RepPoint], tolerance: float):
    for pt in points:
        cm = _orbit_representative(mpmath.conj(pt.m), 1e-12)
        cz = mpmath.conj(pt.z)
        for other in points:
            if abs(other.z - cz) < tolerance * max(1, abs(cz)) and (
                    abs(other.m - cm) < tolerance * max(1, abs(cm))
                    or abs(other.m - 1 / cm) < tolerance * max(1, abs(cm))):
                pt.partner = other.index
                break


def conjugation_closed(points: List[RepPoint]) -> bool:
    return all(pt.partner is not None for pt in points)


# --- Riley polynomials -------------------------------------------------------------

def riley_word(spec: TwoBridgeSpec) -> Word:
    """x^e_1 y^e_2 x^e_3 ... with e_i = (-1)^floor(i q / p), x = 1, y = 2."""
    letters = []
    for i in range(1, spec.p):
        sign = -1 if (i * spec.q // spec.p) % 2 else 1
        letters.append(sign * (1 if i % 2 == 1 else 2))
    return tuple(letters)


def riley_polynomial(spec: TwoBridgeSpec) -> sympy.Poly:
    """
    Gcd of the entries of rho(W) rho(x) - rho(y) rho(W) in Z[zeta], with
    rho(x) = (1 1 / 0 1), rho(y) = (1 0 / zeta 1); primitive, positive leading coefficient.
    """
    spec.validate()
    one = sympy.Poly(1, ZETA, domain='ZZ')
    zero = sympy.Poly(0, ZETA, domain='ZZ')
    zeta = sympy.Poly(ZETA, ZETA, domain='ZZ')
    gens = {
        1: ((one, one), (zero, one)),
        -1: ((one, -one), (zero, one)),
        2: ((one, zero), (zeta, one)),
        -2: ((one, zero), (-zeta, one)),
    }
    W = ((one, zero), (zero, one))
    for x in riley_word(spec):
        W = _mat_mul(W, gens[x])
    diff = [[a - b for a, b in zip(r1, r2)]
            for r1, r2 in zip(_mat_mul(W, gens[1]), _mat_mul(gens[2], W))]
    entries = [e for row in diff for e in row if not e.is_zero]
    if not entries:
        raise InputError(f"b({spec.p},{spec.q}) gives an identically satisfied relation")
    g = entries[0]
    for e in entries[1:]:
        g = sympy.gcd(g, e)
    _, g = g.primitive()
    if g.LC() < 0:
        g = -g
    if g.degree() < 1:
        raise InputError(f"b({spec.p},{spec.q}) has no parabolic solutions in this normal form")
    return g


def riley_roots(spec: TwoBridgeSpec, settings: Settings = DEFAULT_SETTINGS) -> List[Tuple[mpmath.mpc, int]]:
    """Roots of the Riley polynomial paired with the index of their conjugate."""
    poly = riley_polynomial(spec)
    with mp.workprec(settings.precision):
        found = [r for r, _ in roots(poly, settings.precision, settings.cluster_tol, settings.seed)]
    out = []
    for r in found:
        partner = min(range(len(found)), key=lambda k: abs(found[k] - mpmath.conj(r)))
        out.append((r, partner))
    return out


def riley_matrices(zeta) -> Tuple[SL2Matrix, SL2Matrix]:
    return SL2Matrix.of(1, 1, 0, 1), SL2Matrix.of(1, 0, zeta, 1)
