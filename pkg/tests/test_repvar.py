import mpmath
import numpy as np
import pytest
import sympy
from numpy.polynomial import Polynomial as P

from csrec.algebra import U, Z, LaurentPoly, ZETA
from csrec.config import Settings
from csrec.errors import InputError
from csrec.homology import word_matrix
from csrec.manifold import twist_knot_relator
from csrec.numeric import SL2Matrix
from csrec.repvar import (RepPoint, TwistSurgerySpec, TwoBridgeSpec, conjugation_closed,
                          eliminate_m, enumerate_variety, is_irreducible, longitude_word, rep_from_point,
                          riley_matrices, riley_polynomial, riley_roots, riley_word, twist_E,
                          twist_F, twist_longitude)

m = LaurentPoly.monomial(1, 0)
m_inv = LaurentPoly.monomial(-1, 0)
z = LaurentPoly.monomial(0, 1)


def _fig8_z(mm):
    """Both z with F_{-1}(m, z) = 0: z^2 - (s + 1) z + (s + 1) = 0, s = m^2 + m^-2."""
    s = mm ** 2 + mm ** -2
    disc = mpmath.sqrt((s + 1) ** 2 - 4 * (s + 1))
    return ((s + 1) + disc) / 2, ((s + 1) - disc) / 2


def test_twist_F_small_n():
    assert twist_F(1) == m * m + m_inv * m_inv - z + 1
    s = m * m + m_inv * m_inv
    assert twist_F(-1) == (1 - z) * s - z * (1 - z) + 1


def test_twist_F_rejects_zero():
    with pytest.raises(InputError):
        twist_F(0)


@pytest.mark.parametrize("mm", [mpmath.mpc(1.3, 0.2), mpmath.mpc(0.4, -0.9), mpmath.mpc(2)])
def test_relator_holds_on_F_zero_locus(mm):
    # trefoil: z = m^2 + m^-2 + 1
    pt = RepPoint(m=mm, z=mm ** 2 + mm ** -2 + 1, residuals=(0, 0))
    rho = rep_from_point(pt)
    assert word_matrix(twist_knot_relator(1), rho).close_to(SL2Matrix.identity(), 1e-15)
    for zz in _fig8_z(mm):
        assert abs(twist_F(-1).evaluate(mm, zz)) < 1e-15
        rho = rep_from_point(RepPoint(m=mm, z=zz, residuals=(0, 0)))
        assert word_matrix(twist_knot_relator(-1), rho).close_to(SL2Matrix.identity(), 1e-14)


def test_printed_convention_differs():
    pt = RepPoint(m=mpmath.mpc(1.3, 0.2), z=mpmath.mpc(0.7, 0.1), residuals=(0, 0))
    A, B = rep_from_point(pt, convention='printed')
    assert abs(B.c + pt.z) < 1e-15
    A2, B2 = rep_from_point(pt)
    assert abs(B2.c - (2 - pt.z)) < 1e-15
    assert A.close_to(A2, 0)


def test_longitude_is_upper_triangular_with_eigenvalue_l():
    mm = mpmath.mpc(1.3, 0.2)
    ell = twist_longitude(-1)
    assert ell.is_even_in_m()
    for zz in _fig8_z(mm):
        rho = rep_from_point(RepPoint(m=mm, z=zz, residuals=(0, 0)))
        L = word_matrix(longitude_word(-1), rho)
        assert abs(L.c) < 1e-13
        assert abs(L.a - ell.evaluate(mm, zz)) < 1e-13


def test_printed_eigenvalue_disagrees_with_longitude_at_parabolic_point():
    for zz in _fig8_z(mpmath.mpc(1)):
        assert abs(twist_E(-1).evaluate(1, zz) - 1) < 1e-15
        assert abs(twist_longitude(-1).evaluate(1, zz) + 1) < 1e-14


def test_spec_validation():
    with pytest.raises(InputError):
        TwistSurgerySpec(0, 6, 1).validate()
    with pytest.raises(InputError):
        TwistSurgerySpec(1, 6, 3).validate()
    with pytest.raises(InputError):
        TwistSurgerySpec(1, 5, 1).validate()
    with pytest.raises(InputError):
        TwistSurgerySpec(1, 6, 1, eigenvalue='meridian').validate()
    spec = TwistSurgerySpec(1, 5, 1, allow_odd=True).validate()
    assert not spec.theorem_backed


def test_is_irreducible():
    A = SL2Matrix.of(2, 1, 0, "0.5")
    assert not is_irreducible(A, SL2Matrix.of(3, 0, 0, 1 / mpmath.mpf(3)))
    assert is_irreducible(A, SL2Matrix.of(2, 0, 1, "0.5"))
    # scalar A is reducible with anything
    assert not is_irreducible(SL2Matrix.of(-1, 0, 0, -1), SL2Matrix.of(2, 1, 1, 1))
    reducible = RepPoint(m=mpmath.mpc(1.5), z=mpmath.mpc(2), residuals=(0, 0))
    assert not is_irreducible(*rep_from_point(reducible))


def test_enumerate_trefoil_six_surgery(settings):
    points = enumerate_variety(TwistSurgerySpec(1, 6, 1), settings)
    assert len(points) == 6
    sqrt3 = mpmath.sqrt(3)
    expected = [1 - sqrt3, 1 - sqrt3, 1, 1, 1 + sqrt3, 1 + sqrt3]
    for pt, zz in zip(points, expected):
        assert abs(pt.z - zz) < 1e-12
        assert abs(pt.m ** 12 + 1) < 1e-12
        assert abs(abs(pt.m) - 1) < 1e-12 and pt.m.imag > 0
        assert pt.irreducible
        assert max(pt.residuals) < settings.residual_tol
    assert conjugation_closed(points)
    assert [pt.partner for pt in points] == list(range(6))


def test_enumeration_is_thread_independent(settings):
    spec = TwistSurgerySpec(1, 6, 1)
    serial = enumerate_variety(spec, settings)
    threaded = enumerate_variety(spec, settings.with_overrides(threads=3))
    assert [(pt.m, pt.z) for pt in serial] == [(pt.m, pt.z) for pt in threaded]


def test_enumerate_figure_eight_longitude_mode(settings):
    points = enumerate_variety(TwistSurgerySpec(-1, 6, 1, eigenvalue='longitude'), settings)
    assert points
    assert conjugation_closed(points)
    for pt in points:
        A, B = rep_from_point(pt)
        L = word_matrix(longitude_word(-1), (A, B))
        assert (A.power(6) @ L).close_to(SL2Matrix.identity(), 1e-10)


def test_riley_word():
    assert riley_word(TwoBridgeSpec(3, 1)) == (1, 2)
    assert riley_word(TwoBridgeSpec(5, 3)) == (1, -2, -1, 2)


def test_riley_polynomials():
    assert riley_polynomial(TwoBridgeSpec(3, 1)) == sympy.Poly(ZETA + 1, ZETA, domain='ZZ')
    assert riley_polynomial(TwoBridgeSpec(5, 3)) == sympy.Poly(ZETA ** 2 - ZETA + 1, ZETA, domain='ZZ')


@pytest.mark.parametrize("p,q", [(3, 1), (5, 3), (5, 1), (7, 3)])
def test_riley_roots_solve_the_relation(p, q, settings):
    spec = TwoBridgeSpec(p, q)
    found = riley_roots(spec, settings)
    assert len(found) == riley_polynomial(spec).degree()
    for k, (zeta, partner) in enumerate(found):
        assert abs(found[partner][0] - mpmath.conj(zeta)) < 1e-9
        x, y = riley_matrices(zeta)
        W = word_matrix(riley_word(spec), (x, y))
        assert (W @ x).close_to(y @ W, 1e-9)


def test_two_bridge_validation():
    with pytest.raises(InputError):
        TwoBridgeSpec(4, 1).validate()
    with pytest.raises(InputError):
        TwoBridgeSpec(5, 5).validate()


def _same_orbit(m1, z1, m2, z2, tolerance=1e-6):
    return abs(z1 - z2) < tolerance * max(1, abs(z2)) and (
        abs(m1 - m2) < tolerance or abs(m1 - 1 / m2) < tolerance)


@pytest.mark.slow
def test_enumeration_matches_elimination_in_z(settings):
    """Eliminate z instead of u, solve densely in double precision and compare orbit sets."""
    spec = TwistSurgerySpec(1, 6, 1)
    H, G, _, var = eliminate_m(spec)
    assert var == U
    res_z = sympy.Poly(sympy.resultant(H.as_expr(), G.as_expr(), Z), U)
    h_in_z = sympy.Poly(H.as_expr(), Z)
    g_expr = G.as_expr()
    solutions = []
    for u0 in map(complex, np.roots([complex(c) for c in res_z.all_coeffs()])):
        if abs(u0) < 1e-9:
            continue
        coeffs = [complex(c.subs(U, u0)) for c in h_in_z.all_coeffs()]
        for z0 in map(complex, np.roots(coeffs)):
            scale = max(1, abs(u0)) ** G.degree(U) * max(1, abs(z0)) ** G.degree(Z)
            if abs(complex(g_expr.subs({U: u0, Z: z0}))) > 1e-6 * scale:
                continue
            for m0 in (np.sqrt(u0), -np.sqrt(u0)):
                pt = RepPoint(m=mpmath.mpc(m0), z=mpmath.mpc(z0), residuals=(0, 0))
                if not is_irreducible(*rep_from_point(pt), tolerance=1e-6):
                    continue
                if not any(_same_orbit(pt.m, pt.z, m1, z1) for m1, z1 in solutions):
                    solutions.append((pt.m, pt.z))
    points = enumerate_variety(spec, settings)
    assert len(solutions) == len(points) == 6
    for mm, zz in solutions:
        assert sum(_same_orbit(mm, zz, pt.m, pt.z) for pt in points) == 1
    for pt in points:
        assert sum(_same_orbit(mm, zz, pt.m, pt.z) for mm, zz in solutions) == 1


def _riley_difference(spec):
    """Entries of rho(W) rho(x) - rho(y) rho(W) as numpy polynomials in zeta."""
    one, zero, zeta = P([1]), P([0]), P([0, 1])
    gens = {1: ((one, one), (zero, one)), -1: ((one, -one), (zero, one)),
            2: ((one, zero), (zeta, one)), -2: ((one, zero), (-zeta, one))}

    def mul(x, y):
        return tuple(tuple(x[i][0] * y[0][j] + x[i][1] * y[1][j] for j in range(2)) for i in range(2))

    W = ((one, zero), (zero, one))
    for letter in riley_word(spec):
        W = mul(W, gens[letter])
    lhs, rhs = mul(W, gens[1]), mul(gens[2], W)
    return [lhs[i][j] - rhs[i][j] for i in range(2) for j in range(2)]


@pytest.mark.slow
@pytest.mark.parametrize("p,q", [(3, 1), (5, 3)])
def test_riley_roots_agree_with_direct_solve(p, q, settings):
    spec = TwoBridgeSpec(p, q)
    entries = [e.trim() for e in _riley_difference(spec)]
    entries = [e for e in entries if e.degree() > 0 or abs(e.coef[0]) > 0]
    pivot = min(entries, key=lambda e: e.degree())
    direct = []
    for candidate in pivot.roots():
        scale = max(1, abs(candidate))
        if all(abs(e(candidate)) < 1e-8 * scale ** e.degree() for e in entries):
            direct.append(candidate)
    found = [zeta for zeta, _ in riley_roots(spec, settings)]
    assert len(direct) == len(found)
    for zeta in direct:
        assert min(abs(complex(r) - zeta) for r in found) < 1e-9
    for zeta in found:
        assert min(abs(complex(zeta) - d) for d in direct) < 1e-9
        x, y = riley_matrices(zeta)
        W = word_matrix(riley_word(spec), (x, y))
        assert (W @ x).close_to(y @ W, 1e-9)
