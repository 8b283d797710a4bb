import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy

from csrec.algebra import (U, Z, LaurentPoly, QmodZ, chebyshev_s, ext_gcd_pair, poly_eval,
                           qmodz_add, qmodz_scale, resultant, roots)
from csrec.errors import InputError


def test_qmodz_reduces_into_unit_interval():
    assert QmodZ(Fraction(5, 3)).value == Fraction(2, 3)
    assert QmodZ(Fraction(-1, 4)).value == Fraction(3, 4)
    assert (QmodZ(Fraction(1, 2)) + QmodZ(Fraction(3, 4))).value == Fraction(1, 4)
    assert (-QmodZ(Fraction(1, 3))).value == Fraction(2, 3)
    assert qmodz_scale(QmodZ(Fraction(1, 3)), 3).is_zero()
    assert qmodz_add(Fraction(1, 6), "5/6").is_zero()
    assert str(QmodZ.of("68/105")) == "68/105"


@pytest.mark.parametrize("p,q,r", [(3, 2, 1), (5, 2, 2), (7, 2, 3), (2, 1, 1), (3, 1, 2), (5, 1, 4)])
def test_ext_gcd_pair(p, q, r):
    s, r_found = ext_gcd_pair(p, q)
    assert r_found == r
    assert p * s - q * r_found == 1


def test_ext_gcd_pair_rejects_common_factor():
    with pytest.raises(InputError):
        ext_gcd_pair(4, 2)


def test_chebyshev_recursion():
    assert chebyshev_s(0).is_zero
    assert chebyshev_s(1) == sympy.Poly(1, Z, domain='ZZ')
    assert chebyshev_s(2) == sympy.Poly(Z, Z, domain='ZZ')
    assert chebyshev_s(3) == sympy.Poly(Z ** 2 - 1, Z, domain='ZZ')
    assert chebyshev_s(-1) == sympy.Poly(-1, Z, domain='ZZ')
    for k in range(2, 8):
        assert chebyshev_s(k + 1) == sympy.Poly(Z, Z) * chebyshev_s(k) - chebyshev_s(k - 1)


def test_laurent_arithmetic_and_evaluation():
    m = LaurentPoly.monomial(1, 0)
    m_inv = LaurentPoly.monomial(-1, 0)
    square = (m + m_inv) ** 2
    assert square == LaurentPoly.monomial(2, 0) + 2 + LaurentPoly.monomial(-2, 0)
    assert square.is_even_in_m()
    point = square.evaluate(mpmath.mpc(0.5, 0.5), 1)
    x = mpmath.mpc(0.5, 0.5)
    assert abs(point - (x + 1 / x) ** 2) < 1e-15
    z = LaurentPoly.monomial(0, 1)
    f = m * m * z - z * z + 3
    assert f.derivative('z') == m * m - 2 * z
    assert f.derivative('m') == 2 * m * z


def test_laurent_to_poly_shifts_exponents():
    f = LaurentPoly.monomial(-2, 0) + LaurentPoly.monomial(2, 1)
    poly, a, b = f.to_poly()
    assert (a, b) == (-2, 0)
    assert poly.as_expr() == sympy.Symbol('m') ** 4 * Z + 1
    halved = f.halve_m()
    assert halved == LaurentPoly.monomial(-1, 0) + LaurentPoly.monomial(1, 1)
    with pytest.raises(ValueError):
        LaurentPoly.monomial(1, 0).halve_m()


def test_resultant_eliminates_variable():
    f = sympy.Poly(U ** 2 - Z, U, Z)
    g = sympy.Poly(U - 1, U, Z)
    res = resultant(f, g, U)
    assert res.gens == (Z,)
    assert [r for r, _ in roots(res)] == [mpmath.mpc(1)]


def test_resultant_rejects_zero_polynomial():
    with pytest.raises(InputError):
        resultant(sympy.Poly(0, U, Z), sympy.Poly(U, U, Z), U)


def test_roots_with_multiplicities():
    found = roots(sympy.Poly((Z - 1) ** 2 * (Z + 2), Z))
    assert len(found) == 2
    (r1, m1), (r2, m2) = found
    assert abs(r1 + 2) < 1e-15 and m1 == 1
    assert abs(r2 - 1) < 1e-15 and m2 == 2


def test_roots_complex_pair_sorted():
    found = roots(sympy.Poly(Z ** 2 + 1, Z))
    assert abs(found[0][0] + 1j) < 1e-15
    assert abs(found[1][0] - 1j) < 1e-15


def test_roots_high_degree_residuals(rng):
    coeffs = [int(c) for c in rng.integers(-9, 10, size=13)]
    coeffs[0] = 3
    coeffs[-1] = 7
    poly = sympy.Poly(coeffs, Z)
    found = roots(poly, precision=64)
    assert sum(mult for _, mult in found) == poly.degree()
    for r, _ in found:
        scale = sum(abs(c) * abs(r) ** k for k, c in enumerate(reversed(coeffs)))
        assert abs(poly_eval(poly, r)) / scale < 1e-12


def test_roots_of_wilkinson_style_polynomial():
    poly = sympy.Poly(sympy.prod([Z - k for k in range(1, 9)]), Z)
    with mpmath.workprec(128):
        found = roots(poly, precision=128)
    assert [round(float(r.real)) for r, _ in found] == list(range(1, 9))
    assert all(abs(r - round(float(r.real))) < 1e-20 for r, _ in found)


def test_roots_rejects_constant():
    with pytest.raises(InputError):
        roots(sympy.Poly(5, Z))


@pytest.mark.parametrize("k", range(-50, 51))
def test_chebyshev_at_two(k):
    assert chebyshev_s(k).eval(2) == k


@pytest.mark.parametrize("n", [2, 3, 5, 8, 13])
def test_chebyshev_roots_are_cosines(n):
    found = sorted(float(r.real) for r, mult in roots(chebyshev_s(n)) for _ in range(mult))
    expected = sorted(2 * np.cos(k * np.pi / n) for k in range(1, n))
    assert found == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_ext_gcd_pair_random(seed):
    rng = np.random.default_rng(seed)
    checked = 0
    while checked < 50:
        p = int(rng.integers(1, 10 ** 6)) * int(rng.choice([-1, 1]))
        q = int(rng.integers(-10 ** 6, 10 ** 6))
        if math.gcd(p, q) != 1:
            continue
        s, r = ext_gcd_pair(p, q)
        assert p * s - q * r == 1
        assert 0 <= r < abs(p)
        checked += 1


def _random_monic(rng, degree):
    """Monic in U with coefficients in Z[Z]."""
    expr = U ** degree
    for k in range(degree):
        expr += sum(int(c) * Z ** e for e, c in enumerate(rng.integers(-4, 5, size=3))) * U ** k
    return sympy.Poly(expr, U, Z)


@pytest.mark.parametrize("seed", range(3))
def test_resultant_sign_symmetry(seed):
    rng = np.random.default_rng(seed)
    f, g = _random_monic(rng, 2), _random_monic(rng, 3)
    # Res(f, g) = (-1)^(deg f deg g) Res(g, f)
    assert resultant(f, g, U) == resultant(g, f, U)
    h = _random_monic(rng, 3)
    assert resultant(g, h, U) == -resultant(h, g, U)


@pytest.mark.parametrize("seed", range(3))
def test_resultant_is_product_of_root_differences(seed):
    rng = np.random.default_rng(seed)
    a = [int(x) for x in rng.integers(-6, 7, size=3)]
    b = [int(x) for x in rng.integers(-6, 7, size=2)]
    f = sympy.Poly(sympy.prod([U - x for x in a]), U, Z)
    g = sympy.Poly(sympy.prod([U - y for y in b]), U, Z)
    expected = sympy.prod([x - y for x in a for y in b])
    assert resultant(f, g, U).as_expr() == expected


@pytest.mark.parametrize("seed", range(3))
def test_resultant_specialises_on_a_grid(seed):
    rng = np.random.default_rng(seed)
    f, g = _random_monic(rng, 2), _random_monic(rng, 2)
    res = resultant(f, g, U)
    for z0 in range(-3, 4):
        direct = sympy.resultant(f.as_expr().subs(Z, z0), g.as_expr().subs(Z, z0), U)
        assert res.eval(z0) == direct
