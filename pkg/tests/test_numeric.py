import mpmath
import numpy as np
import pytest

from csrec.errors import InputError
from csrec.numeric import (FlattenedSimplex, SL2Matrix, distance_mod, distance_to_integer,
                           l_hat, li2, log_principal, reduce_mod, rogers,
                           simplex_from_flattening, to_ap, working_precision)


def test_li2_special_values():
    assert abs(li2(1) - mpmath.pi ** 2 / 6) < 1e-12
    assert li2(0) == 0
    assert abs(li2(-1) + mpmath.pi ** 2 / 12) < 1e-12
    # Li2(1/2) = pi^2/12 - log(2)^2/2
    assert abs(li2(0.5) - (mpmath.pi ** 2 / 12 - mpmath.log(2) ** 2 / 2)) < 1e-15


def test_li2_on_the_cut_has_imaginary_part_minus_pi_log():
    value = li2(3)
    assert abs(value.imag + mpmath.pi * mpmath.log(3)) < 1e-12


def test_rogers_five_term_relation(rng):
    worst = mpmath.mpf(0)
    for _ in range(1000):
        x, y = sorted(rng.uniform(0.01, 0.99, size=2), reverse=True)
        if x - y < 1e-3:
            continue
        x, y = mpmath.mpf(x), mpmath.mpf(y)
        total = (rogers(x) - rogers(y) + rogers(y / x)
                 - rogers((1 - 1 / x) / (1 - 1 / y)) + rogers((1 - x) / (1 - y)))
        worst = max(worst, abs(total))
    assert worst < 1e-10


def test_rogers_undefined_at_0_and_1():
    with pytest.raises(InputError):
        rogers(0)
    with pytest.raises(InputError):
        rogers(1)


def test_log_principal_branch():
    assert abs(log_principal(-1) - mpmath.pi * 1j) < 1e-15
    assert abs(log_principal(-1 - 1e-30j).imag + mpmath.pi) < 1e-12
    with pytest.raises(InputError):
        log_principal(0)


def test_l_hat_multiplicity_and_plain_rogers():
    z = mpmath.mpc(0.3, 0.4)
    plain = l_hat(FlattenedSimplex(z))
    assert abs(plain - rogers(z)) < 1e-15
    assert abs(l_hat(FlattenedSimplex(z, coeff=-1)) + plain) < 1e-15
    assert l_hat(FlattenedSimplex(z, coeff=0)) == 0
    shifted = l_hat(FlattenedSimplex(z, p=2, q=-1))
    expected = plain + mpmath.pi * 1j / 2 * (2 * log_principal(1 - z) - log_principal(z))
    assert abs(shifted - expected) < 1e-15


def test_simplex_from_flattening_recovers_integers():
    z = mpmath.mpc(0.2, -0.7)
    for p, q in [(0, 0), (1, 0), (0, -1), (3, 2), (-2, 5)]:
        w0 = log_principal(z) + p * mpmath.pi * 1j
        w1 = -log_principal(1 - z) + q * mpmath.pi * 1j
        s = simplex_from_flattening(w0, w1)
        assert abs(s.z - z) < 1e-15
        assert (s.p, s.q) == (p, q)


def test_to_ap_parses_decimal_strings():
    assert to_ap("1.5-2j") == mpmath.mpc(1.5, -2)
    assert to_ap("3i") == mpmath.mpc(0, 3)
    assert to_ap("2") == mpmath.mpc(2)
    assert to_ap("-1e-3+4.5e2j") == mpmath.mpc(mpmath.mpf("-1e-3"), 450)


def test_residue_helpers():
    assert abs(reduce_mod(-0.25).real - 0.75) < 1e-15
    assert abs(reduce_mod(1.7, 0.5).real - 0.2) < 1e-15
    assert abs(distance_mod(0.95, 0.05) - 0.1) < 1e-15
    assert distance_mod(0.45, -0.05, 0.5) < 1e-15
    d, im = distance_to_integer(mpmath.mpc(2.999, 0.01))
    assert abs(d - 0.001) < 1e-12 and abs(im - 0.01) < 1e-15


def test_sl2_matrix_algebra():
    g = SL2Matrix.of(2, 1, 3, 2)
    h = SL2Matrix.of(1, "0.5+1j", 0, 1)
    assert (g @ g.inverse()).close_to(SL2Matrix.identity(), 1e-15)
    assert g.power(3).close_to(g @ g @ g, 1e-15)
    assert g.power(-2).close_to(g.inverse() @ g.inverse(), 1e-15)
    assert abs((g @ h).det() - 1) < 1e-15
    assert g.trace() == 4
    with pytest.raises(InputError):
        SL2Matrix.of(1, 1, 1, 1).check_det()


def test_working_precision_is_scoped():
    before = mpmath.mp.prec
    with working_precision(200):
        assert mpmath.mp.prec == 200
    assert mpmath.mp.prec == before


def _random_outside_unit_disk(rng, count):
    radius = 1 + 4 * rng.random(count)
    angle = rng.uniform(0.05, np.pi, count) * rng.choice([-1, 1], count)
    return [mpmath.mpc(complex(r * np.cos(t), r * np.sin(t))) for r, t in zip(radius, angle)]


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_li2_inversion_identity(seed):
    """Li2(z) + Li2(1/z) = -pi^2/6 - log(-z)^2/2 away from [0, inf)."""
    rng = np.random.default_rng(seed)
    for z in _random_outside_unit_disk(rng, 25):
        expected = -mpmath.pi ** 2 / 6 - log_principal(-z) ** 2 / 2
        assert abs(li2(z) + li2(1 / z) - expected) < 1e-10


@pytest.mark.parametrize("seed", [0, 1])
def test_log_principal_commutes_with_conjugation(seed):
    rng = np.random.default_rng(seed)
    radius = np.exp(rng.uniform(-5, 5, 50))
    angle = rng.uniform(-np.pi + 0.01, np.pi - 0.01, 50)
    for r, t in zip(radius, angle):
        z = mpmath.mpc(complex(r * np.cos(t), r * np.sin(t)))
        assert abs(log_principal(mpmath.conj(z)) - mpmath.conj(log_principal(z))) < 1e-15 * max(1, r)


@pytest.mark.parametrize("seed", [0, 1])
def test_li2_agrees_as_precision_increases(seed):
    rng = np.random.default_rng(seed)
    for x, y in rng.uniform(-3, 3, (20, 2)):
        with working_precision(64):
            low = li2(mpmath.mpc(x, y))
        with working_precision(128):
            high = li2(mpmath.mpc(x, y))
        assert abs(low - high) < 1e-15 * max(1, abs(high))


def test_working_precision_rejects_below_double():
    with pytest.raises(InputError):
        with working_precision(52):
            pass
    with working_precision(53):
        assert mpmath.mp.prec == 53
