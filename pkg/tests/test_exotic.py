from fractions import Fraction

import mpmath
import pytest

from exoseries.errors import ConfigurationError
from exoseries.exotic import ExoticSeries, make_jet
from exoseries.laurent import LaurentSeries
from exoseries.sector import eval_partial_sum

from conftest import ONE, ec, random_exotic, random_laurent, riccati_phi


def grade_mono(k, exp, value=ONE, eta=Fraction(1), trunc_k=None):
    return ExoticSeries({k: LaurentSeries.monomial(value, exp)}, eta, trunc_k)


# -- the Euler operator --------------------------------------------------------

def test_delta_monomial():
    s = grade_mono(3, 2)  # t^2 x^3, eta = 1
    expect = grade_mono(3, 2, ec(3, 2))
    assert s.delta().same_series(expect)


def test_delta_constant_grade_zero():
    s = ExoticSeries({0: LaurentSeries.constant(ec(5))}, Fraction(1))
    assert s.delta().is_zero


def test_delta_pole_grade():
    s = grade_mono(1, -1)  # t^-1 x
    expect = grade_mono(1, -1, ec(1, -1))
    assert s.delta().same_series(expect)


def test_delta_is_a_derivation(rng):
    for _ in range(100):
        a = random_exotic(rng)
        b = random_exotic(rng)
        lhs = a.mul(b).delta()
        rhs = a.delta().mul(b).add(a.mul(b.delta()))
        assert lhs.sub(rhs).is_zero


def test_delta_linear(rng):
    for _ in range(50):
        a = random_exotic(rng)
        b = random_exotic(rng)
        s = ec(3, -2)
        lhs = a.add(b).scalar_mul(s).delta()
        rhs = a.delta().add(b.delta()).scalar_mul(s)
        assert lhs.sub(rhs).is_zero


# -- multiplication ----------------------------------------------------------------

def test_mul_monomials():
    s = grade_mono(1, -1)
    expect = grade_mono(2, -2)
    assert s.mul(s).same_series(expect)


def test_mul_identity():
    one = ExoticSeries.constant(ONE, Fraction(1))
    s = grade_mono(2, -3, ec(4, 1))
    assert s.mul(one).same_series(s)


def test_mul_matches_brute_force(rng):
    for _ in range(60):
        a = random_exotic(rng, max_grade=4)
        b = random_exotic(rng, max_grade=4)
        prod = a.mul(b)
        for k in range(0, 9):
            expect = LaurentSeries.zero()
            for j in range(0, k + 1):
                ga = a.grades.get(j)
                gb = b.grades.get(k - j)
                if ga is not None and gb is not None:
                    expect = expect.add(ga.mul(gb))
            got = prod.grades.get(k, LaurentSeries.zero())
            assert got.sub(expect).is_zero


def test_eta_mismatch_raises():
    a = ExoticSeries.constant(ONE, Fraction(1))
    b = ExoticSeries.constant(ONE, Fraction(2))
    with pytest.raises(ConfigurationError):
        a.mul(b)


def test_trunc_k_propagates(rng):
    a = random_exotic(rng, max_grade=3, trunc_k=5)
    b = random_exotic(rng, max_grade=3, trunc_k=7)
    prod = a.mul(b)
    la = a.ord_x_lower_bound
    lb = b.ord_x_lower_bound
    assert prod.trunc_k == min(5 + lb, 7 + la)


# -- jets --------------------------------------------------------------------------

def test_make_jet_of_t():
    phi = grade_mono(0, 1)  # alpha_0 = t
    jet = make_jet(phi, 1)
    assert jet.order == 1
    assert jet[0].same_series(phi)
    assert jet[1].same_series(grade_mono(0, 1, ec(0, 1)))  # i*t


def test_make_jet_of_zero():
    phi = ExoticSeries.zero(Fraction(1))
    jet = make_jet(phi, 3)
    assert all(c.is_zero for c in jet.components)


def test_make_jet_matches_repeated_delta():
    phi = riccati_phi(6, 6)
    jet = make_jet(phi, 2)
    once = phi.delta()
    twice = once.delta()
    assert jet[1].same_series(once)
    assert jet[2].same_series(twice)


def test_jet_component_invariant(rng):
    phi = random_exotic(rng, max_grade=5)
    jet = make_jet(phi, 3)
    for j in range(3):
        assert jet[j + 1].same_series(jet[j].delta())


def test_make_jet_rejects_low_order():
    with pytest.raises(ValueError):
        make_jet(ExoticSeries.zero(Fraction(1)), 0)


# -- shifted Euler powers -------------------------------------------------------------

def test_shifted_euler_pow_monomial_diagonalization():
    # (delta + m) t^j x^k = (k + m + i*eta*j) t^j x^k, exactly
    for k, j, m in [(1, 0, 0), (2, -3, 1), (5, 4, 2)]:
        s = grade_mono(k, j)
        got = s.shifted_euler_pow(1, m)
        expect = grade_mono(k, j, ec(k + m, j))
        assert got.same_series(expect)


def test_shifted_euler_pow_iterates():
    s = grade_mono(2, -1)
    assert s.shifted_euler_pow(3, 1).same_series(
        s.shifted_euler_pow(1, 1).shifted_euler_pow(1, 1).shifted_euler_pow(1, 1))


# -- numeric cross-check ---------------------------------------------------------------

def test_pointwise_product_matches_symbolic(rng):
    for _ in range(10):
        a = random_exotic(rng, max_grade=3)
        b = random_exotic(rng, max_grade=3)
        prod = a.mul(b)
        x = mpmath.mpc(0.07, 0.04)
        va = eval_partial_sum(a, x, 6)
        vb = eval_partial_sum(b, x, 6)
        vp = eval_partial_sum(prod, x, 6)
        assert abs(vp - va * vb) <= mpmath.mpf("1e-20") * max(
            1, abs(va * vb))


def test_shift_x_refuses_nonzero_low_grades():
    s = grade_mono(0, 1)
    with pytest.raises(ValueError):
        s.shift_x(-1)
