import random
from fractions import Fraction

import mpmath
import pytest

from exoseries.errors import (BackendMismatchError, SingularSeriesError,
                              TruncationError)
from exoseries.laurent import LaurentSeries
from exoseries.scalars import ExactComplex, FloatComplex

from conftest import ONE, ec, random_laurent, random_scalar


def L(terms, trunc=None):
    return LaurentSeries.from_dict({e: ec(c) if not isinstance(c, ExactComplex)
                                    else c for e, c in terms.items()},
                                   trunc_order=trunc)


# -- addition ---------------------------------------------------------------

def test_add_cancellation():
    a = L({-1: 1, 0: 1})
    b = L({-1: -1})
    assert a.add(b).same_series(L({0: 1}))


def test_add_identity():
    a = L({-2: 3, 1: 5})
    zero = LaurentSeries.zero()
    assert a.add(zero).same_series(a)


def test_add_doubling():
    a = L({0: 1, 1: 1})
    assert a.add(a).same_series(L({0: 2, 1: 2}))


def test_add_truncation_is_min():
    a = L({0: 1}, trunc=5)
    b = L({0: 1}, trunc=3)
    assert a.add(b).trunc_order == 3


# -- multiplication -----------------------------------------------------------

def test_mul_monomials():
    tm1 = LaurentSeries.monomial(ONE, -1)
    assert tm1.mul(tm1).same_series(LaurentSeries.monomial(ONE, -2))


def test_mul_difference_of_squares():
    a = L({0: 1, 1: 1})
    b = L({0: 1, 1: -1})
    assert a.mul(b).same_series(L({0: 1, 2: -1}))


def test_mul_matches_brute_force_convolution(rng):
    for _ in range(200):
        a = random_laurent(rng, -3, 6)
        b = random_laurent(rng, -3, 6)
        prod = a.mul(b)
        # independent oracle: direct double loop over the stored windows
        expected: dict = {}
        for i, ca in enumerate(a.coeffs):
            for j, cb in enumerate(b.coeffs):
                e = (a.lo + i) + (b.lo + j)
                expected[e] = expected.get(e, ec(0)) + ca * cb
        for e, c in expected.items():
            assert prod.coefficient(e, strict=False) == c


def test_mul_truncation_rule():
    a = L({1: 1, 2: 1}, trunc=7)     # ord0 = 1
    b = L({-1: 1}, trunc=4)          # ord0 = -1
    prod = a.mul(b)
    assert prod.trunc_order == min(7 + (-1), 4 + 1)


def test_mul_pole_orders_accumulate():
    a = L({-2: 1, 0: 1})
    b = L({-3: 1})
    assert a.mul(b).pole_order == 5


# -- theta -----------------------------------------------------------------------

def test_theta_monomial():
    t3 = LaurentSeries.monomial(ONE, 3)
    assert t3.theta().same_series(LaurentSeries.monomial(ec(3), 3))


def test_theta_constant_is_zero():
    c = LaurentSeries.constant(ec(7))
    assert c.theta().is_zero


def test_theta_mixed():
    s = L({-2: 1, 1: 5})
    assert s.theta().same_series(L({-2: -2, 1: 5}))


def test_theta_is_a_derivation(rng):
    for _ in range(100):
        a = random_laurent(rng)
        b = random_laurent(rng)
        lhs = a.mul(b).theta()
        rhs = a.theta().mul(b).add(a.mul(b.theta()))
        assert lhs.sub(rhs).is_zero


# -- inversion -----------------------------------------------------------------------

def test_invert_geometric():
    b = L({0: 1, 1: -1})
    inv = b.invert(6)
    assert all(inv.coefficient(e) == ec(1) for e in range(0, 7))


def test_invert_monomial():
    t = LaurentSeries.monomial(ONE, 1)
    assert t.invert().same_series(LaurentSeries.monomial(ONE, -1))


def test_invert_multiply_back():
    a = L({0: 2, 1: 1})
    inv = a.invert(8)
    prod = a.mul(inv)
    assert prod.coefficient(0) == ec(1)
    assert all(prod.coefficient(e) == ec(0) for e in range(1, 9))


def test_invert_twice_is_identity(rng):
    for _ in range(50):
        a = random_laurent(rng, -2, 4, trunc=8)
        if a.ord0 is None:
            continue
        twice = a.invert().invert()
        diff = a.sub(twice)
        cap = twice.trunc_order
        assert all(c.is_zero for e, c in diff.support() if e <= cap)


def test_invert_zero_raises():
    with pytest.raises(SingularSeriesError):
        LaurentSeries.zero().invert()


def test_invert_exact_nonmonomial_needs_target():
    with pytest.raises(TruncationError):
        L({0: 1, 1: 1}).invert()


# -- structure / invariants -------------------------------------------------------------

def test_window_length_identity(rng):
    for _ in range(100):
        s = random_laurent(rng, -3, 5, trunc=rng.randint(5, 9))
        if not s.coeffs:
            continue
        assert len(s.coeffs) == s.trunc_order + s.pole_order + 1


def test_normalized_leading_nonzero(rng):
    for _ in range(100):
        s = random_laurent(rng)
        if s.coeffs:
            assert not s.coeffs[0].is_zero
            assert s.ord0 == -s.pole_order


def test_ring_axioms_randomized(rng):
    for _ in range(120):
        a, b, c = (random_laurent(rng) for _ in range(3))
        assert a.add(b).add(c).sub(a.add(b.add(c))).is_zero
        lhs = a.mul(b.add(c))
        rhs = a.mul(b).add(a.mul(c))
        diff = lhs.sub(rhs)
        cap = diff.trunc_order
        assert all(cv.is_zero for e, cv in diff.support()
                   if cap is None or e <= cap)


def test_backend_mismatch_raises():
    a = L({0: 1})
    b = LaurentSeries.constant(FloatComplex(1.0, 64))
    with pytest.raises(BackendMismatchError):
        a.add(b)


def test_float_agrees_with_exact(rng):
    prec = 128
    bound = mpmath.mpf(2) ** (-(prec - 8))
    for _ in range(40):
        a = random_laurent(rng, -2, 4)
        b = random_laurent(rng, -2, 4)
        exact = a.mul(b).add(a)
        af = LaurentSeries([c.to_float(prec) for c in a.coeffs], a.lo,
                           a.trunc_order, "float", prec)
        bf = LaurentSeries([c.to_float(prec) for c in b.coeffs], b.lo,
                           b.trunc_order, "float", prec)
        approx = af.mul(bf).add(af)
        for e, c in exact.support():
            target = c.to_float(prec + 16).z
            got = approx.coefficient(e, strict=False).z
            scale = max(mpmath.mpf(1), abs(target))
            assert abs(got - target) <= bound * scale


def test_eval_at_point():
    s = L({-1: 2, 1: 3})
    z = ec(2)
    assert s.eval_at(z) == ec(1) + ec(6)
