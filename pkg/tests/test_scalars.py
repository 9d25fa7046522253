import random
from fractions import Fraction

import mpmath
import pytest

from exoseries.errors import BackendMismatchError
from exoseries.scalars import (ExactComplex, FloatComplex, zero_tolerance)

from conftest import random_scalar


def test_exact_field_axioms_randomized():
    rng = random.Random(7)
    for _ in range(200):
        a, b, c = (random_scalar(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a


def test_exact_division_inverts():
    rng = random.Random(8)
    for _ in range(100):
        a = random_scalar(rng)
        b = random_scalar(rng)
        if b.is_zero:
            continue
        assert (a / b) * b == a


def test_exact_pow_and_conj():
    z = ExactComplex(1, -1)
    assert z ** 2 == ExactComplex(0, -2)
    assert z.conj() == ExactComplex(1, 1)
    assert z.abs2() == Fraction(2)


def test_backend_mixing_raises():
    a = ExactComplex(1)
    b = FloatComplex(1.0, 64)
    with pytest.raises(BackendMismatchError):
        a + b
    with pytest.raises(BackendMismatchError):
        b * a


def test_float_precision_max_rule():
    a = FloatComplex(1, 64)
    b = FloatComplex(1, 192)
    assert (a + b).prec == 192
    assert (a * b).prec == 192
    assert (b - a).prec == 192


def test_float_matches_exact_within_precision_bound():
    rng = random.Random(9)
    for prec in (64, 128, 192):
        bound = mpmath.mpf(2) ** (-(prec - 8))
        for _ in range(50):
            a = random_scalar(rng)
            b = random_scalar(rng)
            exact = (a * b + a - b)
            if b.abs2() != 0:
                exact = exact / b
            af, bf = a.to_float(prec), b.to_float(prec)
            approx = af * bf + af - bf
            if b.abs2() != 0:
                approx = approx / bf
            target = exact.to_float(prec + 32)
            err = abs(approx.z - target.z)
            scale = max(mpmath.mpf(1), abs(target.z))
            assert err <= bound * scale


def test_zero_tolerance_scales_with_precision():
    t128 = zero_tolerance(128)
    t192 = zero_tolerance(192)
    assert mpmath.almosteq(t128, mpmath.mpf(10) ** (-30))
    assert t192 < t128


def test_immutability():
    a = ExactComplex(1)
    with pytest.raises(AttributeError):
        a.re = Fraction(2)
    b = FloatComplex(1.0, 64)
    with pytest.raises(AttributeError):
        b.prec = 128
