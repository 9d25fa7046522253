"""Coefficient arithmetic with two interchangeable backends.

``ExactComplex`` is an element of the Gaussian-rational field Q(i): a pair of
``fractions.Fraction`` values.  All operations are exact, so algebraic
identities hold bit for bit; this is the backend used for oracle-grade tests
and for rational exotic exponents.

``FloatComplex`` wraps an mpmath complex number together with the binary
precision it was computed at.  Binary operations never mix precisions
silently: the result carries (and is computed at) the max of the operand
precisions.

Mixing the two backends in one operation raises ``BackendMismatchError``;
conversion is always explicit via ``ExactComplex.to_float``.

Values are immutable and safe to share between threads.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from .errors import BackendMismatchError

EXACT = "exact"
FLOAT = "float"

DEFAULT_PREC = 128


def zero_tolerance(prec: int) -> mpmath.mpf:
    """Normalization threshold: 1e-30 at 128 bits, scaled with precision.

    Used only to decide whether a float coefficient counts as zero when
    normalizing series; never used inside arithmetic.
    """
    with mpmath.workprec(max(prec, 16)):
        return mpmath.mpf(10) ** (-30) * mpmath.mpf(2) ** (128 - prec)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot build an exact value from {type(value).__name__}")


class ExactComplex:
    """An element of Q(i), stored as exact real and imaginary Fractions."""

    __slots__ = ("re", "im")
    backend = EXACT

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("ExactComplex is immutable")

    # -- predicates ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def abs2(self) -> Fraction:
        """|self|^2, exactly."""
        return self.re * self.re + self.im * self.im

    def abs_float(self, prec: int = DEFAULT_PREC) -> mpmath.mpf:
        with mpmath.workprec(prec):
            return mpmath.sqrt(_fraction_to_mpf(self.abs2(), prec))

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, ExactComplex):
            return other
        if isinstance(other, (int, Fraction)):
            return ExactComplex(other)
        if isinstance(other, FloatComplex):
            raise BackendMismatchError(
                "cannot mix exact and float coefficients; convert explicitly")
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactComplex(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re * o.re - self.im * o.im,
                            self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("division by exact zero")
        return ExactComplex((self.re * o.re + self.im * o.im) / d,
                            (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        result = ExactComplex(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "ExactComplex":
        return ExactComplex(self.re, -self.im)

    # -- conversions --------------------------------------------------------

    def to_float(self, prec: int = DEFAULT_PREC) -> "FloatComplex":
        with mpmath.workprec(prec):
            z = mpmath.mpc(_fraction_to_mpf(self.re, prec),
                           _fraction_to_mpf(self.im, prec))
        return FloatComplex(z, prec)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    # -- comparisons / hashing ----------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExactComplex(other)
        if not isinstance(other, ExactComplex):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


def _fraction_to_mpf(fr: Fraction, prec: int) -> mpmath.mpf:
    with mpmath.workprec(prec):
        return mpmath.mpf(fr.numerator) / mpmath.mpf(fr.denominator)


class FloatComplex:
    """A complex number at a fixed binary precision.

    The stored mpmath value was rounded at ``prec`` bits; binary operations
    run at (and return) the max precision of their operands.
    """

    __slots__ = ("z", "prec")
    backend = FLOAT

    def __init__(self, value, prec: int = DEFAULT_PREC):
        with mpmath.workprec(prec):
            if isinstance(value, Fraction):
                z = mpmath.mpc(_fraction_to_mpf(value, prec))
            else:
                z = mpmath.mpc(value)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("FloatComplex is immutable")

    @classmethod
    def from_pair(cls, re, im, prec: int = DEFAULT_PREC) -> "FloatComplex":
        with mpmath.workprec(prec):
            re_m = _fraction_to_mpf(re, prec) if isinstance(re, Fraction) else mpmath.mpf(re)
            im_m = _fraction_to_mpf(im, prec) if isinstance(im, Fraction) else mpmath.mpf(im)
            return cls(mpmath.mpc(re_m, im_m), prec)

    @property
    def is_zero(self) -> bool:
        return self.z == 0

    def is_negligible(self, prec: int | None = None) -> bool:
        return abs(self.z) <= zero_tolerance(prec if prec is not None else self.prec)

    def abs(self) -> mpmath.mpf:
        with mpmath.workprec(self.prec):
            return mpmath.fabs(self.z)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, FloatComplex):
            return other
        if isinstance(other, (int, float, Fraction, mpmath.mpf, mpmath.mpc)):
            return FloatComplex(other, self.prec)
        if isinstance(other, ExactComplex):
            raise BackendMismatchError(
                "cannot mix exact and float coefficients; convert explicitly")
        return None

    def _binary(self, other, op):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        prec = max(self.prec, o.prec)
        with mpmath.workprec(prec):
            return FloatComplex(op(self.z, o.z), prec)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: b / a)

    def __neg__(self):
        return FloatComplex(-self.z, self.prec)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        with mpmath.workprec(self.prec):
            return FloatComplex(self.z ** n, self.prec)

    def conj(self) -> "FloatComplex":
        return FloatComplex(mpmath.conj(self.z), self.prec)

    def to_complex(self) -> complex:
        return complex(self.z)

    def __eq__(self, other):
        if isinstance(other, (int, float, Fraction)):
            other = FloatComplex(other, self.prec)
        if not isinstance(other, FloatComplex):
            return NotImplemented
        return self.z == other.z

    def __hash__(self):
        return hash((str(self.z), self.prec))

    def __repr__(self):
        return f"FloatComplex({self.z}, prec={self.prec})"


# -- backend-generic constructors -------------------------------------------

def make_scalar(re, im=0, backend: str = EXACT, prec: int = DEFAULT_PREC):
    """Build a scalar of the requested backend from rational data."""
    if backend == EXACT:
        return ExactComplex(re, im)
    if backend == FLOAT:
        return FloatComplex.from_pair(re, im, prec)
    raise ValueError(f"unknown backend {backend!r}")


def zero(backend: str, prec: int = DEFAULT_PREC):
    return make_scalar(0, 0, backend, prec)


def one(backend: str, prec: int = DEFAULT_PREC):
    return make_scalar(1, 0, backend, prec)


def imag_unit(backend: str, prec: int = DEFAULT_PREC):
    return make_scalar(0, 1, backend, prec)


def is_negligible(value, prec: int = DEFAULT_PREC) -> bool:
    """Zero test used for normalization: exact test or tolerance test."""
    if isinstance(value, ExactComplex):
        return value.is_zero
    if isinstance(value, FloatComplex):
        return value.is_negligible()
    raise TypeError(f"not a scalar: {type(value).__name__}")


def abs_upper(value, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """An upper bound for |value| (a few ulps above the true modulus)."""
    if isinstance(value, ExactComplex):
        with mpmath.workprec(prec + 16):
            a = mpmath.sqrt(_fraction_to_mpf(value.abs2(), prec + 16))
        return _nudge_up(a, prec)
    return _nudge_up(value.abs(), prec)


def abs_lower(value, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """A lower bound for |value| (a few ulps below the true modulus)."""
    if isinstance(value, ExactComplex):
        with mpmath.workprec(prec + 16):
            a = mpmath.sqrt(_fraction_to_mpf(value.abs2(), prec + 16))
        return _nudge_down(a, prec)
    return _nudge_down(value.abs(), prec)


def _nudge_up(x: mpmath.mpf, prec: int) -> mpmath.mpf:
    with mpmath.workprec(prec):
        return x * (mpmath.mpf(1) + mpmath.mpf(2) ** (-(prec - 16)))


def _nudge_down(x: mpmath.mpf, prec: int) -> mpmath.mpf:
    with mpmath.workprec(prec):
        return x * (mpmath.mpf(1) - mpmath.mpf(2) ** (-(prec - 16)))
