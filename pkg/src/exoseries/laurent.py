"""Truncated Laurent series in one variable t, with pole-order bookkeeping.

A series is a window of coefficients for consecutive exponents
``lo, lo+1, ..., hi``.  ``trunc_order`` is the highest exponent whose
coefficient is known; ``trunc_order = None`` means the series is *exact*:
every coefficient outside the stored window is exactly zero.  For finite
``trunc_order`` the stored window always extends up to it, so
``len(coeffs) == trunc_order + pole_order + 1`` for a nonzero series.

``pole_order`` is ``-lo``; it may be negative (a series vanishing at the
origin, such as plain ``t``).  A series is *normalized* when its leading
stored coefficient is nonzero (exact mode) or above the precision-scaled
zero tolerance (float mode).  Solver code may construct non-normalized
series on purpose to keep coefficient slots aligned with a recursion.

Truncation propagates tightly: sums truncate at the min of the operand
orders, products at ``min(a.trunc + b.ord0, b.trunc + a.ord0)``.

Instances are immutable; all operations return new series.
"""

from __future__ import annotations

from typing import Callable, Iterable

from . import scalars
from .errors import (BackendMismatchError, SingularSeriesError,
                     TruncationError)
from .scalars import DEFAULT_PREC, EXACT, is_negligible, make_scalar


def _min_trunc(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class LaurentSeries:
    __slots__ = ("backend", "prec", "lo", "coeffs", "trunc_order")

    def __init__(self, coeffs: Iterable, lo: int, trunc_order: int | None = None,
                 backend: str = EXACT, prec: int = DEFAULT_PREC):
        coeffs = tuple(coeffs)
        if trunc_order is not None and coeffs:
            expected = trunc_order - lo + 1
            if len(coeffs) != expected:
                raise ValueError(
                    f"window [{lo}, {trunc_order}] needs {expected} coefficients, "
                    f"got {len(coeffs)}")
        for c in coeffs:
            if c.backend != backend:
                raise BackendMismatchError(
                    f"coefficient backend {c.backend} != series backend {backend}")
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "trunc_order", trunc_order)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentSeries is immutable")

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, backend: str = EXACT, prec: int = DEFAULT_PREC,
             trunc_order: int | None = None) -> "LaurentSeries":
        return cls((), 0, trunc_order, backend, prec)

    @classmethod
    def constant(cls, value, trunc_order: int | None = None,
                 prec: int = DEFAULT_PREC) -> "LaurentSeries":
        if scalars.is_negligible(value):
            return cls.zero(value.backend, prec, trunc_order)
        return cls((value,), 0, 0 if trunc_order == 0 else None, value.backend,
                   prec).truncate(trunc_order)

    @classmethod
    def monomial(cls, value, exponent: int, trunc_order: int | None = None,
                 prec: int = DEFAULT_PREC) -> "LaurentSeries":
        if scalars.is_negligible(value):
            return cls.zero(value.backend, prec, trunc_order)
        s = cls((value,), exponent, None, value.backend, prec)
        return s.truncate(trunc_order)

    @classmethod
    def from_dict(cls, terms: dict, backend: str = EXACT,
                  prec: int = DEFAULT_PREC,
                  trunc_order: int | None = None) -> "LaurentSeries":
        """Build from {exponent: scalar}; missing exponents are zero."""
        keep = {e: c for e, c in terms.items()
                if trunc_order is None or e <= trunc_order}
        if not keep:
            return cls.zero(backend, prec, trunc_order)
        lo = min(keep)
        hi = trunc_order if trunc_order is not None else max(keep)
        z = scalars.zero(backend, prec)
        coeffs = tuple(keep.get(e, z) for e in range(lo, hi + 1))
        return cls(coeffs, lo, trunc_order, backend, prec).normalize()

    # -- structure ------------------------------------------------------------

    @property
    def pole_order(self) -> int:
        """-lo for a nonzero window; 0 for an empty (zero) series."""
        return -self.lo if self.coeffs else 0

    @property
    def is_structural_zero(self) -> bool:
        return not self.coeffs and self.trunc_order is None

    @property
    def is_zero(self) -> bool:
        """True when every retained coefficient is (tolerance-)zero."""
        return all(is_negligible(c, self.prec) for c in self.coeffs)

    @property
    def ord0(self) -> int | None:
        """Exponent of the first nonzero retained coefficient, or None."""
        for idx, c in enumerate(self.coeffs):
            if not is_negligible(c, self.prec):
                return self.lo + idx
        return None

    @property
    def ord0_lower_bound(self) -> int | None:
        """First exponent at which the series may be nonzero (None = +inf)."""
        o = self.ord0
        if o is not None:
            return o
        if self.trunc_order is not None:
            return self.trunc_order + 1
        return None

    @property
    def normalized(self) -> bool:
        if not self.coeffs:
            return True
        return not is_negligible(self.coeffs[0], self.prec)

    def coefficient(self, exponent: int, strict: bool = True):
        """The coefficient of t**exponent.

        Exponents above a finite trunc_order are unknown; with ``strict``
        that raises TruncationError instead of silently returning zero.
        """
        if self.trunc_order is not None and exponent > self.trunc_order:
            if strict:
                raise TruncationError(
                    f"coefficient of t^{exponent} not retained "
                    f"(truncation order {self.trunc_order})")
            return scalars.zero(self.backend, self.prec)
        idx = exponent - self.lo
        if not self.coeffs or idx < 0 or idx >= len(self.coeffs):
            return scalars.zero(self.backend, self.prec)
        return self.coeffs[idx]

    def support(self):
        """Pairs (exponent, coefficient) for nonzero retained coefficients."""
        for idx, c in enumerate(self.coeffs):
            if not is_negligible(c, self.prec):
                yield self.lo + idx, c

    def max_abs(self, prec: int = DEFAULT_PREC):
        best = None
        for _, c in self.support():
            a = scalars.abs_upper(c, prec)
            if best is None or a > best:
                best = a
        import mpmath
        return best if best is not None else mpmath.mpf(0)

    # -- normalization / reshaping --------------------------------------------

    def normalize(self) -> "LaurentSeries":
        """Strip leading (and, for exact series, trailing) negligible terms."""
        coeffs = list(self.coeffs)
        lo = self.lo
        while coeffs and is_negligible(coeffs[0], self.prec):
            coeffs.pop(0)
            lo += 1
        if self.trunc_order is None:
            while coeffs and is_negligible(coeffs[-1], self.prec):
                coeffs.pop()
        if not coeffs:
            return LaurentSeries.zero(self.backend, self.prec, self.trunc_order)
        return LaurentSeries(coeffs, lo, self.trunc_order, self.backend, self.prec)

    def truncate(self, trunc_order: int | None) -> "LaurentSeries":
        """Forget coefficients above trunc_order (tightest of both orders)."""
        t = _min_trunc(self.trunc_order, trunc_order)
        if t == self.trunc_order:
            return self
        coeffs = [c for idx, c in enumerate(self.coeffs) if self.lo + idx <= t]
        if not coeffs:
            return LaurentSeries.zero(self.backend, self.prec, t)
        pad = t - (self.lo + len(coeffs) - 1)
        z = scalars.zero(self.backend, self.prec)
        coeffs.extend([z] * pad)
        return LaurentSeries(coeffs, self.lo, t, self.backend, self.prec).normalize()

    def widen_window(self, lo: int) -> "LaurentSeries":
        """Explicitly pad zero slots down to exponent ``lo`` (slot alignment)."""
        if not self.coeffs or lo >= self.lo:
            if not self.coeffs and self.trunc_order is not None:
                z = scalars.zero(self.backend, self.prec)
                n = self.trunc_order - lo + 1
                if n <= 0:
                    return self
                return LaurentSeries([z] * n, lo, self.trunc_order,
                                     self.backend, self.prec)
            return self
        z = scalars.zero(self.backend, self.prec)
        coeffs = [z] * (self.lo - lo) + list(self.coeffs)
        return LaurentSeries(coeffs, lo, self.trunc_order, self.backend, self.prec)

    # -- ring operations --------------------------------------------------------

    def _check_compat(self, other: "LaurentSeries"):
        if self.backend != other.backend:
            raise BackendMismatchError(
                f"cannot combine {self.backend} and {other.backend} series")

    def add(self, other: "LaurentSeries") -> "LaurentSeries":
        self._check_compat(other)
        prec = max(self.prec, other.prec)
        t = _min_trunc(self.trunc_order, other.trunc_order)
        terms: dict = {}
        for src in (self, other):
            for idx, c in enumerate(src.coeffs):
                e = src.lo + idx
                if t is not None and e > t:
                    continue
                terms[e] = terms[e] + c if e in terms else c
        return LaurentSeries.from_dict(terms, self.backend, prec, t)

    def sub(self, other: "LaurentSeries") -> "LaurentSeries":
        return self.add(other.neg())

    def neg(self) -> "LaurentSeries":
        return LaurentSeries([-c for c in self.coeffs], self.lo,
                             self.trunc_order, self.backend, self.prec)

    def scalar_mul(self, s) -> "LaurentSeries":
        if s.backend != self.backend:
            raise BackendMismatchError("scalar backend mismatch")
        if scalars.is_negligible(s):
            return LaurentSeries.zero(self.backend, self.prec, self.trunc_order)
        return LaurentSeries([c * s for c in self.coeffs], self.lo,
                             self.trunc_order, self.backend, self.prec).normalize()

    def mul(self, other: "LaurentSeries") -> "LaurentSeries":
        self._check_compat(other)
        prec = max(self.prec, other.prec)
        if self.is_structural_zero or other.is_structural_zero:
            return LaurentSeries.zero(self.backend, prec, None)
        t = self._product_trunc(other)
        if not self.coeffs or not other.coeffs:
            return LaurentSeries.zero(self.backend, prec, t)
        terms: dict = {}
        for i, a in enumerate(self.coeffs):
            if isinstance(a, scalars.ExactComplex) and a.is_zero:
                continue
            ea = self.lo + i
            for j, b in enumerate(other.coeffs):
                e = ea + other.lo + j
                if t is not None and e > t:
                    break
                prod = a * b
                terms[e] = terms[e] + prod if e in terms else prod
        return LaurentSeries.from_dict(terms, self.backend, prec, t)

    def _product_trunc(self, other: "LaurentSeries") -> int | None:
        arms = []
        if self.trunc_order is not None:
            lb = other.ord0_lower_bound
            if lb is not None:
                arms.append(self.trunc_order + lb)
        if other.trunc_order is not None:
            lb = self.ord0_lower_bound
            if lb is not None:
                arms.append(other.trunc_order + lb)
        if (self.trunc_order is not None and other.trunc_order is not None
                and not arms):
            # both zero-to-truncation: the product is known zero a bit further
            arms.append(self.trunc_order + other.trunc_order + 1)
        return min(arms) if arms else None

    def theta(self) -> "LaurentSeries":
        """Apply t d/dt: the coefficient of t^j is scaled by j."""
        return self.map_coeffs(lambda e, c: c * e)

    def map_coeffs(self, fn: Callable) -> "LaurentSeries":
        """Exponent-wise rescaling c_e -> fn(e, c_e); window and order kept."""
        coeffs = [fn(self.lo + idx, c) for idx, c in enumerate(self.coeffs)]
        return LaurentSeries(coeffs, self.lo, self.trunc_order,
                             self.backend, self.prec).normalize()

    def shift(self, d: int) -> "LaurentSeries":
        """Multiply by t**d."""
        t = None if self.trunc_order is None else self.trunc_order + d
        return LaurentSeries(self.coeffs, self.lo + d, t, self.backend, self.prec)

    def invert(self, trunc_order: int | None = None) -> "LaurentSeries":
        """Multiplicative inverse, up to the shared truncation order.

        An exact non-monomial input needs an explicit target order, since its
        inverse is an infinite series.
        """
        s = self.normalize()
        if s.ord0 is None:
            raise SingularSeriesError("cannot invert a zero series")
        d = s.ord0
        lead = s.coefficient(d)
        n_nonzero = sum(1 for _ in s.support())
        if s.trunc_order is None and n_nonzero == 1:
            inv = LaurentSeries.monomial(
                scalars.one(self.backend, self.prec) / lead, -d, None, self.prec)
            return inv.truncate(trunc_order)
        if s.trunc_order is None and trunc_order is None:
            raise TruncationError(
                "inverting an exact non-monomial series requires a target "
                "truncation order")
        if trunc_order is None:
            trunc_order = s.trunc_order - 2 * d
        depth = trunc_order + d  # number of correction coefficients past -d
        if depth < 0:
            raise TruncationError("target truncation below the leading term")
        if s.trunc_order is not None and trunc_order > s.trunc_order - 2 * d:
            raise TruncationError("input truncated too shallow for requested inverse")
        one_ = scalars.one(self.backend, self.prec)
        out = {-d: one_ / lead}
        for e in range(1, depth + 1):
            acc = scalars.zero(self.backend, self.prec)
            for j in range(1, e + 1):
                a_j = s.coefficient(d + j, strict=False)
                b = out.get(-d + e - j)
                if b is None or (isinstance(a_j, scalars.ExactComplex) and a_j.is_zero):
                    continue
                acc = acc + a_j * b
            out[-d + e] = -(acc / lead)
        return LaurentSeries.from_dict(out, self.backend, self.prec, trunc_order)

    def pow(self, n: int) -> "LaurentSeries":
        if n < 0:
            raise ValueError("negative powers go through invert()")
        result = LaurentSeries.constant(scalars.one(self.backend, self.prec))
        base = self
        while n:
            if n & 1:
                result = result.mul(base)
            base = base.mul(base) if n > 1 else base
            n >>= 1
        return result

    # -- evaluation -------------------------------------------------------------

    def eval_at(self, z):
        """Sum of the retained terms at t = z (scalar of the same backend)."""
        acc = scalars.zero(self.backend, max(self.prec, getattr(z, "prec", 0)))
        if not self.coeffs:
            return acc
        neg = [(e, c) for e, c in self.support() if e < 0]
        pos = [(e, c) for e, c in self.support() if e >= 0]
        for e, c in pos:
            acc = acc + c * (z ** e)
        if neg:
            zi = scalars.one(self.backend, self.prec) / z
            for e, c in neg:
                acc = acc + c * (zi ** (-e))
        return acc

    # -- comparison ---------------------------------------------------------------

    def same_series(self, other: "LaurentSeries") -> bool:
        """Structural equality of normalized retained data."""
        a, b = self.normalize(), other.normalize()
        if a.backend != b.backend or a.lo != b.lo or len(a.coeffs) != len(b.coeffs):
            return False
        return all((x - y).is_zero if a.backend == EXACT
                   else is_negligible(x - y, max(a.prec, b.prec))
                   for x, y in zip(a.coeffs, b.coeffs))

    def __repr__(self):
        if not self.coeffs:
            tail = "" if self.trunc_order is None else f" + O(t^{self.trunc_order + 1})"
            return "0" + tail
        parts = []
        for e, c in self.support():
            if e == 0:
                parts.append(f"{c!r}")
            elif e == 1:
                parts.append(f"{c!r}*t")
            else:
                parts.append(f"{c!r}*t^{e}")
        body = " + ".join(parts) if parts else "0"
        tail = "" if self.trunc_order is None else f" + O(t^{self.trunc_order + 1})"
        return body + tail

    # operator sugar
    __add__ = add
    __sub__ = sub
    __mul__ = mul
    __neg__ = neg
