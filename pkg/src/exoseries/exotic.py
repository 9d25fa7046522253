"""Exotic series: x-graded series whose grade-k coefficient is a Laurent
series in t = x^(i*eta), together with the Euler operator delta = x d/dx.

On the monomial t^j x^k the Euler operator acts as multiplication by
(k + i*eta*j), so grade k transforms by the first-order Fuchsian operator
k + i*eta*t d/dt.  ``shifted_euler_pow`` applies (delta + m)^q grade-wise,
which is all the reduced equation ever needs.

Grades are stored sparsely: an absent grade k <= trunc_k is exactly zero,
grades above ``trunc_k`` are unknown (``trunc_k = None`` means the series is
exact).  The x-truncation of a product follows the same min rule as Laurent
truncation, using the lowest possibly-nonzero grade of each factor.

Instances are immutable; grade-wise operations are independent per grade.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import scalars
from .errors import BackendMismatchError, ConfigurationError, TruncationError
from .laurent import LaurentSeries, _min_trunc
from .scalars import DEFAULT_PREC, EXACT


class ExoticSeries:
    __slots__ = ("backend", "prec", "eta", "grades", "trunc_k")

    def __init__(self, grades: dict[int, LaurentSeries], eta,
                 trunc_k: int | None = None, backend: str = EXACT,
                 prec: int = DEFAULT_PREC):
        if eta == 0:
            raise ConfigurationError("the exotic exponent eta must be nonzero")
        cleaned = {}
        for k, series in grades.items():
            if k < 0:
                raise ValueError("grades start at x^0")
            if trunc_k is not None and k > trunc_k:
                continue
            if series.backend != backend:
                raise BackendMismatchError("grade backend mismatch")
            if series.is_structural_zero:
                continue
            cleaned[k] = series
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "grades", cleaned)
        object.__setattr__(self, "trunc_k", trunc_k)

    def __setattr__(self, name, value):
        raise AttributeError("ExoticSeries is immutable")

    # -- constructors -----------------------------------------------------------

    @classmethod
    def zero(cls, eta, trunc_k: int | None = None, backend: str = EXACT,
             prec: int = DEFAULT_PREC) -> "ExoticSeries":
        return cls({}, eta, trunc_k, backend, prec)

    @classmethod
    def constant(cls, value, eta, trunc_k: int | None = None,
                 prec: int = DEFAULT_PREC) -> "ExoticSeries":
        return cls({0: LaurentSeries.constant(value, prec=prec)}, eta,
                   trunc_k, value.backend, prec)

    @classmethod
    def x_monomial(cls, k: int, series: LaurentSeries, eta,
                   trunc_k: int | None = None) -> "ExoticSeries":
        return cls({k: series}, eta, trunc_k, series.backend, series.prec)

    # -- structure --------------------------------------------------------------

    def grade(self, k: int, strict: bool = True) -> LaurentSeries:
        if self.trunc_k is not None and k > self.trunc_k:
            if strict:
                raise TruncationError(
                    f"grade x^{k} not retained (truncation order {self.trunc_k})")
            return LaurentSeries.zero(self.backend, self.prec)
        if k in self.grades:
            return self.grades[k]
        return LaurentSeries.zero(self.backend, self.prec)

    @property
    def is_zero(self) -> bool:
        return all(g.is_zero for g in self.grades.values())

    @property
    def ord_x(self) -> int | None:
        """Lowest grade with a nonzero retained coefficient, or None."""
        ks = sorted(k for k, g in self.grades.items() if not g.is_zero)
        return ks[0] if ks else None

    @property
    def ord_x_lower_bound(self) -> int | None:
        o = self.ord_x
        if o is not None:
            return o
        if self.trunc_k is not None:
            return self.trunc_k + 1
        return None

    def first_nonzero_grade(self) -> int | None:
        return self.ord_x

    def _check_compat(self, other: "ExoticSeries"):
        if self.backend != other.backend:
            raise BackendMismatchError("cannot combine exact and float series")
        if self.eta != other.eta:
            raise ConfigurationError(
                f"exotic exponent mismatch: {self.eta} vs {other.eta}")

    # -- ring operations ----------------------------------------------------------

    def add(self, other: "ExoticSeries") -> "ExoticSeries":
        self._check_compat(other)
        t = _min_trunc(self.trunc_k, other.trunc_k)
        out: dict[int, LaurentSeries] = {}
        for k in set(self.grades) | set(other.grades):
            if t is not None and k > t:
                continue
            out[k] = self.grade(k, strict=False).add(other.grade(k, strict=False))
        return ExoticSeries(out, self.eta, t, self.backend,
                            max(self.prec, other.prec))

    def sub(self, other: "ExoticSeries") -> "ExoticSeries":
        return self.add(other.neg())

    def neg(self) -> "ExoticSeries":
        return ExoticSeries({k: g.neg() for k, g in self.grades.items()},
                            self.eta, self.trunc_k, self.backend, self.prec)

    def scalar_mul(self, s) -> "ExoticSeries":
        return ExoticSeries({k: g.scalar_mul(s) for k, g in self.grades.items()},
                            self.eta, self.trunc_k, self.backend, self.prec)

    def laurent_mul(self, series: LaurentSeries) -> "ExoticSeries":
        """Multiply every grade by a fixed Laurent series in t."""
        return ExoticSeries({k: g.mul(series) for k, g in self.grades.items()},
                            self.eta, self.trunc_k, self.backend, self.prec)

    def mul(self, other: "ExoticSeries") -> "ExoticSeries":
        self._check_compat(other)
        prec = max(self.prec, other.prec)
        arms = []
        if self.trunc_k is not None:
            lb = other.ord_x_lower_bound
            if lb is not None:
                arms.append(self.trunc_k + lb)
        if other.trunc_k is not None:
            lb = self.ord_x_lower_bound
            if lb is not None:
                arms.append(other.trunc_k + lb)
        if (self.trunc_k is not None and other.trunc_k is not None and not arms):
            arms.append(self.trunc_k + other.trunc_k + 1)
        t = min(arms) if arms else None
        out: dict[int, LaurentSeries] = {}
        for ka, ga in self.grades.items():
            for kb, gb in other.grades.items():
                k = ka + kb
                if t is not None and k > t:
                    continue
                prod = ga.mul(gb)
                out[k] = out[k].add(prod) if k in out else prod
        return ExoticSeries(out, self.eta, t, self.backend, prec)

    def pow(self, n: int) -> "ExoticSeries":
        if n < 0:
            raise ValueError("negative powers of exotic series are not defined")
        result = ExoticSeries.constant(scalars.one(self.backend, self.prec),
                                       self.eta, None, self.prec)
        base = self
        while n:
            if n & 1:
                result = result.mul(base)
            base = base.mul(base) if n > 1 else base
            n >>= 1
        return result

    # -- the Euler operator ----------------------------------------------------------

    def euler_factor(self, k: int, j: int, m: int = 0):
        """The scalar k + m + i*eta*j of the matching backend."""
        if self.backend == EXACT:
            return scalars.ExactComplex(Fraction(k + m), Fraction(self.eta) * j)
        return scalars.FloatComplex.from_pair(
            Fraction(k + m) if isinstance(self.eta, Fraction) else k + m,
            Fraction(self.eta) * j if isinstance(self.eta, Fraction)
            else self.eta * j,
            self.prec)

    def delta(self) -> "ExoticSeries":
        """Apply x d/dx: grade k maps by (k + i*eta*t d/dt)."""
        return self.shifted_euler_pow(1, 0)

    def shifted_euler_pow(self, q: int, m: int) -> "ExoticSeries":
        """Apply (delta + m)^q grade-wise; exponent slots are unchanged."""
        if q == 0:
            return self
        out = {}
        for k, g in self.grades.items():
            out[k] = g.map_coeffs(
                lambda e, c, _k=k: c * (self.euler_factor(_k, e, m) ** q))
        return ExoticSeries(out, self.eta, self.trunc_k, self.backend, self.prec)

    # -- reshaping -----------------------------------------------------------------

    def t_shift(self, d: int) -> "ExoticSeries":
        """Multiply every grade by t**d."""
        return ExoticSeries({k: g.shift(d) for k, g in self.grades.items()},
                            self.eta, self.trunc_k, self.backend, self.prec)

    def shift_x(self, d: int) -> "ExoticSeries":
        """Multiply by x**d; for d < 0 the low grades must vanish."""
        if d < 0:
            for k, g in self.grades.items():
                if k < -d and not g.is_zero:
                    raise ValueError(
                        f"cannot divide by x^{-d}: grade x^{k} is nonzero")
        out = {k + d: g for k, g in self.grades.items() if k + d >= 0}
        t = None if self.trunc_k is None else self.trunc_k + d
        return ExoticSeries(out, self.eta, t, self.backend, self.prec)

    def truncate_k(self, trunc_k: int | None) -> "ExoticSeries":
        t = _min_trunc(self.trunc_k, trunc_k)
        if t == self.trunc_k:
            return self
        return ExoticSeries({k: g for k, g in self.grades.items() if k <= t},
                            self.eta, t, self.backend, self.prec)

    def truncate_grades(self, trunc_order: int | None) -> "ExoticSeries":
        return ExoticSeries({k: g.truncate(trunc_order)
                             for k, g in self.grades.items()},
                            self.eta, self.trunc_k, self.backend, self.prec)

    def normalized_grades(self) -> "ExoticSeries":
        out = {k: g.normalize() for k, g in self.grades.items()}
        out = {k: g for k, g in out.items() if not g.is_structural_zero}
        return ExoticSeries(out, self.eta, self.trunc_k, self.backend, self.prec)

    def same_series(self, other: "ExoticSeries") -> bool:
        ka = {k for k, g in self.grades.items() if not g.is_zero}
        kb = {k for k, g in other.grades.items() if not g.is_zero}
        if ka != kb:
            return False
        return all(self.grades[k].same_series(other.grades[k]) for k in ka)

    def __repr__(self):
        if not self.grades:
            return f"ExoticSeries(0; eta={self.eta})"
        parts = [f"({self.grades[k]!r})*x^{k}" for k in sorted(self.grades)]
        return " + ".join(parts)

    __add__ = add
    __sub__ = sub
    __mul__ = mul
    __neg__ = neg


@dataclass(frozen=True)
class JetTuple:
    """The tuple (u, delta u, ..., delta^n u) of a series u."""

    components: tuple[ExoticSeries, ...]

    @property
    def order(self) -> int:
        return len(self.components) - 1

    def __getitem__(self, j: int) -> ExoticSeries:
        return self.components[j]


def make_jet(phi: ExoticSeries, n: int) -> JetTuple:
    """Build (phi, delta phi, ..., delta^n phi)."""
    if n < 1:
        raise ValueError("a jet needs order n >= 1")
    comps = [phi]
    for _ in range(n):
        comps.append(comps[-1].delta())
    return JetTuple(tuple(comps))
