"""Truncated multivariate power series with scalar coefficients.

Terms are a sparse map from exponent tuples to scalars.  The variable list
is ordered; t-type variables may carry negative exponents (raw expansions of
a meromorphic substitution), everything else is a plain power series
variable.  ``total_degree_bound`` caps the total degree over the *graded*
variable subset (by default all variables); terms beyond the bound are
dropped on construction and by every operation.
"""

from __future__ import annotations

from typing import Iterable

from . import scalars
from .errors import BackendMismatchError
from .scalars import DEFAULT_PREC, EXACT, is_negligible


class MultiSeries:
    __slots__ = ("variables", "terms", "total_degree_bound", "graded",
                 "backend", "prec")

    def __init__(self, variables: Iterable[str], terms: dict,
                 total_degree_bound: int | None = None,
                 graded: tuple[int, ...] | None = None,
                 backend: str = EXACT, prec: int = DEFAULT_PREC):
        variables = tuple(variables)
        if graded is None:
            graded = tuple(range(len(variables)))
        kept = {}
        for exps, coeff in terms.items():
            exps = tuple(exps)
            if len(exps) != len(variables):
                raise ValueError("exponent tuple length mismatch")
            if coeff.backend != backend:
                raise BackendMismatchError("coefficient backend mismatch")
            if is_negligible(coeff, prec):
                continue
            if (total_degree_bound is not None
                    and sum(exps[i] for i in graded) > total_degree_bound):
                continue
            kept[exps] = coeff
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "terms", kept)
        object.__setattr__(self, "total_degree_bound", total_degree_bound)
        object.__setattr__(self, "graded", graded)
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("MultiSeries is immutable")

    @classmethod
    def zero(cls, variables, total_degree_bound=None, graded=None,
             backend=EXACT, prec=DEFAULT_PREC):
        return cls(variables, {}, total_degree_bound, graded, backend, prec)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exps: tuple[int, ...]):
        return self.terms.get(tuple(exps), scalars.zero(self.backend, self.prec))

    def _check(self, other: "MultiSeries"):
        if self.variables != other.variables:
            raise ValueError("variable lists differ")
        if self.backend != other.backend:
            raise BackendMismatchError("backend mismatch")

    def _bound(self, other: "MultiSeries"):
        a, b = self.total_degree_bound, other.total_degree_bound
        if a is None:
            return b
        if b is None:
            return a
        return min(a, b)

    def add(self, other: "MultiSeries") -> "MultiSeries":
        self._check(other)
        out = dict(self.terms)
        for exps, c in other.terms.items():
            out[exps] = out[exps] + c if exps in out else c
        return MultiSeries(self.variables, out, self._bound(other), self.graded,
                           self.backend, max(self.prec, other.prec))

    def sub(self, other: "MultiSeries") -> "MultiSeries":
        return self.add(other.neg())

    def neg(self) -> "MultiSeries":
        return MultiSeries(self.variables, {e: -c for e, c in self.terms.items()},
                           self.total_degree_bound, self.graded, self.backend,
                           self.prec)

    def scalar_mul(self, s) -> "MultiSeries":
        return MultiSeries(self.variables,
                           {e: c * s for e, c in self.terms.items()},
                           self.total_degree_bound, self.graded, self.backend,
                           self.prec)

    def mul(self, other: "MultiSeries") -> "MultiSeries":
        self._check(other)
        bound = self._bound(other)
        out: dict = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if (bound is not None
                        and sum(e[i] for i in self.graded) > bound):
                    continue
                prod = ca * cb
                out[e] = out[e] + prod if e in out else prod
        return MultiSeries(self.variables, out, bound, self.graded,
                           self.backend, max(self.prec, other.prec))

    def max_abs(self, prec: int = DEFAULT_PREC):
        import mpmath
        best = mpmath.mpf(0)
        for c in self.terms.values():
            a = scalars.abs_upper(c, prec)
            if a > best:
                best = a
        return best

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def __repr__(self):
        if not self.terms:
            return "MultiSeries(0)"
        bits = []
        for exps, c in self.sorted_terms():
            mono = "*".join(f"{v}^{e}" for v, e in zip(self.variables, exps) if e)
            bits.append(f"{c!r}*{mono}" if mono else f"{c!r}")
        return " + ".join(bits)

    __add__ = add
    __sub__ = sub
    __mul__ = mul
    __neg__ = neg
