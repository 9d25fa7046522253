"""Grade-by-grade solver for the reduced equation.

The reduced equation reads, grade by grade in x,

    L(k + m + i*eta* t d/dt) c_k(t)
        = sum_{s,i} h_{s,i} t^{s+1} (k + m + i*eta* t d/dt)^i c_k(t)
          + t^{-r} [x^k] ( x * M(t, x, jets of psi) ),

where L is the indicial polynomial built from the constant terms A_i(0) and
h_{s,i} = -[t^{s+1}] A_i(t).  The right-hand side only involves grades below
k; within grade k the h-terms raise the t-exponent by at least one, so the
coefficients c_{k,l} come out of a strictly triangular recursion: l runs
upward from the pole slot and each step divides by L(k+m+i*eta*j) with
j = l - k*r.  Those divisor values are nonzero exactly when the shift m was
chosen admissibly; the solver asserts this at runtime and names the failing
(k, j) otherwise.

Pole slots are fixed at nu_k = k*r; coefficients that happen to vanish keep
their slot so that dominance checks stay aligned with the majorant
recursion.  Should a right-hand side ever need a deeper pole (it cannot, for
a t-pole-free M), the solver widens the slot and records the deviation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import scalars
from .errors import LatticeViolationError, TruncationError
from .exotic import ExoticSeries
from .laurent import LaurentSeries
from .majorant import split_lhs
from .reduction import ReducedEquation, indicial_value


@dataclass
class SolveReport:
    """Bookkeeping from a solver run."""

    K: int
    L: int
    pole_deviations: list = field(default_factory=list)  # (k, expected, actual)


def h_table(eq: ReducedEquation) -> dict:
    """h_{s,i} = -[t^{s+1}] A_i(t), for every retained s >= 0."""
    return split_lhs(eq)[1]


def _require_depth(eq: ReducedEquation, K: int, L: int):
    for i, a in enumerate(eq.A):
        if a.trunc_order is not None and a.trunc_order < L:
            raise TruncationError(
                f"A_{i} is known only to t^{a.trunc_order}; solving to "
                f"t-depth {L} would be silently lossy")
    x_cap = eq.meta.get("x_cap")
    if x_cap is not None and x_cap < K - 1:
        raise TruncationError(
            f"M is known only to x^{x_cap}; solving to grade {K} would be "
            "silently lossy")
    t_cap = eq.meta.get("t_cap")
    if t_cap is not None and t_cap < L:
        raise TruncationError(
            f"M is known only to t^{t_cap}; solving to t-depth {L} would be "
            "silently lossy")


def _m_groups(eq: ReducedEquation):
    """M regrouped as (p, Q) -> Laurent series in t."""
    groups: dict = {}
    for exps, c in eq.M.terms.items():
        s, p, q = exps[0], exps[1], exps[2:]
        groups.setdefault((p, q), {})[s] = c
    t_cap = eq.meta.get("t_cap")
    return {key: LaurentSeries.from_dict(d, eq.backend, eq.prec, t_cap)
            for key, d in groups.items()}


def _product_grade(jets: list[dict], q: tuple[int, ...], target: int,
                   backend: str, prec: int) -> LaurentSeries | None:
    """Grade ``target`` of prod_i ((delta+m)^i psi)^(q_i) over known grades."""
    factors = []
    for i, qi in enumerate(q):
        factors.extend([i] * qi)
    state = {0: LaurentSeries.constant(scalars.one(backend, prec), prec=prec)}
    for f in factors:
        new: dict[int, LaurentSeries] = {}
        for g0, acc in state.items():
            for k, lau in jets[f].items():
                g = g0 + k
                if g > target:
                    continue
                prod = acc.mul(lau)
                new[g] = new[g].add(prod) if g in new else prod
        state = new
        if not state:
            return None
    return state.get(target)


def solve_coefficients(eq: ReducedEquation, K: int, L: int,
                       report: SolveReport | None = None) -> ExoticSeries:
    """The unique formal solution psi = sum_{k>=1} c_k(t) x^k, truncated.

    Grade k is a Laurent series with pole slot k*r and coefficient indices
    l = 0..L; the result is deterministic.
    """
    if K < 1 or L < 1:
        raise ValueError("K and L must be at least 1")
    _require_depth(eq, K, L)
    backend, prec, eta, m, r = eq.backend, eq.prec, eq.eta, eq.m, eq.r
    n = eq.order
    htab = h_table(eq)
    groups = _m_groups(eq)
    probe = ExoticSeries.zero(eta, None, backend, prec)

    def euler(k: int, j: int):
        return probe.euler_factor(k, j, m)

    grades: dict[int, LaurentSeries] = {}
    jets: list[dict] = [{} for _ in range(n + 1)]

    for k in range(1, K + 1):
        nu = k * r
        rhs = LaurentSeries.zero(backend, prec, None)
        for (p, q), lau in groups.items():
            target = k - 1 - p
            if target < 0:
                continue
            prod = _product_grade(jets, q, target, backend, prec)
            if prod is None or prod.is_structural_zero:
                continue
            rhs = rhs.add(lau.mul(prod))
        rhs = rhs.shift(-r)
        if rhs.trunc_order is not None and rhs.trunc_order < L - nu:
            raise TruncationError(
                f"grade {k} right-hand side certified only to t^{rhs.trunc_order}; "
                f"t-depth {L - nu} was requested")

        low = rhs.ord0
        if low is not None and low < -nu:
            if report is not None:
                report.pole_deviations.append((k, nu, -low))
            nu = -low

        coeffs = []
        for ell in range(0, L + 1):
            j = ell - nu
            diag = indicial_value(eq.Lcoeffs, euler(k, j))
            if scalars.is_negligible(diag, prec):
                raise LatticeViolationError(
                    f"indicial value vanishes at grade k={k}, exponent j={j}",
                    k=k, j=j)
            val = rhs.coefficient(j, strict=False)
            acc = val
            for (s, i), h in htab.items():
                lprev = ell - 1 - s
                if lprev < 0:
                    continue
                c_prev = coeffs[lprev]
                if isinstance(c_prev, scalars.ExactComplex) and c_prev.is_zero:
                    continue
                acc = acc + h * (euler(k, j - 1 - s) ** i) * c_prev
            coeffs.append(acc / diag)
        grades[k] = LaurentSeries(coeffs, -nu, L - nu, backend, prec)

        for i in range(n + 1):
            jets[i][k] = grades[k].map_coeffs(
                lambda e, c, _k=k: c * (euler(_k, e) ** i))

    return ExoticSeries(grades, eta, K, backend, prec)


def apply_reduced_lhs(eq: ReducedEquation, u: ExoticSeries) -> ExoticSeries:
    """t^r * sum_i A_i(t) (delta+m)^i u, for residual checks."""
    acc = ExoticSeries.zero(eq.eta, u.trunc_k, eq.backend, eq.prec)
    for i, a in enumerate(eq.A):
        if not a.coeffs:
            continue
        acc = acc.add(u.shifted_euler_pow(i, eq.m).laurent_mul(a))
    return acc.t_shift(eq.r)


def rhs_series(eq: ReducedEquation, u: ExoticSeries) -> ExoticSeries:
    """t^(r+1) H(t, jets of u) + x M(t, x, jets of u)."""
    n = eq.order
    htab = h_table(eq)
    jets = [u.shifted_euler_pow(i, eq.m) for i in range(n + 1)]
    acc = ExoticSeries.zero(eq.eta, u.trunc_k, eq.backend, eq.prec)
    h_by_i: dict[int, dict[int, object]] = {}
    for (s, i), h in htab.items():
        h_by_i.setdefault(i, {})[s] = h
    for i, terms in h_by_i.items():
        hi = LaurentSeries.from_dict(terms, eq.backend, eq.prec)
        acc = acc.add(jets[i].laurent_mul(hi).t_shift(eq.r + 1))
    one_ = LaurentSeries.constant(scalars.one(eq.backend, eq.prec), prec=eq.prec)
    for (p, q), lau in _m_groups(eq).items():
        piece = ExoticSeries.x_monomial(p + 1, lau, eq.eta) if lau.coeffs else None
        if piece is None:
            continue
        for i, qi in enumerate(q):
            for _ in range(qi):
                piece = piece.mul(jets[i])
        acc = acc.add(piece)
    return acc
