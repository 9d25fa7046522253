"""Structure checking and reduction to the quasi-linear form.

``check_hypotheses`` verifies that a candidate exotic series solves the
equation to the retained orders and that the partial-derivative series
dF/dy_i along the solution share a common leading x-order N, with the
t-order of the grade-N coefficient of dF/dy_n minimal among them.  Whether a
series that vanishes to truncation vanishes identically is not decidable
from a jet, so reports carry the orders they were certified at.

``reduce`` applies y = (partial sum up to x^m) + x^m u and rearranges
F(x, jet of y) = 0 into

    t^r * sum_i A_i(t) (delta+m)^i u  =  x * M(t, x, u_0, ..., u_n),

with A_i holomorphic at t = 0, A_n(0) != 0, and M free of t-poles.  The
exponent r is the smallest one for which both conditions hold: write beta
for the leading t-order of the grade-0 linear coefficients and mu for the
deepest t-pole among the terms moved to the right-hand side; the equation is
scaled by t^rho with rho = max(mu, -beta), which gives r = rho + beta >= 0.

``select_m`` picks the shift m so that the indicial polynomial
L(z) = sum_i A_i(0) z^i has no root of the form k + m + i*eta*j with
integers k >= 1, j: exactly the condition making every grade of the reduced
equation uniquely solvable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import scalars
from .errors import (ConfigurationError, NotASolutionError, ReductionError,
                     RootFindingError, TruncationError)
from .exotic import ExoticSeries, JetTuple, make_jet
from .expressions import (OdeExpression, expand_jet_polynomial,
                          partial_series, substitute_jet, y_degree)
from .laurent import LaurentSeries
from .multiseries import MultiSeries
from .scalars import EXACT

M_SEARCH_SPAN = 64


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the structural checks on (F, phi)."""

    n: int
    N: int | None                      # common leading x-order (None if undefined)
    ord_b: tuple                       # per-index t-order of B_i; None = +inf
    satisfied: bool
    certified_to_order: tuple          # (x-order, t-order or None)
    is_solution: bool
    offending_grade: int | None = None
    violations: tuple = ()             # (index, reason) pairs
    indeterminate: tuple = ()          # indices whose "not identically 0" is uncertified

    @property
    def violating_index(self) -> int | None:
        return self.violations[0][0] if self.violations else None


@dataclass(frozen=True)
class ReducedEquation:
    """The data (m, r, A_i, L, M) of the reduced quasi-linear equation."""

    m: int
    r: int
    A: tuple                           # n+1 holomorphic LaurentSeries
    Lcoeffs: tuple                     # A_i(0)
    M: MultiSeries                     # variables (t, x, u_0..u_n), exponents >= 0
    eta: Fraction
    order: int
    backend: str = EXACT
    prec: int = 128
    meta: dict = field(default_factory=dict)


def _grade_trunc_floor(series: ExoticSeries) -> int | None:
    t = None
    for g in series.grades.values():
        if g.trunc_order is not None:
            t = g.trunc_order if t is None else min(t, g.trunc_order)
    return t


def check_hypotheses(F: OdeExpression, phi: ExoticSeries,
                     trunc_k: int | None = None) -> HypothesisReport:
    """Check the residual and the leading structure of the dF/dy_i series."""
    n = F.order
    if n < 1:
        raise ConfigurationError("the equation must involve delta(y, j) with j >= 1")
    jet = make_jet(phi, n)
    residual = substitute_jet(F, jet, trunc_k)
    cert_k = residual.trunc_k if trunc_k is None else trunc_k
    offending = residual.first_nonzero_grade()
    is_solution = offending is None

    partials = [partial_series(F, jet, i, trunc_k) for i in range(n + 1)]
    cert_l = _grade_trunc_floor(partials[n])

    violations: list[tuple[int, str]] = []
    indeterminate: list[int] = []

    if not is_solution:
        violations.append((-1, f"residual nonzero at grade x^{offending}"))

    N = partials[n].ord_x
    if N is None:
        # dF/dy_n vanishes to every retained order
        violations.append((n, "dF/dy_n vanishes to the certified order"))
        if partials[n].trunc_k is not None:
            indeterminate.append(n)
        ord_b = tuple(None for _ in range(n + 1))
        return HypothesisReport(n, None, ord_b, False, (cert_k, cert_l),
                                is_solution, offending, tuple(violations),
                                tuple(indeterminate))

    ord_b = []
    bn_ord = partials[n].grade(N, strict=False).ord0
    for i in range(n + 1):
        oi = partials[i].ord_x
        if oi is not None and oi < N:
            violations.append((i, f"dF/dy_{i} starts at x^{oi}, below x^{N}"))
            ord_b.append(partials[i].grade(oi, strict=False).ord0)
            continue
        b_i = partials[i].grade(N, strict=False)
        o = b_i.ord0
        ord_b.append(o)
        if o is not None and bn_ord is not None and o < bn_ord:
            violations.append(
                (i, f"t-order {o} of the grade-{N} part is below {bn_ord}"))
    satisfied = not violations
    return HypothesisReport(n, N, tuple(ord_b), satisfied, (cert_k, cert_l),
                            is_solution, offending, tuple(violations),
                            tuple(indeterminate))


# ---------------------------------------------------------------------------
# Shift selection
# ---------------------------------------------------------------------------


def indicial_value(Lcoeffs, z):
    """L(z) = sum_i Lcoeffs[i] * z^i by Horner."""
    acc = None
    for c in reversed(Lcoeffs):
        acc = c if acc is None else acc * z + c
    return acc


def _roots(Lcoeffs, prec: int):
    """Roots of L as mpc values, with an error estimate."""
    coeffs = []
    for c in Lcoeffs:
        if isinstance(c, scalars.ExactComplex):
            coeffs.append(c.to_float(prec).z)
        else:
            coeffs.append(c.z)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) <= 1:
        return [], mpmath.mpf(0)
    with mpmath.workprec(prec):
        try:
            roots, err = mpmath.polyroots(list(reversed(coeffs)), error=True,
                                          maxsteps=200, extraprec=prec)
        except mpmath.libmp.NoConvergence as exc:  # pragma: no cover
            raise RootFindingError(f"root finding did not converge: {exc}")
    return roots, err


def lattice_admissible(Lcoeffs, m: int, eta, prec: int = 128,
                       backend: str = EXACT) -> bool:
    """True if no root of L has the form k + m + i*eta*j, k >= 1, j integer."""
    roots, err = _roots(Lcoeffs, prec)
    with mpmath.workprec(prec):
        tol = max(mpmath.mpf(err) * 8, mpmath.mpf(10) ** (-12))
        eta_f = (mpmath.mpf(eta.numerator) / mpmath.mpf(eta.denominator)
                 if isinstance(eta, Fraction) else mpmath.mpf(eta))
        for z in roots:
            j0 = int(mpmath.nint(mpmath.im(z) / eta_f))
            km = int(mpmath.nint(mpmath.re(z)))
            near = (abs(mpmath.im(z) - eta_f * j0) <= tol
                    and abs(mpmath.re(z) - km) <= tol)
            if not near or km - m < 1:
                continue
            if backend == EXACT and isinstance(eta, Fraction):
                candidate = scalars.ExactComplex(Fraction(km), eta * j0)
                value = indicial_value(Lcoeffs, candidate)
                if value.is_zero:
                    return False
                continue
            return False  # float mode: a near-hit is treated as a hit
    return True


def select_m(F: OdeExpression, phi: ExoticSeries, A0coeffs,
             m_min: int | None = None, prec: int = 128) -> int:
    """Smallest admissible shift m >= m_min for the indicial roots of L."""
    if m_min is None:
        jet = make_jet(phi, F.order)
        N = partial_series(F, jet, F.order).ord_x
        if N is None:
            raise ReductionError("dF/dy_n vanishes; no reduction exists")
        m_min = N + 1
    backend = phi.backend
    for m in range(m_min, m_min + M_SEARCH_SPAN + 1):
        if lattice_admissible(A0coeffs, m, phi.eta, prec, backend):
            return m
    raise ReductionError(
        f"no admissible shift in [{m_min}, {m_min + M_SEARCH_SPAN}]")


def leading_lcoeffs(F: OdeExpression, phi: ExoticSeries):
    """Candidate values A_i(0) read off the grade-N linear coefficients."""
    n = F.order
    jet = make_jet(phi, n)
    partials = [partial_series(F, jet, i) for i in range(n + 1)]
    N = partials[n].ord_x
    if N is None:
        raise ReductionError("dF/dy_n vanishes; no reduction exists")
    bs = [p.grade(N, strict=False) for p in partials]
    beta = min(b.ord0 for b in bs if b.ord0 is not None)
    return tuple(b.coefficient(beta, strict=False) for b in bs)


# ---------------------------------------------------------------------------
# The reduction itself
# ---------------------------------------------------------------------------


def partial_sum(phi: ExoticSeries, m: int) -> ExoticSeries:
    """The polynomial sum of the grades k <= m (exact in x)."""
    if phi.trunc_k is not None and phi.trunc_k < m:
        raise TruncationError(
            f"partial sum to x^{m} needs grades the input lacks "
            f"(truncated at x^{phi.trunc_k})")
    grades = {k: g for k, g in phi.grades.items() if k <= m}
    return ExoticSeries(grades, phi.eta, None, phi.backend, phi.prec)


def reduce_equation(F: OdeExpression, phi: ExoticSeries, m: int,
                    degree_bound: int | None = None) -> ReducedEquation:
    """Carry out the change of unknown and assemble the reduced equation."""
    n = F.order
    if n < 1:
        raise ConfigurationError("the equation must have order n >= 1")
    jet = make_jet(phi, n)
    S_n = partial_series(F, jet, n)
    N = S_n.ord_x
    if N is None:
        raise ReductionError("dF/dy_n vanishes along phi; nothing to reduce")
    if m < N + 1:
        raise ReductionError(f"shift m={m} below the minimal usable value {N + 1}")

    P = partial_sum(phi, m)
    center = make_jet(P, n)
    poly = expand_jet_polynomial(F, center, m, degree_bound)
    nvars = n + 1
    q_zero = (0,) * nvars

    # the partial sum must solve the equation through x^(N+m)
    e0 = poly.terms.get(q_zero)
    if e0 is not None:
        if e0.trunc_k is not None and e0.trunc_k < N + m:
            raise TruncationError(
                "inputs cannot certify the residual through the shift order")
        bad = e0.first_nonzero_grade()
        if bad is not None and bad <= N + m:
            raise NotASolutionError(
                f"partial sum residual nonzero at grade x^{bad}", grade=bad)

    shifted = {}
    for q, s in poly.terms.items():
        try:
            shifted[q] = s.shift_x(-(N + m))
        except ValueError as exc:
            raise ReductionError(
                f"term u^{q} has x-order below x^{N + m}: {exc}") from exc

    unit = lambda i: tuple(1 if idx == i else 0 for idx in range(nvars))
    B = []
    for i in range(nvars):
        s = shifted.get(unit(i))
        B.append(s.grade(0, strict=False) if s is not None
                 else LaurentSeries.zero(phi.backend, phi.prec))
    if B[n].ord0 is None:
        raise ReductionError("grade-0 linear coefficient of u_n vanishes")
    finite_orders = [b.ord0 for b in B if b.ord0 is not None]
    beta = min(finite_orders)
    if B[n].ord0 != beta:
        raise ReductionError(
            f"t-order of the u_n coefficient ({B[n].ord0}) is not minimal "
            f"({beta}); the leading constant would vanish")

    # everything but the kept grade-0 linear part moves right, with a factor x
    g_tilde = {}
    mu = 0
    for q, s in shifted.items():
        if sum(q) == 1:
            i = q.index(1)
            s = s.sub(ExoticSeries.x_monomial(0, B[i], phi.eta)
                      if B[i].coeffs else ExoticSeries.zero(
                          phi.eta, None, phi.backend, phi.prec))
        moved = s.neg()
        low = moved.first_nonzero_grade()
        if low == 0:
            raise ReductionError(
                f"term u^{q} leaves a grade-0 remainder; reduction failed")
        try:
            moved = moved.shift_x(-1)
        except ValueError as exc:  # pragma: no cover
            raise ReductionError(str(exc)) from exc
        if moved.is_zero and moved.trunc_k is None:
            continue
        g_tilde[q] = moved
        for g in moved.grades.values():
            o = g.ord0
            if o is not None and -o > mu:
                mu = -o

    rho = max(mu, -beta)
    r = rho + beta
    if r < 0:  # cannot happen: rho >= -beta
        raise ReductionError(f"negative prefactor exponent r={r}")

    A = tuple(b.shift(-beta) if b.coeffs else b for b in B)
    Lcoeffs = tuple(a.coefficient(0, strict=False) for a in A)

    variables = ("t", "x") + tuple(f"u{j}" for j in range(nvars))
    graded = tuple(range(2, 2 + nvars))
    terms = {}
    x_cap = None
    t_cap = None
    for q, s in g_tilde.items():
        if s.trunc_k is not None:
            x_cap = s.trunc_k if x_cap is None else min(x_cap, s.trunc_k)
        for k in sorted(s.grades):
            g = s.grades[k].shift(rho)
            if g.trunc_order is not None:
                t_cap = (g.trunc_order if t_cap is None
                         else min(t_cap, g.trunc_order))
            for e, c in g.support():
                if e < 0:  # pragma: no cover - rho clears every pole
                    raise ReductionError("t-pole survived the scaling")
                terms[(e, k) + q] = c
    M = MultiSeries(variables, terms, None, graded, phi.backend, phi.prec)

    meta = {"N": N, "beta": beta, "rho": rho, "mu": mu,
            "x_cap": x_cap, "t_cap": t_cap}
    return ReducedEquation(m, r, A, Lcoeffs, M, phi.eta, n,
                           phi.backend, phi.prec, meta)


def reduction_identity(F: OdeExpression, phi: ExoticSeries,
                       eq: ReducedEquation,
                       degree_bound: int | None = None) -> MultiSeries:
    """t^rho * (expansion / x^(N+m))  minus  (t^r sum A_i u_i - x M).

    Zero (to truncation) exactly when the emitted bundle reproduces the
    substituted equation; the round-trip certificate of the reduction.
    """
    n = eq.order
    N, rho = eq.meta["N"], eq.meta["rho"]
    P = partial_sum(phi, eq.m)
    center = make_jet(P, n)
    poly = expand_jet_polynomial(F, center, eq.m, degree_bound)
    nvars = n + 1
    variables = ("t", "x") + tuple(f"u{j}" for j in range(nvars))
    graded = tuple(range(2, 2 + nvars))

    terms = {}
    for q, s in poly.terms.items():
        s = s.shift_x(-(N + eq.m))
        for k in sorted(s.grades):
            for e, c in s.grades[k].shift(rho).support():
                key = (e, k) + q
                terms[key] = terms[key] + c if key in terms else c
    lhs_sub = MultiSeries(variables, terms, None, graded, eq.backend, eq.prec)

    bundle_terms = {}
    for i in range(nvars):
        for e, c in eq.A[i].shift(eq.r).support():
            key = (e, 0) + tuple(1 if idx == i else 0 for idx in range(nvars))
            bundle_terms[key] = bundle_terms[key] + c if key in bundle_terms else c
    bundle = MultiSeries(variables, bundle_terms, None, graded, eq.backend,
                         eq.prec)
    xM_terms = {}
    for exps, c in eq.M.terms.items():
        key = (exps[0], exps[1] + 1) + exps[2:]
        xM_terms[key] = c
    xM = MultiSeries(variables, xM_terms, None, graded, eq.backend, eq.prec)
    return lhs_sub.sub(bundle.sub(xM))
