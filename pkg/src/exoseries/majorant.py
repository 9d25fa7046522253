"""Majorant machinery: the L/H split, the lattice infimum sigma, the
nonnegative majorant recursion, dominance checking, the sup bound over the
working domain, and the scalar fixed point.

sigma is a *certified* lower bound for inf |L(k + m + (l - k r) i eta)| over
k >= 1, l >= 0: the finite part of the lattice inside a ball |z| <= R is
enumerated (exactly, in exact mode), and outside the ball |L(z)| is bounded
below by |A_n| R^n - sum_{i<n} |A_i| R^i, which increases in R once
R >= 1 + sum |A_i| / |A_n|; R doubles until that tail bound clears the
enumerated minimum.  The returned value is nudged a few ulps down, so it
never exceeds the true infimum.

The majorant recursion solves

    sigma C_k(t) = t (sum_s g_s t^s) C_k(t) + t^(-r) [x^k] (x Mt(t, x, v)),

coefficient slots l = 0..L per grade with pole slot k*r, strictly triangular
in l, every quantity nonnegative.  Absolute values of the equation data are
rounded up and sigma down, so the computed table over-estimates the true
majorant solution; dominance verdicts stay meaningful.

All real arithmetic here is mpf at a configured precision even when the
pipeline is exact: moduli like |1 - i| leave the rational field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import scalars
from .errors import (ConfigurationError, DegenerateParameterError,
                     IndeterminateError, LatticeViolationError,
                     OutsideDomainError)
from .exotic import ExoticSeries
from .reduction import ReducedEquation, indicial_value
from .scalars import EXACT

DEFAULT_EPS_N = 0.5
DEFAULT_RHO = 0.5
DEFAULT_EPS_T = 0.9


def split_lhs(eq: ReducedEquation):
    """(L coefficients, table of h_{s,i}) with h_{s,i} = -[t^{s+1}] A_i."""
    table = {}
    for i, a in enumerate(eq.A):
        top = a.trunc_order if a.trunc_order is not None else (
            a.lo + len(a.coeffs) - 1 if a.coeffs else 0)
        for s in range(0, max(top, 0)):
            c = a.coefficient(s + 1, strict=False)
            if not scalars.is_negligible(c, eq.prec):
                table[(s, i)] = -c
    return eq.Lcoeffs, table


# ---------------------------------------------------------------------------
# sigma
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SigmaBound:
    value: mpmath.mpf
    at: tuple[int, int] | None      # (k, l) where the enumerated minimum sits
    radius: float                   # ball radius that certified the bound
    points: int                     # lattice points enumerated


def _eta_mpf(eta, prec: int) -> mpmath.mpf:
    with mpmath.workprec(prec):
        if isinstance(eta, Fraction):
            return mpmath.mpf(eta.numerator) / mpmath.mpf(eta.denominator)
        return mpmath.mpf(eta)


def compute_sigma(Lcoeffs, m: int, r: int, eta, K_cap: int = 200,
                  L_cap: int = 200, prec: int = 128) -> SigmaBound:
    """Certified lower bound for the lattice infimum of |L|."""
    coeffs = list(Lcoeffs)
    while coeffs and scalars.is_negligible(coeffs[-1], prec):
        coeffs.pop()
    n = len(coeffs) - 1
    if n < 1:
        raise ConfigurationError("the indicial polynomial must have degree >= 1")
    backend = coeffs[0].backend
    exact = backend == EXACT and isinstance(eta, Fraction)
    eta_f = _eta_mpf(eta, prec)
    abs_eta = abs(eta_f)

    with mpmath.workprec(prec):
        lead_lo = scalars.abs_lower(coeffs[-1], prec)
        rest_hi = mpmath.mpf(0)
        for c in coeffs[:-1]:
            rest_hi += scalars.abs_upper(c, prec)
        if lead_lo <= 0:
            raise ConfigurationError("leading coefficient of L vanishes")
        r_star = 1 + rest_hi / lead_lo

        def tail_lower(R):
            return lead_lo * mpmath.mpf(R) ** n - rest_hi * mpmath.mpf(R) ** (n - 1)

        max_points = max(4 * K_cap * L_cap, 10_000)
        R = max(float(r_star), m + 2.0, float(abs_eta) + 1.0, 2.0)
        best = None          # exact: Fraction |L|^2; float: mpf |L|
        best_at = None
        while True:
            count = 0
            best = None
            best_at = None
            k = 1
            while (k + m) <= R:
                span2 = R * R - (k + m) * (k + m)
                jmax = int(mpmath.floor(mpmath.sqrt(span2) / abs_eta)) if span2 > 0 else 0
                l_lo = max(0, k * r - jmax)
                l_hi = k * r + jmax
                for ell in range(l_lo, l_hi + 1):
                    j = ell - k * r
                    count += 1
                    if count > max_points:
                        raise IndeterminateError(
                            f"sigma enumeration exceeded {max_points} lattice "
                            "points without certification")
                    if exact:
                        z = scalars.ExactComplex(Fraction(k + m), eta * j)
                        val = indicial_value(coeffs, z).abs2()
                        if val == 0:
                            raise LatticeViolationError(
                                "L vanishes on the lattice", k=k, j=j)
                        if best is None or val < best:
                            best, best_at = val, (k, ell)
                    else:
                        z = scalars.FloatComplex.from_pair(k + m, eta_f * j, prec)
                        val = indicial_value(coeffs, z).abs()
                        if val <= scalars.zero_tolerance(prec):
                            raise LatticeViolationError(
                                "L vanishes on the lattice (to tolerance)",
                                k=k, j=j)
                        if best is None or val < best:
                            best, best_at = val, (k, ell)
                k += 1
            if best is not None:
                if exact:
                    with mpmath.workprec(prec + 16):
                        min_abs = mpmath.sqrt(
                            mpmath.mpf(best.numerator) / mpmath.mpf(best.denominator))
                else:
                    min_abs = best
                if R >= r_star and tail_lower(R) >= min_abs:
                    sigma = scalars._nudge_down(min_abs, prec)
                    return SigmaBound(sigma, best_at, float(R), count)
            R *= 2


# ---------------------------------------------------------------------------
# majorant data and recursion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MajorantEquation:
    sigma: mpmath.mpf
    r: int
    order: int
    htilde: tuple                    # g_s, s = 0..len-1
    mtilde: dict                     # (s, p, Q) -> nonnegative mpf
    eps_n: float = DEFAULT_EPS_N
    rho: float = DEFAULT_RHO
    eps_t: float = DEFAULT_EPS_T
    prec: int = 128
    complete: bool = True            # False when built from truncated data


@dataclass(frozen=True)
class MajorantSolution:
    r: int
    K: int
    L: int
    grades: dict                     # k -> tuple of mpf, slots l = 0..L
    prec: int = 128

    def entry(self, k: int, ell: int) -> mpmath.mpf:
        return self.grades[k][ell]

    def eval_grade(self, k: int, t0) -> mpmath.mpc:
        nu = k * self.r
        with mpmath.workprec(self.prec):
            acc = mpmath.mpc(0)
            for ell, c in enumerate(self.grades[k]):
                if c != 0:
                    acc += c * mpmath.mpc(t0) ** (ell - nu)
            return acc

    def partial_sum(self, t0, x, K: int | None = None) -> mpmath.mpc:
        K = self.K if K is None else min(K, self.K)
        with mpmath.workprec(self.prec):
            acc = mpmath.mpc(0)
            for k in range(1, K + 1):
                acc += self.eval_grade(k, t0) * mpmath.mpc(x) ** k
            return acc


def build_majorant(eq: ReducedEquation, sigma, eps_n: float = DEFAULT_EPS_N,
                   rho: float = DEFAULT_RHO, eps_t: float = DEFAULT_EPS_T,
                   prec: int | None = None) -> MajorantEquation:
    """Absolutize the split equation: g_s = sum_i |h_{s,i}|, |alpha_{s,p,Q}|."""
    prec = eq.prec if prec is None else prec
    sigma_val = sigma.value if isinstance(sigma, SigmaBound) else mpmath.mpf(sigma)
    if not sigma_val > 0:
        raise ConfigurationError("sigma must be positive")
    _, htab = split_lhs(eq)
    smax = max((s for (s, _i) in htab), default=-1)
    g = [mpmath.mpf(0)] * (smax + 1)
    with mpmath.workprec(prec):
        for (s, _i), h in htab.items():
            g[s] += scalars.abs_upper(h, prec)
    mt = {}
    for exps, c in eq.M.terms.items():
        s, p, q = exps[0], exps[1], tuple(exps[2:])
        mt[(s, p, q)] = scalars.abs_upper(c, prec)
    complete = eq.meta.get("x_cap") is None and eq.meta.get("t_cap") is None
    return MajorantEquation(sigma_val, eq.r, eq.order, tuple(g), mt,
                            eps_n, rho, eps_t, prec, complete)


def solve_majorant(me: MajorantEquation, K: int, L: int) -> MajorantSolution:
    """The nonnegative majorant table C_{k,l}, slots l = 0..L per grade."""
    prec = me.prec
    sigma = me.sigma
    r = me.r
    # fold the u-variables: every slot carries the same v
    folded: dict = {}
    for (s, p, q), c in me.mtilde.items():
        key = (p, sum(q))
        folded.setdefault(key, {})[s] = folded.get(key, {}).get(s, mpmath.mpf(0)) + c

    grades: dict[int, tuple] = {}

    def grade_dict(k: int) -> dict:
        nu = k * r
        return {ell - nu: c for ell, c in enumerate(grades[k]) if c != 0}

    with mpmath.workprec(prec):
        for k in range(1, K + 1):
            nu = k * r
            rhs: dict[int, mpmath.mpf] = {}
            for (p, qtot), s_map in folded.items():
                target = k - 1 - p
                if target < 0:
                    continue
                state: dict[int, dict] = {0: {0: mpmath.mpf(1)}}
                for _ in range(qtot):
                    state = _fold_factor(state, grades, grade_dict, target, K)
                    if not state:
                        break
                prod = state.get(target)
                if not prod:
                    continue
                for s, coeff in s_map.items():
                    for e, c in prod.items():
                        key = s + e - r
                        rhs[key] = rhs.get(key, mpmath.mpf(0)) + coeff * c
            g = me.htilde
            coeffs = []
            for ell in range(L + 1):
                j = ell - nu
                acc = rhs.get(j, mpmath.mpf(0))
                for s, gs in enumerate(g):
                    lprev = ell - 1 - s
                    if lprev < 0:
                        break
                    if gs != 0 and coeffs[lprev] != 0:
                        acc += gs * coeffs[lprev]
                value = acc / sigma
                if value < 0:  # pragma: no cover - impossible by construction
                    raise AssertionError("negative majorant coefficient")
                coeffs.append(value)
            grades[k] = tuple(coeffs)
    return MajorantSolution(r, K, L, grades, prec)


def _fold_factor(state: dict, grades: dict, grade_dict, target: int, K: int):
    """One DP step: multiply the grade-indexed partial products by v."""
    new: dict[int, dict] = {}
    for g0, acc in state.items():
        for kk in range(1, target - g0 + 1):
            if kk not in grades:
                continue
            gd = grade_dict(kk)
            if not gd:
                continue
            gg = g0 + kk
            slot = new.setdefault(gg, {})
            for e0, c0 in acc.items():
                for e1, c1 in gd.items():
                    slot[e0 + e1] = slot.get(e0 + e1, mpmath.mpf(0)) + c0 * c1
    return new


@dataclass(frozen=True)
class DominanceReport:
    ok: bool
    worst_margin: float
    first_violation: tuple[int, int] | None
    checked: int
    slack: float


def check_dominance(psi: ExoticSeries, Cs: MajorantSolution,
                    slack: float = 1e-12) -> DominanceReport:
    """Entrywise |c_{k,l}| <= C_{k,l} + slack over the shared (k, l) range."""
    prec = Cs.prec
    worst = None
    first_bad = None
    checked = 0
    with mpmath.workprec(prec):
        slack_m = mpmath.mpf(slack)
        for k in range(1, Cs.K + 1):
            nu = k * Cs.r
            grade = psi.grade(k, strict=False)
            o = grade.ord0
            if o is not None and o < -nu:
                raise ConfigurationError(
                    f"series grade {k} has a deeper pole ({-o}) than the "
                    f"majorant slot ({nu})")
            for ell in range(Cs.L + 1):
                c = grade.coefficient(ell - nu, strict=False)
                cabs = scalars.abs_upper(c, prec)
                margin = Cs.entry(k, ell) + slack_m - cabs
                checked += 1
                if worst is None or margin < worst:
                    worst = margin
                if margin < 0 and first_bad is None:
                    first_bad = (k, ell)
    return DominanceReport(first_bad is None,
                           float(worst) if worst is not None else 0.0,
                           first_bad, checked, slack)


# ---------------------------------------------------------------------------
# the sup bound and the certified disc
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MBound:
    value: mpmath.mpf
    warning: str | None = None


def estimate_M_bound(me: MajorantEquation, tau: float,
                     tau_prime: float) -> MBound:
    """Coefficient-norm over-estimate of the sup of the fixed-point map.

    sum |alpha| eps^s rho^p eps_n^{|Q|} / (sigma tau^r)
      + (tau'/sigma) max(1, eps_n) sum g_s eps^s.
    """
    if not 0 < tau < tau_prime <= me.eps_t:
        raise ConfigurationError("need 0 < tau < tau' <= eps_t")
    prec = me.prec
    with mpmath.workprec(prec):
        eps = mpmath.mpf(me.eps_t)
        rho = mpmath.mpf(me.rho)
        eps_n = mpmath.mpf(me.eps_n)
        tau_m = mpmath.mpf(tau)
        total = mpmath.mpf(0)
        by_degree: dict[int, mpmath.mpf] = {}
        for (s, p, q), c in me.mtilde.items():
            contrib = c * eps ** s * rho ** p * eps_n ** sum(q)
            total += contrib
            d = s + p + sum(q)
            by_degree[d] = by_degree.get(d, mpmath.mpf(0)) + contrib
        m_part = total / (me.sigma * tau_m ** me.r)
        h_part = mpmath.mpf(0)
        for s, gs in enumerate(me.htilde):
            h_part += gs * eps ** s
        h_part *= mpmath.mpf(tau_prime) / me.sigma * max(mpmath.mpf(1), eps_n)
        warning = None
        if not me.complete and by_degree and total > 0:
            dmax = max(by_degree)
            cut = 0.9 * dmax
            tail = sum(v for d, v in by_degree.items() if d > cut)
            if tail > total / 100:
                warning = ("truncated coefficient sum is not visibly "
                           "converging; bound may be an under-estimate")
        return MBound(m_part + h_part, warning)


def certified_radius(me: MajorantEquation, mbound: MBound) -> mpmath.mpf:
    """rho * (eps_n / (eps_n + 2 M))^2, the guaranteed disc radius in x."""
    with mpmath.workprec(me.prec):
        eps_n = mpmath.mpf(me.eps_n)
        return mpmath.mpf(me.rho) * (eps_n / (eps_n + 2 * mbound.value)) ** 2


# ---------------------------------------------------------------------------
# the scalar fixed point
# ---------------------------------------------------------------------------

NONDEGENERACY_MARGIN = 1e-8


@dataclass(frozen=True)
class FixedPointResult:
    value: mpmath.mpc
    iterations: int
    sup_rhs: mpmath.mpf


def fixed_point_solve(me: MajorantEquation, t0, x, max_iter: int = 200,
                      tol: float = 1e-12, band: tuple | None = None,
                      details: bool = False):
    """Picard iteration v <- (t0/sigma) Ht(t0) v + (x/(sigma t0^r)) Mt(t0,x,v)."""
    prec = me.prec
    with mpmath.workprec(prec):
        t0 = mpmath.mpc(t0)
        x = mpmath.mpc(x)
        if band is not None:
            lo, hi = band
            if not lo < abs(t0) < hi:
                raise OutsideDomainError(
                    f"|t0| = {float(abs(t0)):.6g} outside the band "
                    f"({lo}, {hi})")
        hsum = mpmath.mpc(0)
        for s, gs in enumerate(me.htilde):
            hsum += gs * t0 ** s
        lin = t0 / me.sigma * hsum
        if abs(1 - lin) < NONDEGENERACY_MARGIN:
            raise DegenerateParameterError(
                "the linear factor (t0/sigma) sum g_s t0^s is within the "
                "margin of 1; skip this t0")
        pref = x / (me.sigma * t0 ** me.r)
        folded: dict = {}
        for (s, p, q), c in me.mtilde.items():
            key = (p, sum(q))
            folded[key] = folded.get(key, mpmath.mpc(0)) + c * t0 ** s
        v = mpmath.mpc(0)
        sup_rhs = mpmath.mpf(0)
        for it in range(1, max_iter + 1):
            msum = mpmath.mpc(0)
            for (p, qtot), c in folded.items():
                msum += c * x ** p * v ** qtot
            v_new = lin * v + pref * msum
            sup_rhs = max(sup_rhs, abs(v_new))
            if abs(v_new) > me.eps_n:
                raise OutsideDomainError(
                    f"iterate escaped |v| <= eps_n = {me.eps_n} at step {it}")
            if abs(v_new - v) <= mpmath.mpf(tol) * max(1, abs(v_new)):
                result = FixedPointResult(v_new, it, sup_rhs)
                return result if details else result.value
            v = v_new
        raise IndeterminateError(
            f"fixed point did not converge within {max_iter} iterations")
