"""Numeric evaluation of exotic partial sums on sectors, and convergence
diagnostics.

An exotic series only makes pointwise sense once a branch of x^(i*eta) is
fixed.  The sector must avoid the positive real axis, so the branch cut is
put there; |x^(i*eta)| = exp(-eta * arg x) then depends only on the ray.
For eta > 0 arguments are taken in (0, 2*pi), which maps the sector into the
punctured disc 0 < |t| < 1 where the Laurent data lives; for eta < 0 the
equivalent representative arg x - 2*pi in (-2*pi, 0) is used for the same
reason.  Reported sector bounds always use (0, 2*pi) labels.

``convergence_diagnostic`` samples a grid, computes Cauchy increments
d_K = |S_{K+step} - S_K| and fits them to C*q^K by least squares on the log;
q < 1 with a small fit residual is the empirical signature of uniform
convergence on the sector, q > 1 of being outside the convergence disc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from . import scalars
from .errors import (ConfigurationError, EmptySectorError, TruncationError)
from .exotic import ExoticSeries, make_jet
from .expressions import OdeExpression, evaluate_numeric

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class SectorSpec:
    theta_min: float
    theta_max: float
    radius: float

    def __post_init__(self):
        if not 0 < self.theta_min < self.theta_max < TWO_PI:
            raise ConfigurationError(
                "sector angles must satisfy 0 < theta_min < theta_max < 2*pi")
        if self.radius <= 0:
            raise ConfigurationError("sector radius must be positive")


def branch_arg(x, eta, prec: int = 128) -> mpmath.mpf:
    """arg x on the branch adapted to the sign of eta (cut along R+)."""
    with mpmath.workprec(prec):
        x = mpmath.mpc(x)
        if x == 0:
            raise ConfigurationError("x = 0 is outside every sector")
        theta = mpmath.arg(x)
        if theta <= 0:
            theta += TWO_PI
        if theta <= 0 or theta >= TWO_PI:
            raise ConfigurationError("arg x must lie strictly inside (0, 2*pi)")
        eta_f = mpmath.mpf(eta.numerator) / eta.denominator if hasattr(
            eta, "numerator") else mpmath.mpf(eta)
        if eta_f < 0:
            theta -= TWO_PI
        return theta


def t_value(x, eta, prec: int = 128) -> mpmath.mpc:
    """t = x^(i*eta) = exp(i*eta*(ln|x| + i*arg x)) on the chosen branch."""
    with mpmath.workprec(prec):
        x = mpmath.mpc(x)
        theta = branch_arg(x, eta, prec)
        eta_f = mpmath.mpf(eta.numerator) / eta.denominator if hasattr(
            eta, "numerator") else mpmath.mpf(eta)
        log_x = mpmath.log(abs(x)) + mpmath.mpc(0, 1) * theta
        return mpmath.exp(mpmath.mpc(0, 1) * eta_f * log_x)


def _laurent_eval(series, t: mpmath.mpc, prec: int) -> mpmath.mpc:
    acc = mpmath.mpc(0)
    for e, c in series.support():
        cz = c.to_float(prec).z if isinstance(c, scalars.ExactComplex) else c.z
        acc += cz * t ** e
    return acc


def eval_partial_sum(phi: ExoticSeries, x, K: int,
                     band: tuple | None = None, prec: int = 128) -> mpmath.mpc:
    """sum_{k<=K} alpha_k(t) x^k at the point x, on the chosen branch."""
    if phi.trunc_k is not None and K > phi.trunc_k:
        raise TruncationError(
            f"partial sum to K={K} exceeds the retained grades "
            f"(truncK={phi.trunc_k})")
    with mpmath.workprec(prec):
        x = mpmath.mpc(x)
        t = t_value(x, phi.eta, prec)
        if band is not None:
            lo, hi = band
            if not lo <= abs(t) <= hi:
                raise ConfigurationError(
                    f"|t| = {float(abs(t)):.6g} outside the band ({lo}, {hi})")
        acc = mpmath.mpc(0)
        for k in sorted(phi.grades):
            if k > K:
                break
            acc += _laurent_eval(phi.grades[k], t, prec) * x ** k
        return acc


def sector_for_band(eta, tau: float, tau_prime: float,
                    radius: float = 1.0) -> SectorSpec:
    """The arg-x interval on which tau < |x^(i*eta)| < tau_prime."""
    if not 0 < tau < tau_prime:
        raise ConfigurationError("need 0 < tau < tau_prime")
    eta_f = float(eta)
    if eta_f == 0:
        raise ConfigurationError("eta must be nonzero")
    # effective argument range: -eta*theta_eff in (ln tau, ln tau')
    a = math.log(1.0 / tau_prime) / eta_f
    b = math.log(1.0 / tau) / eta_f
    lo_eff, hi_eff = min(a, b), max(a, b)
    if eta_f > 0:
        window = (0.0, TWO_PI)
        shift = 0.0
    else:
        window = (-TWO_PI, 0.0)
        shift = TWO_PI
    lo = max(lo_eff, window[0])
    hi = min(hi_eff, window[1])
    if not lo < hi:
        required = (lo_eff + shift, hi_eff + shift)
        raise EmptySectorError(
            f"the band needs arg x in ({required[0]:.6g}, {required[1]:.6g}), "
            "outside the available branch", required_range=required)
    return SectorSpec(lo + shift, hi + shift, radius)


@dataclass(frozen=True)
class SectorPoint:
    x: complex
    abs_t: float
    value: complex
    q: float
    fit_residual: float
    verdict: str                  # convergent | divergent | inconclusive
    residual: float | None = None


@dataclass(frozen=True)
class SectorReport:
    points: tuple
    all_convergent: bool
    K_max: int
    step: int


def _fit_ratio(ks, ds):
    """Least squares of log d over K; returns (q, rms residual in log space)."""
    pairs = [(k, math.log(d)) for k, d in zip(ks, ds) if d > 0]
    if len(pairs) < 2:
        return 0.0, 0.0
    pairs = pairs[-5:]
    n = len(pairs)
    mean_k = sum(p[0] for p in pairs) / n
    mean_l = sum(p[1] for p in pairs) / n
    var = sum((p[0] - mean_k) ** 2 for p in pairs)
    if var == 0:
        return 0.0, 0.0
    slope = sum((p[0] - mean_k) * (p[1] - mean_l) for p in pairs) / var
    rms = math.sqrt(sum((p[1] - (mean_l + slope * (p[0] - mean_k))) ** 2
                        for p in pairs) / n)
    return math.exp(slope), rms


FIT_RESIDUAL_LIMIT = 2.0  # rms in log space beyond which the fit says nothing


def diagnose_point(phi: ExoticSeries, x, K_max: int, step: int = 5,
                   F: OdeExpression | None = None,
                   prec: int = 128) -> SectorPoint:
    """Cauchy-increment convergence diagnostic at one sample point."""
    with mpmath.workprec(prec):
        x = mpmath.mpc(x)
        t = t_value(x, phi.eta, prec)
        ks = list(range(step, K_max + 1, step))
        if len(ks) < 2:
            raise ConfigurationError("K too small for increments")
        sums = {k: eval_partial_sum(phi, x, k, prec=prec) for k in ks}
        d_ks = ks[:-1]
        ds = [float(abs(sums[k + step] - sums[k])) for k in d_ks]
        scale = max((float(abs(sums[k])) for k in ks), default=0.0)
        floor = 1e-25 * max(scale, 1.0)
        if all(d <= floor for d in ds):
            q, rms, verdict = 0.0, 0.0, "convergent"
        else:
            q, rms = _fit_ratio(d_ks, ds)
            if rms > FIT_RESIDUAL_LIMIT:
                verdict = "inconclusive"
            else:
                verdict = "convergent" if q < 1 else "divergent"
        residual = None
        if F is not None:
            jets = make_jet(phi, F.order)
            jet_vals = [eval_partial_sum(jets[j], x, K_max, prec=prec)
                        for j in range(F.order + 1)]
            residual = float(abs(evaluate_numeric(F, x, jet_vals)))
        return SectorPoint(complex(x), float(abs(t)),
                           complex(sums[ks[-1]]), q, rms, verdict, residual)


def convergence_diagnostic(phi: ExoticSeries, sector: SectorSpec,
                           samples: int = 64, K: int | None = None,
                           step: int = 5, F: OdeExpression | None = None,
                           radial_decades: float = 2.0,
                           prec: int = 128) -> SectorReport:
    """Diagnose convergence over a log-radial by uniform-angular grid."""
    if samples < 1:
        raise ConfigurationError("need at least one sample")
    K_max = phi.trunc_k if K is None else K
    if K_max is None:
        raise ConfigurationError("an exact series needs an explicit K")
    n_a = max(1, int(math.ceil(math.sqrt(samples))))
    n_r = max(1, int(math.ceil(samples / n_a)))
    points = []
    for ir in range(n_r):
        frac = (ir + 1) / n_r
        rad = sector.radius * 10.0 ** (-radial_decades * (1 - frac))
        for ia in range(n_a):
            if len(points) >= samples:
                break
            angle = sector.theta_min + (sector.theta_max - sector.theta_min) \
                * (ia + 0.5) / n_a
            x = rad * complex(math.cos(angle), math.sin(angle))
            points.append(diagnose_point(phi, x, K_max, step, F, prec))
    ok = all(p.verdict == "convergent" for p in points)
    return SectorReport(tuple(points), ok, K_max, step)
