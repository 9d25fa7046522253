"""File formats used across the engine.

* Laurent series record: {"poleOrder", "truncOrder", "coeffs": [[re, im]...]}
  with exact rationals as "num/den" strings and floats as decimal strings.
* Exotic series file: {"eta", "backend", "precision", "truncK",
  "grades": [{"k", "series": <record>}, ...]}.
* ODE file: text with header lines ``eta = ...``, ``order = ...``, optional
  ``coeff <name> = <Laurent record as JSON>``, then ``F = <expression>``.
* Reduced equation record: {"m", "r", "A", "Lcoeffs", "M": {"terms"}, "eta"}.

All emitters sort keys and term lists, so identical inputs give identical
bytes (exact mode is fully deterministic end to end).
"""

from __future__ import annotations

import json
from fractions import Fraction

import mpmath

from . import scalars
from .errors import ConfigurationError, OdeSyntaxError
from .exotic import ExoticSeries
from .expressions import OdeExpression, parse_ode
from .laurent import LaurentSeries
from .multiseries import MultiSeries
from .reduction import ReducedEquation
from .scalars import EXACT, FLOAT


# -- scalars -----------------------------------------------------------------

def scalar_to_json(c) -> list:
    if isinstance(c, scalars.ExactComplex):
        return [str(c.re), str(c.im)]
    with mpmath.workprec(c.prec):
        return [mpmath.nstr(c.z.real, int(c.prec / 3.2) + 2),
                mpmath.nstr(c.z.imag, int(c.prec / 3.2) + 2)]


def scalar_from_json(pair, backend: str, prec: int):
    re_s, im_s = pair
    if backend == EXACT:
        return scalars.ExactComplex(Fraction(re_s), Fraction(im_s))
    with mpmath.workprec(prec):
        return scalars.FloatComplex(
            mpmath.mpc(mpmath.mpf(re_s), mpmath.mpf(im_s)), prec)


# -- Laurent records -----------------------------------------------------------

def laurent_to_record(series: LaurentSeries) -> dict:
    return {
        "poleOrder": -series.lo if series.coeffs else 0,
        "truncOrder": series.trunc_order,
        "coeffs": [scalar_to_json(c) for c in series.coeffs],
    }


def laurent_from_record(record: dict, backend: str = EXACT,
                        prec: int = 128) -> LaurentSeries:
    pole = int(record["poleOrder"])
    trunc = record.get("truncOrder")
    trunc = None if trunc is None else int(trunc)
    coeffs = [scalar_from_json(p, backend, prec) for p in record["coeffs"]]
    if trunc is not None and coeffs:
        expected = trunc + pole + 1
        if len(coeffs) != expected:
            raise ConfigurationError(
                f"series record window mismatch: {len(coeffs)} coefficients "
                f"for poleOrder {pole}, truncOrder {trunc}")
    if not coeffs:
        return LaurentSeries.zero(backend, prec, trunc)
    return LaurentSeries(coeffs, -pole, trunc, backend, prec)


# -- exotic series files ---------------------------------------------------------

def exotic_to_record(series: ExoticSeries) -> dict:
    eta = series.eta
    return {
        "eta": str(eta) if isinstance(eta, Fraction) else float(eta),
        "backend": series.backend,
        "precision": series.prec,
        "truncK": series.trunc_k,
        "grades": [{"k": k, "series": laurent_to_record(series.grades[k])}
                   for k in sorted(series.grades)],
    }


def exotic_from_record(record: dict, backend: str | None = None,
                       prec: int | None = None) -> ExoticSeries:
    backend = backend or record.get("backend", EXACT)
    prec = prec or int(record.get("precision", 128))
    eta_raw = record["eta"]
    eta = Fraction(eta_raw) if isinstance(eta_raw, str) else Fraction(
        str(eta_raw)) if backend == EXACT else float(eta_raw)
    trunc_k = record.get("truncK")
    trunc_k = None if trunc_k is None else int(trunc_k)
    grades = {int(g["k"]): laurent_from_record(g["series"], backend, prec)
              for g in record["grades"]}
    return ExoticSeries(grades, eta, trunc_k, backend, prec)


def dump_exotic(series: ExoticSeries) -> str:
    return json.dumps(exotic_to_record(series), sort_keys=True, indent=1)


def load_exotic(text: str, backend: str | None = None,
                prec: int | None = None) -> ExoticSeries:
    return exotic_from_record(json.loads(text), backend, prec)


# -- multivariate series ----------------------------------------------------------

def multiseries_to_record(ms: MultiSeries) -> dict:
    return {
        "variables": list(ms.variables),
        "terms": [{"exponents": list(e), "coeff": scalar_to_json(c)}
                  for e, c in ms.sorted_terms()],
    }


def multiseries_from_record(record: dict, backend: str, prec: int,
                            graded=None) -> MultiSeries:
    variables = tuple(record["variables"])
    terms = {tuple(t["exponents"]): scalar_from_json(t["coeff"], backend, prec)
             for t in record["terms"]}
    return MultiSeries(variables, terms, None, graded, backend, prec)


# -- reduced equations ---------------------------------------------------------------

def reduced_to_record(eq: ReducedEquation) -> dict:
    return {
        "m": eq.m,
        "r": eq.r,
        "order": eq.order,
        "backend": eq.backend,
        "precision": eq.prec,
        "eta": str(eq.eta) if isinstance(eq.eta, Fraction) else float(eq.eta),
        "A": [laurent_to_record(a) for a in eq.A],
        "Lcoeffs": [scalar_to_json(c) for c in eq.Lcoeffs],
        "M": multiseries_to_record(eq.M),
        "meta": {k: v for k, v in sorted(eq.meta.items())},
    }


def reduced_from_record(record: dict) -> ReducedEquation:
    backend = record.get("backend", EXACT)
    prec = int(record.get("precision", 128))
    eta_raw = record["eta"]
    eta = Fraction(eta_raw) if isinstance(eta_raw, str) else (
        Fraction(str(eta_raw)) if backend == EXACT else float(eta_raw))
    n = int(record["order"])
    graded = tuple(range(2, 2 + n + 1))
    A = tuple(laurent_from_record(rec, backend, prec) for rec in record["A"])
    Lcoeffs = tuple(scalar_from_json(p, backend, prec)
                    for p in record["Lcoeffs"])
    M = multiseries_from_record(record["M"], backend, prec, graded)
    meta = dict(record.get("meta", {}))
    return ReducedEquation(int(record["m"]), int(record["r"]), A, Lcoeffs, M,
                           eta, n, backend, prec, meta)


def dump_reduced(eq: ReducedEquation) -> str:
    return json.dumps(reduced_to_record(eq), sort_keys=True, indent=1)


def load_reduced(text: str) -> ReducedEquation:
    return reduced_from_record(json.loads(text))


# -- ODE files --------------------------------------------------------------------

def load_ode_text(text: str, backend: str = EXACT, prec: int = 128):
    """Parse an ODE file; returns (OdeExpression, eta as Fraction)."""
    eta = None
    order = None
    coeffs: dict[str, LaurentSeries] = {}
    expr_text = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("eta"):
            _, _, value = line.partition("=")
            try:
                eta = Fraction(value.strip())
            except ValueError as exc:
                raise OdeSyntaxError(f"bad eta value: {exc}", line=lineno, col=1)
        elif line.startswith("order"):
            _, _, value = line.partition("=")
            try:
                order = int(value.strip())
            except ValueError:
                raise OdeSyntaxError("order must be an integer", line=lineno,
                                     col=1)
        elif line.startswith("coeff"):
            head, _, value = line.partition("=")
            name = head.split()[1] if len(head.split()) > 1 else None
            if not name:
                raise OdeSyntaxError("coeff line needs a name", line=lineno,
                                     col=1)
            try:
                record = json.loads(value.strip())
            except json.JSONDecodeError as exc:
                raise OdeSyntaxError(f"bad coeff record: {exc}", line=lineno,
                                     col=1)
            coeffs[name] = laurent_from_record(record, backend, prec)
        elif line.startswith("F"):
            _, _, value = line.partition("=")
            expr_text = value.strip()
        else:
            raise OdeSyntaxError(f"unrecognized line: {line!r}", line=lineno,
                                 col=1)
    if expr_text is None:
        raise OdeSyntaxError("missing 'F = <expression>' line")
    if eta is None:
        raise OdeSyntaxError("missing 'eta = <value>' line")
    expr = parse_ode(expr_text, coeffs, declared_order=order)
    return expr, eta


def load_ode_file(path, backend: str = EXACT, prec: int = 128):
    with open(path, "r", encoding="utf-8") as fh:
        return load_ode_text(fh.read(), backend, prec)


def load_series_file(path, backend: str | None = None,
                     prec: int | None = None) -> ExoticSeries:
    with open(path, "r", encoding="utf-8") as fh:
        return load_exotic(fh.read(), backend, prec)
