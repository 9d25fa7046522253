"""Command-line driver.

Subcommands: parse, verify, reduce, solve, sigma, majorant, evaluate,
pipeline.  All reports are JSON with sorted keys (exact mode is
byte-deterministic); tables are CSV.

Exit codes: 0 success, 1 usage or parse failure, 2 hypothesis failure,
3 lattice / sigma failure, 4 dominance failure, 5 numeric indeterminacy.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import mpmath

from .errors import (ConfigurationError, DegenerateParameterError,
                     EmptySectorError, EngineError, IndeterminateError,
                     LatticeViolationError, NotASolutionError, OdeSyntaxError,
                     OutsideDomainError, ReductionError, RootFindingError,
                     SingularSeriesError, TruncationError)
from .exotic import ExoticSeries
from .fuchsolve import SolveReport, solve_coefficients
from .majorant import (build_majorant, certified_radius, check_dominance,
                       compute_sigma, estimate_M_bound, fixed_point_solve,
                       solve_majorant)
from .reduction import (HypothesisReport, check_hypotheses, leading_lcoeffs,
                        partial_sum, reduce_equation, select_m)
from .scalars import EXACT, FLOAT
from .sector import SectorSpec, convergence_diagnostic, sector_for_band
from .serialization import (dump_exotic, dump_reduced, load_ode_file,
                            load_reduced, load_series_file)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_HYPOTHESIS = 2
EXIT_LATTICE = 3
EXIT_DOMINANCE = 4
EXIT_INDETERMINATE = 5


@dataclass
class PipelineConfig:
    mode: str = EXACT
    precision: int = 128
    trunc_k: int = 24
    trunc_l: int | None = None          # default 2*K*max(r, 1), set post-reduce
    sigma_k_cap: int = 200
    sigma_l_cap: int = 200
    tau: float = 0.3
    tau_prime: float = 0.45
    eps_n: float = 0.5
    rho: float = 0.5
    eps_t: float = 0.9
    out: Path | None = None

    def solver_depth(self, r: int) -> int:
        if self.trunc_l is not None:
            return self.trunc_l
        return 2 * self.trunc_k * max(r, 1)


def _fmt_real(x) -> str:
    return mpmath.nstr(mpmath.mpf(x), 20)


def _emit(report: dict, out: Path | None, name: str) -> str:
    text = json.dumps(report, sort_keys=True, indent=1) + "\n"
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text, encoding="utf-8")
    return text


def _hypothesis_json(rep: HypothesisReport) -> dict:
    return {
        "n": rep.n,
        "N": rep.N,
        "ordB": list(rep.ord_b),
        "satisfied": rep.satisfied,
        "certifiedToOrder": list(rep.certified_to_order),
        "isSolution": rep.is_solution,
        "offendingGrade": rep.offending_grade,
        "violations": [{"index": i, "reason": r} for i, r in rep.violations],
        "indeterminate": list(rep.indeterminate),
        "violatingIndex": rep.violating_index,
    }


def _load_inputs(args, config: PipelineConfig):
    F, eta = load_ode_file(args.ode, config.mode, config.precision)
    phi = load_series_file(args.series, config.mode, config.precision)
    if config.mode == EXACT and not isinstance(phi.eta, Fraction):
        raise ConfigurationError("exact mode requires a rational eta")
    if isinstance(phi.eta, Fraction) and phi.eta != eta:
        raise ConfigurationError(
            f"eta mismatch between ODE file ({eta}) and series ({phi.eta})")
    phi = phi.truncate_k(config.trunc_k)
    return F, phi


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_parse(args, config: PipelineConfig) -> int:
    F, eta = load_ode_file(args.ode, config.mode, config.precision)
    report = {
        "order": F.order,
        "eta": str(eta),
        "canonical": F.to_text(),
        "coeffs": sorted(F.coeff_series or {}),
    }
    sys.stdout.write(_emit(report, config.out, "parse.json"))
    return EXIT_OK


def _verify_report(F, phi, config: PipelineConfig) -> tuple[dict, bool]:
    rep = check_hypotheses(F, phi, trunc_k=phi.trunc_k)
    ok = rep.is_solution and rep.satisfied
    report = {
        "isSolutionToOrder": {
            "ok": rep.is_solution,
            "toOrder": rep.certified_to_order[0],
            "offendingGrade": rep.offending_grade,
        },
        "hypothesis": _hypothesis_json(rep),
    }
    return report, ok


def cmd_verify(args, config: PipelineConfig) -> int:
    F, phi = _load_inputs(args, config)
    report, ok = _verify_report(F, phi, config)
    sys.stdout.write(_emit(report, config.out, "verify.json"))
    return EXIT_OK if ok else EXIT_HYPOTHESIS


def cmd_reduce(args, config: PipelineConfig) -> int:
    F, phi = _load_inputs(args, config)
    lcand = leading_lcoeffs(F, phi)
    m = args.m if args.m is not None else select_m(F, phi, lcand,
                                                   prec=config.precision)
    eq = reduce_equation(F, phi, m)
    text = dump_reduced(eq) + "\n"
    if config.out is not None:
        config.out.mkdir(parents=True, exist_ok=True)
        (config.out / "reduced.json").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_solve(args, config: PipelineConfig) -> int:
    eq = load_reduced(Path(args.eq).read_text(encoding="utf-8"))
    K = config.trunc_k
    L = config.solver_depth(eq.r)
    report = SolveReport(K, L)
    psi = solve_coefficients(eq, K, L, report)
    text = dump_exotic(psi) + "\n"
    if config.out is not None:
        config.out.mkdir(parents=True, exist_ok=True)
        (config.out / "psi.series.json").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    if report.pole_deviations:
        sys.stderr.write(
            f"pole slots widened at grades {report.pole_deviations}\n")
    return EXIT_OK


def cmd_sigma(args, config: PipelineConfig) -> int:
    eq = load_reduced(Path(args.eq).read_text(encoding="utf-8"))
    bound = compute_sigma(eq.Lcoeffs, eq.m, eq.r, eq.eta, config.sigma_k_cap,
                          config.sigma_l_cap, config.precision)
    report = {
        "sigma": _fmt_real(bound.value),
        "at": list(bound.at) if bound.at else None,
        "radius": bound.radius,
        "points": bound.points,
    }
    sys.stdout.write(_emit(report, config.out, "sigma.json"))
    return EXIT_OK


def _majorant_stage(eq, psi, config: PipelineConfig) -> tuple[dict, bool]:
    bound = compute_sigma(eq.Lcoeffs, eq.m, eq.r, eq.eta, config.sigma_k_cap,
                          config.sigma_l_cap, config.precision)
    me = build_majorant(eq, bound, config.eps_n, config.rho, config.eps_t,
                        config.precision)
    K = psi.trunc_k if psi.trunc_k is not None else config.trunc_k
    L = config.solver_depth(eq.r)
    Cs = solve_majorant(me, K, L)
    dom = check_dominance(psi, Cs)
    mb = estimate_M_bound(me, config.tau, config.tau_prime)
    radius = certified_radius(me, mb)
    fixed_points = []
    for idx in range(5):
        t0 = config.tau + (config.tau_prime - config.tau) * (idx + 1) / 6.0
        entry = {"t0": t0}
        try:
            res = fixed_point_solve(me, t0, float(radius) / 2, details=True)
            value = res.value
            entry.update(value_re=_fmt_real(value.real),
                         value_im=_fmt_real(value.imag),
                         iterations=res.iterations,
                         supRhs=_fmt_real(res.sup_rhs))
        except (DegenerateParameterError, OutsideDomainError,
                IndeterminateError) as exc:
            entry["skipped"] = str(exc)
        fixed_points.append(entry)
    report = {
        "sigma": _fmt_real(me.sigma),
        "sigmaAt": list(bound.at) if bound.at else None,
        "Mbound": _fmt_real(mb.value),
        "MboundWarning": mb.warning,
        "radius": _fmt_real(radius),
        "dominance": {
            "ok": dom.ok,
            "worstMargin": _fmt_real(dom.worst_margin),
            "firstViolation": list(dom.first_violation)
            if dom.first_violation else None,
            "checked": dom.checked,
        },
        "fixedPoints": fixed_points,
    }
    return report, dom.ok


def cmd_majorant(args, config: PipelineConfig) -> int:
    eq = load_reduced(Path(args.eq).read_text(encoding="utf-8"))
    psi = load_series_file(args.psi)
    report, ok = _majorant_stage(eq, psi, config)
    sys.stdout.write(_emit(report, config.out, "majorant.json"))
    return EXIT_OK if ok else EXIT_DOMINANCE


def _sector_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x_re", "x_im", "abs_t", "value_re", "value_im", "q",
                     "fit_residual", "verdict", "residual"])
    for p in report.points:
        writer.writerow([f"{p.x.real:.12e}", f"{p.x.imag:.12e}",
                         f"{p.abs_t:.12e}", f"{p.value.real:.12e}",
                         f"{p.value.imag:.12e}", f"{p.q:.6e}",
                         f"{p.fit_residual:.6e}", p.verdict,
                         "" if p.residual is None else f"{p.residual:.6e}"])
    return buf.getvalue()


def cmd_evaluate(args, config: PipelineConfig) -> int:
    phi = load_series_file(args.series, config.mode, config.precision)
    sector = SectorSpec(args.theta_min, args.theta_max, args.radius)
    F = None
    if args.ode:
        F, _eta = load_ode_file(args.ode, config.mode, config.precision)
    K = args.K if args.K is not None else phi.trunc_k
    report = convergence_diagnostic(phi, sector, args.samples, K=K, F=F,
                                    prec=config.precision)
    text = _sector_csv(report)
    if config.out is not None:
        config.out.mkdir(parents=True, exist_ok=True)
        (config.out / "evaluate.csv").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    if args.plot:
        _write_plot(report, args.plot)
    return EXIT_OK


def _write_plot(report, path: str):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:  # pragma: no cover
        raise ConfigurationError(
            "plotting needs matplotlib (install the 'plot' extra)") from exc
    xs = [p.x.real for p in report.points]
    ys = [p.x.imag for p in report.points]
    qs = [p.q for p in report.points]
    fig, ax = plt.subplots(figsize=(5, 5))
    sc = ax.scatter(xs, ys, c=qs, cmap="coolwarm", vmin=0.0, vmax=2.0, s=30)
    fig.colorbar(sc, ax=ax, label="fitted Cauchy ratio q")
    ax.set_xlabel("Re x")
    ax.set_ylabel("Im x")
    ax.set_title("partial-sum convergence diagnostic")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def cmd_pipeline(args, config: PipelineConfig) -> int:
    out = config.out if config.out is not None else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    stages: dict[str, dict] = {}
    report = {"stages": stages, "ok": False}

    def finish(code: int) -> int:
        report["ok"] = code == EXIT_OK
        report["exitCode"] = code
        sys.stdout.write(_emit(report, out, "report.json"))
        return code

    F, phi = _load_inputs(args, config)
    verify_report, verify_ok = _verify_report(F, phi, config)
    _emit(verify_report, out, "verify.json")
    stages["verify"] = {"ok": verify_ok, "path": "verify.json"}
    if not verify_ok:
        return finish(EXIT_HYPOTHESIS)

    try:
        lcand = leading_lcoeffs(F, phi)
        m = select_m(F, phi, lcand, prec=config.precision)
        eq = reduce_equation(F, phi, m)
    except (ReductionError, NotASolutionError) as exc:
        stages["reduce"] = {"ok": False, "error": str(exc)}
        return finish(EXIT_HYPOTHESIS)
    (out / "reduced.json").write_text(dump_reduced(eq) + "\n", encoding="utf-8")
    stages["reduce"] = {"ok": True, "path": "reduced.json", "m": eq.m,
                        "r": eq.r}

    K = config.trunc_k
    L = config.solver_depth(eq.r)
    try:
        solve_report = SolveReport(K, L)
        psi = solve_coefficients(eq, K, L, solve_report)
    except LatticeViolationError as exc:
        stages["solve"] = {"ok": False, "error": str(exc)}
        return finish(EXIT_LATTICE)
    (out / "psi.series.json").write_text(dump_exotic(psi) + "\n",
                                         encoding="utf-8")
    stages["solve"] = {"ok": True, "path": "psi.series.json", "K": K, "L": L,
                       "poleDeviations": solve_report.pole_deviations}

    try:
        majorant_report, dom_ok = _majorant_stage(eq, psi, config)
    except LatticeViolationError as exc:
        stages["majorant"] = {"ok": False, "error": str(exc)}
        return finish(EXIT_LATTICE)
    except IndeterminateError as exc:
        stages["majorant"] = {"ok": False, "error": str(exc)}
        return finish(EXIT_INDETERMINATE)
    _emit(majorant_report, out, "majorant.json")
    stages["majorant"] = {"ok": dom_ok, "path": "majorant.json"}
    if not dom_ok:
        return finish(EXIT_DOMINANCE)

    # evaluate the input grades together with the solved tail
    extended = partial_sum(phi, eq.m).add(psi.shift_x(eq.m))
    try:
        sector = sector_for_band(phi.eta, config.tau, config.tau_prime,
                                 float(mpmath.mpf(majorant_report["radius"])))
        diag = convergence_diagnostic(extended, sector, samples=64,
                                      K=extended.trunc_k, F=F,
                                      prec=config.precision)
    except (EmptySectorError, ConfigurationError) as exc:
        stages["sector"] = {"ok": False, "error": str(exc)}
        return finish(EXIT_INDETERMINATE)
    (out / "sector.csv").write_text(_sector_csv(diag), encoding="utf-8")
    sector_report = {
        "thetaMin": sector.theta_min,
        "thetaMax": sector.theta_max,
        "radius": majorant_report["radius"],
        "allConvergent": diag.all_convergent,
        "points": len(diag.points),
    }
    _emit(sector_report, out, "sector.json")
    stages["sector"] = {"ok": diag.all_convergent, "path": "sector.json",
                        "table": "sector.csv"}
    if not diag.all_convergent:
        return finish(EXIT_INDETERMINATE)
    return finish(EXIT_OK)


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exoseries",
        description="compute and certify exotic series solutions of "
                    "Euler-operator ODEs")
    parser.add_argument("--mode", choices=[EXACT, FLOAT], default=EXACT)
    parser.add_argument("--precision", type=int, default=128,
                        help="float-mode precision in bits")
    parser.add_argument("--K", type=int, default=24,
                        help="x-grade truncation")
    parser.add_argument("--L", type=int, default=None,
                        help="t-depth per grade (default 2*K*max(r,1))")
    parser.add_argument("--out", type=Path, default=None,
                        help="directory for artifacts")
    parser.add_argument("--tau", type=float, default=0.3)
    parser.add_argument("--tau-prime", type=float, default=0.45)
    parser.add_argument("--eps-n", type=float, default=0.5)
    parser.add_argument("--rho", type=float, default=0.5)
    parser.add_argument("--eps-t", type=float, default=0.9)
    parser.add_argument("--sigma-cap", type=int, nargs=2, default=(200, 200),
                        metavar=("K_CAP", "L_CAP"))

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse an ODE file")
    p.add_argument("--ode", required=True)

    p = sub.add_parser("verify", help="residual and hypothesis check")
    p.add_argument("--ode", required=True)
    p.add_argument("--series", required=True)

    p = sub.add_parser("reduce", help="emit the reduced equation")
    p.add_argument("--ode", required=True)
    p.add_argument("--series", required=True)
    p.add_argument("--m", type=int, default=None)

    p = sub.add_parser("solve", help="solve the reduced equation")
    p.add_argument("--eq", required=True)

    p = sub.add_parser("sigma", help="certified lattice lower bound")
    p.add_argument("--eq", required=True)

    p = sub.add_parser("majorant", help="dominance and disc certification")
    p.add_argument("--eq", required=True)
    p.add_argument("--psi", required=True)

    p = sub.add_parser("evaluate", help="numeric partial sums on a sector")
    p.add_argument("--series", required=True)
    p.add_argument("--ode", default=None)
    p.add_argument("--theta-min", type=float, required=True)
    p.add_argument("--theta-max", type=float, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--plot", default=None)

    p = sub.add_parser("pipeline", help="run the full certification chain")
    p.add_argument("--ode", required=True)
    p.add_argument("--series", required=True)

    return parser


_HANDLERS = {
    "parse": cmd_parse,
    "verify": cmd_verify,
    "reduce": cmd_reduce,
    "solve": cmd_solve,
    "sigma": cmd_sigma,
    "majorant": cmd_majorant,
    "evaluate": cmd_evaluate,
    "pipeline": cmd_pipeline,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    config = PipelineConfig(
        mode=args.mode, precision=args.precision, trunc_k=args.K,
        trunc_l=args.L, sigma_k_cap=args.sigma_cap[0],
        sigma_l_cap=args.sigma_cap[1], tau=args.tau,
        tau_prime=args.tau_prime, eps_n=args.eps_n, rho=args.rho,
        eps_t=args.eps_t, out=args.out)
    try:
        return _HANDLERS[args.command](args, config)
    except (OdeSyntaxError, ConfigurationError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (NotASolutionError, ReductionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_HYPOTHESIS
    except (LatticeViolationError, RootFindingError, EmptySectorError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_LATTICE
    except (IndeterminateError, TruncationError, SingularSeriesError,
            OutsideDomainError, DegenerateParameterError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INDETERMINATE


if __name__ == "__main__":
    sys.exit(main())
