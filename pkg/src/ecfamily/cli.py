"""Command-line front end: each subcommand runs one experiment or verification
and writes a versioned JSON report.

Exit codes: 0 when every check in the run passes, 1 when a check fails,
2 for usage errors (bad flags, out-of-range exponents), 3 when a cost guard
trips (a partial report is still written).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import __version__, arith, asymptotics, charsums, curves, moments
from .weights import Weight

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_COST = 0, 1, 2, 3


class CostGuardTrip(RuntimeError):
    def __init__(self, message: str, partial: dict):
        super().__init__(message)
        self.partial = partial


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    weight: str = "bump"
    threads: int = 1
    out: str | None = None
    force: bool = False

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("thread count must be at least 1")

    def window(self) -> moments.FamilyWindow:
        return moments.FamilyWindow(float(self.params["X"]), Weight(self.weight))


@dataclass
class Outcome:
    results: dict
    checks: dict[str, bool] = field(default_factory=dict)
    summary: list[str] = field(default_factory=list)


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _strip_runtime(d: dict) -> dict:
    """Timings go to the single wall-time field so reports replay byte for byte."""
    d = dict(d)
    d.pop("runtime", None)
    return d


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _odd_squarefree_upto(n: int) -> list[int]:
    return [r for r in range(1, n + 1, 2) if arith.is_squarefree(r)]


def cmd_verify_lemmas(cfg: RunConfig) -> Outcome:
    rmax = cfg.params["rmax"]
    rs = _odd_squarefree_upto(rmax)
    matrix: dict[str, dict] = {}

    def record(lemma: str, instance: str, checks: list[charsums.Check]):
        err = max((c.error for c in checks), default=0.0)
        matrix.setdefault(lemma, {})[instance] = {"pass": all(checks), "max_error": float(err)}

    for r in rs:
        hk = [(h, k) for h in range(r) for k in range(r)]
        record("gauss", str(r), [charsums.verify_gauss(r, k) for k in range(r)])
        record("parameterization", str(r), [charsums.verify_parameterization(r)])
        record("maincharsum", str(r), [charsums.verify_maincharsum(r, h, k) for h, k in hk])
        record("degenerate", str(r), [charsums.verify_degenerate(r, h, k) for h, k in hk])
        record("maincompletesum", str(r),
               [charsums.verify_maincompletesum(r, t, h, k) for t in (1, r) for h, k in hk])
    checks = {f"{lemma}": all(v["pass"] for v in inst.values()) for lemma, inst in matrix.items()}
    summary = [f"{lemma}: {sum(v['pass'] for v in inst.values())}/{len(inst)} instances pass"
               for lemma, inst in matrix.items()]
    return Outcome({"rmax": rmax, "matrix": matrix}, checks, summary)


def cmd_coeffs(cfg: RunConfig) -> Outcome:
    c = curves.CurveParams(cfg.params["a"], cfg.params["b"])
    series = curves.CoeffSeries.build(c, cfg.params["nmax"])
    if cfg.params.get("csv"):
        with open(cfg.params["csv"], "w") as fh:
            fh.write(series.to_csv())
    res = json.loads(series.to_json())
    res["in_family"] = curves.in_family_S(c)
    res["D"] = c.D
    head = ", ".join(str(v) for v in res["a_n"][:10])
    return Outcome(res, {}, [f"a(n), n=1..{min(10, series.nmax)}: {head}"])


def cmd_complete_sums(cfg: RunConfig) -> Outcome:
    r, t = cfg.params["r"], cfg.params["t"]
    res: dict = {}
    try:
        q = charsums.Q_t(r, t)
        res["Q_t"] = asdict(q)
        if t == 1:
            res["Q_factorized"] = asdict(charsums.Q_factorized(r))
        for k in cfg.params.get("k") or []:
            res.setdefault("Q_prime", {})[str(k)] = asdict(charsums.Q_prime(k, r))
    except charsums.CostError as exc:
        raise CostGuardTrip(str(exc), res)
    checks = {}
    if "Q_factorized" in res:
        checks["multiplicative"] = res["Q_factorized"]["scaled_value"] == res["Q_t"]["scaled_value"]
    return Outcome(res, checks, [f"Q_{t}({r}) = {q.float_value:.12g} (scaled integer {q.scaled_value})"])


def cmd_constants(cfg: RunConfig) -> Outcome:
    try:
        cs = charsums.c_S(cfg.params["pmax"], cfg.params["kmax"])
    except charsums.CostError as exc:
        raise CostGuardTrip(str(exc), {})
    return Outcome({"c_S": cs.as_dict()}, {"tail_below_1e-3": cs.tail_bound < 1e-3},
                   [f"c_S = {cs.value:.10f} (tail bound {cs.tail_bound:.2e})"])


def cmd_afe_check(cfg: RunConfig) -> Outcome:
    c = curves.CurveParams(cfg.params["a"], cfg.params["b"])
    cands = cfg.params.get("N") or None
    try:
        res = curves.afe_consistency_search(c, cands)
        out = res.as_dict()
        ok = True
    except curves.AmbiguousConductorError as exc:
        out = exc.args[0].as_dict()
        ok = False
    out["candidates"] = out["candidates"][:6]
    line = f"N = {out['N']}, eps = {out['epsilon']:+d}, L(1/2) ~ {out['central_value']:.10f}"
    return Outcome(out, {"unique": ok, "separation_10x": out["separation"] >= 10}, [line])


def cmd_family_count(cfg: RunConfig) -> Outcome:
    w = cfg.window()
    count = moments.family_count(w)
    pred = moments.family_count_predicted(w)
    res = {"window": w.as_dict(), "count": count, "predicted": pred, "ratio": count / pred}
    return Outcome(res, {}, [f"|S_X| = {count:.6f}, predicted {pred:.6f}, ratio {count / pred:.6f}"])


def _report_outcome(rep: moments.MomentReport, line: str) -> Outcome:
    return Outcome(_strip_runtime(rep.as_dict()), {"finite": all(math.isfinite(v) for v in rep.values)}, [line])


def cmd_first_moment(cfg: RunConfig) -> Outcome:
    rep = moments.first_moment_LU(cfg.window(), cfg.params["nu"], cfg.threads, cfg.force)
    return _report_outcome(rep, f"average L_U = {rep.values[0]:.6f}, ratio to c_S = {rep.ratio[0]:.6f}")


def cmd_mollified_first_moment(cfg: RunConfig) -> Outcome:
    p = cfg.params
    rep = moments.mollified_first_moment(cfg.window(), p["nu"], p["kappa"], p["poly"], cfg.threads, cfg.force)
    return _report_outcome(rep, f"average L_U M = {rep.values[0]:.6f}, ratio to 1/2 = {rep.ratio[0]:.6f}")


def _fit_line(rep: moments.MomentReport, name: str) -> str:
    vals = ", ".join(f"{v:.5g}" for v in rep.values)
    if rep.fit is None:
        return f"{name}: {vals}"
    return f"{name}: {vals}; log-growth exponent {rep.fit.exponent:.3f}"


def cmd_second_moment(cfg: RunConfig) -> Outcome:
    p = cfg.params
    w = cfg.window()
    if p.get("alpha"):
        rep = moments.second_moment_LV(w, p["alpha"], cfg.threads, cfg.force)
        return _report_outcome(rep, _fit_line(rep, "average L_V^2"))
    rep = moments.mollifier_second_moment(w, p["beta"], p["poly"], cfg.threads, cfg.force)
    return _report_outcome(rep, _fit_line(rep, "average M^2"))


def cmd_cross_moment(cfg: RunConfig) -> Outcome:
    p = cfg.params
    a1, a2 = p["alpha"]
    b1, b2 = p["beta"]
    rep = moments.cross_moment(cfg.window(), a1, a2, b1, b2, p["scales"], p["poly"], cfg.threads, cfg.force)
    return _report_outcome(rep, _fit_line(rep, "average L_V1 L_V2 M1 M2"))


def cmd_root_numbers(cfg: RunConfig) -> Outcome:
    res = moments.root_number_signs(cfg.window())
    return Outcome(res, {}, [f"sign +1: {res['plus']}, sign -1: {res['minus']}"])


def cmd_asymptotics(cfg: RunConfig) -> Outcome:
    p = cfg.params
    prop = p["prop"]
    try:
        if prop == 1:
            Vs = p["V"] or [1e3]
            vals = [asymptotics.I1_oracle(V) for V in Vs]
            const = [v - math.log(V) for v, V in zip(vals, Vs)]
            res = {"V": Vs, "oracle": vals, "oracle_minus_logV": const, "limit": -math.log(4 * math.pi)}
            lines = [f"I1({V:g}) = {v:.6f}" for V, v in zip(Vs, vals)]
            return Outcome(res, {}, lines)
        if prop == 2:
            Ms = p["M"] or [1e5, 1e6, 1e7]
            cmp = asymptotics.compare_I2(Ms, p["j1"], p["j2"])
            lines = [f"I2({M:g}) = {v:.6g}, ratio (denominator) {r:.4f}"
                     for M, v, r in zip(Ms, cmp.oracle, cmp.ratio_denominator)]
            return Outcome(cmp.as_dict(), {}, lines + [f"matching placement: {cmp.matching}"])
        logXs = p["logX"] or [14, 18, 22, 26, 30]
        rep = asymptotics.I3_growth(logXs, p["alpha_equal"], tuple(p["alpha_unequal"]), p["beta_M"],
                                    p["j1"], p["j2"])
        res = rep.as_dict()
        lines = [f"equal V: exponent {rep.equal.exponent:.3f} (predicted {rep.predicted_equal})",
                 f"unequal V: exponent {rep.unequal.exponent:.3f} (predicted {rep.predicted_unequal})",
                 f"gap {rep.gap:.3f}"]
        return Outcome(res, {"gap_at_least_2": rep.gap >= 2}, lines)
    except asymptotics.OracleCostError as exc:
        raise CostGuardTrip(str(exc), {"prop": prop})


COMMANDS: dict[str, Callable[[RunConfig], Outcome]] = {
    "verify-lemmas": cmd_verify_lemmas,
    "coeffs": cmd_coeffs,
    "complete-sums": cmd_complete_sums,
    "constants": cmd_constants,
    "afe-check": cmd_afe_check,
    "family-count": cmd_family_count,
    "first-moment": cmd_first_moment,
    "mollified-first-moment": cmd_mollified_first_moment,
    "second-moment": cmd_second_moment,
    "cross-moment": cmd_cross_moment,
    "root-numbers": cmd_root_numbers,
    "asymptotics": cmd_asymptotics,
}


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecfamily", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here")
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker processes (default ${moments.THREADS_ENV} or 1)")
    common.add_argument("--force", action="store_true", help="allow exponents outside the proven ranges")
    common.add_argument("--weight", choices=("bump", "sharp"), default="bump")

    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("verify-lemmas", parents=[common], help="brute-force complete-sum identities")
    p.add_argument("--rmax", type=int, default=35)

    p = sub.add_parser("coeffs", parents=[common], help="Hecke coefficients of one curve")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--nmax", type=int, default=100)
    p.add_argument("--csv", help="also write the table as CSV")

    p = sub.add_parser("complete-sums", parents=[common], help="Q_t(r) and Q'_k(r)")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--k", type=_ints, help="comma-separated k for Q'_k(r)")

    p = sub.add_parser("constants", parents=[common], help="the first-moment constant c_S")
    p.add_argument("--pmax", type=int, default=47)
    p.add_argument("--kmax", type=int, default=12)

    p = sub.add_parser("afe-check", parents=[common], help="conductor and sign by AFE consistency")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--N", type=_ints, help="comma-separated conductor candidates")

    for name in ("family-count", "first-moment", "mollified-first-moment", "second-moment",
                 "cross-moment", "root-numbers"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--X", type=float, required=True)
        if name in ("first-moment", "mollified-first-moment"):
            p.add_argument("--nu", type=float, default=0.5)
        if name == "mollified-first-moment":
            p.add_argument("--kappa", type=float, default=0.1)
        if name in ("mollified-first-moment", "second-moment", "cross-moment"):
            p.add_argument("--poly", type=_floats, default=[0.0, 1.0],
                           help="P coefficients c0,c1,... (P(0) must be 0)")
        if name == "second-moment":
            g = p.add_mutually_exclusive_group(required=True)
            g.add_argument("--alpha", type=_floats, help="exponents for V = X^alpha")
            g.add_argument("--beta", type=_floats, help="exponents for M = X^beta")
        if name == "cross-moment":
            p.add_argument("--alpha", type=_floats, required=True, help="alpha1,alpha2")
            p.add_argument("--beta", type=_floats, default=[0.0, 0.0], help="beta1,beta2")
            p.add_argument("--scales", type=_floats, default=[1.0])

    p = sub.add_parser("asymptotics", parents=[common], help="Dirichlet-sum oracles for the integrals")
    p.add_argument("--prop", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--V", type=_floats)
    p.add_argument("--M", type=_floats)
    p.add_argument("--j1", type=int, default=1)
    p.add_argument("--j2", type=int, default=1)
    p.add_argument("--logX", type=_floats)
    p.add_argument("--alpha-equal", dest="alpha_equal", type=float, default=0.1)
    p.add_argument("--alpha-unequal", dest="alpha_unequal", type=_floats, default=[0.1, 0.2])
    p.add_argument("--beta-M", dest="beta_M", type=float, default=0.2)
    return parser


def _validate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Exponent ranges are checked at parse time unless --force."""
    if args.force:
        return
    try:
        if getattr(args, "nu", None) is not None:
            moments.check_exponent("nu", args.nu)
        if args.subcommand == "mollified-first-moment" and not 0 <= args.kappa < 7 / 9 - args.nu:
            raise curves.PreconditionError(f"kappa={args.kappa} must lie in [0, 7/9 - nu)")
        if args.subcommand == "second-moment":
            for al in args.alpha or []:
                moments.check_exponent("alpha", al)
            for be in args.beta or []:
                moments.check_exponent("beta", be)
        if args.subcommand == "cross-moment":
            if len(args.alpha) != 2 or len(args.beta) != 2:
                raise curves.PreconditionError("cross-moment needs two alphas and two betas")
            if max(args.scales) * (sum(args.alpha) + sum(args.beta)) >= 5 / 9:
                raise curves.PreconditionError("alpha1 + alpha2 + beta1 + beta2 must stay below 5/9")
    except curves.PreconditionError as exc:
        parser.error(str(exc))
    if args.subcommand == "cross-moment" and (len(args.alpha) != 2 or len(args.beta) != 2):
        parser.error("cross-moment needs two alphas and two betas")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(args).items()
              if k not in ("subcommand", "out", "threads", "force", "weight")}
    threads = args.threads if args.threads is not None else moments.default_threads()
    return RunConfig(args.subcommand, params, args.weight, threads, args.out, args.force)


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute one configured run; returns the exit code and the report."""
    t0 = time.perf_counter()
    report = {"schema_version": SCHEMA_VERSION, "version": __version__, "config": asdict(cfg)}
    try:
        out = COMMANDS[cfg.subcommand](cfg)
        code = EXIT_OK if all(out.checks.values()) else EXIT_FAIL
        report.update(results=out.results, checks=out.checks, passed=code == EXIT_OK)
        summary = out.summary
    except (CostGuardTrip, charsums.CostError, asymptotics.OracleCostError, MemoryError) as exc:
        partial = getattr(exc, "partial", {})
        report.update(results=partial, checks={}, passed=False, error=f"cost guard: {exc}")
        code, summary = EXIT_COST, [f"cost guard tripped: {exc}"]
    report["wall_time"] = time.perf_counter() - t0
    report = _jsonable(report)
    text = json.dumps(report, indent=2, sort_keys=True)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    for line in summary:
        print(line)
    if not cfg.out:
        print(text)
    return code, report


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(args, parser)
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        code, _ = run(cfg)
    except (curves.PreconditionError, arith.ArithmeticDomainError, ValueError) as exc:
        print(f"ecfamily: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
