"""``tailstat`` command-line interface.

Exit codes: 0 success, 2 input or parse error, 3 domain or statistical error.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .edf import ExponentialCdf, GpdCdf, NormalCdf, OrderedUnitSample, PitCdf, UniformCdf, to_ordered_unit
from .exceptions import DivergentStatisticError, DomainError, TailStatError
from .io import InputError, dumps_csv, dumps_json, read_values
from .montecarlo import divergence_probe, simulate_risk
from .osd import OsdParams, osd_cdf, osd_mean, osd_moment, osd_pmf, osd_sample, osd_variance
from .risk import RiskValue, risk_lower, risk_named, risk_upper
from .statistics import StatSpec, evaluate
from .threshold import select_threshold

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN = 0, 2, 3
SEED_ENV = "TAILSTAT_SEED"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


# -- helpers ------------------------------------------------------------------


def _risk_json(r: RiskValue) -> dict:
    out = {"kind": r.kind, "value": r.value if r.finite else None}
    if r.finite and isinstance(r.value, Fraction):
        out["exact"] = str(r.value)
    return out


def _spec_json(spec: StatSpec) -> dict:
    return {"side": spec.side, "stress": spec.stress}


def _spec_risk(spec: StatSpec) -> RiskValue:
    if spec.side == "both":
        return risk_named("ad")
    base = Fraction(spec.stress) if float(spec.stress).is_integer() else spec.stress
    return risk_lower(base) if spec.side == "lower" else risk_upper(base)


def _decimal(text: str, name: str) -> Decimal:
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise DomainError(f"{name}: not a number: {text!r}") from None
    if not d.is_finite():
        raise DomainError(f"{name}: must be finite")
    return d


def parse_grid(text: str) -> list[Decimal]:
    """``start:stop:step`` with inclusive stop, evaluated in exact decimals."""
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"grid must look like start:stop:step, got {text!r}")
    start, stop, step = (_decimal(p, "grid") for p in parts)
    if start < 0:
        raise DomainError("grid start must be >= 0")
    if step <= 0 or stop < start:
        raise DomainError("grid needs step > 0 and stop >= start")
    count = int((stop - start) / step) + 1
    if count > 1_000_000:
        raise DomainError("grid has too many points")
    return [start + k * step for k in range(count)]


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise DomainError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _stress_arg(text: str) -> Decimal:
    d = _decimal(text, "stress")
    if d < 0:
        raise DomainError("stress parameters must be >= 0")
    return d


def _write(args, text: str) -> None:
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")


def _specs_from_args(args) -> list[StatSpec]:
    specs = []
    for name in args.stat or []:
        if name == "lower":
            specs.append(StatSpec("lower", float(args.a if args.a is not None else 1)))
        elif name == "upper":
            specs.append(StatSpec("upper", float(args.b if args.b is not None else 1)))
        else:
            specs.append(StatSpec.named(name))
    if not specs:
        if args.a is not None:
            specs.append(StatSpec("lower", float(args.a)))
        if args.b is not None:
            specs.append(StatSpec("upper", float(args.b)))
    return specs or [StatSpec("lower", 1.0)]


def _model(args):
    if args.pit:
        return PitCdf(), {"name": "pit"}
    m = args.model
    if m is None:
        raise DomainError("give --pit or --model")
    if m == "uniform":
        return UniformCdf(args.low, args.high), {"name": m, "low": args.low, "high": args.high}
    if m == "exp":
        return ExponentialCdf(args.rate), {"name": m, "rate": args.rate}
    if m == "normal":
        return NormalCdf(args.mu, args.sigma), {"name": m, "mu": args.mu, "sigma": args.sigma}
    return GpdCdf(args.xi, args.sigma, args.threshold), {
        "name": m,
        "xi": args.xi,
        "sigma": args.sigma,
        "threshold": args.threshold,
    }


# -- commands -----------------------------------------------------------------


def cmd_gof(args) -> str:
    data = read_values(args.input, args.column)
    cdf, model = _model(args)
    u = OrderedUnitSample.from_values(data) if args.pit else to_ordered_unit(data, cdf)
    specs = _specs_from_args(args)
    results = []
    for spec in specs:
        res = evaluate(u, spec)
        results.append(
            {
                "spec": _spec_json(spec),
                "label": spec.label,
                "value": res.value,
                "branch": res.branch,
                "clamped": res.clamped,
                "risk": _risk_json(_spec_risk(spec)),
            }
        )
    if args.format == "csv":
        rows = [
            (r["spec"]["side"], r["spec"]["stress"], r["value"], r["branch"], r["clamped"],
             r["risk"]["kind"], r["risk"]["value"])
            for r in results
        ]
        return dumps_csv(["side", "stress", "value", "branch", "clamped", "risk_kind", "risk"], rows)
    return dumps_json({"command": "gof", "version": __version__, "n": u.n, "model": model, "results": results})


def cmd_risk(args) -> str:
    if args.grid is not None:
        points = [("lower", s) for s in parse_grid(args.grid)]
    elif args.named is not None:
        points = [(args.named, None)]
    elif args.b is not None:
        points = [("upper", _stress_arg(args.b))]
    elif args.a is not None:
        points = [("lower", _stress_arg(args.a))]
    else:
        raise DomainError("give one of --a, --b, --named or --grid")
    rows = []
    for side, s in points:
        if s is None:
            rows.append({"stat": side, "stress": None, **_risk_json(risk_named(side))})
            continue
        r = risk_lower(s) if side == "lower" else risk_upper(s)
        integer = s == s.to_integral_value()
        rows.append({"side": side, "stress": float(s), "integer": bool(integer), **_risk_json(r)})
    if args.format == "csv":
        return dumps_csv(
            ["stress", "kind", "value", "integer"],
            [(r.get("stress"), r["kind"], r["value"], r.get("integer")) for r in rows],
        )
    return dumps_json({"command": "risk", "version": __version__, "rows": rows})


def _simulate_spec(args) -> StatSpec:
    if args.stat is not None:
        return StatSpec.named(args.stat)
    if args.b is not None:
        return StatSpec("upper", float(_stress_arg(args.b)))
    return StatSpec("lower", float(_stress_arg(args.a if args.a is not None else "1")))


def cmd_simulate(args) -> str:
    spec = _simulate_spec(args)
    seed = _seed(args)
    if args.probe is not None:
        try:
            schedule = [int(t) for t in args.probe.split(",")]
        except ValueError:
            raise DomainError(f"--probe must be comma-separated integers, got {args.probe!r}") from None
        ests = divergence_probe(spec.stress, args.n, schedule, seed, args.workers)
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ests = [simulate_risk(args.n, spec, args.trials, seed, args.workers)]
    risk = _spec_risk(spec)
    rows = []
    for e in ests:
        row = {
            "trials": e.trials,
            "mean": e.mean,
            "std_error": e.std_error,
            "max_value": e.max_value,
        }
        if risk.finite and e.std_error > 0:
            row["z_score"] = (e.mean - float(risk.value)) / e.std_error
        rows.append(row)
    notes = list(ests[0].warnings)
    for note in notes:
        print(f"warning: {note}", file=sys.stderr)
    if args.format == "csv":
        return dumps_csv(
            ["n", "side", "stress", "seed", "trials", "mean", "std_error", "max_value"],
            [(args.n, spec.side, spec.stress, seed, r["trials"], r["mean"], r["std_error"], r["max_value"])
             for r in rows],
        )
    return dumps_json(
        {
            "command": "simulate",
            "version": __version__,
            "n": args.n,
            "seed": seed,
            "spec": _spec_json(spec),
            "risk": _risk_json(risk),
            "estimates": rows,
            "warnings": notes,
        }
    )


def cmd_osd(args) -> str:
    params = OsdParams(args.n, float(_decimal(args.nu, "nu")))
    report = {
        "command": "osd",
        "version": __version__,
        "n": params.n,
        "nu": params.nu,
        "mean": osd_mean(params),
        "variance": osd_variance(params),
    }
    if args.moments is not None:
        report["moments"] = [osd_moment(params, k) for k in range(args.moments + 1)]
    if args.table:
        report["table"] = [
            {"i": i, "pmf": osd_pmf(params, i), "cdf": osd_cdf(params, i)} for i in range(1, params.n + 1)
        ]
    draws = None
    if args.sample is not None:
        draws = osd_sample(params, args.sample, _seed(args))
        report["seed"] = _seed(args)
        report["sample"] = draws.tolist()
    if args.format == "csv":
        if draws is not None:
            return dumps_csv(["value"], [(int(v),) for v in draws])
        if args.table:
            return dumps_csv(["i", "pmf", "cdf"], [(r["i"], r["pmf"], r["cdf"]) for r in report["table"]])
        return dumps_csv(["n", "nu", "mean", "variance"], [(params.n, params.nu, report["mean"], report["variance"])])
    return dumps_json(report)


def _candidates(args) -> np.ndarray:
    if args.candidates_list is not None:
        try:
            return np.array([float(v) for v in args.candidates_list.split(",")])
        except ValueError:
            raise DomainError("--candidates-list must be comma-separated numbers") from None
    parts = args.candidates.split(":")
    if len(parts) != 3:
        raise DomainError("--candidates must look like start:stop:step")
    start, stop, step = (_decimal(p, "candidates") for p in parts)
    if step <= 0 or stop < start:
        raise DomainError("--candidates needs step > 0 and stop >= start")
    count = int((stop - start) / step) + 1
    return np.array([float(start + k * step) for k in range(count)])


def cmd_select_threshold(args) -> str:
    data = read_values(args.input, args.column)
    sides = {"high": "upper", "low": "lower"}
    spec = StatSpec(sides[args.weight_side], float(_stress_arg(args.stat_a)))
    seed = _seed(args)
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always")
        scan = select_threshold(
            data,
            _candidates(args),
            spec,
            args.alpha,
            args.reps,
            seed,
            min_excesses=args.min_excesses,
            stopping=args.stopping,
            n_jobs=args.workers,
        )
    for note in scan.warnings:
        print(f"warning: {note}", file=sys.stderr)
    rows = [
        {
            "threshold": u,
            "excesses": c,
            "xi": p.xi,
            "sigma": p.sigma,
            "converged": conv,
            "statistic": s,
            "p_value": pv,
            "clamped": cl,
        }
        for u, c, p, conv, s, pv, cl in zip(
            scan.candidates, scan.excess_counts, scan.params, scan.converged,
            scan.statistics, scan.p_values, scan.clamped,
        )
    ]
    if args.format == "csv":
        return dumps_csv(
            ["threshold", "excesses", "xi", "sigma", "converged", "statistic", "p_value", "selected"],
            [
                (r["threshold"], r["excesses"], r["xi"], r["sigma"], r["converged"], r["statistic"],
                 r["p_value"], i == scan.selected_index)
                for i, r in enumerate(rows)
            ],
        )
    return dumps_json(
        {
            "command": "select-threshold",
            "version": __version__,
            "n": int(data.size),
            "seed": seed,
            "spec": _spec_json(spec),
            "weight_side": args.weight_side,
            "risk": _risk_json(_spec_risk(spec) if scan.risk.finite else scan.risk),
            "alpha": scan.alpha,
            "stopping": scan.stopping,
            "bootstrap_reps": scan.bootstrap_reps,
            "candidates": rows,
            "skipped": list(scan.skipped),
            "selected_index": scan.selected_index,
            "selected_threshold": scan.selected_threshold,
            "diagnostic": scan.diagnostic,
            "warnings": list(scan.warnings),
        }
    )


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tailstat", description="Tail-weighted goodness-of-fit statistics and risk.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, seeded=False):
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--output", "-o", default=None, help="output path (default stdout)")
        if seeded:
            p.add_argument("--seed", type=int, default=None, help=f"default from ${SEED_ENV}, else 0")

    p = sub.add_parser("gof", help="statistic values for a data file")
    p.add_argument("input")
    p.add_argument("--column", default=None)
    p.add_argument("--pit", action="store_true", help="input is already in [0, 1]")
    p.add_argument("--model", choices=["uniform", "exp", "normal", "gpd"])
    p.add_argument("--low", type=float, default=0.0)
    p.add_argument("--high", type=float, default=1.0)
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--xi", type=float, default=0.0)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--stat", action="append", choices=["cvm", "ad", "al", "au", "lower", "upper"])
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("risk", help="closed-form risk (expected loss)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--a")
    g.add_argument("--b")
    g.add_argument("--named", choices=["cvm", "ad", "al"])
    g.add_argument("--grid", help="start:stop:step, e.g. 0:5:0.01")
    common(p)
    p.set_defaults(func=cmd_risk)

    p = sub.add_parser("simulate", help="Monte-Carlo estimate of the risk")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--a")
    g.add_argument("--b")
    g.add_argument("--stat", choices=["cvm", "ad", "al", "au"])
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--trials", type=int, default=20000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--probe", default=None, help="nested trial counts for the stress-2 divergence probe")
    common(p, seeded=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("osd", help="order-statistic discrete distribution")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--moments", type=int, default=None, help="raw moments 0..K")
    p.add_argument("--table", action="store_true")
    p.add_argument("--sample", type=int, default=None, metavar="COUNT")
    common(p, seeded=True)
    p.set_defaults(func=cmd_osd)

    p = sub.add_parser("select-threshold", help="automated GPD threshold selection")
    p.add_argument("input")
    p.add_argument("--column", default=None)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--candidates", help="start:stop:step")
    g.add_argument("--candidates-list", help="comma-separated thresholds")
    p.add_argument("--stat-a", default="1")
    p.add_argument("--weight-side", choices=["high", "low"], default="high")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--reps", type=int, default=99)
    p.add_argument("--min-excesses", type=int, default=30)
    p.add_argument("--stopping", choices=["forwardstop", "first-pass"], default="forwardstop")
    p.add_argument("--workers", type=int, default=1)
    common(p, seeded=True)
    p.set_defaults(func=cmd_select_threshold)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _write(args, args.func(args))
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except (InputError, DomainError) as exc:
        print(f"tailstat: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DivergentStatisticError as exc:
        print(f"tailstat: error: divergent statistic: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except TailStatError as exc:
        print(f"tailstat: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
