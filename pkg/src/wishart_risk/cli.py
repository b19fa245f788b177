"""Command-line surface.

Subcommands: correct, simulate, study, wg, validate.  Output is machine
first (CSV / JSON), human summary second.  Exit codes: 0 success, 1 usage
error, 2 regime/domain error, 3 I/O error.  Randomized subcommands either
take --seed or generate one and print it.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from pathlib import Path

from .correction import correction_summary
from .errors import (
    DataError,
    DomainError,
    ParameterError,
    ParseError,
    RegimeError,
    UsageError,
    WishartRiskError,
)
from .estimators import parse_b_spec, spec_kind_params
from .ingest import read_returns_csv, real_data_risk_study
from .simlab import (
    ExperimentConfig,
    export_histogram,
    export_summary_json,
    run_experiment,
    summarize,
)
from .validate import run_checks
from .weingarten import wg_double, wg_single

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REGIME = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1 per the CLI contract (argparse defaults to 2)
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value, digits=10):
    if value is None:
        return "NA"
    return f"{value:.{digits}g}"


def _resolve_seed(seed):
    if seed is not None:
        return seed
    seed = secrets.randbits(32)
    print(f"seed: {seed}")
    return seed


def cmd_correct(args) -> int:
    weight = parse_b_spec(args.b, args.T)
    summary = correction_summary(weight, args.n, args.T)
    print("n,T,q,bias_factor,sqrt_factor,var_q,asymptotic_limit")
    print(
        f"{summary.n},{summary.t},{summary.q},"
        f"{_fmt(summary.eq_mean)},{_fmt(summary.eq_mean ** 0.5)},"
        f"{_fmt(summary.var_q)},{_fmt(summary.asymptotic_limit)}"
    )
    return EXIT_OK


def _load_config_file(path: Path) -> dict:
    out = {}
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"expected key=value, got {line!r}", row=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value
    return out


def cmd_simulate(args) -> int:
    overrides = _load_config_file(Path(args.config)) if args.config else {}
    n = int(overrides.get("n", args.n if args.n is not None else 0))
    t = int(overrides.get("T", args.T if args.T is not None else 0))
    b_spec = overrides.get("b", args.b)
    trials = int(overrides.get("trials", args.trials))
    scaling = overrides.get("scaling", args.scaling)
    sigma_scheme = overrides.get("sigma_scheme", args.sigma_scheme)
    if n < 1 or t < 1:
        raise UsageError("simulate needs --n and --T (or a config file with n=, T=)")
    if trials < 1:
        raise UsageError(f"trial count must be >= 1, got {trials}")
    seed = _resolve_seed(args.seed)
    kind, params = spec_kind_params(b_spec)
    if kind == "custom_diagonal":
        weight = parse_b_spec(b_spec, t)
        kind, params = "custom_diagonal", {"entries": weight.matrix.diagonal()}
    config = ExperimentConfig(
        n=n, t=t, b_kind=kind, b_params=params, trials=trials,
        master_seed=seed, sigma_scheme=sigma_scheme, scaling=scaling,
        workers=args.workers,
    )
    result = run_experiment(config)
    summary = summarize(result)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    export_histogram(result, "ratio_before", args.bins, out_dir / "hist_before.csv")
    export_histogram(result, "ratio_after", args.bins, out_dir / "hist_after.csv")
    export_summary_json(summary, out_dir / "summary.json")
    payload = dict(summary.as_dict(), scale_factor=result.scale_factor, seed=seed)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_study(args) -> int:
    seed = _resolve_seed(args.seed)
    panel = read_returns_csv(args.data)
    kind, params = spec_kind_params(args.b)
    if kind == "custom_diagonal":
        weight = parse_b_spec(args.b, args.t_sub)
        params = {"entries": weight.matrix.diagonal()}
    result = real_data_risk_study(
        panel, args.t_sub, kind, b_params=params, repeats=args.repeats,
        seed=seed, contiguous=args.contiguous,
    )
    payload = dict(
        result.summary.as_dict(),
        true_risk=result.true_risk, n=result.n, t_sub=result.t_sub, seed=seed,
    )
    if args.out_json:
        Path(args.out_json).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if args.hist:
        export_histogram(result.records, "ratio_after", args.bins, args.hist)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_wg(args) -> int:
    if args.w is None:
        table = wg_single(args.k, args.z, exact=args.exact)
    else:
        table = wg_double(args.k, args.z, args.w, exact=args.exact)
    print("coset_type,value")
    for parts, value in sorted(table.values.items(), reverse=True):
        label = "+".join(str(p) for p in parts)
        print(f"{label},{value}" if args.exact else f"{label},{value:.17g}")
    return EXIT_OK


def cmd_validate(args) -> int:
    seed = _resolve_seed(args.seed)
    results = run_checks(level=args.level, seed=seed)
    failed = [r for r in results if not r.passed]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: {r.detail} ({r.seconds:.1f}s)")
    if failed:
        print(f"validate: {len(failed)} check(s) failed: "
              + ", ".join(r.name for r in failed))
        return EXIT_REGIME
    print(f"validate: all {len(results)} checks passed")
    return EXIT_OK


def _int_or_fraction(text):
    try:
        return int(text)
    except ValueError:
        return float(text)


def build_parser() -> _Parser:
    parser = _Parser(prog="wishart-risk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("correct", parents=[], help="print the correction factor record")
    p.add_argument("--n", type=int, required=True, help="number of assets")
    p.add_argument("--T", type=int, required=True, help="number of observations")
    p.add_argument("--b", default="mle",
                   help="weighting spec: mle | sample | ewma:LAMBDA | idem:RANK | diag:FILE")
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("simulate", help="run the risk-ratio Monte Carlo experiment")
    p.add_argument("--n", type=int, help="number of assets")
    p.add_argument("--T", type=int, help="number of observations")
    p.add_argument("--b", default="mle", help="weighting spec (see correct --help)")
    p.add_argument("--trials", type=int, default=1000, help="number of trials")
    p.add_argument("--seed", type=int, help="master seed (generated and printed if absent)")
    p.add_argument("--scaling", choices=("finite_sample", "asymptotic"),
                   default="finite_sample", help="correction factor flavor")
    p.add_argument("--sigma-scheme", choices=("wishart-like", "diag-plus-lowrank"),
                   default="wishart-like", help="true-covariance ensemble")
    p.add_argument("--bins", type=int, default=40, help="histogram bins")
    p.add_argument("--out-dir", default="simulate-out", help="output directory")
    p.add_argument("--workers", type=int,
                   help="trial parallelism (default: cores, or WISHART_RISK_WORKERS)")
    p.add_argument("--config", help="flat key=value config file overriding flags")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("study", help="long/short-window study on a returns CSV")
    p.add_argument("--data", required=True, help="returns CSV, most recent row first")
    p.add_argument("--t-sub", type=int, required=True, dest="t_sub",
                   help="short-window length")
    p.add_argument("--b", default="mle", help="weighting spec (see correct --help)")
    p.add_argument("--repeats", type=int, default=100, help="number of subsamples")
    p.add_argument("--seed", type=int, help="master seed (generated and printed if absent)")
    p.add_argument("--contiguous", action="store_true",
                   help="draw contiguous windows instead of scattered rows")
    p.add_argument("--out-json", help="write the summary JSON here as well")
    p.add_argument("--hist", help="write a ratio_after histogram CSV here")
    p.add_argument("--bins", type=int, default=20, help="histogram bins")
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("wg", help="print a Weingarten table as CSV")
    p.add_argument("--k", type=int, required=True, help="order (1..3 typical)")
    p.add_argument("--z", type=_int_or_fraction, required=True, help="first parameter")
    p.add_argument("--w", type=_int_or_fraction, help="second parameter (double table)")
    p.add_argument("--exact", action="store_true",
                   help="exact rational arithmetic (integer parameters)")
    p.set_defaults(func=cmd_wg)

    p = sub.add_parser("validate", help="run the self-validation checks")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--seed", type=int, help="master seed (generated and printed if absent)")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (RegimeError, DomainError, DataError, WishartRiskError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME


if __name__ == "__main__":
    sys.exit(main())
