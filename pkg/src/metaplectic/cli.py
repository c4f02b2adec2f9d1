"""Command-line front end.

Subcommands::

    check   --matrix m.json --p 1 --q inf [--weight w.json]
    factor  --matrix m.json
    norm    --matrix m.json --eps 1.5 --p 1 --q inf
    sweep   --config cfg.json [--csv out.csv] [--report out.json]
    verify  [--n 512] [--T 16] [--report out.json]

Exit codes: 0 success, 1 usage error, 2 numerical or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .classifier import classify_unweighted, classify_weighted
from .errors import MetaplecticError
from .exponents import ExponentPair
from .gaussian import ambiguity_gaussian, dilated_gaussian, mixed_norm_dilated
from .harness import SweepConfig, run_sweep
from .symplectic import factorize, load_matrix, make_generator
from .weights import load_weight

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def cmd_check(args) -> int:
    S = load_matrix(args.matrix)
    e = ExponentPair(args.p, args.q)
    v = classify_weighted(S, e, load_weight(args.weight)) if args.weight else classify_unweighted(S, e)
    _emit({"status": v.status.value, "reason": v.reason.value, "k": v.k, "exponent": v.exponent})
    return EXIT_OK


def cmd_factor(args) -> int:
    S = load_matrix(args.matrix)
    fact = factorize(S)
    out = fact.to_dict()
    out["reconstruction_error"] = fact.reconstruction_error(S)
    _emit(out)
    return EXIT_OK


def cmd_norm(args) -> int:
    S = load_matrix(args.matrix)
    res = mixed_norm_dilated(S, args.eps, ExponentPair(args.p, args.q))
    _emit(res.to_dict())
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = SweepConfig.load(args.config)
    if args.csv:
        cfg.csv_path = args.csv
    if args.report:
        cfg.report_path = args.report
    report = run_sweep(cfg)
    if not cfg.report_path:
        _emit(report.to_dict())
    if not cfg.csv_path:
        sys.stderr.write(report.csv_text())
    return EXIT_OK


def cmd_verify(args) -> int:
    # imported lazily: the grid engine is the slowest import path
    from .symplectic import Factorization
    from .tfa import SampledSignal, check_symplectic_covariance, discrete_ambiguity, gaussian_signal

    n, T = args.n, args.T
    g = gaussian_signal(1, n, T)
    f = gaussian_signal(1, n, T, scale=1.3, center=[0.4], freq=[0.3])
    generators = {
        "UP": make_generator("UP", 1, [[0.6]]),
        "VQ": make_generator("VQ", 1, [[0.8]]),
        "DL": make_generator("DL", 1, [[2.0]]),
        "Pi": make_generator("Pi", 1, 1),
        "J": make_generator("J", 1),
    }
    covariance = {k: check_symplectic_covariance(f, g, factorize(S)) for k, S in generators.items()}
    covariance["identity"] = check_symplectic_covariance(f, g, Factorization.identity(1))
    oracle = {}
    for eps in (1.2, 2.0, 5.0):
        fe = SampledSignal.from_function(lambda t: dilated_gaussian(eps, t), 1, n, T)
        A = discrete_ambiguity(fe, g)
        pts = A.points()
        exact = ambiguity_gaussian(eps, 1, pts[..., :1], pts[..., 1:])
        oracle[str(eps)] = float(np.max(np.abs(A.values - exact)))
    report = {
        "schema": 1,
        "grid": {"d": 1, "n": n, "T": T},
        "covariance_deviation": covariance,
        "ambiguity_oracle_sup_error": oracle,
        "tolerance": args.tol,
        "pass": bool(max(covariance.values()) <= args.tol and max(oracle.values()) <= args.tol),
    }
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(report, fh, indent=2)
    _emit(report)
    return EXIT_OK if report["pass"] else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="metaplectic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("check", help="classify boundedness on M^{p,q}(_m)")
    p.add_argument("--matrix", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--weight")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("factor", help="factorize a symplectic matrix")
    p.add_argument("--matrix", required=True)
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("norm", help="exact mixed norm of the dilated Gaussian witness")
    p.add_argument("--matrix", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("sweep", help="run an eps sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--csv")
    p.add_argument("--report")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="grid-engine covariance and closed-form agreement checks")
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--T", type=float, default=16.0)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--report")
    p.set_defaults(func=cmd_verify)
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_USAGE
    except (MetaplecticError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
