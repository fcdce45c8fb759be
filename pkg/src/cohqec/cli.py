"""Command-line interface.

Subcommands: simulate, predict, fit, count-malignant, alpha-dist.
Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .analytic import PREDICTORS, PredictionInput
from .codes import parse_code_token
from .decoder import TIE_BREAK_RULE, build_lookup_decoder, enumerate_malignant_sets
from .engine import exact_alpha_distribution
from .experiments import (
    ExperimentConfig,
    fit_failure_curve,
    read_config_file,
    read_curve,
    run_experiment,
    write_curve,
    write_prediction,
)
from .noise import parse_distribution_token


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); map to exit code 1
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="cohqec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run Monte Carlo trajectories and write a CSV curve")
    sim.add_argument("--config", help="key=value file providing defaults for the flags below")
    sim.add_argument("--code", help="code token, e.g. rep:3 or surface:3")
    sim.add_argument("--noise", help="noise tokens joined with '+', e.g. gn:x:const:0.05")
    sim.add_argument("--strategy", choices=("active", "passive"))
    sim.add_argument("--init", choices=("zero", "random"))
    sim.add_argument("--reference", choices=("zero", "plus"))
    sim.add_argument("--cycles", type=int)
    sim.add_argument("--trials", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out", required=False)
    sim.add_argument("--allow-large", action="store_true", default=None)

    pred = sub.add_parser("predict", help="evaluate an analytic failure curve and write a CSV")
    pred.add_argument("--model", required=True, choices=sorted(PREDICTORS))
    pred.add_argument("--d", type=int, required=True)
    pred.add_argument("--a", type=int, required=True, help="lowest-weight malignant set count")
    pred.add_argument("--b", type=int, default=0, help="proper-subset count")
    pred.add_argument("--mu", type=float)
    pred.add_argument("--sigma", type=float)
    pred.add_argument("--dist", help="distribution token, e.g. normal:0:0.1")
    pred.add_argument("--p", type=float)
    pred.add_argument("--cycles", type=int, required=True)
    pred.add_argument("--out")

    fit = sub.add_parser("fit", help="fit A n + B (n^2 - n) to a CSV curve")
    fit.add_argument("--in", dest="path", required=True)

    mal = sub.add_parser("count-malignant", help="enumerate malignant sets of a code")
    mal.add_argument("--code", required=True)
    mal.add_argument("--axis", choices=("x", "z"), default="x")

    alpha = sub.add_parser("alpha-dist", help="exact per-syndrome branch amplitudes for one cycle")
    alpha.add_argument("--code", required=True)
    alpha.add_argument("--axis", choices=("x", "z"), default="x")
    alpha.add_argument("--angle", type=float, help="shared rotation angle (radians)")
    alpha.add_argument("--angles", help="comma-separated per-qubit angles")
    alpha.add_argument("--out")

    return parser


def _cmd_simulate(args) -> int:
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    overrides = {
        "code": args.code,
        "noise": args.noise,
        "strategy": args.strategy,
        "init": args.init,
        "reference": args.reference,
        "cycles": args.cycles,
        "trials": args.trials,
        "seed": args.seed,
        "out": args.out,
        "allow_large": args.allow_large,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    if "code" not in values or "noise" not in values:
        raise UsageError("simulate needs at least --code and --noise (or a --config file)")
    try:
        config = ExperimentConfig.from_mapping(values)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad configuration: {exc}")
    curve = run_experiment(config)
    if config.out:
        write_curve(curve, config.out)
    else:
        sys.stdout.write(f"# {curve.metadata}\n")
        for c, m, s, t in zip(curve.cycles, curve.mean, curve.stderr, curve.trials):
            sys.stdout.write(f"{c},{m!r},{s!r},{t}\n")
    return 0


def _cmd_predict(args) -> int:
    dist = None
    if args.dist:
        try:
            dist = parse_distribution_token(args.dist)
        except ValueError as exc:
            raise UsageError(f"bad distribution token: {exc}")
    try:
        inp = PredictionInput(
            d=args.d,
            a_d=args.a,
            b_d=args.b,
            n_cycles=args.cycles,
            mu=args.mu,
            sigma=args.sigma,
            dist=dist,
            p=args.p,
        )
        curve = PREDICTORS[args.model](inp)
    except ValueError as exc:
        raise UsageError(str(exc))
    meta = {
        "source": args.model,
        "d": str(args.d),
        "a_d": str(args.a),
        "b_d": str(args.b),
        "A": repr(curve.A),
        "B": repr(curve.B),
    }
    if args.p is not None:
        meta["p"] = repr(args.p)
    if args.mu is not None:
        meta["mu"] = repr(args.mu)
    if args.sigma is not None:
        meta["sigma"] = repr(args.sigma)
    if args.dist:
        meta["dist"] = args.dist
    if curve.validity_n is not None:
        meta["validity_n"] = str(curve.validity_n)
    if curve.clipped:
        meta["clipped"] = "true"
    if args.out:
        write_prediction(curve, args.out, meta)
    else:
        for c, v in zip(curve.cycles, curve.values):
            sys.stdout.write(f"{c},{v!r},0.0,0,{args.model}\n")
    return 0


def _cmd_fit(args) -> int:
    result = fit_failure_curve(read_curve(args.path))
    sys.stdout.write(
        f"A={result.A!r} stderr_A={result.stderr_A!r}\n"
        f"B={result.B!r} stderr_B={result.stderr_B!r}\n"
        f"red_chisq={result.red_chisq!r}\n"
    )
    return 0


def _cmd_count_malignant(args) -> int:
    code = parse_code_token(args.code)
    decoder = build_lookup_decoder(code, args.axis)
    counts = enumerate_malignant_sets(code, decoder, args.axis)
    sys.stdout.write(
        f"code={args.code} axis={args.axis} a_d={counts.a_d} b_d={counts.b_d} "
        f"tie_break={TIE_BREAK_RULE}\n"
    )
    return 0


def _cmd_alpha_dist(args) -> int:
    code = parse_code_token(args.code)
    if (args.angle is None) == (args.angles is None):
        raise UsageError("alpha-dist needs exactly one of --angle or --angles")
    if args.angle is not None:
        angles = np.full(code.n_qubits, args.angle)
    else:
        angles = np.array([float(v) for v in args.angles.split(",")])
        if len(angles) != code.n_qubits:
            raise UsageError(f"need {code.n_qubits} angles for {args.code}")
    dist = exact_alpha_distribution(code, args.axis, angles)
    lines = ["syndrome,probability,alpha_re,alpha_im,abs_alpha\n"]
    for entry in dist.entries:
        syn = "".join(str(b) for b in entry.syndrome.bits)
        if entry.alpha is None:
            lines.append(f"{syn},{entry.probability!r},,,\n")
        else:
            a = entry.alpha
            lines.append(f"{syn},{entry.probability!r},{a.real!r},{a.imag!r},{abs(a)!r}\n")
    header = (
        f"# code={args.code} axis={args.axis} tie_break={TIE_BREAK_RULE} "
        "normalization=reference-amplitude-real-positive\n"
    )
    text = header + "".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "predict": _cmd_predict,
    "fit": _cmd_fit,
    "count-malignant": _cmd_count_malignant,
    "alpha-dist": _cmd_alpha_dist,
}


def cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    except Exception as exc:  # runtime failure, not a usage problem
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
