"""Command-line front end: ``ocolab <verb> ...`` or ``python -m ocolab <verb> ...``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import figures
from .errors import NoAcceptedTrials, ZeroJumpWeight
from .experiment import CONFIG_KEYS, EstimateReport, discriminate, parse_config, run_experiment
from .fock import DEFAULT_TAIL_TOL, StatePrep, dumps_record, state_record, write_chi_csv
from .jc import format_oracle_table, oracle_report
from .jumps import JumpModel, apply_jump, predict_distribution

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_COMPUTATION = 3
EXIT_IO = 4

DEFAULT_ORACLE_STATES = ("vacuum", "fock:n=1", "thermal:nbar=0.7", "coherent:alpha=1+0.5j", "squeezed:r=0.5")
DEFAULT_ORACLE_YS = (0.5, 1.0, 2.0, math.pi, 7.3)

EPILOG = """\
exit codes:
  0  success
  2  invalid arguments, state specs or config files
  3  computation failed (zero jump weight, no accepted trials)
  4  file could not be read or written

config file for 'simulate' (key = value, '#' comments):
""" + "\n".join(f"  {k:<16} {v}" for k, v in CONFIG_KEYS.items())


class ValidationError(ValueError):
    pass


def _state(args, spec=None):
    try:
        return StatePrep.parse(spec or args.state, dim=args.dim, tail_tol=args.tail_tol).prepare()
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _model(text):
    try:
        return JumpModel.parse(text)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def cmd_prepare(args):
    rho = _state(args)
    sys.stdout.write(dumps_record(state_record(rho)))
    if args.csv:
        write_chi_csv(args.csv, rho.chi)


def cmd_jump(args):
    rho = _state(args)
    out = apply_jump(_model(args.model), rho)
    record = state_record(out.state)
    record["norm"] = out.norm
    sys.stdout.write(dumps_record(record))
    if args.csv:
        write_chi_csv(args.csv, out.state.chi)


def cmd_predict(args):
    rho = _state(args)
    try:
        p = predict_distribution(_model(args.model), rho.chi)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    k = p.size if args.n_max is None else min(args.n_max + 1, p.size)
    sys.stdout.write("n,P_n\n" + "".join(f"{i},{p[i]:.17g}\n" for i in range(k)))


def cmd_figure(args):
    try:
        table = figures.sweep_figure(args.which, points=args.points, start=args.start,
                                     stop=args.stop, chi0=args.chi0)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    figures.write_csv(table, args.output)
    if args.report:
        sys.stdout.write(figures.dumps_report(figures.table_report(table)))


def cmd_oracle(args):
    specs = args.state or list(DEFAULT_ORACLE_STATES)
    states = [(s, _state(args, s)) for s in specs]
    ys = args.y or list(DEFAULT_ORACLE_YS)
    if any(not (y > 0 and math.isfinite(y)) for y in ys):
        raise ValidationError("every y must be finite and > 0")
    sys.stdout.write(format_oracle_table(oracle_report(states, ys, args.method)))


def cmd_simulate(args):
    with open(args.config) as fh:
        text = fh.read()
    try:
        config = parse_config(text, args.seed, source=args.config)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    report = run_experiment(config)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(report.to_text())
    if args.csv:
        _append_csv(args.csv, report)
    r = report
    print(f"state {r.config['state']}  model {r.config['model']}  seed {r.config['seed']}")
    print(f"trials {r.trials}  accepted {r.accepted}  acceptance {r.acceptance_rate:.6g}")
    print(f"chi0 {r.chi0_hat:.6f} +- {r.chi0_se:.6f}   chi1 {r.chi1_hat:.6f} +- {r.chi1_se:.6f}")
    print(f"P0   {r.p0_hat:.6f} +- {r.p0_se:.6f}   P1   {r.p1_hat:.6f} +- {r.p1_se:.6f}")
    if config.candidates:
        result = discriminate(report, config.prep.prepare().chi, config.candidates)
        if args.discrimination:
            with open(args.discrimination, "w") as fh:
                fh.write(result.to_text())
        flag = "  (low confidence)" if result.low_confidence else ""
        print(f"best model {result.best_model}  ranking {', '.join(result.ranking)}{flag}")


def _append_csv(path, report):
    header = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a") as fh:
        if header:
            fh.write(",".join(EstimateReport.CSV_FIELDS) + "\n")
        fh.write(report.csv_row() + "\n")


def cmd_discriminate(args):
    with open(args.report) as fh:
        data = json.load(fh)
    try:
        report = EstimateReport.from_dict(data)
        cfg = report.config
        prep = StatePrep.parse(cfg["state"], dim=cfg.get("dim"), tail_tol=cfg.get("tail_tol", DEFAULT_TAIL_TOL))
        cands = [_model(c) for c in args.candidates.split(",") if c.strip()]
        result = discriminate(report, prep.prepare().chi, cands)
    except (TypeError, KeyError, ValueError) as exc:
        raise ValidationError(f"{args.report}: {exc}") from None
    sys.stdout.write(result.to_text())


def build_parser():
    p = argparse.ArgumentParser(
        prog="ocolab", description="One-count operator laboratory.",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="verb", required=True)

    def state_opts(sp, required=True):
        if required:
            sp.add_argument("--state", required=True,
                            help="thermal:nbar=X | thermal:chi0=X | coherent:alpha=Z | fock:n=K | squeezed:r=X | vacuum")
        sp.add_argument("--dim", type=int, default=None, help="explicit Fock truncation")
        sp.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL)

    sp = sub.add_parser("prepare", help="prepare a state and print its record")
    state_opts(sp)
    sp.add_argument("--csv", help="also write chi_n to this CSV")
    sp.set_defaults(func=cmd_prepare)

    sp = sub.add_parser("jump", help="apply one count of a model to a state")
    state_opts(sp)
    sp.add_argument("--model", required=True, help="A, E, N, H(y) or Beta(b)")
    sp.add_argument("--csv", help="also write the post-count chi_n to this CSV")
    sp.set_defaults(func=cmd_jump)

    sp = sub.add_parser("predict", help="closed-form post-count distribution")
    state_opts(sp)
    sp.add_argument("--model", required=True)
    sp.add_argument("--n-max", type=int, default=None)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("figure", help="write a figure sweep as CSV")
    sp.add_argument("which", choices=figures.FIGURES)
    sp.add_argument("--output", "-o", required=True)
    sp.add_argument("--points", type=int, default=figures.DEFAULT_POINTS)
    sp.add_argument("--start", type=float, default=None)
    sp.add_argument("--stop", type=float, default=None)
    sp.add_argument("--chi0", type=float, default=figures.FIG4_CHI0, help="thermal chi_0 for fig4")
    sp.add_argument("--report", action="store_true", help="print a JSON summary")
    sp.set_defaults(func=cmd_figure)

    sp = sub.add_parser("oracle", help="compare H-model jumps with Jaynes-Cummings evolution")
    sp.add_argument("--state", action="append", help="repeatable; defaults to a small mixed set")
    sp.add_argument("--y", type=float, nargs="+")
    sp.add_argument("--method", choices=("analytic", "series"), default="analytic")
    state_opts(sp, required=False)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("simulate", help="Monte Carlo run of the two-step experiment")
    sp.add_argument("config")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--output", "-o", help="write the estimate report (JSON)")
    sp.add_argument("--csv", help="append a summary row to this CSV")
    sp.add_argument("--discrimination", help="write the ranking of config candidates (JSON)")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("discriminate", help="rank models against a saved report")
    sp.add_argument("report")
    sp.add_argument("--candidates", required=True, help="comma-separated models, e.g. A,E,H(2)")
    sp.set_defaults(func=cmd_discriminate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"ocolab: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ZeroJumpWeight, NoAcceptedTrials) as exc:
        print(f"ocolab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    except OSError as exc:
        print(f"ocolab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
