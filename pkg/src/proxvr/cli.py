"""Command-line experiment runner.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 divergence
abort.  A flat key=value config file can preset any flag; explicit flags
win.  Relative output paths land in --out-dir (or $PROXVR_OUT_DIR).
"""
from __future__ import annotations

import argparse
import sys

from .bench import (ConfigError, ExperimentConfig, OUT_DIR_ENV, SOLVER_IDS,
                    load_config, parse_kv_pairs, parse_seed_spec,
                    run_experiment, tune_sgd)
from .libsvm import LibsvmParseError
from .solvers import DivergenceError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DIVERGED = 4


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="key=value config file; flags override it")
    sub.add_argument("--solver", default="proxsvrg",
                     help=f"comma-separated ids from {', '.join(SOLVER_IDS)}")
    sub.add_argument("--data", help="LIBSVM file (rows are normalized)")
    sub.add_argument("--synthetic", help="synthetic covariance data, e.g. n=512,d=20")
    sub.add_argument("--pl-testbed", help="PL testbed params, e.g. n=256,d=10,lam=0.01")
    sub.add_argument("--plan", default="auto",
                     choices=["auto", "thm1", "thm2", "thm3", "thm4", "general", "manual"])
    sub.add_argument("--eta", type=float, help="manual step size")
    sub.add_argument("--batch", type=int, help="minibatch size")
    sub.add_argument("--epoch-len", type=int, help="inner iterations per epoch (svrg)")
    sub.add_argument("--eta0", type=float, default=0.1, help="sgd initial step size")
    sub.add_argument("--eta-prime", type=float, default=0.0, help="sgd decay factor")
    sub.add_argument("--seeds", default="1", help="seed spec: 1..10 or 3,5,9")
    sub.add_argument("--passes", type=float, default=20.0, help="effective-pass budget")
    sub.add_argument("--stride", type=float, default=1.0,
                     help="checkpoint every this many effective passes")
    sub.add_argument("--warm-start", action="store_true",
                     help="initialize with n stochastic-gradient steps")
    sub.add_argument("--stages", type=int, help="restart stages for pl solvers")
    sub.add_argument("--data-seed", type=int, default=0, help="synthetic data seed")
    sub.add_argument("--out-dir", help=f"output directory (default ${OUT_DIR_ENV} or .)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="proxvr",
                                     description="composite finite-sum solver benchmarks")
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="run solvers and emit traces")
    _add_common_flags(run)
    run.add_argument("--trace", help="CSV output path")
    run.add_argument("--svg", help="SVG comparison plot path")

    tune = subs.add_parser("tune", help="grid-search the sgd step-size schedule")
    _add_common_flags(tune)
    tune.add_argument("--eta0-grid", help="comma-separated eta0 candidates")
    tune.add_argument("--eta-prime-grid", help="comma-separated eta' candidates")
    tune.add_argument("--tune-passes", type=float, default=5.0)
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Pre-scan for --config and turn the file's values into parser defaults."""
    if "--config" not in argv:
        return argv
    pos = argv.index("--config")
    if pos + 1 >= len(argv):
        raise ConfigError("--config needs a file path")
    values = load_config(argv[pos + 1])
    for sub in parser._subparsers._group_actions[0].choices.values():  # noqa: SLF001
        defaults = {}
        for key, val in values.items():
            dest = key.replace("-", "_")
            for action in sub._actions:  # noqa: SLF001
                if action.dest == dest:
                    if action.type is not None:
                        defaults[dest] = action.type(val)
                    elif isinstance(action, argparse._StoreTrueAction):  # noqa: SLF001
                        defaults[dest] = val.lower() == "true"
                    else:
                        defaults[dest] = val
        sub.set_defaults(**defaults)
    return argv


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        solvers=[s.strip() for s in args.solver.split(",") if s.strip()],
        data_path=args.data,
        synthetic=parse_kv_pairs(args.synthetic) if args.synthetic else None,
        pl_testbed=parse_kv_pairs(args.pl_testbed) if args.pl_testbed else None,
        plan_mode=args.plan,
        eta=args.eta,
        batch=args.batch,
        epoch_len=args.epoch_len,
        eta0=args.eta0,
        eta_prime=args.eta_prime,
        seeds=parse_seed_spec(args.seeds),
        passes=args.passes,
        stride=args.stride,
        warm_start=args.warm_start,
        stages=args.stages,
        data_seed=args.data_seed,
        trace_path=getattr(args, "trace", None),
        svg_path=getattr(args, "svg", None),
        out_dir=args.out_dir,
    )


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        cfg = config_from_args(args)
        if args.command == "run":
            traces, summary = run_experiment(cfg)
            for solver, passes, vals in summary:
                print(f"{solver}: {len(traces)} traces, final median "
                      f"suboptimality {vals[-1]:.6g} at {passes[-1]:.3g} passes")
            if cfg.trace_path:
                print(f"trace written to {cfg.trace_path}")
            if cfg.svg_path:
                print(f"plot written to {cfg.svg_path}")
        else:
            cfg.solvers = ["proxsgd"]
            cfg.validate()
            eta0_grid = ([float(v) for v in args.eta0_grid.split(",")]
                         if args.eta0_grid else None)
            etap_grid = ([float(v) for v in args.eta_prime_grid.split(",")]
                         if args.eta_prime_grid else None)
            (eta0, eta_prime), results = tune_sgd(cfg, eta0_grid, etap_grid,
                                                  tune_passes=args.tune_passes)
            for e0, ep, score in results:
                print(f"eta0={e0:g} eta'={ep:g} -> median suboptimality {score:.6g}")
            print(f"best: --eta0 {eta0:g} --eta-prime {eta_prime:g}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, LibsvmParseError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DivergenceError as exc:
        print(f"divergence abort: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
