"""``gelu-lab`` command line entry point.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

import argparse
import logging
import sys
from pathlib import Path

from gelu_lab import activations
from gelu_lab.data import DataError
from gelu_lab.experiments import (
    ACTIVATIONS,
    ConfigError,
    ExperimentConfig,
    best_learning_rate,
    emit_activation_table,
    format_table,
    run_autoencoder,
    run_classification,
    run_lr_sweep,
    run_soi_demo,
    write_csv,
    write_medians_csv,
)

EXIT_CONFIG = 2
EXIT_DATA = 3
DEFAULT_KINDS = "gelu,relu,elu"


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_activation_flags(p):
    p.add_argument("--alpha", type=float, default=1.0, help="ELU alpha")
    p.add_argument("--mu", type=float, default=0.0, help="GELU mean")
    p.add_argument("--sigma", type=float, default=1.0, help="GELU standard deviation")


def _add_run_flags(p, task):
    p.add_argument("--config", help="JSON config file; explicit flags override it")
    p.add_argument("--save-config", help="write the resolved config as JSON and continue")
    p.add_argument("--activation", choices=ACTIVATIONS, default="soi" if task == "soi-demo" else None)
    _add_activation_flags(p)
    p.add_argument("--dropout", type=float)
    p.add_argument("--lr", type=float)
    p.add_argument("--lr-sweep", type=_floats, help="comma-separated learning rates")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--widths", type=_ints, help="comma-separated hidden widths")
    p.add_argument("--width-div", type=int)
    for name in ("train-images", "train-labels", "test-images", "test-labels", "mnist-dir"):
        p.add_argument(f"--{name}")
    p.add_argument("--synthetic", action="store_true", default=None)
    p.add_argument("--subset", type=int, help="training examples to use")
    p.add_argument("--val-subset", type=int, help="validation examples (default subset/4)")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--median-out", help="also write per-epoch medians across runs")


def build_parser():
    parser = argparse.ArgumentParser(prog="gelu-lab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-epoch progress")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("clf", "MNIST classification"), ("ae", "MNIST autoencoder"),
                        ("soi-demo", "classifier with SOI maps in place of activations")):
        _add_run_flags(sub.add_parser(name, help=help_), name)

    p = sub.add_parser("plot-act", help="activation curves as TSV")
    p.add_argument("--lo", type=float, default=-4.0)
    p.add_argument("--hi", type=float, default=4.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--kinds", default=DEFAULT_KINDS, help=f"comma-separated (default {DEFAULT_KINDS})")
    _add_activation_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("approx-scan", help="max error of the tanh GELU approximation")
    p.add_argument("--lo", type=float, default=-8.0)
    p.add_argument("--hi", type=float, default=8.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--out")
    return parser


def config_from_args(args):
    base = ExperimentConfig.load(args.config).to_dict() if args.config else {}
    base["task"] = args.command
    for key in ExperimentConfig.__dataclass_fields__:
        if key == "task":
            continue
        value = getattr(args, key, None)
        if value is not None:
            base[key] = value
    return ExperimentConfig.from_dict(base)


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _suffixed(path, lr):
    p = Path(path)
    return str(p.with_name(f"{p.stem}_lr{lr:g}{p.suffix}"))


def _run_experiment(args):
    config = config_from_args(args)
    if args.save_config:
        config.save(args.save_config)
    runner = {"clf": run_classification, "ae": run_autoencoder, "soi-demo": run_soi_demo}[config.task]
    if config.lr_sweep:
        if config.task != "ae":
            raise ConfigError("--lr-sweep is only supported for the autoencoder")
        curves = run_lr_sweep(config, runner)
        best = best_learning_rate(curves)
        for lr, curve in curves.items():
            if config.out:
                write_csv(curve, _suffixed(config.out, lr))
            else:
                sys.stdout.write(f"# lr={lr:g}\n")
                write_csv(curve, sys.stdout)
            if args.median_out:
                write_medians_csv(curve, _suffixed(args.median_out, lr))
        print(f"best lr {best:g} (final median train loss "
              f"{curves[best].final_median('train'):.6g})", file=sys.stderr)
        return
    curve = runner(config)
    if config.out:
        write_csv(curve, config.out)
    else:
        write_csv(curve, sys.stdout)
    if args.median_out:
        write_medians_csv(curve, args.median_out)


def _plot_act(args):
    kinds = [activations.from_name(k.strip(), alpha=args.alpha, mu=args.mu, sigma=args.sigma)
             for k in args.kinds.split(",") if k.strip()]
    rows = emit_activation_table(args.lo, args.hi, args.step, kinds)
    _emit(format_table(rows, kinds), args.out)


def _approx_scan(args):
    err, at = activations.approximation_error_scan(args.lo, args.hi, args.step)
    _emit(f"max_abs_err\targmax\n{err:.17g}\t{at:.17g}\n", args.out)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        if args.command == "plot-act":
            _plot_act(args)
        elif args.command == "approx-scan":
            _approx_scan(args)
        else:
            _run_experiment(args)
    except ConfigError as exc:
        print(f"gelu-lab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"gelu-lab: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"gelu-lab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
