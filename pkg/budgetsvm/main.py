"""Main entry point for budgetsvm."""

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from budgetsvm.config import (
    ConfigError,
    Settings,
    TrainConfig,
    build_kernel,
    get_default_config_path,
    load_config,
    parse_algorithm,
    sweep_threads,
)

EXAMPLES = """
Examples:
  budgetsvm synth --n 1000 --d 2 --seed 1 --out blobs.txt
  budgetsvm train --data adult.txt --test adult.t --algo bsca --budget 500 \\
      --c 32 --gamma 0.0078125 --epochs 10 --out run.csv
  budgetsvm train --data blobs.txt --test blobs.t --seed 3 --wall-time off --out run.csv
  budgetsvm sweep --data cod-rna.txt --test cod-rna.t --budgets 200,500,1000 --out cod.csv
  budgetsvm verify --suite lemma1 --seed 7
  budgetsvm evaluate --model run.model --test adult.t

Configuration:
  Defaults for the training flags can be kept in ./budgetsvm.toml:

  [train]
  algo = "bsca"
  c = 32.0
  gamma = 0.0078125
  budget = 500

  [sweep]
  budgets = [200, 500, 1000]
"""


def setup_logging(verbose: bool = False, debug: bool = False) -> None:
    """Set up logging configuration.

    Args:
        verbose: If True, enable info logging
        debug: If True, enable debug logging
    """
    if debug:
        level = logging.DEBUG
    elif verbose:
        level = logging.INFO
    else:
        level = logging.WARNING

    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def print_status(message: str) -> None:
    """Print a status message to stderr."""
    print(f"[budgetsvm] {message}", file=sys.stderr)


def _on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError(f"expected 'on' or 'off', got '{value}'")
    return value == "on"


def _budget_list(value: str) -> list[int]:
    try:
        budgets = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"budgets must be comma-separated integers, got '{value}'")
    if not budgets:
        raise argparse.ArgumentTypeError("budget list is empty")
    return budgets


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True, help="Training set in sparse text format")
    parser.add_argument("--test", required=True, help="Test set in sparse text format")
    parser.add_argument("--out", required=True, help="CSV log path")
    parser.add_argument("--algo", choices=["bsca", "bsgd", "sca", "sgd"], default=None)
    parser.add_argument("--budget", type=int, default=None, help="Budget B (budgeted solvers)")
    parser.add_argument("--c", type=float, default=None, help="Regularization constant C")
    parser.add_argument("--gamma", type=float, default=None, help="Gaussian kernel bandwidth")
    parser.add_argument("--kernel", choices=["gaussian", "linear"], default=None)
    parser.add_argument("--epochs", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--log-every", type=int, default=None, help="Epochs between log rows")
    parser.add_argument("--coalesce", type=_on_off, default=None, metavar="{on,off}")
    parser.add_argument("--maintenance", choices=["merge", "remove"], default=None)
    parser.add_argument(
        "--wall-time",
        type=_on_off,
        default=None,
        metavar="{on,off}",
        help="Record wall time (off writes 0 for byte-identical logs)",
    )
    parser.add_argument("--plot", default=None, help="Write an SVG plot of the log")


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse command line arguments.

    Returns:
        Parsed arguments namespace
    """
    from budgetsvm.analysis.verify import SUITES

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-c",
        "--config",
        type=str,
        default=None,
        help="Path to configuration file (default: ./budgetsvm.toml)",
    )
    common.add_argument("-v", "--verbose", action="store_true", help="Enable verbose logging")
    common.add_argument("--debug", action="store_true", help="Enable debug logging")

    parser = argparse.ArgumentParser(
        prog="budgetsvm",
        description="budgetsvm - Kernel SVM training on a budget",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EXAMPLES,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    train = commands.add_parser("train", parents=[common], help="Train one model")
    _add_run_flags(train)
    train.add_argument("--model-out", default=None, help="Save the final model")

    sweep = commands.add_parser("sweep", parents=[common], help="Train once per budget")
    _add_run_flags(sweep)
    sweep.add_argument("--budgets", type=_budget_list, default=None, help="e.g. 200,500,1000")

    verify = commands.add_parser("verify", parents=[common], help="Run a self-check suite")
    verify.add_argument("--suite", choices=list(SUITES), required=True)
    verify.add_argument("--seed", type=int, default=1)
    verify.add_argument("--n", type=int, default=None, help="Instance size override")

    synth = commands.add_parser("synth", parents=[common], help="Write a two-blob dataset")
    synth.add_argument("--n", type=int, required=True)
    synth.add_argument("--d", type=int, required=True)
    synth.add_argument("--seed", type=int, default=1)
    synth.add_argument("--out", required=True)

    evaluate = commands.add_parser("evaluate", parents=[common], help="Test a saved model")
    evaluate.add_argument("--model", required=True)
    evaluate.add_argument("--test", required=True)

    return parser.parse_args(argv)


def load_settings(config: str | None) -> Settings:
    """Settings from ``-c``, the default location, or built-in defaults.

    Raises:
        ConfigError: If the configuration file is missing or invalid
    """
    path = Path(config) if config else get_default_config_path()
    if path is None:
        return Settings()
    return load_config(path)


def build_train_config(base: TrainConfig, args: argparse.Namespace) -> TrainConfig:
    """Overlay command line flags on the configured defaults."""
    changes = {}
    if args.algo is not None:
        changes["algo"] = parse_algorithm(args.algo)
    if args.c is not None:
        changes["C"] = args.c
    if args.kernel is not None or args.gamma is not None:
        changes["kernel"] = build_kernel(
            args.kernel or base.kernel.kind.value,
            args.gamma if args.gamma is not None else base.kernel.gamma,
        )
    for name in ("budget", "epochs", "seed", "log_every", "coalesce", "maintenance", "wall_time"):
        value = getattr(args, name)
        if value is not None:
            changes[name] = value
    return base.with_overrides(**changes)


def _check_inputs(*paths: str) -> None:
    for path in paths:
        if not Path(path).is_file():
            raise FileNotFoundError(f"No such file: {path}")


def run_training(
    config: TrainConfig,
    data_path: str,
    test_path: str,
    out: str | Path,
    plot: str | None = None,
    model_out: str | None = None,
    keep_events: bool = False,
) -> list:
    """Load the data, train, and write every requested output file."""
    from budgetsvm.data import load_dataset, save_model
    from budgetsvm.report.csv_log import maintenance_log_path, write_maintenance_log, write_records
    from budgetsvm.training.solvers import train

    train_ds = load_dataset(data_path)
    test_ds = load_dataset(test_path)
    result = train(config, train_ds, test_ds, keep_events=keep_events)

    write_records(result.records, out)
    if keep_events:
        write_maintenance_log(result.maintenance_events, maintenance_log_path(out))
    if model_out:
        save_model(result.model, model_out)
    if plot:
        from budgetsvm.report.plot import plot_records

        plot_records(result.records, plot, title=f"{config.algo.value} B={config.capacity}")
    return result.records


def _sweep_job(config: TrainConfig, data: str, test: str, out: Path, keep_events: bool) -> Path:
    run_training(config, data, test, out, keep_events=keep_events)
    return out


def cmd_train(args: argparse.Namespace, settings: Settings) -> int:
    from budgetsvm.report.console import print_summary

    config = build_train_config(settings.train, args)
    _check_inputs(args.data, args.test)
    print_status(f"Training {config.algo.value} on {args.data}")
    records = run_training(
        config,
        args.data,
        args.test,
        args.out,
        plot=args.plot,
        model_out=args.model_out,
        keep_events=args.verbose,
    )
    if args.verbose and records:
        print_summary(records, title=f"{config.algo.value} {config.kernel.describe()}")
    print_status(f"Wrote {args.out}")
    return 0


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    from budgetsvm.report.csv_log import sweep_output_path

    base = build_train_config(settings.train, args)
    budgets = args.budgets or list(settings.sweep.budgets)
    configs = [base.with_overrides(budget=b) for b in budgets]
    _check_inputs(args.data, args.test)
    if not base.algo.is_budgeted:
        logging.warning(f"{base.algo.value} ignores the budget; every sweep run is identical")

    outputs = [sweep_output_path(args.out, b) for b in budgets]
    threads = min(sweep_threads(settings.sweep), len(configs))
    print_status(f"Sweeping budgets {budgets} with {threads} worker(s)")
    if threads <= 1:
        for config, out in zip(configs, outputs):
            _sweep_job(config, args.data, args.test, out, args.verbose)
            print_status(f"Wrote {out}")
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_sweep_job, config, args.data, args.test, out, args.verbose)
                for config, out in zip(configs, outputs)
            ]
            for future in futures:
                print_status(f"Wrote {future.result()}")
    return 0


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    from budgetsvm.analysis.verify import run_suite
    from budgetsvm.report.console import print_suite

    result = run_suite(args.suite, args.seed, args.n)
    print_suite(result)
    return 0 if result.passed else 1


def cmd_synth(args: argparse.Namespace, settings: Settings) -> int:
    from budgetsvm.data import write_dataset
    from budgetsvm.data.synth import two_blobs

    ds = two_blobs(args.n, args.d, args.seed)
    write_dataset(ds, args.out)
    print_status(f"Wrote {ds.n} examples to {args.out}")
    return 0


def cmd_evaluate(args: argparse.Namespace, settings: Settings) -> int:
    from budgetsvm.analysis.diagnostics import test_accuracy
    from budgetsvm.data import load_dataset, load_model

    _check_inputs(args.model, args.test)
    model = load_model(args.model)
    accuracy = test_accuracy(model, load_dataset(args.test))
    print(f"accuracy={accuracy!r} sv_count={len(model)}")
    return 0


COMMANDS = {
    "train": cmd_train,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "synth": cmd_synth,
    "evaluate": cmd_evaluate,
}


def main(argv: list[str] | None = None) -> int:
    """Main entry point.

    Returns:
        Exit code (0 for success, 1 for failed runs or checks, 2 for usage errors)
    """
    from budgetsvm.analysis.diagnostics import DiagnosticsError
    from budgetsvm.data import DatasetFormatError, ModelFormatError
    from budgetsvm.training import BudgetError, TrainingError

    try:
        args = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    setup_logging(args.verbose, args.debug)

    try:
        settings = load_settings(args.config)
        return COMMANDS[args.command](args, settings)
    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return 2
    except (OSError, DatasetFormatError, ModelFormatError) as e:
        print(f"Input error: {e}", file=sys.stderr)
        return 1
    except (TrainingError, DiagnosticsError, BudgetError, ValueError) as e:
        logging.debug("Run failed", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
