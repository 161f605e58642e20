#!/usr/bin/env python3
"""
main.py - Tune Q-learning hyperparameters with FOX and compare optimizers
Library entry points return process exit codes; main() dispatches the
qfox subcommands.
"""

import sys
import os
import argparse
import dataclasses
import logging
import json
from typing import Optional
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor

# Check numpy version
try:
    import numpy
    from packaging import version as pkg_version

    required_version = "1.22.0"
    installed_version = getattr(numpy, '__version__', '0.0.0')

    if pkg_version.parse(installed_version) < pkg_version.parse(required_version):
        print(f"ERROR: numpy version {required_version} or higher is required, "
              f"but version {installed_version} is installed.", file=sys.stderr)
        print(f"Please upgrade: pip install --upgrade 'numpy>={required_version}'", file=sys.stderr)
        sys.exit(3)
except ImportError as e:
    print(f"ERROR: Failed to import numpy: {e}", file=sys.stderr)
    print("Please install: pip install 'numpy>=1.22.0'", file=sys.stderr)
    sys.exit(3)

from . import tuner
from .baselines import ALGORITHMS, DISPLAY_NAMES
from .config import ExperimentConfig
from .envs import make_env
from .errors import ConfigError, QFoxError
from .qlearn import Hyperparams, evaluate_policy, run_training
from .report import write_compare_artifacts, write_tune_artifacts

# Package version
__version__ = "0.1.0"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_INTERRUPTED = 130

logger = logging.getLogger(__name__)

# result.json key of the one-sample-per-run random search variant
SINGLE_SAMPLE_METHOD = "Random (1 sample)"


def version() -> str:
    """
    Return the version of qfox package

    Returns:
        Version string
    """
    return __version__


def configure_logging(verbose: bool = False, debug: bool = False) -> None:
    """Route qfox log records to stderr; WARNING by default, INFO with verbose, DEBUG with debug"""
    level = logging.DEBUG if debug else logging.INFO if verbose else logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def _thread_count(config: ExperimentConfig) -> int:
    return config.threads or os.cpu_count() or 1


def _pool(config: ExperimentConfig) -> Executor:
    """Worker pool for candidate evaluation; processes unless executor is 'thread'"""
    workers = _thread_count(config)
    logger.debug("evaluating candidates on %d %s worker(s)", workers, config.executor)
    if config.executor == "thread":
        return ThreadPoolExecutor(max_workers=workers)
    return ProcessPoolExecutor(max_workers=workers)


def _check_output(path: str) -> bool:
    """Create the output directory; False with a diagnostic when it cannot be written"""
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        print(f"ERROR: Cannot create output directory {path}: {e}", file=sys.stderr)
        return False
    if not os.access(path, os.W_OK):
        print(f"ERROR: Output directory is not writable: {path}", file=sys.stderr)
        return False
    return True


def _tune_one(config: ExperimentConfig, algorithm: str, pool,
              random_samples: Optional[int] = None) -> tuner.TuneResult:
    optimizer = config.optimizer_config(algorithm)
    if random_samples is not None:
        optimizer = dataclasses.replace(optimizer, random_samples=random_samples)
    return tuner.tune(
        optimizer=optimizer,
        task=config.task_config(),
        n_runs=config.n_runs,
        episodes=config.episodes,
        master_seed=config.seed,  # type: ignore[arg-type]
        eval_repeats=config.eval_repeats,
        schedule=config.schedule(),
        eval_episodes=config.eval_episodes,
        executor=pool,
    )


def _print_summary(result: tuner.TuneResult) -> None:
    print(f"{result.method:<8} alpha={result.best_hp.alpha:.4f} gamma={result.best_hp.gamma:.4f} "
          f"reward={result.mean_reward_last_quarter:.4g} greedy={result.greedy_reward:.4g} "
          f"fitness={result.best_fitness:.6g} time={result.wall_time:.1f}s")


def run_experiment(config: ExperimentConfig, verbose: bool = False) -> int:
    """
    Tune with the configured optimizer and write result.json, summary.csv and curve.csv.

    Args:
        config: Validated experiment configuration; optimizer 'all' runs a comparison
        verbose: Enable verbose output

    Returns:
        0 on success, 2 for configuration errors, 3 for runtime failures
    """
    if config.optimizer == "all":
        return compare(config, ALGORITHMS, verbose)

    if not _check_output(config.output):
        return EXIT_RUNTIME

    if verbose:
        print(f"Task: {config.task}, optimizer: {config.optimizer}, seed: {config.seed}")
        print(f"Protocol: g={config.g} max_iter={config.max_iter} runs={config.n_runs} "
              f"episodes={config.episodes}")

    try:
        with _pool(config) as pool:
            result = _tune_one(config, config.optimizer, pool)
    except ConfigError as e:
        print(f"ERROR: Invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except QFoxError as e:
        print(f"ERROR: Tuning failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME

    logger.info("writing artifacts to %s", config.output)
    try:
        paths = write_tune_artifacts(result, config.output)
    except OSError as e:
        print(f"ERROR: Failed to write artifacts to {config.output}: {e}", file=sys.stderr)
        return EXIT_RUNTIME

    _print_summary(result)
    if verbose:
        for path in paths:
            print(f"Wrote {path}")
    return EXIT_OK


def compare(config: ExperimentConfig, algorithms=ALGORITHMS, verbose: bool = False) -> int:
    """
    Tune with several optimizers under the same budget and seeds.

    Each method's full artifact set goes to <output>/<method>/, the merged
    result.json, summary.csv (ordered by reward) and curve.csv to <output>/.
    Random search is ranked at the configured sample budget; unless that is
    already one sample per run, a single-sample variant is also tuned and
    written to result.json and <output>/random-1/ only.

    Args:
        config: Validated experiment configuration
        algorithms: Optimizer names to compare
        verbose: Enable verbose output

    Returns:
        0 on success, 2 for configuration errors, 3 for runtime failures
    """
    if not algorithms:
        print("ERROR: No optimizers to compare", file=sys.stderr)
        return EXIT_CONFIG
    if not _check_output(config.output):
        return EXIT_RUNTIME

    results = {}
    extra = {}
    try:
        with _pool(config) as pool:
            for algorithm in algorithms:
                if verbose:
                    print(f"Tuning with {DISPLAY_NAMES[algorithm]}...")
                result = _tune_one(config, algorithm, pool)
                results[result.method] = result
                write_tune_artifacts(result, os.path.join(config.output, algorithm))
                _print_summary(result)
                if algorithm == "random" and config.random_samples != 1:
                    single = _tune_one(config, algorithm, pool, random_samples=1)
                    single = dataclasses.replace(single, method=SINGLE_SAMPLE_METHOD)
                    extra[single.method] = single
                    write_tune_artifacts(single, os.path.join(config.output, "random-1"))
                    _print_summary(single)
        paths = write_compare_artifacts(results, config.output, extra)
    except ConfigError as e:
        print(f"ERROR: Invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except QFoxError as e:
        print(f"ERROR: Comparison failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as e:
        print(f"ERROR: Failed to write artifacts to {config.output}: {e}", file=sys.stderr)
        return EXIT_RUNTIME

    if verbose:
        for path in paths:
            print(f"Wrote {path}")
    return EXIT_OK


def evaluate(config: ExperimentConfig, alpha: float, gamma: float) -> int:
    """
    Train once with a given (alpha, gamma) and print a JSON report to stdout.

    The report holds the fitness of the run, its mean last-quarter
    reward and the greedy policy's mean reward over eval_episodes episodes.

    Returns:
        0 on success, 2 for configuration errors, 3 for runtime failures
    """
    try:
        hp = Hyperparams(alpha, gamma)
        rng = numpy.random.default_rng(numpy.random.SeedSequence([config.seed, tuner.FINAL_STREAM]))
        run = run_training(make_env(config.task_config()), hp, config.episodes,
                           config.schedule(), rng)
        greedy = evaluate_policy(make_env(config.task_config()), run.q, config.eval_episodes, rng)
        fitness_report = tuner.report(run.traces, config.episodes)
    except ConfigError as e:
        print(f"ERROR: Invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except QFoxError as e:
        print(f"ERROR: Evaluation failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME

    print(json.dumps({
        "task": config.task,
        "alpha": alpha,
        "gamma": gamma,
        "episodes": config.episodes,
        "seed": config.seed,
        "fitness": fitness_report.fitness,
        "mean_reward_last_quarter": fitness_report.mean_reward_last_quarter,
        "mean_steps_last_quarter": fitness_report.mean_steps_last_quarter,
        "greedy_reward": greedy,
    }, indent=2, sort_keys=True))
    return EXIT_OK


def main(argv=None):
    """Main entry point for the qfox command"""
    from . import compare_cli, eval_cli, tune_cli

    parser = argparse.ArgumentParser(
        prog='qfox',
        description='Tune Q-learning step size and discount factor with the FOX optimizer',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Commands:
  tune      Tune (alpha, gamma) with one optimizer
  compare   Tune with FOX, PSO, GA, BA and Random under the same budget
  eval      Train with a given (alpha, gamma) and report the greedy policy reward

Run 'qfox <command> --help' for the options of each command.
"""
    )

    parser.add_argument(
        '--version',
        action='version',
        version=f'%(prog)s {__version__}'
    )

    subparsers = parser.add_subparsers(dest='command', metavar='command')
    tune_cli.add_parser(subparsers)
    compare_cli.add_parser(subparsers)
    eval_cli.add_parser(subparsers)

    args = parser.parse_args(argv)
    if not getattr(args, 'handler', None):
        parser.print_help(sys.stderr)
        return EXIT_CONFIG

    return args.handler(args)


if __name__ == '__main__':
    sys.exit(main())
