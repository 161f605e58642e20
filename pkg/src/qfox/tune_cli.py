#!/usr/bin/env python3
"""
tune_cli.py - Tune (alpha, gamma) with one optimizer
Command-line interface for the qfox tune command
"""

import sys
import json
import argparse
from .baselines import ALGORITHMS
from .config import add_arguments, config_from_args
from .errors import ConfigError
from .main import run_experiment, configure_logging, __version__, EXIT_CONFIG, EXIT_RUNTIME, EXIT_INTERRUPTED

DESCRIPTION = 'Tune Q-learning step size and discount factor with one optimizer'

EPILOG = """
Environment Variables:
  QFOX_SEED     - Default experiment seed
  QFOX_OUTPUT   - Default output directory
  QFOX_THREADS  - Default worker count

Examples:
  # Tune on deterministic 4x4 FrozenLake with the default protocol
  qfox tune --task frozenlake --optimizer fox --seed 7

  # Quick run with a small budget
  qfox tune --task frozenlake --agents 10 --max-iter 20 --runs 3 --seed 7 \\
      --output out/fox

  # CartPole from a config file, with a flag overriding the file
  qfox tune --config cartpole.yaml --runs 2

  # Slippery lake from a file that says otherwise, on worker threads
  qfox tune --config frozenlake.yaml --slippery --executor thread

Output:
  result.json   - best alpha/gamma, fitness, per-run convergence, reward curve,
                  last-quarter reward and steps of the final retrain
  summary.csv   - method, alpha, gamma, reward, time_s
  curve.csv     - episode, reward, normalized_reward

Note: Command line options override the config file, which overrides environment variables.
      Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""


def _add_arguments(parser):
    parser.add_argument(
        '--optimizer',
        choices=ALGORITHMS + ('all',),
        help="Optimizer to tune with; 'all' runs a comparison (default: fox)"
    )
    add_arguments(parser)


def add_parser(subparsers):
    """Register the tune subcommand"""
    parser = subparsers.add_parser(
        'tune',
        help=DESCRIPTION,
        description=DESCRIPTION,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG
    )
    _add_arguments(parser)
    parser.set_defaults(handler=run)
    return parser


def run(args):
    """Run the tune command for parsed arguments"""
    configure_logging(args.verbose, args.debug)

    try:
        config = config_from_args(args, optimizer=args.optimizer)
    except ConfigError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        print("\nUse --help for usage information", file=sys.stderr)
        return EXIT_CONFIG

    if args.debug:
        print(json.dumps(config.to_dict(), indent=2, sort_keys=True), file=sys.stderr)

    try:
        return run_experiment(config, args.verbose)

    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        return EXIT_INTERRUPTED

    except Exception as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_RUNTIME


def main(argv=None):
    """Main entry point for qfox-tune command"""
    parser = argparse.ArgumentParser(
        prog='qfox-tune',
        description=DESCRIPTION,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG
    )
    _add_arguments(parser)
    parser.add_argument(
        '--version',
        action='version',
        version=f'%(prog)s {__version__}'
    )
    return run(parser.parse_args(argv))


if __name__ == '__main__':
    sys.exit(main())
