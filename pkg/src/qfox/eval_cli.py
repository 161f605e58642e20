#!/usr/bin/env python3
"""
eval_cli.py - Train once with a given (alpha, gamma)
Command-line interface for the qfox eval command
"""

import sys
import json
import argparse
from .config import add_arguments, config_from_args
from .errors import ConfigError
from .main import evaluate, configure_logging, __version__, EXIT_CONFIG, EXIT_RUNTIME, EXIT_INTERRUPTED

DESCRIPTION = 'Train Q-learning with a given (alpha, gamma) and report fitness and greedy reward'

EPILOG = """
Environment Variables:
  QFOX_SEED     - Default experiment seed

Examples:
  # Score a hand-picked pair on deterministic 4x4 FrozenLake
  qfox eval --alpha 0.74 --gamma 0.93 --seed 7

  # Re-check a tuned pair on CartPole
  qfox eval --task cartpole --episodes 500 --alpha 0.2 --gamma 0.99 --seed 7

Output (JSON on stdout):
  fitness, mean_reward_last_quarter, mean_steps_last_quarter, greedy_reward

Note: Command line options override the config file, which overrides environment variables.
      Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""


def _add_arguments(parser):
    parser.add_argument('--alpha', type=float, required=True,
                        help='Learning rate, within [0.01, 1.0]')
    parser.add_argument('--gamma', type=float, required=True,
                        help='Discount factor, within [0.0, 1.0]')
    add_arguments(parser)


def add_parser(subparsers):
    """Register the eval subcommand"""
    parser = subparsers.add_parser(
        'eval',
        help=DESCRIPTION,
        description=DESCRIPTION,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG
    )
    _add_arguments(parser)
    parser.set_defaults(handler=run)
    return parser


def run(args):
    """Run the eval command for parsed arguments"""
    configure_logging(args.verbose, args.debug)

    try:
        config = config_from_args(args)
    except ConfigError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        print("\nUse --help for usage information", file=sys.stderr)
        return EXIT_CONFIG

    if args.debug:
        print(json.dumps(config.to_dict(), indent=2, sort_keys=True), file=sys.stderr)

    try:
        return evaluate(config, args.alpha, args.gamma)

    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        return EXIT_INTERRUPTED

    except Exception as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_RUNTIME


def main(argv=None):
    """Main entry point for qfox-eval command"""
    parser = argparse.ArgumentParser(
        prog='qfox-eval',
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
