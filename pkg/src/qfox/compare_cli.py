#!/usr/bin/env python3
"""
compare_cli.py - Compare FOX with PSO, GA, BA and random search
Command-line interface for the qfox compare command
"""

import sys
import json
import argparse
from .baselines import ALGORITHMS
from .config import add_arguments, config_from_args
from .errors import ConfigError
from .main import compare, configure_logging, __version__, EXIT_CONFIG, EXIT_RUNTIME, EXIT_INTERRUPTED

DESCRIPTION = 'Tune with several optimizers under the same budget and seeds'

EPILOG = """
Environment Variables:
  QFOX_SEED     - Default experiment seed
  QFOX_OUTPUT   - Default output directory
  QFOX_THREADS  - Default worker count

Examples:
  # Compare all five optimizers on deterministic 4x4 FrozenLake
  qfox compare --task frozenlake --seed 7 --output out/compare

  # FOX against PSO only, with a small budget
  qfox compare --optimizers fox pso --agents 10 --max-iter 20 --runs 3 --seed 7

  # Rank random search on one sample per run instead of the matched budget
  qfox compare --random-samples 1 --seed 7

Output:
  <output>/<method>/   - result.json, summary.csv and curve.csv of each method
  <output>/random-1/   - random search with one sample per run, kept out of the ranking
  <output>/result.json - every method's result keyed by display name, plus "Random (1 sample)"
  <output>/summary.csv - one row per method, best reward first
  <output>/curve.csv   - method, episode, reward, normalized_reward

Note: Command line options override the config file, which overrides environment variables.
      Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""


def _add_arguments(parser):
    parser.add_argument(
        '--optimizers',
        nargs='+',
        choices=ALGORITHMS,
        default=list(ALGORITHMS),
        metavar='NAME',
        help=f"Optimizers to compare, in order (default: {' '.join(ALGORITHMS)})"
    )
    add_arguments(parser)


def add_parser(subparsers):
    """Register the compare subcommand"""
    parser = subparsers.add_parser(
        'compare',
        help=DESCRIPTION,
        description=DESCRIPTION,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG
    )
    _add_arguments(parser)
    parser.set_defaults(handler=run)
    return parser


def run(args):
    """Run the compare command for parsed arguments"""
    configure_logging(args.verbose, args.debug)

    # Drop repeats, keep the order given
    algorithms = tuple(dict.fromkeys(args.optimizers))

    try:
        config = config_from_args(args)
    except ConfigError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        print("\nUse --help for usage information", file=sys.stderr)
        return EXIT_CONFIG

    if args.debug:
        print(json.dumps(config.to_dict(), indent=2, sort_keys=True), file=sys.stderr)

    try:
        return compare(config, algorithms, args.verbose)

    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        return EXIT_INTERRUPTED

    except Exception as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_RUNTIME


def main(argv=None):
    """Main entry point for qfox-compare command"""
    parser = argparse.ArgumentParser(
        prog='qfox-compare',
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
