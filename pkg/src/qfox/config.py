"""
config.py - Experiment configuration

A single flat YAML mapping describes one experiment. Values are resolved in
this order: command line flag, config file, environment variable, default.
Unknown keys, wrong types and out-of-range values are rejected before any
compute starts.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

import yaml

from .baselines import ALGORITHMS, BAParams, GAParams, OptimizerConfig, PSOParams
from .envs import CARTPOLE_BINS, CARTPOLE_BOUNDS, TASKS, TaskConfig, make_env
from .errors import ConfigError, EnvContractError
from .qlearn import EpsilonSchedule

# Environment variables consulted when neither a flag nor the file sets a value
ENV_FALLBACKS = {
    "seed": "QFOX_SEED",
    "output": "QFOX_OUTPUT",
    "threads": "QFOX_THREADS",
}

SEED_LIMIT = 2 ** 64

# Pools for parallel candidate evaluation
EXECUTORS = ("process", "thread")


@dataclass
class ExperimentConfig:
    """Every tunable of a tune / compare / eval invocation"""

    # task
    task: str = "frozenlake"
    map: Any = "4x4"
    slippery: bool = False
    step_cap: Optional[int] = None
    bins: list = field(default_factory=lambda: list(CARTPOLE_BINS))
    bounds: list = field(default_factory=lambda: [list(b) for b in CARTPOLE_BOUNDS])

    # optimizer and protocol
    optimizer: str = "fox"
    g: int = 30
    max_iter: int = 100
    n_runs: int = 10
    episodes: int = 200
    eval_repeats: int = 1
    eval_episodes: int = 100
    random_samples: int = 0

    # exploration
    epsilon_start: float = 1.0
    epsilon_decay: float = 0.99
    epsilon_min: float = 0.01

    # run control and output
    seed: Optional[int] = None
    output: str = "qfox-out"
    threads: Optional[int] = None
    executor: str = "process"

    # baseline meta-parameters
    pso_inertia: float = 0.7
    pso_cognitive: float = 1.5
    pso_social: float = 1.5
    pso_velocity_clamp: float = 0.2
    ga_tournament: int = 3
    ga_crossover_rate: float = 0.9
    ga_mutation_rate: float = 0.1
    ga_mutation_scale: float = 0.1
    ga_elitism: int = 1
    ba_freq_min: float = 0.0
    ba_freq_max: float = 2.0
    ba_loudness: float = 1.0
    ba_pulse_rate: float = 0.5
    ba_alpha: float = 0.9
    ba_gamma: float = 0.9

    def validate(self) -> "ExperimentConfig":
        """Check ranges and build every derived config once; returns self"""
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {', '.join(TASKS)}, got '{self.task}'")
        if self.optimizer not in ALGORITHMS + ("all",):
            raise ConfigError(f"optimizer must be one of {', '.join(ALGORITHMS)} or all, got '{self.optimizer}'")
        for name in ("g", "n_runs", "eval_repeats", "eval_episodes"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.episodes < 4:
            raise ConfigError(f"episodes must be >= 4, got {self.episodes}")
        if self.max_iter < 0:
            raise ConfigError(f"max_iter must be >= 0, got {self.max_iter}")
        if self.step_cap is not None and self.step_cap < 1:
            raise ConfigError(f"step_cap must be >= 1, got {self.step_cap}")
        if self.threads is not None and self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.executor not in EXECUTORS:
            raise ConfigError(f"executor must be one of {', '.join(EXECUTORS)}, got '{self.executor}'")
        if self.seed is None:
            raise ConfigError("seed is required (--seed, config file or QFOX_SEED)")
        if not 0 <= self.seed < SEED_LIMIT:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if isinstance(self.map, list) and not all(isinstance(r, str) for r in self.map):
            raise ConfigError("map must be a map name or a list of row strings")
        if len(self.bins) != 4 or not all(_is_int(b) and b >= 1 for b in self.bins):
            raise ConfigError(f"bins must be 4 integers >= 1, got {self.bins}")
        if len(self.bounds) != 4 or not all(_is_pair(b) for b in self.bounds):
            raise ConfigError(f"bounds must be 4 [low, high] pairs with low < high, got {self.bounds}")
        try:
            make_env(self.task_config())
        except EnvContractError as e:
            raise ConfigError(str(e)) from e
        self.schedule()
        self.optimizer_config("fox")
        return self

    def task_config(self) -> TaskConfig:
        grid = self.map if isinstance(self.map, str) else tuple(self.map)
        return TaskConfig(task=self.task, grid=grid, slippery=self.slippery,
                          step_cap=self.step_cap, bins=tuple(self.bins),
                          bounds=tuple((float(lo), float(hi)) for lo, hi in self.bounds))

    def schedule(self) -> EpsilonSchedule:
        return EpsilonSchedule(self.epsilon_start, self.epsilon_decay, self.epsilon_min)

    def optimizer_config(self, algorithm: str | None = None) -> OptimizerConfig:
        return OptimizerConfig(
            algorithm=algorithm or self.optimizer,
            g=self.g,
            max_iter=self.max_iter,
            random_samples=self.random_samples,
            pso=PSOParams(self.pso_inertia, self.pso_cognitive, self.pso_social,
                          self.pso_velocity_clamp),
            ga=GAParams(self.ga_tournament, self.ga_crossover_rate, self.ga_mutation_rate,
                        self.ga_mutation_scale, self.ga_elitism),
            ba=BAParams(self.ba_freq_min, self.ba_freq_max, self.ba_loudness,
                        self.ba_pulse_rate, self.ba_alpha, self.ba_gamma),
        )

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_pair(value: Any) -> bool:
    return (isinstance(value, (list, tuple)) and len(value) == 2
            and all(_is_int(v) or isinstance(v, float) for v in value)
            and value[0] < value[1])


def _coerce(name: str, value: Any) -> Any:
    """Type-check one value against the declared field type"""
    kind = FIELD_TYPES[name]
    if value is None:
        if kind.startswith("Optional"):
            return None
        raise ConfigError(f"{name} must not be empty")
    if kind in ("int", "Optional[int]"):
        if not _is_int(value):
            raise ConfigError(f"{name} must be an integer, got {value!r}")
        return value
    if kind == "float":
        if not (_is_int(value) or isinstance(value, float)):
            raise ConfigError(f"{name} must be a number, got {value!r}")
        return float(value)
    if kind == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"{name} must be true or false, got {value!r}")
        return value
    if kind == "str":
        if not isinstance(value, str):
            raise ConfigError(f"{name} must be a string, got {value!r}")
        return value
    if kind == "list":
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{name} must be a list, got {value!r}")
        return [list(v) if isinstance(v, (list, tuple)) else v for v in value]
    # map: a name or a list of rows
    if not isinstance(value, (str, list, tuple)):
        raise ConfigError(f"{name} must be a map name or a list of rows, got {value!r}")
    return value if isinstance(value, str) else list(value)


def load_file(path: str) -> dict[str, Any]:
    """Read a flat YAML config file; rejects anything but a mapping of known keys"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"config file {path} is not valid YAML: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a key: value mapping")
    unknown = sorted(set(data) - set(FIELD_TYPES))
    if unknown:
        raise ConfigError(f"unknown config key(s) in {path}: {', '.join(map(str, unknown))}")
    return data


def _from_environment(environ: Mapping[str, str]) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for name, var in ENV_FALLBACKS.items():
        raw = environ.get(var)
        if raw is None or raw == "":
            continue
        if FIELD_TYPES[name] == "Optional[int]":
            try:
                values[name] = int(raw, 0)
            except ValueError:
                raise ConfigError(f"{var} must be an integer, got '{raw}'") from None
        else:
            values[name] = raw
    return values


def resolve_config(path: str | None = None, overrides: Mapping[str, Any] | None = None,
                   environ: Mapping[str, str] | None = None) -> ExperimentConfig:
    """
    Build a validated ExperimentConfig.

    Args:
        path: Optional YAML config file
        overrides: Values from command line flags; None entries are ignored
        environ: Environment to read fallbacks from (defaults to os.environ)

    Returns:
        Validated ExperimentConfig

    Raises:
        ConfigError: for unknown keys, bad types or out-of-range values
    """
    merged: dict[str, Any] = _from_environment(os.environ if environ is None else environ)
    if path:
        merged.update(load_file(path))
    for name, value in (overrides or {}).items():
        if name not in FIELD_TYPES:
            raise ConfigError(f"unknown config key: {name}")
        if value is not None:
            merged[name] = value
    config = ExperimentConfig(**{name: _coerce(name, value) for name, value in merged.items()})
    return config.validate()


# Command line flag -> config key, for flags shared by every subcommand
FLAG_KEYS = {
    "task": "task",
    "map": "map",
    "slippery": "slippery",
    "step_cap": "step_cap",
    "agents": "g",
    "max_iter": "max_iter",
    "runs": "n_runs",
    "episodes": "episodes",
    "eval_repeats": "eval_repeats",
    "eval_episodes": "eval_episodes",
    "random_samples": "random_samples",
    "seed": "seed",
    "output": "output",
    "threads": "threads",
    "executor": "executor",
}


def add_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags shared by tune, compare and eval; each overrides the matching config key"""
    parser.add_argument('--config', help='Path to a flat YAML experiment config file')
    parser.add_argument('--task', choices=TASKS, help='Control task (default: frozenlake)')
    parser.add_argument('--map', help='FrozenLake map name: 4x4 or 8x8 (default: 4x4)')
    parser.add_argument('--slippery', action=argparse.BooleanOptionalAction, default=None,
                        help='Slippery or deterministic FrozenLake dynamics (default: deterministic)')
    parser.add_argument('--step-cap', type=int,
                        help='Episode step cap (default: 200 for frozenlake, 500 for cartpole)')
    parser.add_argument('--agents', '-g', type=int, help='Population size (default: 30)')
    parser.add_argument('--max-iter', type=int, help='Optimizer iterations per run (default: 100)')
    parser.add_argument('--runs', type=int, help='Independent optimizer runs (default: 10)')
    parser.add_argument('--episodes', type=int, help='Training episodes per evaluation (default: 200)')
    parser.add_argument('--eval-repeats', type=int,
                        help='Trainings averaged per candidate evaluation (default: 1)')
    parser.add_argument('--eval-episodes', type=int,
                        help='Greedy policy evaluation episodes (default: 100)')
    parser.add_argument('--random-samples', type=int,
                        help='Random search samples per run; 0 matches the other optimizers\' budget (default: 0)')
    parser.add_argument('--seed', type=int, help='Experiment seed (or set QFOX_SEED env var)')
    parser.add_argument('--output', help='Output directory (or set QFOX_OUTPUT env var)')
    parser.add_argument('--threads', type=int,
                        help='Parallel workers for candidate evaluation (or set QFOX_THREADS env var)')
    parser.add_argument('--executor', choices=EXECUTORS,
                        help='Worker pool for candidate evaluation (default: process)')
    parser.add_argument('--debug', action='store_true',
                        help='Debug logging and print the resolved configuration')
    parser.add_argument('-v', '--verbose', action='store_true', help='Enable verbose output')


def config_from_args(args: argparse.Namespace, **extra: Any) -> ExperimentConfig:
    """Resolve the config file named by --config with the flags in args applied on top"""
    overrides = {key: getattr(args, flag, None) for flag, key in FLAG_KEYS.items()}
    overrides.update(extra)
    return resolve_config(getattr(args, "config", None), overrides)
