"""
qfox - Tune Q-learning step size and discount factor with the FOX optimizer
"""

__version__ = "0.1.0"

from .main import run_experiment, compare, evaluate, main, version
from .tuner import tune, fitness, TuneResult
from .fox import optimize as fox_optimize
from .baselines import run_optimizer, OptimizerConfig
from .config import ExperimentConfig, resolve_config
from .errors import QFoxError, ConfigError, EnvContractError, ObjectiveError, TuningError

__all__ = [
    "run_experiment",
    "compare",
    "evaluate",
    "main",
    "version",
    "tune",
    "fitness",
    "TuneResult",
    "fox_optimize",
    "run_optimizer",
    "OptimizerConfig",
    "ExperimentConfig",
    "resolve_config",
    "QFoxError",
    "ConfigError",
    "EnvContractError",
    "ObjectiveError",
    "TuningError",
    "__version__",
]
