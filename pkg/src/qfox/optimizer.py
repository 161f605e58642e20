"""
optimizer.py - Plumbing shared by FOX and the baseline optimizers

Search-box bounds, candidates, optimization results, per-agent random
streams and (optionally parallel) population evaluation. Every optimizer
minimizes its objective.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

from .errors import ConfigError, ObjectiveError

logger = logging.getLogger(__name__)


class EvalKey(NamedTuple):
    """Coordinates of one objective evaluation inside an optimizer run"""

    iteration: int
    agent: int


class KeyedObjective:
    """
    Objective that also receives the EvalKey of each evaluation.

    Subclasses implement __call__(position, key) -> float. Plain callables
    f(position) -> float are accepted by every optimizer as well.
    """

    def __call__(self, position: np.ndarray, key: EvalKey) -> float:
        raise NotImplementedError


Objective = Union[Callable[[np.ndarray], float], KeyedObjective]


@dataclass(frozen=True)
class Bounds:
    """Closed per-dimension box [low, high]"""

    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        low = np.asarray(self.low, dtype=np.float64).reshape(-1)
        high = np.asarray(self.high, dtype=np.float64).reshape(-1)
        if low.size == 0 or low.shape != high.shape:
            raise ConfigError("bounds need matching, non-empty low and high vectors")
        if not (np.all(np.isfinite(low)) and np.all(np.isfinite(high))):
            raise ConfigError("bounds must be finite")
        if not np.all(low < high):
            raise ConfigError("bounds need low < high in every dimension")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> "Bounds":
        if not pairs:
            raise ConfigError("bounds must not be empty")
        return cls(np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]))

    @property
    def dim(self) -> int:
        return self.low.size

    @property
    def width(self) -> np.ndarray:
        return self.high - self.low

    def clip(self, position: np.ndarray) -> np.ndarray:
        return np.clip(position, self.low, self.high)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.low, self.high)


@dataclass
class Candidate:
    """One agent: a position in the box and its cached objective value"""

    position: np.ndarray
    fitness: float = math.inf


@dataclass
class OptimizeResult:
    """
    Outcome of one optimizer run.

    Args:
        best: Best candidate seen
        history: Best-so-far objective value after initialization and after each iteration
        evaluations: Number of objective evaluations performed
    """

    best: Candidate
    history: list[float] = field(default_factory=list)
    evaluations: int = 0


def stream_seed(rng: np.random.Generator) -> int:
    """Draw the base seed all per-agent streams of a run derive from"""
    return int(rng.integers(2 ** 63))


def agent_rng(seed: int, iteration: int, agent: int) -> np.random.Generator:
    """Independent stream for one agent in one iteration"""
    return np.random.default_rng(np.random.SeedSequence([seed, iteration, agent]))


def _call(objective: Objective, position: np.ndarray, key: EvalKey) -> float:
    try:
        if isinstance(objective, KeyedObjective):
            value = objective(position, key)
        else:
            value = objective(position)
    except ObjectiveError:
        raise
    except Exception as e:
        raise ObjectiveError(f"objective failed: {e}", key.agent, key.iteration) from e
    value = float(value)
    if math.isnan(value):
        raise ObjectiveError("objective returned NaN", key.agent, key.iteration)
    return value


def evaluate(objective: Objective, positions: Sequence[np.ndarray], iteration: int,
             executor: Executor | None = None) -> list[float]:
    """
    Evaluate a population, in parallel when an executor is given.

    Returns:
        Objective values in agent order
    """
    keys = [EvalKey(iteration, agent) for agent in range(len(positions))]
    logger.debug("evaluating %d positions for iteration %d", len(positions), iteration)
    if executor is None:
        return [_call(objective, p, k) for p, k in zip(positions, keys)]
    futures = [executor.submit(_call, objective, p, k) for p, k in zip(positions, keys)]
    return [f.result() for f in futures]


def check_budget(g: int, max_iter: int) -> None:
    if g < 1:
        raise ConfigError(f"population size must be >= 1, got {g}")
    if max_iter < 0:
        raise ConfigError(f"max_iter must be >= 0, got {max_iter}")


def best_index(values: Sequence[float]) -> int:
    """Index of the smallest value, first on ties"""
    return int(np.argmin(values))
