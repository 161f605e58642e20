"""
qlearn.py - Tabular Q-learning

TD error, table update, epsilon-greedy behaviour policy, greedy policy
extraction and the episodic training loop that feeds the tuner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .envs import Environment
from .errors import ConfigError

ALPHA_RANGE = (0.01, 1.0)
GAMMA_RANGE = (0.0, 1.0)


@dataclass(frozen=True)
class Hyperparams:
    """Step size alpha and discount factor gamma of one Q-learning run"""

    alpha: float
    gamma: float

    def __post_init__(self):
        for name, value, (low, high) in (("alpha", self.alpha, ALPHA_RANGE),
                                         ("gamma", self.gamma, GAMMA_RANGE)):
            if not math.isfinite(value) or not low <= value <= high:
                raise ConfigError(f"{name} must be within [{low}, {high}], got {value}")


@dataclass
class QTable:
    """Dense [state_count x action_count] action-value table"""

    values: np.ndarray

    @classmethod
    def zeros(cls, state_count: int, action_count: int) -> "QTable":
        return cls(np.zeros((state_count, action_count), dtype=np.float64))

    @property
    def state_count(self) -> int:
        return self.values.shape[0]

    @property
    def action_count(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class EpisodeTrace:
    """Per-episode record: summed reward, mean |TD error| and step count"""

    total_reward: float
    td_error_mag: float
    steps: int


@dataclass(frozen=True)
class EpsilonSchedule:
    """
    Exploration rate per episode: start * decay**episode, floored at minimum.

    Args:
        start: Rate of the first episode
        decay: Multiplier applied after every episode
        minimum: Floor
    """

    start: float = 1.0
    decay: float = 0.99
    minimum: float = 0.01

    def __post_init__(self):
        for name in ("start", "decay", "minimum"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"epsilon {name} must be within [0, 1], got {value}")

    def value(self, episode: int) -> float:
        return max(self.minimum, self.start * self.decay ** episode)


def td_error(q: QTable, s: int, a: int, r: float, s_next: int,
             terminated: bool, gamma: float) -> float:
    """r + gamma * max_a' Q(s_next, a') - Q(s, a), without bootstrap on terminal transitions"""
    bootstrap = 0.0 if terminated else float(q.values[s_next].max())
    return r + gamma * bootstrap - float(q.values[s, a])


def update(q: QTable, s: int, a: int, alpha: float, delta: float) -> None:
    """Q(s, a) += alpha * delta"""
    q.values[s, a] += alpha * delta


def select_action(q: QTable, s: int, epsilon: float, rng: np.random.Generator) -> int:
    """
    Epsilon-greedy action choice.

    A uniform random action with probability epsilon, otherwise the greedy
    action with ties broken by the lowest index. Consumes one draw for the
    exploration test and a second one only when exploring.
    """
    if rng.random() < epsilon:
        return int(rng.integers(q.action_count))
    return int(q.values[s].argmax())


def greedy_policy(q: QTable) -> np.ndarray:
    """Greedy action for every state, lowest index on ties"""
    return q.values.argmax(axis=1)


class TrainingRun(NamedTuple):
    q: QTable
    traces: list[EpisodeTrace]


def run_training(env: Environment, hp: Hyperparams, episodes: int,
                 schedule: EpsilonSchedule, rng: np.random.Generator) -> TrainingRun:
    """
    Train a zero-initialised Q-table for a number of episodes.

    Args:
        env: Environment to learn on; reset at the start of every episode
        hp: Step size and discount factor
        episodes: Episode count, at least 4 so the fitness has a last quarter
        schedule: Exploration rate per episode
        rng: Random stream for action choice and environment dynamics

    Returns:
        The learned table and one EpisodeTrace per episode, in order
    """
    if episodes < 4:
        raise ConfigError(f"episodes must be >= 4, got {episodes}")
    q = QTable.zeros(env.state_count, env.action_count)
    traces: list[EpisodeTrace] = []
    for episode in range(episodes):
        epsilon = schedule.value(episode)
        s = env.reset(rng)
        total_reward = 0.0
        error_sum = 0.0
        steps = 0
        while True:
            a = select_action(q, s, epsilon, rng)
            tr = env.step(a, rng)
            delta = td_error(q, s, a, tr.reward, tr.next_state, tr.terminated, hp.gamma)
            update(q, s, a, hp.alpha, delta)
            total_reward += tr.reward
            error_sum += abs(delta)
            steps += 1
            s = tr.next_state
            if tr.terminated or tr.truncated:
                break
        traces.append(EpisodeTrace(total_reward, error_sum / steps, steps))
    return TrainingRun(q, traces)


def train(env: Environment, hp: Hyperparams, episodes: int,
          schedule: EpsilonSchedule, rng: np.random.Generator) -> list[EpisodeTrace]:
    """Run Q-learning and return only the per-episode traces"""
    return run_training(env, hp, episodes, schedule, rng).traces


def evaluate_policy(env: Environment, q: QTable, episodes: int,
                    rng: np.random.Generator) -> float:
    """Mean total reward of the greedy policy over evaluation episodes, without learning"""
    if episodes < 1:
        raise ConfigError(f"evaluation episodes must be >= 1, got {episodes}")
    policy = greedy_policy(q)
    total = 0.0
    for _ in range(episodes):
        s = env.reset(rng)
        while True:
            tr = env.step(int(policy[s]), rng)
            total += tr.reward
            s = tr.next_state
            if tr.terminated or tr.truncated:
                break
    return total / episodes
