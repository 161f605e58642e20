"""
envs.py - Native FrozenLake and CartPole control tasks

Both environments expose the same episodic contract for tabular learning:
reset(rng) returns a discrete state index and step(action, rng) returns a
Transition. Neither environment owns a random generator; callers pass one in
so that many instances can run side by side with independent streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .errors import EnvContractError

# FrozenLake actions
LEFT, DOWN, RIGHT, UP = 0, 1, 2, 3

FROZENLAKE_MAPS = {
    "4x4": ["SFFF", "FHFH", "FFFH", "HFFG"],
    "8x8": [
        "SFFFFFFF",
        "FFFFFFFF",
        "FFFHFFFF",
        "FFFFFHFF",
        "FFFHFFFF",
        "FHHFFFHF",
        "FHFFHFHF",
        "FFFHFFFG",
    ],
}

FROZENLAKE_STEP_CAP = 200
CARTPOLE_STEP_CAP = 500

CARTPOLE_BINS = (6, 6, 12, 12)
CARTPOLE_BOUNDS = ((-2.4, 2.4), (-3.0, 3.0), (-0.2095, 0.2095), (-3.5, 3.5))


@dataclass(frozen=True)
class Transition:
    """Outcome of a single environment step"""

    next_state: int
    reward: float
    terminated: bool
    truncated: bool


class Environment(Protocol):
    """Episodic environment with discrete states and actions"""

    state_count: int
    action_count: int
    step_cap: int

    def reset(self, rng: np.random.Generator) -> int: ...

    def step(self, action: int, rng: np.random.Generator) -> Transition: ...


class _EpisodeGuard:
    """Step counting and contract checks shared by both tasks"""

    action_count: int
    step_cap: int

    def _begin_episode(self) -> None:
        self._steps = 0
        self._done = False

    def _check_step(self, action: int) -> None:
        if not getattr(self, "_started", False):
            raise EnvContractError("step() called before reset()")
        if self._done:
            raise EnvContractError("step() called on a finished episode; call reset() first")
        if not 0 <= action < self.action_count:
            raise EnvContractError(f"action {action} outside [0, {self.action_count})")

    def _finish_step(self, next_state: int, reward: float, terminated: bool) -> Transition:
        self._steps += 1
        truncated = not terminated and self._steps >= self.step_cap
        self._done = terminated or truncated
        return Transition(next_state, reward, terminated, truncated)

    @property
    def episode_steps(self) -> int:
        """Steps taken in the current episode"""
        return self._steps


class FrozenLakeEnv(_EpisodeGuard):
    """
    Grid world crossing task: walk from S to G over frozen cells F, avoiding holes H.

    Args:
        grid: Named map ("4x4", "8x8") or list of row strings
        slippery: Intended move taken with probability 1/3, each perpendicular move 1/3
        step_cap: Steps after which an episode is truncated
    """

    action_count = 4

    def __init__(self, grid: str | Sequence[str] = "4x4", slippery: bool = False,
                 step_cap: int = FROZENLAKE_STEP_CAP):
        rows = FROZENLAKE_MAPS.get(grid) if isinstance(grid, str) else list(grid)
        if rows is None:
            raise EnvContractError(f"unknown FrozenLake map '{grid}' (known: {', '.join(FROZENLAKE_MAPS)})")
        self.grid = _validate_grid(rows)
        self.rows = len(self.grid)
        self.cols = len(self.grid[0])
        self.state_count = self.rows * self.cols
        self.slippery = slippery
        if step_cap < 1:
            raise EnvContractError(f"step_cap must be positive, got {step_cap}")
        self.step_cap = step_cap
        cells = "".join(self.grid)
        self.start = cells.index("S")
        self._terminal = [c in "HG" for c in cells]
        self._goal = [c == "G" for c in cells]
        self.agent_pos = self.start
        self._started = False
        self._begin_episode()

    def reset(self, rng: np.random.Generator) -> int:
        self.agent_pos = self.start
        self._started = True
        self._begin_episode()
        return self.agent_pos

    def move(self, state: int, direction: int) -> int:
        """Cell reached from state by one move in direction, clamped at the grid edges"""
        row, col = divmod(state, self.cols)
        if direction == LEFT:
            col = max(col - 1, 0)
        elif direction == DOWN:
            row = min(row + 1, self.rows - 1)
        elif direction == RIGHT:
            col = min(col + 1, self.cols - 1)
        elif direction == UP:
            row = max(row - 1, 0)
        return row * self.cols + col

    def transition_law(self, state: int, action: int) -> list[tuple[float, int]]:
        """
        Outcome distribution of taking action in state.

        Returns:
            List of (probability, next_state), one entry per realized direction
        """
        if not self.slippery:
            return [(1.0, self.move(state, action))]
        third = 1.0 / 3.0
        return [(third, self.move(state, (action + k) % 4)) for k in (-1, 0, 1)]

    def step(self, action: int, rng: np.random.Generator) -> Transition:
        self._check_step(action)
        direction = action
        if self.slippery:
            direction = (action + int(rng.integers(3)) - 1) % 4
        self.agent_pos = self.move(self.agent_pos, direction)
        reward = 1.0 if self._goal[self.agent_pos] else 0.0
        return self._finish_step(self.agent_pos, reward, self._terminal[self.agent_pos])


def _validate_grid(rows: list[str]) -> list[str]:
    if not rows or not rows[0]:
        raise EnvContractError("FrozenLake map is empty")
    width = len(rows[0])
    for row in rows:
        if len(row) != width:
            raise EnvContractError("FrozenLake map rows must all have the same length")
        bad = set(row) - set("SFHG")
        if bad:
            raise EnvContractError(f"FrozenLake map has unknown cell kinds: {''.join(sorted(bad))}")
    cells = "".join(rows)
    if cells.count("S") != 1:
        raise EnvContractError("FrozenLake map needs exactly one start cell")
    if "G" not in cells:
        raise EnvContractError("FrozenLake map needs at least one goal cell")
    return list(rows)


def discretize(observation: Sequence[float], bins: Sequence[int],
               bounds: Sequence[tuple[float, float]]) -> int:
    """
    Map a continuous observation to a discrete state index.

    Each dimension is clipped to its bounds, bucketed by a uniform partition
    and the buckets are combined by mixed-radix encoding (first dimension most
    significant).

    Args:
        observation: Continuous values, one per dimension
        bins: Bucket count per dimension, all >= 1
        bounds: (low, high) per dimension

    Returns:
        Index in [0, prod(bins))
    """
    shape = np.asarray(bins, dtype=np.int64)
    lims = np.asarray(bounds, dtype=np.float64)
    low, high = lims[:, 0], lims[:, 1]
    clipped = np.clip(np.asarray(observation, dtype=np.float64), low, high)
    buckets = np.floor((clipped - low) / (high - low) * shape).astype(np.int64)
    buckets = np.minimum(buckets, shape - 1)
    return int(np.ravel_multi_index(tuple(buckets), tuple(shape)))


class CartPoleEnv(_EpisodeGuard):
    """
    Pole balancing on a moving cart, integrated with explicit Euler steps.

    Args:
        bins: Bucket count per observation dimension (x, x_dot, theta, theta_dot)
        bounds: Discretization interval per dimension
        step_cap: Steps after which an episode is truncated
    """

    action_count = 2

    gravity = 9.8
    cart_mass = 1.0
    pole_mass = 0.1
    half_length = 0.5
    force_mag = 10.0
    tau = 0.02

    x_threshold = 2.4
    theta_threshold = 12 * 2 * math.pi / 360

    def __init__(self, bins: Sequence[int] = CARTPOLE_BINS,
                 bounds: Sequence[tuple[float, float]] = CARTPOLE_BOUNDS,
                 step_cap: int = CARTPOLE_STEP_CAP):
        if len(bins) != 4 or len(bounds) != 4:
            raise EnvContractError("CartPole needs 4 bin counts and 4 bound intervals")
        if any(int(b) < 1 for b in bins):
            raise EnvContractError(f"bin counts must be >= 1, got {tuple(bins)}")
        if any(not lo < hi for lo, hi in bounds):
            raise EnvContractError(f"each bound needs low < high, got {tuple(bounds)}")
        if step_cap < 1:
            raise EnvContractError(f"step_cap must be positive, got {step_cap}")
        self.bins = tuple(int(b) for b in bins)
        self.bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
        self.state_count = int(np.prod(self.bins))
        self.step_cap = step_cap
        self._state = (0.0, 0.0, 0.0, 0.0)
        self._started = False
        self._begin_episode()

    @property
    def observation(self) -> np.ndarray:
        """Continuous state (x, x_dot, theta, theta_dot)"""
        return np.array(self._state)

    def set_state(self, x: float, x_dot: float, theta: float, theta_dot: float) -> int:
        """Overwrite the continuous state; returns its discrete index"""
        self._state = (float(x), float(x_dot), float(theta), float(theta_dot))
        return self._index()

    def _index(self) -> int:
        return discretize(self._state, self.bins, self.bounds)

    def reset(self, rng: np.random.Generator) -> int:
        self._state = tuple(float(v) for v in rng.uniform(-0.05, 0.05, size=4))
        self._started = True
        self._begin_episode()
        return self._index()

    def step(self, action: int, rng: np.random.Generator) -> Transition:
        self._check_step(action)
        x, x_dot, theta, theta_dot = self._state
        force = self.force_mag if action == 1 else -self.force_mag
        total_mass = self.cart_mass + self.pole_mass
        polemass_length = self.pole_mass * self.half_length
        cos_t = math.cos(theta)
        sin_t = math.sin(theta)

        temp = (force + polemass_length * theta_dot ** 2 * sin_t) / total_mass
        theta_acc = (self.gravity * sin_t - cos_t * temp) / (
            self.half_length * (4.0 / 3.0 - self.pole_mass * cos_t ** 2 / total_mass)
        )
        x_acc = temp - polemass_length * theta_acc * cos_t / total_mass

        x = x + self.tau * x_dot
        x_dot = x_dot + self.tau * x_acc
        theta = theta + self.tau * theta_dot
        theta_dot = theta_dot + self.tau * theta_acc
        self._state = (x, x_dot, theta, theta_dot)

        terminated = abs(x) > self.x_threshold or abs(theta) > self.theta_threshold
        return self._finish_step(self._index(), 1.0, terminated)


@dataclass(frozen=True)
class TaskConfig:
    """
    Which control task to build and with what parameters.

    Args:
        task: "frozenlake" or "cartpole"
        grid: FrozenLake map name or rows
        slippery: FrozenLake slipperiness
        step_cap: Episode step cap; None selects the task default (200 / 500)
        bins: CartPole discretization bucket counts
        bounds: CartPole discretization intervals
    """

    task: str = "frozenlake"
    grid: str | tuple[str, ...] = "4x4"
    slippery: bool = False
    step_cap: int | None = None
    bins: tuple[int, ...] = CARTPOLE_BINS
    bounds: tuple[tuple[float, float], ...] = CARTPOLE_BOUNDS


TASKS = ("frozenlake", "cartpole")


def make_env(config: TaskConfig) -> FrozenLakeEnv | CartPoleEnv:
    """Build a fresh environment instance for a task configuration"""
    if config.task == "frozenlake":
        return FrozenLakeEnv(config.grid, config.slippery,
                             config.step_cap or FROZENLAKE_STEP_CAP)
    if config.task == "cartpole":
        return CartPoleEnv(config.bins, config.bounds,
                           config.step_cap or CARTPOLE_STEP_CAP)
    raise EnvContractError(f"unknown task '{config.task}' (known: {', '.join(TASKS)})")
