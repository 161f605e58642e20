"""
fox.py - FOX optimization algorithm

A population of fox agents minimizes an objective over a bounded box. Each
agent either exploits (sound distance and jump towards the best position) or
explores (random walk scaled by the best position, the smallest observed time
average and a coefficient that decays from 2 to 0 over the run).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConfigError
from .optimizer import (Bounds, Candidate, Objective, OptimizeResult, agent_rng,
                        best_index, check_budget, evaluate, stream_seed)

logger = logging.getLogger(__name__)

GRAVITY = 9.81
C1 = 0.180
C2 = 0.820
C1_THRESHOLD = 0.18
T_FLOOR = 1e-12


class FoxMove(NamedTuple):
    """New (unclamped) position; tt is the time average, set only when exploiting"""

    position: np.ndarray
    tt: Optional[float]

    @property
    def exploited(self) -> bool:
        return self.tt is not None


@dataclass
class FoxState:
    """
    Population state between iterations.

    Args:
        population: Agents, with cached objective values
        best: Best candidate seen so far
        min_tt: Running minimum of the exploiting agents' time average; inf until the first exploit
        iter: Iterations completed
        max_iter: Iteration budget
        bounds: Search box
        seed: Base seed of the per-agent streams
    """

    population: list[Candidate]
    best: Candidate
    min_tt: float
    iter: int
    max_iter: int
    bounds: Bounds
    seed: int


def sound_speed(best_position: np.ndarray, t: np.ndarray) -> np.ndarray:
    return best_position / t


def sound_distance(speed: np.ndarray, t: np.ndarray) -> np.ndarray:
    return speed * t


def prey_distance(dsf: np.ndarray) -> np.ndarray:
    return dsf * 0.5


def jump_height(t_avg: float) -> float:
    return 0.5 * GRAVITY * t_avg ** 2


def exploration_coefficient(iteration: int, max_iter: int) -> float:
    """Decays linearly from 2 at the first iteration to 0 at max_iter"""
    if max_iter <= 0:
        return 0.0
    return 2.0 * (1.0 - iteration / max_iter)


def _exploit(best: np.ndarray, rng: np.random.Generator) -> FoxMove:
    t = np.maximum(rng.random(best.size), T_FLOOR)
    dfp = prey_distance(sound_distance(sound_speed(best, t), t))
    tt = float(t.mean())
    jump = jump_height(tt)
    c = C1 if rng.random() > C1_THRESHOLD else C2
    return FoxMove(dfp * jump * c, tt)


def fox_move(best_position: np.ndarray, iteration: int, max_iter: int, min_tt: float,
             rng: np.random.Generator) -> FoxMove:
    """
    Move one fox agent.

    Exploits when the branch draw is >= 0.5, explores otherwise. Until some
    agent has exploited, min_tt is infinite and exploration is not defined, so
    the agent exploits instead.

    Args:
        best_position: Best position found so far
        iteration: Current iteration index
        max_iter: Iteration budget
        min_tt: Smallest time average observed so far
        rng: The agent's stream for this iteration

    Returns:
        FoxMove with the new position; the caller clamps it to the box
    """
    best = np.asarray(best_position, dtype=np.float64)
    if rng.random() >= 0.5 or not math.isfinite(min_tt):
        return _exploit(best, rng)
    a = exploration_coefficient(iteration, max_iter)
    return FoxMove(best * rng.random(best.size) * min_tt * a, None)


def init(bounds: Bounds, g: int, dim: int, rng: np.random.Generator,
         max_iter: int = 0) -> FoxState:
    """Uniform initial population; objective values stay unset until evaluated"""
    check_budget(g, max_iter)
    if dim != bounds.dim:
        raise ConfigError(f"dimension {dim} does not match bounds of dimension {bounds.dim}")
    seed = stream_seed(rng)
    population = [Candidate(bounds.sample(agent_rng(seed, 0, k))) for k in range(g)]
    return FoxState(population, Candidate(population[0].position.copy()), math.inf,
                    0, max_iter, bounds, seed)


def _evaluate_initial(state: FoxState, objective: Objective, executor: Executor | None) -> None:
    values = evaluate(objective, [c.position for c in state.population], 0, executor)
    for candidate, value in zip(state.population, values):
        candidate.fitness = value
    k = best_index(values)
    state.best = Candidate(state.population[k].position.copy(), values[k])


def step(state: FoxState, objective: Objective, executor: Executor | None = None) -> FoxState:
    """
    One FOX iteration: move, clamp, evaluate, update best and min_tt.

    Agent k draws from the stream derived from (state.seed, iteration, k), so
    results do not depend on whether evaluations run in parallel.
    """
    iteration = state.iter + 1
    moves = [fox_move(state.best.position, state.iter, state.max_iter, state.min_tt,
                      agent_rng(state.seed, iteration, k))
             for k in range(len(state.population))]
    positions = [state.bounds.clip(m.position) for m in moves]
    values = evaluate(objective, positions, iteration, executor)

    for candidate, position, value in zip(state.population, positions, values):
        candidate.position = position
        candidate.fitness = value
    k = best_index(values)
    if values[k] < state.best.fitness:
        state.best = Candidate(positions[k].copy(), values[k])

    tts = [m.tt for m in moves if m.tt is not None]
    if tts:
        state.min_tt = min(state.min_tt, min(tts))
    state.iter = iteration
    return state


def optimize(objective: Objective, bounds: Bounds, g: int, max_iter: int,
             rng: np.random.Generator, executor: Executor | None = None) -> OptimizeResult:
    """
    Run FOX for max_iter iterations.

    Returns:
        OptimizeResult with the best candidate and a best-so-far history of length max_iter + 1
    """
    state = init(bounds, g, bounds.dim, rng, max_iter)
    _evaluate_initial(state, objective, executor)
    history = [state.best.fitness]
    for _ in range(max_iter):
        step(state, objective, executor)
        history.append(state.best.fitness)
        logger.debug("fox iteration %d/%d best %.6g", state.iter, max_iter, state.best.fitness)
    return OptimizeResult(state.best, history, g * (max_iter + 1))
