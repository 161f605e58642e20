"""
baselines.py - Comparison optimizers: PSO, GA, BA and random search

All share FOX's contract: minimize an objective over a Bounds box, return an
OptimizeResult whose history is the best-so-far value after initialization
and after every iteration, and draw agent k's randomness in iteration i from
the stream derived from (run seed, i, k). Each iteration evaluates exactly g
positions, so equal g x max_iter budgets mean equal evaluation counts.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass, field

import numpy as np

from . import fox
from .errors import ConfigError
from .optimizer import (Bounds, Candidate, Objective, OptimizeResult, agent_rng,
                        best_index, check_budget, evaluate, stream_seed)

logger = logging.getLogger(__name__)

ALGORITHMS = ("fox", "pso", "ga", "ba", "random")

DISPLAY_NAMES = {"fox": "FOX", "pso": "PSO", "ga": "GA", "ba": "BA", "random": "Random"}


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


@dataclass(frozen=True)
class PSOParams:
    """Global-best PSO; velocity_clamp is a fraction of the box width"""

    inertia: float = 0.7
    cognitive: float = 1.5
    social: float = 1.5
    velocity_clamp: float = 0.2

    def __post_init__(self):
        _require(0.0 <= self.inertia <= 1.0, f"pso inertia must be within [0, 1], got {self.inertia}")
        _require(self.cognitive >= 0.0 and self.social >= 0.0, "pso acceleration coefficients must be >= 0")
        _require(0.0 < self.velocity_clamp <= 1.0,
                 f"pso velocity clamp must be within (0, 1], got {self.velocity_clamp}")


@dataclass(frozen=True)
class GAParams:
    """Tournament selection, uniform crossover, Gaussian mutation (scale is a fraction of the box width)"""

    tournament: int = 3
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    mutation_scale: float = 0.1
    elitism: int = 1

    def __post_init__(self):
        _require(self.tournament >= 1, f"ga tournament size must be >= 1, got {self.tournament}")
        _require(0.0 <= self.crossover_rate <= 1.0, "ga crossover rate must be within [0, 1]")
        _require(0.0 <= self.mutation_rate <= 1.0, "ga mutation rate must be within [0, 1]")
        _require(self.mutation_scale > 0.0, "ga mutation scale must be > 0")
        _require(self.elitism >= 0, "ga elitism must be >= 0")


@dataclass(frozen=True)
class BAParams:
    """Bat algorithm: frequency range, initial loudness and pulse rate, their update constants"""

    freq_min: float = 0.0
    freq_max: float = 2.0
    loudness: float = 1.0
    pulse_rate: float = 0.5
    alpha: float = 0.9
    gamma: float = 0.9

    def __post_init__(self):
        _require(self.freq_min <= self.freq_max, "ba frequency range needs min <= max")
        _require(0.0 <= self.loudness <= 1.0, "ba loudness must be within [0, 1]")
        _require(0.0 <= self.pulse_rate <= 1.0, "ba pulse rate must be within [0, 1]")
        _require(0.0 < self.alpha <= 1.0, "ba alpha must be within (0, 1]")
        _require(self.gamma >= 0.0, "ba gamma must be >= 0")


@dataclass(frozen=True)
class OptimizerConfig:
    """
    Which optimizer to run and with what budget.

    Args:
        algorithm: One of ALGORITHMS
        g: Population size
        max_iter: Iteration budget
        random_samples: Samples for random search; 0 means budget-matched g * (max_iter + 1)
    """

    algorithm: str = "fox"
    g: int = 30
    max_iter: int = 100
    random_samples: int = 0
    pso: PSOParams = field(default_factory=PSOParams)
    ga: GAParams = field(default_factory=GAParams)
    ba: BAParams = field(default_factory=BAParams)

    def __post_init__(self):
        _require(self.algorithm in ALGORITHMS,
                 f"unknown optimizer '{self.algorithm}' (known: {', '.join(ALGORITHMS)})")
        check_budget(self.g, self.max_iter)
        _require(self.random_samples >= 0, "random_samples must be >= 0")

    @property
    def display_name(self) -> str:
        return DISPLAY_NAMES[self.algorithm]

    @property
    def sample_budget(self) -> int:
        return self.random_samples or self.g * (self.max_iter + 1)


def _initial(objective: Objective, bounds: Bounds, g: int, seed: int,
             executor: Executor | None) -> tuple[list[np.ndarray], list[float]]:
    positions = [bounds.sample(agent_rng(seed, 0, k)) for k in range(g)]
    return positions, evaluate(objective, positions, 0, executor)


def pso_optimize(objective: Objective, bounds: Bounds, g: int, max_iter: int,
                 rng: np.random.Generator, executor: Executor | None = None,
                 params: PSOParams = PSOParams()) -> OptimizeResult:
    """Particle swarm optimization with a global-best topology"""
    check_budget(g, max_iter)
    seed = stream_seed(rng)
    vmax = params.velocity_clamp * bounds.width
    positions, values = _initial(objective, bounds, g, seed, executor)
    velocities = [np.zeros(bounds.dim) for _ in range(g)]
    pbest = [p.copy() for p in positions]
    pbest_values = list(values)
    k = best_index(values)
    best = Candidate(positions[k].copy(), values[k])
    history = [best.fitness]

    for it in range(1, max_iter + 1):
        for k in range(g):
            r = agent_rng(seed, it, k)
            r1 = r.random(bounds.dim)
            r2 = r.random(bounds.dim)
            v = (params.inertia * velocities[k]
                 + params.cognitive * r1 * (pbest[k] - positions[k])
                 + params.social * r2 * (best.position - positions[k]))
            velocities[k] = np.clip(v, -vmax, vmax)
            positions[k] = bounds.clip(positions[k] + velocities[k])
        values = evaluate(objective, positions, it, executor)
        for k, value in enumerate(values):
            if value < pbest_values[k]:
                pbest[k] = positions[k].copy()
                pbest_values[k] = value
        k = best_index(values)
        if values[k] < best.fitness:
            best = Candidate(positions[k].copy(), values[k])
        history.append(best.fitness)
        logger.debug("pso iteration %d/%d best %.6g", it, max_iter, best.fitness)

    return OptimizeResult(best, history, g * (max_iter + 1))


def _tournament(values: list[float], size: int, r: np.random.Generator) -> int:
    entrants = r.integers(len(values), size=size)
    return int(min(entrants, key=lambda i: (values[i], i)))


def ga_optimize(objective: Objective, bounds: Bounds, g: int, max_iter: int,
                rng: np.random.Generator, executor: Executor | None = None,
                params: GAParams = GAParams()) -> OptimizeResult:
    """
    Generational genetic algorithm.

    Every generation breeds and evaluates g children; the elitism best parents
    then replace the worst children.
    """
    check_budget(g, max_iter)
    seed = stream_seed(rng)
    sigma = params.mutation_scale * bounds.width
    positions, values = _initial(objective, bounds, g, seed, executor)
    k = best_index(values)
    best = Candidate(positions[k].copy(), values[k])
    history = [best.fitness]
    elites = min(params.elitism, g)

    for it in range(1, max_iter + 1):
        children = []
        for k in range(g):
            r = agent_rng(seed, it, k)
            a = positions[_tournament(values, params.tournament, r)]
            b = positions[_tournament(values, params.tournament, r)]
            if r.random() < params.crossover_rate:
                child = np.where(r.random(bounds.dim) < 0.5, a, b)
            else:
                child = a.copy()
            mutate = r.random(bounds.dim) < params.mutation_rate
            child = child + mutate * r.normal(0.0, sigma)
            children.append(bounds.clip(child))
        child_values = evaluate(objective, children, it, executor)

        k = best_index(child_values)
        if child_values[k] < best.fitness:
            best = Candidate(children[k].copy(), child_values[k])

        if elites:
            parent_order = sorted(range(g), key=lambda i: (values[i], i))[:elites]
            child_order = sorted(range(g), key=lambda i: (child_values[i], i), reverse=True)[:elites]
            for p, c in zip(parent_order, child_order):
                children[c] = positions[p].copy()
                child_values[c] = values[p]
        positions, values = children, child_values
        history.append(best.fitness)
        logger.debug("ga generation %d/%d best %.6g", it, max_iter, best.fitness)

    return OptimizeResult(best, history, g * (max_iter + 1))


def ba_optimize(objective: Objective, bounds: Bounds, g: int, max_iter: int,
                rng: np.random.Generator, executor: Executor | None = None,
                params: BAParams = BAParams()) -> OptimizeResult:
    """
    Bat algorithm.

    All bats propose against the best position of the previous iteration, so
    proposals can be evaluated together; acceptance runs afterwards in agent order.
    """
    check_budget(g, max_iter)
    seed = stream_seed(rng)
    positions, values = _initial(objective, bounds, g, seed, executor)
    velocities = [np.zeros(bounds.dim) for _ in range(g)]
    loudness = [params.loudness] * g
    pulse = [params.pulse_rate] * g
    k = best_index(values)
    best = Candidate(positions[k].copy(), values[k])
    history = [best.fitness]
    walk_scale = 0.1 * bounds.width

    for it in range(1, max_iter + 1):
        mean_loudness = float(np.mean(loudness))
        proposals = []
        accept_draws = []
        for k in range(g):
            r = agent_rng(seed, it, k)
            freq = params.freq_min + (params.freq_max - params.freq_min) * r.random()
            velocities[k] = velocities[k] + (positions[k] - best.position) * freq
            proposal = positions[k] + velocities[k]
            if r.random() > pulse[k]:
                proposal = best.position + r.uniform(-1.0, 1.0, bounds.dim) * mean_loudness * walk_scale
            proposals.append(bounds.clip(proposal))
            accept_draws.append(r.random())
        proposal_values = evaluate(objective, proposals, it, executor)

        for k, value in enumerate(proposal_values):
            if value <= values[k] and accept_draws[k] < loudness[k]:
                positions[k] = proposals[k]
                values[k] = value
                loudness[k] *= params.alpha
                pulse[k] = params.pulse_rate * (1.0 - math.exp(-params.gamma * it))
        k = best_index(proposal_values)
        if proposal_values[k] < best.fitness:
            best = Candidate(proposals[k].copy(), proposal_values[k])
        history.append(best.fitness)
        logger.debug("ba iteration %d/%d best %.6g", it, max_iter, best.fitness)

    return OptimizeResult(best, history, g * (max_iter + 1))


def random_search(objective: Objective, bounds: Bounds, n_samples: int,
                  rng: np.random.Generator, executor: Executor | None = None) -> OptimizeResult:
    """
    Uniform random search.

    Sample k shares evaluation coordinates (iteration 0, agent k) with agent k of
    the other optimizers' initial populations.

    Returns:
        OptimizeResult whose history is the running best after each sample
    """
    if n_samples < 1:
        raise ConfigError(f"n_samples must be >= 1, got {n_samples}")
    seed = stream_seed(rng)
    positions, values = _initial(objective, bounds, n_samples, seed, executor)
    history = np.minimum.accumulate(values).tolist()
    k = best_index(values)
    return OptimizeResult(Candidate(positions[k].copy(), values[k]), history, n_samples)


# Algorithm name -> runner(config, objective, bounds, rng, executor)
OPTIMIZERS = {
    "fox": lambda c, f, b, r, e: fox.optimize(f, b, c.g, c.max_iter, r, e),
    "pso": lambda c, f, b, r, e: pso_optimize(f, b, c.g, c.max_iter, r, e, c.pso),
    "ga": lambda c, f, b, r, e: ga_optimize(f, b, c.g, c.max_iter, r, e, c.ga),
    "ba": lambda c, f, b, r, e: ba_optimize(f, b, c.g, c.max_iter, r, e, c.ba),
    "random": lambda c, f, b, r, e: random_search(f, b, c.sample_budget, r, e),
}


def run_optimizer(config: OptimizerConfig, objective: Objective, bounds: Bounds,
                  rng: np.random.Generator, executor: Executor | None = None) -> OptimizeResult:
    """Dispatch to the optimizer named by config.algorithm"""
    logger.debug("running %s with g=%d max_iter=%d", config.display_name, config.g, config.max_iter)
    return OPTIMIZERS[config.algorithm](config, objective, bounds, rng, executor)
