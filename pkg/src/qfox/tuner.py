"""
tuner.py - Q-learning hyperparameter tuning driven by a metaheuristic

A candidate position (alpha, gamma) is scored by training Q-learning with it
and summing (2 * reward - error) / steps over the last quarter of the
training episodes. Larger fitness is better; optimizers minimize, so they are
handed the negated fitness.
"""

from __future__ import annotations

import logging
import threading
import time
from concurrent.futures import Executor
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .baselines import OptimizerConfig, run_optimizer
from .envs import TaskConfig, make_env
from .errors import ConfigError, QFoxError, TuningError
from .optimizer import Bounds, Candidate, EvalKey, KeyedObjective
from .qlearn import (ALPHA_RANGE, GAMMA_RANGE, EpisodeTrace, EpsilonSchedule,
                     Hyperparams, evaluate_policy, run_training, train)

logger = logging.getLogger(__name__)

SEARCH_BOUNDS = Bounds.from_pairs([ALPHA_RANGE, GAMMA_RANGE])

# Stream tag for the final retrain with the best hyperparameters
FINAL_STREAM = 2 ** 32 - 1


@dataclass
class FitnessReport:
    """Fitness of one training run and the last-quarter means it is built from"""

    fitness: float
    mean_reward_last_quarter: float
    mean_error_last_quarter: float
    mean_steps_last_quarter: float
    traces: list[EpisodeTrace] = field(repr=False)


def window_start(episodes: int) -> int:
    """First episode of the fitness window; 200 episodes -> 150"""
    return episodes - episodes // 4


def fitness(traces: list[EpisodeTrace], episodes: int) -> float:
    """
    Sum of (2 * R - e) * (1 / st) over the last quarter of episodes.

    Args:
        traces: One trace per training episode
        episodes: Episode count, at least 4

    Returns:
        Fitness, larger is better
    """
    if episodes < 4:
        raise ConfigError(f"episodes must be >= 4, got {episodes}")
    if len(traces) != episodes:
        raise ConfigError(f"expected {episodes} traces, got {len(traces)}")
    total = 0.0
    for t in traces[window_start(episodes):]:
        total += (2.0 * t.total_reward - t.td_error_mag) * (1.0 / t.steps)
    return total


def report(traces: list[EpisodeTrace], episodes: int) -> FitnessReport:
    window = traces[window_start(episodes):]
    return FitnessReport(
        fitness=fitness(traces, episodes),
        mean_reward_last_quarter=float(np.mean([t.total_reward for t in window])),
        mean_error_last_quarter=float(np.mean([t.td_error_mag for t in window])),
        mean_steps_last_quarter=float(np.mean([t.steps for t in window])),
        traces=traces,
    )


def evaluate_candidate(hp: Hyperparams, task: TaskConfig, episodes: int,
                       rng: np.random.Generator,
                       schedule: EpsilonSchedule = EpsilonSchedule()) -> FitnessReport:
    """Train once with hp on a fresh environment and score the run"""
    env = make_env(task)
    return report(train(env, hp, episodes, schedule, rng), episodes)


def candidate_rng(master_seed: int, run: int, key: EvalKey, repeat: int = 0) -> np.random.Generator:
    """Training stream of one candidate evaluation, shared by every optimizer"""
    return np.random.default_rng(
        np.random.SeedSequence([master_seed, run, key.iteration, key.agent, repeat]))


class CandidateObjective(KeyedObjective):
    """
    Negated fitness of a position (alpha, gamma), averaged over eval_repeats trainings.

    Every evaluated (Hyperparams, fitness) pair is recorded in evaluated. Copies
    sent to worker processes record into their own list, which is discarded.
    """

    def __init__(self, task: TaskConfig, episodes: int, master_seed: int, run: int,
                 schedule: EpsilonSchedule = EpsilonSchedule(), eval_repeats: int = 1):
        if eval_repeats < 1:
            raise ConfigError(f"eval_repeats must be >= 1, got {eval_repeats}")
        self.task = task
        self.episodes = episodes
        self.master_seed = master_seed
        self.run = run
        self.schedule = schedule
        self.eval_repeats = eval_repeats
        self.evaluated: list[tuple[Hyperparams, float]] = []
        self._lock = threading.Lock()

    def __call__(self, position: np.ndarray, key: EvalKey) -> float:
        hp = Hyperparams(float(position[0]), float(position[1]))
        scores = [
            evaluate_candidate(hp, self.task, self.episodes,
                               candidate_rng(self.master_seed, self.run, key, repeat),
                               self.schedule).fitness
            for repeat in range(self.eval_repeats)
        ]
        value = scores[0] if len(scores) == 1 else float(np.mean(scores))
        with self._lock:
            self.evaluated.append((hp, value))
        return -value

    def __getstate__(self) -> dict[str, Any]:
        state = self.__dict__.copy()
        del state["_lock"]
        state["evaluated"] = []
        return state

    def __setstate__(self, state: dict[str, Any]) -> None:
        self.__dict__.update(state)
        self._lock = threading.Lock()


@dataclass
class TuneResult:
    """
    Outcome of a tuning experiment.

    Args:
        method: Optimizer display name
        best_hp: Best hyperparameters over all runs
        best_fitness: Their fitness (larger is better)
        convergence: Best-so-far fitness history of every successful run
        reward_curve: Per-episode reward of the final retrain with best_hp
        run_count: Number of runs attempted
        wall_time: Seconds spent, hardware dependent
        mean_reward_last_quarter: Mean reward over the final retrain's last quarter
        mean_steps_last_quarter: Mean episode length over the same window
        greedy_reward: Mean reward of the final greedy policy over evaluation episodes
        evaluations: Objective evaluations over all runs
        failures: One message per failed run
    """

    method: str
    best_hp: Hyperparams
    best_fitness: float
    convergence: list[list[float]]
    reward_curve: list[float]
    run_count: int
    wall_time: float
    mean_reward_last_quarter: float
    mean_steps_last_quarter: float
    greedy_reward: float
    evaluations: int
    failures: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def tune(optimizer: OptimizerConfig, task: TaskConfig, n_runs: int, episodes: int,
         master_seed: int, eval_repeats: int = 1,
         schedule: EpsilonSchedule = EpsilonSchedule(), eval_episodes: int = 100,
         executor: Executor | None = None) -> TuneResult:
    """
    Tune (alpha, gamma) with n_runs independent optimizer runs.

    Run r draws its optimizer stream from (master_seed, r); candidate training
    streams come from (master_seed, r, iteration, agent). The best candidate
    over all runs is retrained once to produce the reward curve.

    Args:
        optimizer: Algorithm, population size and iteration budget
        task: Control task to tune on
        n_runs: Independent runs, at least 1
        episodes: Training episodes per candidate evaluation
        master_seed: Non-negative experiment seed
        eval_repeats: Trainings averaged per candidate evaluation
        schedule: Exploration schedule of every training
        eval_episodes: Greedy evaluation episodes for the final policy
        executor: Optional pool for parallel candidate evaluation

    Returns:
        TuneResult

    Raises:
        TuningError: when every run fails
    """
    if n_runs < 1:
        raise ConfigError(f"n_runs must be >= 1, got {n_runs}")
    if master_seed < 0:
        raise ConfigError(f"seed must be >= 0, got {master_seed}")

    started = time.perf_counter()
    best: Candidate | None = None
    convergence: list[list[float]] = []
    failures: list[str] = []
    evaluations = 0

    for run in range(n_runs):
        logger.info("%s run %d/%d started", optimizer.display_name, run + 1, n_runs)
        objective = CandidateObjective(task, episodes, master_seed, run, schedule, eval_repeats)
        rng = np.random.default_rng(np.random.SeedSequence([master_seed, run]))
        try:
            result = run_optimizer(optimizer, objective, SEARCH_BOUNDS, rng, executor)
        except QFoxError as e:
            logger.warning("%s run %d failed: %s", optimizer.display_name, run + 1, e)
            failures.append(f"run {run}: {e}")
            continue
        convergence.append([-v for v in result.history])
        evaluations += result.evaluations
        if best is None or result.best.fitness < best.fitness:
            best = result.best
        logger.info("%s run %d/%d best fitness %.6g at alpha=%.4f gamma=%.4f",
                    optimizer.display_name, run + 1, n_runs, -result.best.fitness,
                    result.best.position[0], result.best.position[1])

    if best is None:
        raise TuningError(failures)

    best_hp = Hyperparams(float(best.position[0]), float(best.position[1]))
    final_rng = np.random.default_rng(np.random.SeedSequence([master_seed, FINAL_STREAM]))
    final = run_training(make_env(task), best_hp, episodes, schedule, final_rng)
    greedy = evaluate_policy(make_env(task), final.q, eval_episodes, final_rng)
    final_report = report(final.traces, episodes)

    return TuneResult(
        method=optimizer.display_name,
        best_hp=best_hp,
        best_fitness=-best.fitness,
        convergence=convergence,
        reward_curve=[t.total_reward for t in final.traces],
        run_count=n_runs,
        wall_time=time.perf_counter() - started,
        mean_reward_last_quarter=final_report.mean_reward_last_quarter,
        mean_steps_last_quarter=final_report.mean_steps_last_quarter,
        greedy_reward=greedy,
        evaluations=evaluations,
        failures=failures,
    )
