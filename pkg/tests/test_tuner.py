#!/usr/bin/env python3
"""
Test the tuning fitness, candidate evaluation and the multi-run tune driver
"""

import pickle
import unittest
from concurrent.futures import ProcessPoolExecutor
from unittest import mock

import numpy as np

from qfox import tuner
from qfox.baselines import OptimizerConfig, run_optimizer
from qfox.envs import TaskConfig, make_env
from qfox.errors import ConfigError, ObjectiveError, TuningError
from qfox.optimizer import EvalKey, evaluate
from qfox.qlearn import EpisodeTrace, EpsilonSchedule, Hyperparams, run_training

FROZENLAKE = TaskConfig("frozenlake")


def brute_force_fitness(traces):
    """Independent summation over the last quarter of traces"""
    start = len(traces) - len(traces) // 4
    return sum((2 * t.total_reward - t.td_error_mag) * (1 / t.steps) for t in traces[start:])


def random_traces(rng, n):
    return [EpisodeTrace(float(rng.integers(0, 2) if rng.random() < 0.5 else rng.uniform(0, 500)),
                         float(rng.exponential(1.0)), int(rng.integers(1, 501)))
            for _ in range(n)]


class TestFitness(unittest.TestCase):
    """Test the last-quarter fitness"""

    def test_01_hand_example(self):
        """Test 50 window traces of (R=1, e=0, st=10) sum to 10.0"""
        traces = [EpisodeTrace(0.0, 3.0, 7)] * 150 + [EpisodeTrace(1.0, 0.0, 10)] * 50
        self.assertAlmostEqual(tuner.fitness(traces, 200), 10.0, places=12)

    def test_02_zero_rewards_and_errors(self):
        """Test zero rewards and errors give zero fitness whatever the steps"""
        traces = [EpisodeTrace(0.0, 0.0, s) for s in range(1, 41)]
        self.assertEqual(tuner.fitness(traces, 40), 0.0)

    def test_03_oracle_equivalence(self):
        """Test 1000 random trace lists of length 4-400 match the brute-force sum bit-exactly"""
        rng = np.random.default_rng(2718)
        for _ in range(1000):
            n = int(rng.integers(4, 401))
            traces = random_traces(rng, n)
            self.assertEqual(tuner.fitness(traces, n), brute_force_fitness(traces))

    def test_04_window_boundary(self):
        """Test with 200 episodes trace 149 does not count and trace 150 does"""
        traces = [EpisodeTrace(1.0, 0.5, 10)] * 200
        base = tuner.fitness(traces, 200)
        self.assertEqual(tuner.window_start(200), 150)
        perturbed = list(traces)
        perturbed[149] = EpisodeTrace(0.0, 9.0, 3)
        self.assertEqual(tuner.fitness(perturbed, 200), base)
        perturbed = list(traces)
        perturbed[150] = EpisodeTrace(0.0, 9.0, 3)
        self.assertNotEqual(tuner.fitness(perturbed, 200), base)

    def test_05_rejects_bad_input(self):
        """Test length mismatch and too few episodes are rejected"""
        traces = [EpisodeTrace(1.0, 0.0, 1)] * 10
        with self.assertRaises(ConfigError):
            tuner.fitness(traces, 12)
        with self.assertRaises(ConfigError):
            tuner.fitness(traces[:3], 3)

    def test_06_report_means(self):
        """Test the report's last-quarter means"""
        traces = [EpisodeTrace(0.0, 1.0, 4)] * 6 + [EpisodeTrace(1.0, 0.5, 2), EpisodeTrace(0.0, 1.5, 6)]
        report = tuner.report(traces, 8)
        self.assertEqual(report.mean_reward_last_quarter, 0.5)
        self.assertEqual(report.mean_error_last_quarter, 1.0)
        self.assertEqual(report.mean_steps_last_quarter, 4.0)
        self.assertEqual(report.fitness, brute_force_fitness(traces))


class TestCandidateEvaluation(unittest.TestCase):
    """Test single-candidate training and scoring"""

    def test_01_deterministic(self):
        """Test the same hyperparameters and seed give identical reports"""
        hp = Hyperparams(0.6, 0.9)
        a = tuner.evaluate_candidate(hp, FROZENLAKE, 40, np.random.default_rng(3))
        b = tuner.evaluate_candidate(hp, FROZENLAKE, 40, np.random.default_rng(3))
        self.assertEqual(a.fitness, b.fitness)
        self.assertEqual(a.traces, b.traces)

    def test_02_report_matches_oracle(self):
        """Test report fitness equals a re-summation over its own traces"""
        for task in (FROZENLAKE, TaskConfig("cartpole", step_cap=60)):
            report = tuner.evaluate_candidate(Hyperparams(0.5, 0.95), task, 20,
                                              np.random.default_rng(1))
            self.assertEqual(len(report.traces), 20)
            self.assertEqual(report.fitness, brute_force_fitness(report.traces))

    def test_03_candidate_streams(self):
        """Test candidate streams differ per coordinate and repeat deterministically"""
        draw = lambda *args: tuner.candidate_rng(*args).random()
        self.assertEqual(draw(1, 0, EvalKey(2, 3)), draw(1, 0, EvalKey(2, 3)))
        self.assertNotEqual(draw(1, 0, EvalKey(2, 3)), draw(1, 1, EvalKey(2, 3)))
        self.assertNotEqual(draw(1, 0, EvalKey(2, 3)), draw(1, 0, EvalKey(3, 2)))
        self.assertNotEqual(draw(1, 0, EvalKey(2, 3), 0), draw(1, 0, EvalKey(2, 3), 1))

    def test_04_objective_negates_and_records(self):
        """Test the objective returns negated fitness and records every evaluation"""
        objective = tuner.CandidateObjective(FROZENLAKE, 20, master_seed=5, run=0)
        key = EvalKey(0, 1)
        value = objective(np.array([0.5, 0.9]), key)
        expected = tuner.evaluate_candidate(Hyperparams(0.5, 0.9), FROZENLAKE, 20,
                                            tuner.candidate_rng(5, 0, key)).fitness
        self.assertEqual(value, -expected)
        self.assertEqual(objective.evaluated, [(Hyperparams(0.5, 0.9), expected)])

    def test_05_repeats_are_averaged(self):
        """Test eval_repeats averages independent trainings"""
        objective = tuner.CandidateObjective(FROZENLAKE, 12, master_seed=5, run=0, eval_repeats=3)
        key = EvalKey(1, 0)
        value = objective(np.array([0.4, 0.8]), key)
        scores = [tuner.evaluate_candidate(Hyperparams(0.4, 0.8), FROZENLAKE, 12,
                                           tuner.candidate_rng(5, 0, key, r)).fitness
                  for r in range(3)]
        self.assertAlmostEqual(value, -float(np.mean(scores)), places=12)
        with self.assertRaises(ConfigError):
            tuner.CandidateObjective(FROZENLAKE, 12, 5, 0, eval_repeats=0)

    def test_06_sign_coherence(self):
        """Test the optimizer's best candidate has the largest fitness evaluated"""
        objective = tuner.CandidateObjective(FROZENLAKE, 16, master_seed=9, run=0)
        result = run_optimizer(OptimizerConfig("fox", g=4, max_iter=3), objective,
                               tuner.SEARCH_BOUNDS, np.random.default_rng(0))
        best = max(value for _, value in objective.evaluated)
        self.assertEqual(len(objective.evaluated), 16)
        self.assertEqual(-result.best.fitness, best)

    def test_07_objective_crosses_processes(self):
        """Test a pickled objective scores like the original and a process pool matches serial evaluation"""
        objective = tuner.CandidateObjective(FROZENLAKE, 12, master_seed=5, run=1)
        positions = [np.array([0.3, 0.7]), np.array([0.9, 0.99]), np.array([0.05, 0.5])]
        serial = evaluate(objective, positions, 2)
        copy = pickle.loads(pickle.dumps(objective))
        self.assertEqual(copy.evaluated, [])
        self.assertEqual(copy(positions[1], EvalKey(2, 1)), serial[1])
        with ProcessPoolExecutor(max_workers=2) as pool:
            self.assertEqual(evaluate(objective, positions, 2, pool), serial)
        self.assertEqual(len(objective.evaluated), 3)

    def test_08_errors_survive_pickling(self):
        """Test objective and tuning errors keep their fields across a pickle round trip"""
        error = pickle.loads(pickle.dumps(ObjectiveError("objective returned NaN", 4, 2)))
        self.assertEqual((error.agent, error.iteration), (4, 2))
        self.assertEqual(str(error), "objective returned NaN (agent 4, iteration 2)")
        failures = pickle.loads(pickle.dumps(TuningError(["run 0: boom"]))).failures
        self.assertEqual(failures, ["run 0: boom"])


class TestTune(unittest.TestCase):
    """Test the multi-run tuning driver"""

    def tune(self, algorithm="fox", n_runs=2, g=3, max_iter=2, **kwargs):
        return tuner.tune(OptimizerConfig(algorithm, g=g, max_iter=max_iter), FROZENLAKE,
                          n_runs=n_runs, episodes=12, master_seed=7, eval_episodes=5, **kwargs)

    def test_01_result_shape(self):
        """Test convergence, reward curve and evaluation counts of a small run"""
        result = self.tune()
        self.assertEqual(result.method, "FOX")
        self.assertEqual(result.run_count, 2)
        self.assertEqual(len(result.convergence), 2)
        for history in result.convergence:
            self.assertEqual(len(history), 3)
            self.assertTrue(all(b >= a for a, b in zip(history, history[1:])))
        self.assertEqual(len(result.reward_curve), 12)
        self.assertEqual(result.evaluations, 2 * 3 * 3)
        self.assertEqual(result.failures, [])
        self.assertGreaterEqual(result.wall_time, 0.0)
        self.assertTrue(0.01 <= result.best_hp.alpha <= 1.0)
        self.assertTrue(0.0 <= result.best_hp.gamma <= 1.0)

    def test_02_best_is_max_over_runs(self):
        """Test best_fitness is the largest final value over all runs"""
        result = self.tune(n_runs=3)
        self.assertEqual(result.best_fitness, max(h[-1] for h in result.convergence))

    def test_03_degenerate_budget(self):
        """Test one run without iterations is the best of one initial population"""
        result = self.tune(n_runs=1, max_iter=0)
        self.assertEqual(len(result.convergence), 1)
        self.assertEqual(len(result.convergence[0]), 1)
        self.assertEqual(result.best_fitness, result.convergence[0][0])

    def test_04_deterministic(self):
        """Test repeated tuning with the same seed gives the same result"""
        a = self.tune(algorithm="pso").to_dict()
        b = self.tune(algorithm="pso").to_dict()
        a.pop("wall_time")
        b.pop("wall_time")
        self.assertEqual(a, b)

    def test_05_partial_failure_is_reported(self):
        """Test a failed run is recorded and the remaining runs still produce a result"""
        real = tuner.run_optimizer
        calls = []

        def flaky(*args, **kwargs):
            calls.append(1)
            if len(calls) == 1:
                raise ObjectiveError("objective failed: boom", 0, 0)
            return real(*args, **kwargs)

        with mock.patch.object(tuner, "run_optimizer", side_effect=flaky):
            result = self.tune()
        self.assertEqual(len(result.failures), 1)
        self.assertIn("run 0", result.failures[0])
        self.assertEqual(len(result.convergence), 1)
        self.assertEqual(result.run_count, 2)

    def test_06_all_runs_fail(self):
        """Test TuningError when every run fails"""
        with mock.patch.object(tuner, "evaluate_candidate", side_effect=RuntimeError("boom")):
            with self.assertRaises(TuningError) as ctx:
                self.tune()
        self.assertEqual(len(ctx.exception.failures), 2)

    def test_07_invalid_arguments(self):
        """Test n_runs and seed validation"""
        with self.assertRaises(ConfigError):
            self.tune(n_runs=0)
        with self.assertRaises(ConfigError):
            tuner.tune(OptimizerConfig(), FROZENLAKE, 1, 12, master_seed=-1)

    def test_08_steps_of_final_retrain(self):
        """Test mean_steps_last_quarter is the mean episode length over the final retrain's last quarter"""
        result = self.tune()
        rng = np.random.default_rng(np.random.SeedSequence([7, tuner.FINAL_STREAM]))
        final = run_training(make_env(FROZENLAKE), result.best_hp, 12, EpsilonSchedule(), rng)
        self.assertEqual(result.reward_curve, [t.total_reward for t in final.traces])
        self.assertEqual(result.mean_steps_last_quarter, float(np.mean([t.steps for t in final.traces[9:]])))
        self.assertTrue(1.0 <= result.mean_steps_last_quarter <= 200.0)
        self.assertIn("mean_steps_last_quarter", result.to_dict())


if __name__ == '__main__':
    unittest.main()
