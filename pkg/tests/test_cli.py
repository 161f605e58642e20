#!/usr/bin/env python3
"""
Test the qfox command line: tune, compare and eval
"""

import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from unittest import mock

import pandas as pd

from qfox.main import main

# Tiny budget so every invocation finishes in well under a second
BUDGET = ['--agents', '2', '--max-iter', '1', '--runs', '1', '--episodes', '8',
          '--eval-episodes', '2', '--threads', '2', '--executor', 'thread']


def run_quietly(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        rc = main(argv)
    return rc, out.getvalue(), err.getvalue()


class TestTuneCommand(unittest.TestCase):
    """Test qfox tune"""

    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmpdir.cleanup()

    def output(self, name):
        return os.path.join(self.tmpdir.name, name)

    def test_01_writes_three_artifacts(self):
        """Test tune exits 0 and writes result.json, summary.csv and curve.csv"""
        rc, out, _ = run_quietly(['tune', '--task', 'frozenlake', '--optimizer', 'fox', '--seed', '7',
                                  '--output', self.output('a')] + BUDGET)
        self.assertEqual(rc, 0)
        for name in ('result.json', 'summary.csv', 'curve.csv'):
            self.assertTrue(os.path.isfile(os.path.join(self.output('a'), name)), name)
        self.assertIn('FOX', out)
        with open(os.path.join(self.output('a'), 'result.json'), encoding='utf-8') as f:
            self.assertEqual(json.load(f)['method'], 'FOX')

    def test_02_same_seed_same_artifacts(self):
        """Test a repeated run gives identical result.json (without wall_time) and curve.csv"""
        for name in ('a', 'b'):
            rc, _, _ = run_quietly(['tune', '--seed', '7', '--output', self.output(name)] + BUDGET)
            self.assertEqual(rc, 0)

        def load(name):
            with open(os.path.join(self.output(name), 'result.json'), encoding='utf-8') as f:
                data = json.load(f)
            data.pop('wall_time')
            with open(os.path.join(self.output(name), 'curve.csv'), 'rb') as f:
                return json.dumps(data, sort_keys=True), f.read()

        self.assertEqual(load('a'), load('b'))

    def test_03_optimizer_all(self):
        """Test --optimizer all writes a five-row summary"""
        rc, _, _ = run_quietly(['tune', '--optimizer', 'all', '--seed', '3',
                                '--output', self.output('all')] + BUDGET)
        self.assertEqual(rc, 0)
        summary = pd.read_csv(os.path.join(self.output('all'), 'summary.csv'))
        self.assertEqual(sorted(summary['method']), ['BA', 'FOX', 'GA', 'PSO', 'Random'])
        rewards = summary['reward'].tolist()
        self.assertEqual(rewards, sorted(rewards, reverse=True))

    def test_04_missing_seed(self):
        """Test a missing seed exits with the configuration error code"""
        with mock.patch.dict(os.environ):
            os.environ.pop('QFOX_SEED', None)
            rc, _, err = run_quietly(['tune', '--output', self.output('x')] + BUDGET)
        self.assertEqual(rc, 2)
        self.assertIn('ERROR', err)

    def test_05_seed_from_environment(self):
        """Test QFOX_SEED supplies the seed"""
        with mock.patch.dict(os.environ, {'QFOX_SEED': '7'}):
            rc, _, _ = run_quietly(['tune', '--output', self.output('env')] + BUDGET)
        self.assertEqual(rc, 0)

    def test_06_config_file(self):
        """Test a config file is read and an unknown key is a configuration error"""
        good = self.output('good.yaml')
        with open(good, 'w', encoding='utf-8') as f:
            f.write(f"seed: 4\noutput: {self.output('from-file')}\ng: 2\nmax_iter: 1\n"
                    "n_runs: 1\nepisodes: 8\neval_episodes: 2\n")
        rc, _, _ = run_quietly(['tune', '--config', good])
        self.assertEqual(rc, 0)
        self.assertTrue(os.path.isfile(os.path.join(self.output('from-file'), 'result.json')))

        bad = self.output('bad.yaml')
        with open(bad, 'w', encoding='utf-8') as f:
            f.write("seed: 4\nlearning_rate: 0.1\n")
        rc, _, err = run_quietly(['tune', '--config', bad])
        self.assertEqual(rc, 2)
        self.assertIn('learning_rate', err)

    def test_07_unwritable_output(self):
        """Test an output path below a regular file exits with the runtime error code"""
        blocker = self.output('blocker')
        with open(blocker, 'w', encoding='utf-8') as f:
            f.write('x')
        rc, _, err = run_quietly(['tune', '--seed', '1', '--output', os.path.join(blocker, 'out')] + BUDGET)
        self.assertEqual(rc, 3)
        self.assertIn('ERROR', err)

    def test_08_bad_flag_values(self):
        """Test argparse rejects unknown optimizers and out-of-range values are config errors"""
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as ctx:
                main(['tune', '--optimizer', 'sa', '--seed', '1'])
        self.assertEqual(ctx.exception.code, 2)
        rc, _, _ = run_quietly(['tune', '--seed', '1', '--episodes', '2', '--output', self.output('y')])
        self.assertEqual(rc, 2)

    def test_09_no_command(self):
        """Test running without a command prints help and returns 2"""
        rc, _, err = run_quietly([])
        self.assertEqual(rc, 2)
        self.assertIn('tune', err)

    def test_10_process_pool_matches_threads(self):
        """Test worker processes give the same result.json as worker threads"""
        def load(name, executor):
            argv = ['tune', '--optimizer', 'ga', '--seed', '5', '--output', self.output(name)]
            rc, _, _ = run_quietly(argv + BUDGET + ['--executor', executor])
            self.assertEqual(rc, 0)
            with open(os.path.join(self.output(name), 'result.json'), encoding='utf-8') as f:
                data = json.load(f)
            data.pop('wall_time')
            return data

        self.assertEqual(load('proc', 'process'), load('thr', 'thread'))


class TestCompareCommand(unittest.TestCase):
    """Test qfox compare"""

    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmpdir.cleanup()

    def test_01_selected_optimizers(self):
        """Test compare writes per-method directories and a merged summary"""
        out = os.path.join(self.tmpdir.name, 'cmp')
        rc, _, _ = run_quietly(['compare', '--optimizers', 'fox', 'random', 'fox', '--seed', '2',
                                '--output', out] + BUDGET)
        self.assertEqual(rc, 0)
        summary = pd.read_csv(os.path.join(out, 'summary.csv'))
        self.assertEqual(len(summary), 2)
        self.assertEqual(sorted(summary['method']), ['FOX', 'Random'])
        for method in ('fox', 'random'):
            self.assertTrue(os.path.isfile(os.path.join(out, method, 'result.json')))
        curve = pd.read_csv(os.path.join(out, 'curve.csv'))
        self.assertEqual(len(curve), 16)

    def test_02_random_search_is_budget_matched(self):
        """Test the ranked Random row spends FOX's evaluations and the one-sample variant is kept aside"""
        out = os.path.join(self.tmpdir.name, 'fair')
        rc, out_text, _ = run_quietly(['compare', '--optimizers', 'fox', 'random', '--seed', '2',
                                       '--output', out] + BUDGET)
        self.assertEqual(rc, 0)
        with open(os.path.join(out, 'result.json'), encoding='utf-8') as f:
            data = json.load(f)
        self.assertEqual(sorted(data), ['FOX', 'Random', 'Random (1 sample)'])
        self.assertEqual(data['Random']['evaluations'], data['FOX']['evaluations'])
        self.assertEqual(data['FOX']['evaluations'], 4)
        self.assertEqual(data['Random (1 sample)']['evaluations'], 1)
        self.assertEqual(sorted(pd.read_csv(os.path.join(out, 'summary.csv'))['method']), ['FOX', 'Random'])
        self.assertTrue(os.path.isfile(os.path.join(out, 'random-1', 'result.json')))
        self.assertIn('Random (1 sample)', out_text)

    def test_03_single_sample_ranking(self):
        """Test --random-samples 1 ranks the one-sample row and writes no separate variant"""
        out = os.path.join(self.tmpdir.name, 'single')
        rc, _, _ = run_quietly(['compare', '--optimizers', 'fox', 'random', '--random-samples', '1',
                                '--seed', '2', '--output', out] + BUDGET)
        self.assertEqual(rc, 0)
        with open(os.path.join(out, 'result.json'), encoding='utf-8') as f:
            data = json.load(f)
        self.assertEqual(sorted(data), ['FOX', 'Random'])
        self.assertEqual(data['Random']['evaluations'], 1)
        self.assertFalse(os.path.exists(os.path.join(out, 'random-1')))


class TestEvalCommand(unittest.TestCase):
    """Test qfox eval"""

    def test_01_reports_json(self):
        """Test eval prints a JSON report for a given pair"""
        rc, out, _ = run_quietly(['eval', '--alpha', '0.74', '--gamma', '0.97', '--seed', '1',
                                  '--episodes', '8', '--eval-episodes', '3'])
        self.assertEqual(rc, 0)
        report = json.loads(out)
        self.assertEqual(report['alpha'], 0.74)
        self.assertIn(report['greedy_reward'], (0.0, 1 / 3, 2 / 3, 1.0))
        self.assertIn('fitness', report)

    def test_02_out_of_range_pair(self):
        """Test alpha outside [0.01, 1] is a configuration error"""
        rc, _, err = run_quietly(['eval', '--alpha', '0.0', '--gamma', '0.5', '--seed', '1',
                                  '--episodes', '8'])
        self.assertEqual(rc, 2)
        self.assertIn('alpha', err)


if __name__ == '__main__':
    unittest.main()
