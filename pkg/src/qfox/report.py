"""
report.py - Experiment artifacts

result.json holds the full TuneResult, summary.csv one row per method
(method, alpha, gamma, reward, time_s) and curve.csv the per-episode reward
curve next to its min-max normalized form. Floats in the CSV files carry 6
significant digits.
"""

from __future__ import annotations

import json
import os
from typing import Any, Mapping, Sequence

import numpy as np
import pandas as pd

from .tuner import TuneResult

RESULT_FILE = "result.json"
SUMMARY_FILE = "summary.csv"
CURVE_FILE = "curve.csv"

SUMMARY_COLUMNS = ["method", "alpha", "gamma", "reward", "time_s"]
CURVE_COLUMNS = ["episode", "reward", "normalized_reward"]
FLOAT_FORMAT = "%.6g"


def normalize_curve(rewards: Sequence[float]) -> list[float]:
    """
    Min-max normalize a reward curve to [0, 1].

    Constant curves map to all zeros.
    """
    values = np.asarray(rewards, dtype=np.float64)
    if values.size == 0:
        raise ValueError("cannot normalize an empty reward curve")
    low = values.min()
    span = values.max() - low
    if span == 0:
        return [0.0] * values.size
    return ((values - low) / span).tolist()


def summary_row(result: TuneResult) -> dict[str, Any]:
    return {
        "method": result.method,
        "alpha": result.best_hp.alpha,
        "gamma": result.best_hp.gamma,
        "reward": result.mean_reward_last_quarter,
        "time_s": result.wall_time,
    }


def curve_frame(result: TuneResult) -> pd.DataFrame:
    return pd.DataFrame({
        "episode": range(len(result.reward_curve)),
        "reward": result.reward_curve,
        "normalized_reward": normalize_curve(result.reward_curve),
    }, columns=CURVE_COLUMNS)


def write_json(data: Any, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")


def write_tune_artifacts(result: TuneResult, output_dir: str) -> list[str]:
    """
    Write result.json, summary.csv and curve.csv for a single method.

    Returns:
        Paths written
    """
    os.makedirs(output_dir, exist_ok=True)
    paths = [os.path.join(output_dir, name) for name in (RESULT_FILE, SUMMARY_FILE, CURVE_FILE)]
    write_json(result.to_dict(), paths[0])
    pd.DataFrame([summary_row(result)], columns=SUMMARY_COLUMNS).to_csv(
        paths[1], index=False, float_format=FLOAT_FORMAT)
    curve_frame(result).to_csv(paths[2], index=False, float_format=FLOAT_FORMAT)
    return paths


def rank(results: Sequence[TuneResult]) -> list[TuneResult]:
    """Order by reward descending; ties keep their given order"""
    return sorted(results, key=lambda r: -r.mean_reward_last_quarter)


def write_compare_artifacts(results: Mapping[str, TuneResult], output_dir: str,
                            extra: Mapping[str, TuneResult] | None = None) -> list[str]:
    """
    Write the merged artifacts of a comparison.

    result.json maps each method to its TuneResult, summary.csv is ordered by
    reward descending and curve.csv is in long format with a method column.
    Results in extra appear in result.json only.

    Returns:
        Paths written
    """
    os.makedirs(output_dir, exist_ok=True)
    paths = [os.path.join(output_dir, name) for name in (RESULT_FILE, SUMMARY_FILE, CURVE_FILE)]
    merged = {method: r.to_dict() for method, r in results.items()}
    merged.update({method: r.to_dict() for method, r in (extra or {}).items()})
    write_json(merged, paths[0])
    ordered = rank(list(results.values()))
    pd.DataFrame([summary_row(r) for r in ordered], columns=SUMMARY_COLUMNS).to_csv(
        paths[1], index=False, float_format=FLOAT_FORMAT)
    frames = [curve_frame(r).assign(method=r.method) for r in results.values()]
    pd.concat(frames, ignore_index=True)[["method"] + CURVE_COLUMNS].to_csv(
        paths[2], index=False, float_format=FLOAT_FORMAT)
    return paths
