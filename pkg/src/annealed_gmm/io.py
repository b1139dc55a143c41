"""File formats: dataset CSV, parameter / fit / benchmark JSON, grid CSV.

Floats are written in shortest round-trip decimal form (`repr`), so files
re-read lose nothing beyond the 17-significant-digit decimal encoding.  JSON
payloads carry a ``schema_version`` field and an optional timestamp; with the
timestamp disabled, identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from datetime import datetime, timezone

import numpy as np

from .core import Dataset, MixtureParams
from .experiments import BenchmarkReport, LandscapeGrid

SCHEMA_VERSION = 1


def format_float(x) -> str:
    return repr(float(x))


def write_dataset_csv(path, data: Dataset) -> None:
    """Feature columns f0..f{d-1} plus a label column when labels exist."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = [f"f{j}" for j in range(data.dim)]
        if data.labels is not None:
            header.append("label")
        writer.writerow(header)
        for i in range(data.n):
            row = [format_float(v) for v in data.points[i]]
            if data.labels is not None:
                row.append(str(int(data.labels[i])))
            writer.writerow(row)


def read_dataset_csv(path) -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty CSV") from None
        has_labels = bool(header) and header[-1] == "label"
        n_features = len(header) - (1 if has_labels else 0)
        if n_features < 1 or header[:n_features] != [f"f{j}" for j in range(n_features)]:
            raise ValueError(
                f"{path}: expected header f0..f{{d-1}}[,label], got {header}"
            )
        points = []
        labels = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields")
            try:
                points.append([float(v) for v in row[:n_features]])
                if has_labels:
                    labels.append(int(row[-1]))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not points:
        raise ValueError(f"{path}: no data rows")
    return Dataset(
        np.asarray(points),
        labels=np.asarray(labels, dtype=int) if has_labels else None,
    )


def params_to_dict(params: MixtureParams) -> dict:
    return {
        "weights": params.weights.tolist(),
        "means": params.means.tolist(),
        "covariances": params.covariances.tolist(),
    }


def params_from_dict(payload: dict) -> MixtureParams:
    try:
        return MixtureParams.from_arrays(
            payload["weights"], payload["means"], payload["covariances"]
        )
    except KeyError as exc:
        raise ValueError(f"parameter JSON missing key {exc}") from None


def _sanitize(obj):
    """Make a payload strictly JSON-serializable (NaN/inf become null)."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _sanitize(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(path, payload: dict, timestamp: bool = False) -> None:
    payload = dict(payload)
    if timestamp:
        payload["timestamp"] = datetime.now(timezone.utc).isoformat()
    with open(path, "w") as fh:
        json.dump(_sanitize(payload), fh, indent=2, allow_nan=False)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path) as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return payload


def ground_truth_payload(params: MixtureParams) -> dict:
    return {"schema_version": SCHEMA_VERSION, **params_to_dict(params)}


def fit_result_payload(result, mode: str) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "mode": mode,
        "converged": bool(result.converged),
        "iterations": int(result.iterations),
        "failure_reason": result.failure_reason,
        "final_params": params_to_dict(result.final_params),
        "objective_history": list(result.objective_history),
        "trajectory": [params_to_dict(p) for p in result.param_trajectory],
    }


def benchmark_report_payload(report: BenchmarkReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "trials": report.trials,
        "seed": report.seed,
        "success_threshold": report.success_threshold,
        "best_objective": report.best_objective,
        "estimators": [
            {
                "label": s.label,
                "trials": s.trials,
                "successes": s.successes,
                "success_ratio": s.success_ratio,
                "mean_final_objective": s.mean_final_objective,
                "mean_iterations": s.mean_iterations,
                "failures": s.failures,
                "final_log_likelihoods": list(s.final_log_likelihoods),
            }
            for s in report.estimators
        ],
    }


def benchmark_table(report: BenchmarkReport) -> str:
    lines = [
        f"{'estimator':<10} {'trials':>7} {'successes':>10} "
        f"{'ratio':>8} {'mean objective':>16} {'mean iters':>11}",
    ]
    for s in report.estimators:
        lines.append(
            f"{s.label:<10} {s.trials:>7d} {s.successes:>10d} "
            f"{s.success_ratio:>8.3f} {s.mean_final_objective:>16.4f} "
            f"{s.mean_iterations:>11.1f}"
        )
    lines.append(
        f"best objective {format_float(report.best_objective)}, "
        f"success threshold {format_float(report.success_threshold)}"
    )
    return "\n".join(lines)


def write_landscape_csv(path, grid: LandscapeGrid) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["axis1", "axis2", "value"])
        for i, a in enumerate(grid.axis1):
            for j, b in enumerate(grid.axis2):
                writer.writerow(
                    [format_float(a), format_float(b), format_float(grid.values[i, j])]
                )


def write_trotter_csv(path, rows) -> None:
    """Rows of (slice count M, max-abs error vs the exact diagonal)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "max_abs_error"])
        for m, err in rows:
            writer.writerow([str(int(m)), format_float(err)])
