"""Deterministic, resumable Monte Carlo sweeps.

Trial ``t`` of grid point ``i`` draws from the stream ``(seed, i, t)``, so the
tables do not depend on execution order or worker count. Each finished point
leaves a CSV chunk and a ``.done`` marker; a rerun reuses finished points.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from rsclab import __version__
from rsclab.harness import observables as obs
from rsclab.harness.config import ExperimentConfig
from rsclab.harness.inference import wilson_interval
from rsclab.models.registry import evaluate, resolve
from rsclab.rng import ALGORITHM, trial_generator

FIXED_TRIAL_COLUMNS = ("point", "value", "trial", "error")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _run_trials(cfg_dict: dict, point: int, value, trials: list[int]) -> list[dict[str, Any]]:
    cfg = ExperimentConfig.from_dict(cfg_dict)
    spec = cfg.point_spec(value)
    rows = []
    for t in trials:
        row: dict[str, Any] = {"point": point, "value": value, "trial": t, "error": ""}
        try:
            sample = spec.generate(trial_generator(cfg.seed, point, t))
            row.update(obs.compute(sample, cfg.observables))
            for key in ("clipped", "uniform"):
                if key in sample.info:
                    row[key] = sample.info[key]
        except Exception as exc:  # recorded per trial, never fatal
            row["error"] = f"{type(exc).__name__}: {exc}".replace("\n", " ")
        rows.append(row)
    return rows


def workers_from_env(default: int) -> int:
    env = os.environ.get("RSC_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"RSC_WORKERS must be an integer, got {env!r}") from None
    return max(1, int(default))


def _git_hash() -> str:
    try:
        out = subprocess.run(["git", "rev-parse", "HEAD"], capture_output=True, text=True, timeout=5, check=False)
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def _columns(rows: list[dict]) -> list[str]:
    extra = sorted({k for r in rows for k in r} - set(FIXED_TRIAL_COLUMNS))
    return list(FIXED_TRIAL_COLUMNS[:3]) + extra + ["error"]


def _write_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _read_csv(text: str) -> list[dict]:
    out = []
    for r in csv.DictReader(io.StringIO(text)):
        row: dict[str, Any] = {}
        for k, v in r.items():
            if k == "error" or v == "":
                row[k] = v
                continue
            try:
                row[k] = int(v)
            except ValueError:
                try:
                    row[k] = float(v)
                except ValueError:
                    row[k] = v
        out.append(row)
    return out


@dataclass
class ResultTable:
    param: str
    grid: list
    trials: list[list[dict]]
    summary: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def column(self, name: str, point: int) -> np.ndarray:
        vals = [r.get(name) for r in self.trials[point] if not r.get("error")]
        return np.array([np.nan if v in (None, "") else v for v in vals], dtype=float)

    def trials_csv(self) -> str:
        flat = [r for chunk in self.trials for r in chunk]
        return _write_csv(flat, _columns(flat))

    def summary_csv(self) -> str:
        cols = ["point", self.param, "trials", "failures"]
        cols += sorted({k for r in self.summary for k in r} - set(cols))
        return _write_csv(self.summary, cols)


def _aggregate(cfg: ExperimentConfig, point: int, value, rows: list[dict]) -> dict[str, Any]:
    ok = [r for r in rows if not r.get("error")]
    out: dict[str, Any] = {"point": point, cfg.param: value, "trials": len(rows), "failures": len(rows) - len(ok)}
    names = sorted({k for r in ok for k in r} - set(FIXED_TRIAL_COLUMNS))
    for name in names:
        vals = np.array([r.get(name, np.nan) for r in ok], dtype=float)
        vals = vals[~np.isnan(vals)]
        if vals.size == 0:
            continue
        out[f"{name}_mean"] = float(vals.mean())
        out[f"{name}_se"] = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else float("nan")
        if obs.is_binary(name):
            lo, hi = wilson_interval(int(vals.sum()), int(vals.size))
            out[f"{name}_lo"] = lo
            out[f"{name}_hi"] = hi
    theory = cfg.expected.get("values", {})
    if theory:
        names_env = resolve({**cfg.model.params, cfg.param: value})
        for name, expr in theory.items():
            expr = expr[1:] if isinstance(expr, str) and expr.startswith("=") else str(expr)
            out[f"{name}_theory"] = float(evaluate(expr, names_env))
    return out


def _trend(cfg: ExperimentConfig, summary: list[dict]) -> dict[str, Any] | None:
    trend = cfg.expected.get("trend")
    if not trend or len(summary) < 2:
        return None
    col, direction = trend["column"], trend.get("direction", "increasing")
    first, last = summary[0], summary[-1]
    if f"{col}_mean" not in first or f"{col}_mean" not in last:
        return {"column": col, "direction": direction, "ok": False, "reason": "missing column"}
    delta = last[f"{col}_mean"] - first[f"{col}_mean"]
    ok = delta > 0 if direction == "increasing" else delta < 0
    return {"column": col, "direction": direction, "delta": delta, "ok": bool(ok)}


def run_experiment(
    cfg: ExperimentConfig,
    output: str | os.PathLike | None = None,
    *,
    resume: bool = True,
    workers: int | None = None,
) -> ResultTable:
    """Run every grid point; write ``trials.csv``, ``summary.csv`` and
    ``metadata.json`` under ``output`` (or ``cfg.output``) when given."""
    out_dir = Path(output) if output is not None else (Path(cfg.output) if cfg.output else None)
    nworkers = workers_from_env(workers if workers is not None else cfg.workers)
    chunks_dir = None
    if out_dir is not None:
        chunks_dir = out_dir / "points"
        chunks_dir.mkdir(parents=True, exist_ok=True)
    cfg_dict = cfg.to_dict()
    results: list[list[dict] | None] = [None] * len(cfg.grid)
    pending = []
    for i, value in enumerate(cfg.grid):
        if chunks_dir is not None and resume and (chunks_dir / f"point-{i:04d}.done").exists():
            results[i] = _read_csv((chunks_dir / f"point-{i:04d}.csv").read_text(encoding="utf-8"))
        else:
            pending.append((i, value))

    def finish(i: int, rows: list[dict]) -> None:
        rows.sort(key=lambda r: r["trial"])
        results[i] = rows
        if chunks_dir is not None:
            tmp = chunks_dir / f"point-{i:04d}.csv.tmp"
            tmp.write_text(_write_csv(rows, _columns(rows)), encoding="utf-8")
            tmp.replace(chunks_dir / f"point-{i:04d}.csv")
            (chunks_dir / f"point-{i:04d}.done").write_text("ok\n", encoding="ascii")
            # reload so resumed and fresh runs share one code path for values
            results[i] = _read_csv((chunks_dir / f"point-{i:04d}.csv").read_text(encoding="utf-8"))

    if nworkers == 1:
        for i, value in pending:
            finish(i, _run_trials(cfg_dict, i, value, list(range(cfg.trials))))
    else:
        size = max(1, math.ceil(cfg.trials / nworkers))
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            for i, value in pending:
                futures = [
                    pool.submit(_run_trials, cfg_dict, i, value, list(range(a, min(a + size, cfg.trials))))
                    for a in range(0, cfg.trials, size)
                ]
                rows = [r for f in futures for r in f.result()]
                finish(i, rows)
    if chunks_dir is None:
        # normalise values through the CSV round trip so in-memory and on-disk tables agree
        results = [_read_csv(_write_csv(rows, _columns(rows))) for rows in results]

    summary = [_aggregate(cfg, i, v, results[i]) for i, v in enumerate(cfg.grid)]
    meta = {
        "name": cfg.name,
        "schema": cfg.schema,
        "seed": cfg.seed,
        "rng": ALGORITHM,
        "git_hash": _git_hash(),
        "version": __version__,
        "claim": cfg.claim,
        "config": cfg_dict,
        "downgraded_trials": int(sum(int(r.get("downgraded", 0) or 0) for rows in results for r in rows)),
        "failed_trials": int(sum(1 for rows in results for r in rows if r.get("error"))),
    }
    trend = _trend(cfg, summary)
    if trend is not None:
        meta["trend"] = trend
    if cfg.model.family == "cm_d":
        meta["uniform_sampling"] = False
    table = ResultTable(cfg.param, list(cfg.grid), results, summary, meta)
    if out_dir is not None:
        (out_dir / "trials.csv").write_text(table.trials_csv(), encoding="utf-8")
        (out_dir / "summary.csv").write_text(table.summary_csv(), encoding="utf-8")
        (out_dir / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return table
