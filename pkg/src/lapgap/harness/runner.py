"""Trial execution, CSV/JSON persistence and replay.

Trial ``i`` of an experiment runs on seed ``derive_seed(master_seed, i)``
with BLAS limited to one thread, so the payload does not depend on how many
worker processes are used or how trials are scheduled.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .. import __version__
from ..rng import derive_seed
from . import experiments
from .config import ConfigError, ExperimentConfig, build_config, parse_text
from .experiments import Experiment, Summary, TrialOutput


@dataclass
class TrialRecord:
    index: int
    seed: int
    wall_time: float
    output: TrialOutput
    version: str = __version__


@dataclass
class RunResult:
    config: ExperimentConfig
    summary: Summary
    csv_path: Path
    summary_path: Path
    records: list[TrialRecord]

    @property
    def passed(self) -> bool | None:
        return self.summary.passed


def format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def format_rows(rows) -> list[list[str]]:
    return [[format_cell(v) for v in row] for row in rows]


def _execute(name: str, params: dict, index: int) -> TrialRecord:
    exp = experiments.get(name)
    seed = derive_seed(params["seed"], index)
    with threadpool_limits(limits=1):
        t0 = time.perf_counter()
        out = exp.trial(params, index, seed)
        wall = time.perf_counter() - t0
    return TrialRecord(index, seed, wall, out)


def run_trials(exp: Experiment, params: dict, workers: int = 1) -> list[TrialRecord]:
    total = exp.trial_count(params)
    if workers <= 1:
        return [_execute(exp.name, params, i) for i in range(total)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, total // (4 * workers))
        records = list(pool.map(_execute, [exp.name] * total, [params] * total, range(total),
                                chunksize=chunk))
    return sorted(records, key=lambda r: r.index)


def header_lines(config: ExperimentConfig) -> list[str]:
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return [f"# lapgap {__version__}", f"# created {stamp}"] + [f"# config {line}" for line in config.lines()]


def write_table(path: Path, config: ExperimentConfig, columns, rows) -> None:
    buf = io.StringIO()
    for line in header_lines(config):
        buf.write(line + "\r\n")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    w.writerows(format_rows(rows))
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")


def read_table(path) -> tuple[list[str], list[str], list[list[str]]]:
    """(header comment lines, column names, body rows) of a result CSV."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    comments = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    rows = list(csv.reader(body))
    if not rows:
        raise ConfigError(f"{path}: no column header")
    return comments, rows[0], rows[1:]


def csv_body(path) -> str:
    """File content without '#' header lines; the part covered by the determinism contract."""
    text = Path(path).read_text(encoding="utf-8")
    return "".join(ln for ln in text.splitlines(keepends=True) if not ln.startswith("#"))


def config_from_header(comments: list[str]) -> ExperimentConfig:
    text = "\n".join(ln[len("# config "):] for ln in comments if ln.startswith("# config "))
    name, raw = parse_text(text)
    if name is None:
        raise ConfigError("file header carries no experiment name")
    exp = experiments.get(name)
    return build_config(name, exp.defaults, raw)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if math.isfinite(f) else str(f)
    return v


def make_config(name: str, overrides: dict | None = None, quick: bool = False) -> ExperimentConfig:
    exp = experiments.get(name)
    merged = {**(exp.quick if quick else {}), **(overrides or {})}
    cfg = build_config(name, exp.defaults, merged)
    exp.validate(cfg.params)
    return cfg


def run_experiment(config: ExperimentConfig, out_dir) -> RunResult:
    exp = experiments.get(config.experiment)
    exp.validate(config.params)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise ConfigError(f"cannot create output directory {out}: {err}") from None
    t0 = time.perf_counter()
    records = run_trials(exp, config.params, config.workers)
    summary = exp.summarize(config.params, [r.output for r in records])
    wall = time.perf_counter() - t0

    rows = [(r.index, r.seed, *row) for r in records for row in r.output.rows]
    csv_path = out / f"{exp.name}.csv"
    try:
        write_table(csv_path, config, ("trial", "seed", *exp.columns), rows)
        for tname, (cols, trows) in summary.tables.items():
            write_table(out / f"{exp.name}.{tname}.csv", config, cols, trows)
        summary_path = out / f"{exp.name}.summary.json"
        doc = {"experiment": exp.name, "version": __version__, "config": config.lines(),
               "passed": summary.passed, "wall_time": wall, **summary.values}
        summary_path.write_text(json.dumps(_jsonable(doc), indent=2) + "\n", encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot write results to {out}: {err}") from None
    return RunResult(config, summary, csv_path, summary_path, records)


@dataclass
class ReplayResult:
    trial: int
    recorded: list[list[str]]
    replayed: list[list[str]]

    @property
    def matches(self) -> bool:
        return self.recorded == self.replayed


def replay(path, trial: int) -> ReplayResult:
    """Re-run one trial from a result file and compare its formatted rows."""
    comments, columns, body = read_table(path)
    cfg = config_from_header(comments)
    exp = experiments.get(cfg.experiment)
    if not 0 <= trial < exp.trial_count(cfg.params):
        raise ConfigError(f"trial {trial} outside 0..{exp.trial_count(cfg.params) - 1}")
    recorded = [row for row in body if row and row[0] == str(trial)]
    rec = _execute(exp.name, cfg.params, trial)
    replayed = format_rows([(rec.index, rec.seed, *row) for row in rec.output.rows])
    return ReplayResult(trial, recorded, replayed)
