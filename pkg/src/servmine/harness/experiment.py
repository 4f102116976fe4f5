"""Experiment driver: sweep generator/config points, mine each, report the four metrics."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from collections.abc import Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from servmine.config import MiningConfig
from servmine.errors import InvalidArgument, ServMineError
from servmine.mining import NoveltyRegistry, mine
from servmine.model import ServiceDescription
from servmine.synth import GeneratorParams, generate_repository

COLUMNS = (
    "params_summary",
    "n_services",
    "total_leads",
    "avg_cd",
    "interesting_count",
    "avg_interestingness",
    "wall_time_ms",
)


class SweepPointError(ServMineError):
    pass


@dataclass(frozen=True)
class SweepPoint:
    """One sweep setting. ``repository`` replaces generation when given."""

    params: GeneratorParams
    config: MiningConfig
    label: str = ""
    repository: tuple[ServiceDescription, ...] | None = None

    def summary(self, seed: int) -> str:
        p, c = self.params, self.config
        parts = [self.label] if self.label else []
        if self.repository is not None:
            parts.append(f"repo={len(self.repository)}")
        else:
            parts.append(
                f"n={p.n_services} ops={p.ops_per_service[0]}-{p.ops_per_service[1]}"
                f" in={p.inputs_per_op[0]}-{p.inputs_per_op[1]}"
                f" out={p.outputs_per_op[0]}-{p.outputs_per_op[1]}"
                f" cond={p.cond_params_per_op[0]}-{p.cond_params_per_op[1]}"
                f" types={p.type_alphabet_size}"
            )
        parts.append(f"zeta={c.zeta:g} xi={c.xi:g} r0={c.r0:g} seed={seed}")
        return " ".join(parts)


@dataclass(frozen=True)
class ExperimentRow:
    params_summary: str
    n_services: int
    total_leads: int
    avg_cd: float
    interesting_count: int
    avg_interestingness: float
    wall_time_ms: float

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, c) for c in COLUMNS)


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple[ExperimentRow, ...] = ()

    def __len__(self) -> int:
        return len(self.rows)


def _mean(values: list[float]) -> float:
    return math.fsum(values) / len(values) if values else math.nan


def _run_one(point: SweepPoint, seed: int) -> ExperimentRow:
    t0 = time.perf_counter()
    if point.repository is not None:
        repo = list(point.repository)
    else:
        repo = generate_repository(point.params.with_(seed=seed))
    leads = mine(repo, point.config, NoveltyRegistry(), "always_true")
    passing = [lead for lead in leads if lead.status != "filtered_cd"]
    interesting = [lead for lead in leads if lead.status == "interesting"]
    elapsed = (time.perf_counter() - t0) * 1000.0
    return ExperimentRow(
        params_summary=point.summary(seed),
        n_services=len(repo),
        total_leads=len(passing),
        avg_cd=_mean([lead.scores.cd for lead in passing]),
        interesting_count=len(interesting),
        avg_interestingness=_mean([lead.scores.interestingness for lead in interesting]),
        wall_time_ms=elapsed,
    )


def _task(args: tuple[int, SweepPoint, int]) -> ExperimentRow:
    index, point, seed = args
    try:
        return _run_one(point, seed)
    except ServMineError as exc:
        raise SweepPointError(f"sweep point {index} ({point.summary(seed)}): {exc}") from exc


def run_experiment(
    sweep: Sequence[SweepPoint],
    repetitions: int = 1,
    base_seed: int = 0,
    workers: int = 1,
) -> ExperimentReport:
    """Mine every sweep point ``repetitions`` times with seeds ``base_seed + rep``.

    Rows come back in sweep order, repetitions innermost, whatever ``workers`` is.
    """
    if repetitions < 0:
        raise InvalidArgument("repetitions must be non-negative")
    tasks = [(i, point, base_seed + rep) for i, point in enumerate(sweep) for rep in range(repetitions)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_task, tasks))
    else:
        rows = [_task(t) for t in tasks]
    return ExperimentReport(tuple(rows))


def _cell(value: Any, column: str, include_timing: bool) -> str:
    if column == "wall_time_ms" and not include_timing:
        return ""
    if isinstance(value, float):
        return "" if math.isnan(value) else repr(value)
    return str(value)


def report_to_csv(report: ExperimentReport, include_timing: bool = False) -> str:
    """Render the report as RFC-4180 CSV.

    Means over an empty set are written as empty cells. ``wall_time_ms`` is
    left blank unless ``include_timing`` so that reruns are byte-identical.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(COLUMNS)
    for row in report.rows:
        writer.writerow([_cell(v, c, include_timing) for c, v in zip(COLUMNS, row.as_tuple())])
    return buf.getvalue()


def export_csv(report: ExperimentReport, path, include_timing: bool = False) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(report_to_csv(report, include_timing))


def _split_key(key: str) -> tuple[str, str]:
    section, _, name = key.partition(".")
    if section not in ("generator", "config") or not name:
        raise InvalidArgument(f"grid key {key!r} must look like 'generator.<field>' or 'config.<field>'")
    return section, name


def sweep_from_dict(doc: Mapping[str, Any]) -> list[SweepPoint]:
    """Expand a sweep document into points.

    Shape: ``{"generator": {...}, "config": {...}, "points": [...], "grid": {...}}``.
    ``points`` entries and ``grid`` combinations override the base sections;
    grid keys are dotted (``"generator.n_services": [50, 100]``).
    """
    unknown = set(doc) - {"generator", "config", "points", "grid"}
    if unknown:
        raise InvalidArgument(f"unknown sweep fields: {sorted(unknown)}")
    base_gen = dict(doc.get("generator", {}))
    base_cfg = dict(doc.get("config", {}))
    overrides: list[dict[str, Any]] = list(doc.get("points", []))
    grid = doc.get("grid")
    if grid:
        keys = list(grid)
        for combo in itertools.product(*(grid[k] for k in keys)):
            entry: dict[str, Any] = {"generator": {}, "config": {}}
            for key, value in zip(keys, combo):
                section, name = _split_key(key)
                entry[section][name] = value
            overrides.append(entry)
    if not overrides:
        overrides = [{}]
    points = []
    for entry in overrides:
        gen = {**base_gen, **entry.get("generator", {})}
        cfg = {**base_cfg, **entry.get("config", {})}
        points.append(
            SweepPoint(
                params=GeneratorParams.from_dict(gen),
                config=MiningConfig.from_dict(cfg),
                label=entry.get("label", ""),
            )
        )
    return points


def load_sweep(path) -> list[SweepPoint]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return sweep_from_dict(doc)
