"""Lifetime statistics and CSV/JSON output."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import IO, Iterable, Optional, Sequence, Union

CSV_COLUMNS = (
    "round",
    "alive",
    "dead",
    "ch_count",
    "total_residual_j",
    "avg_energy_per_alive_j",
    "sink_x",
    "sink_y",
    "bits_delivered",
)

SUMMARY_METRICS = ("first_dead_round", "quarter_dead_round", "last_alive_round")


@dataclass(frozen=True)
class RoundRecord:
    round: int
    alive: int
    dead: int
    ch_count: int
    total_residual_j: float
    avg_energy_per_alive_j: float
    sink_x: float
    sink_y: float
    bits_delivered: int

    @property
    def num_nodes(self) -> int:
        return self.alive + self.dead


@dataclass(frozen=True)
class LifetimeSummary:
    scenario: str
    dim: float
    seed: int
    first_dead_round: Optional[int]
    quarter_dead_round: Optional[int]
    last_alive_round: int


def first_dead_round(records: Sequence[RoundRecord]) -> Optional[int]:
    for rec in records:
        if rec.alive < rec.num_nodes:
            return rec.round
    return None


def quarter_dead_round(records: Sequence[RoundRecord], num_nodes: int) -> Optional[int]:
    needed = math.ceil(0.25 * num_nodes)
    for rec in records:
        if rec.dead >= needed:
            return rec.round
    return None


def last_alive_round(records: Sequence[RoundRecord]) -> int:
    last = 0
    for rec in records:
        if rec.alive > 0:
            last = rec.round
    return last


def summarize_run(records: Sequence[RoundRecord], scenario: str, dim: float, seed: int) -> LifetimeSummary:
    if not records:
        raise ValueError("cannot summarise an empty run")
    return LifetimeSummary(
        scenario=scenario,
        dim=dim,
        seed=seed,
        first_dead_round=first_dead_round(records),
        quarter_dead_round=quarter_dead_round(records, records[0].num_nodes),
        last_alive_round=last_alive_round(records),
    )


def lower_median(values: Sequence[int]) -> int:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def summarize_replicates(summaries: Sequence[LifetimeSummary]) -> dict[str, dict]:
    """Median/min/max of each lifetime metric across seeds of one cell.

    Runs where a metric never happened are left out of its statistics and
    counted in ``undefined_count``.
    """
    if not summaries:
        raise ValueError("no summaries to aggregate")
    cells = {(s.scenario, s.dim) for s in summaries}
    if len(cells) > 1:
        raise ValueError(f"summaries mix scenarios/dimensions: {sorted(cells)}")
    out: dict[str, dict] = {}
    for metric in SUMMARY_METRICS:
        values = [getattr(s, metric) for s in summaries]
        defined = [v for v in values if v is not None]
        out[metric] = {
            "median": lower_median(defined) if defined else None,
            "min": min(defined) if defined else None,
            "max": max(defined) if defined else None,
            "undefined_count": len(values) - len(defined),
            "runs": len(values),
        }
    return out


def _fmt(value: Union[int, float]) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_round_csv(records: Iterable[RoundRecord], destination: Union[str, Path, IO[str]]) -> None:
    """Write one CSV row per round. Floats use repr, so they parse back exactly."""
    if hasattr(destination, "write"):
        _write_rows(records, destination)
        return
    path = Path(destination)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            _write_rows(records, fh)
    except OSError as exc:
        raise OSError(f"cannot write round CSV to {path}: {exc.strerror or exc}") from exc


def _write_rows(records: Iterable[RoundRecord], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        row = asdict(rec)
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])


def read_round_csv(source: Union[str, Path]) -> list[RoundRecord]:
    types = {f.name: f.type for f in fields(RoundRecord)}
    out = []
    with open(source, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append(
                RoundRecord(**{k: (float(v) if types[k] == "float" else int(v)) for k, v in row.items()})
            )
    return out
