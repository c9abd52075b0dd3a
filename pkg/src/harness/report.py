"""
Report files for metrics tables.

CSV: one row per (parameter, t), columns in a fixed order, with config_hash and
seed repeated on every row; a stop-time histogram, when present, goes to a
sibling "<stem>_hist.csv". JSON: a single document holding both.
Floats are written with 6 significant digits and missing values as empty
cells (CSV) or null (JSON). Nothing time-dependent is written, so equal inputs
give byte-identical files.
"""

import csv
import json
from dataclasses import asdict
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Union

import structlog

from ..core.errors import DomainError
from .metrics import HistogramBin, MetricsRow, MetricsTable

logger = structlog.get_logger(__name__)

ROW_COLUMNS = [
    "scenario",
    "parameter",
    "t",
    "trials",
    "rejection_rate",
    "mean_wealth",
    "stop_q10",
    "stop_q50",
    "stop_q90",
    "baseline_rejection_rate",
    "config_hash",
    "seed",
]
HIST_COLUMNS = ["parameter", "lower", "upper", "count"]
FLOAT_FIELDS = {
    "rejection_rate",
    "mean_wealth",
    "stop_q10",
    "stop_q50",
    "stop_q90",
    "baseline_rejection_rate",
    "lower",
    "upper",
}


class ReportFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6g}"


def _parse_float(text: str) -> Optional[float]:
    return None if text == "" else float(text)


def _hist_path(path: Path) -> Path:
    return path.with_name(f"{path.stem}_hist{path.suffix}")


def emit_report(
    table: MetricsTable, fmt: Union[ReportFormat, str], path: Union[str, Path]
) -> Path:
    """
    Write a metrics table.

    Raises:
        DomainError: If the table has no rows.
    """
    if not table.rows:
        raise DomainError("refusing to write an empty metrics table")
    fmt = ReportFormat(fmt)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    if fmt == ReportFormat.JSON:
        document = {
            "scenario": table.scenario,
            "config_hash": table.config_hash,
            "seed": table.seed,
            "columns": ROW_COLUMNS[1:-2],
            "rows": [_row_json(row) for row in table.rows],
            "histogram": [asdict(b) for b in table.histogram],
        }
        path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(ROW_COLUMNS)
            for row in table.rows:
                writer.writerow(_row_csv(table, row))
        if table.histogram:
            with open(_hist_path(path), "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(HIST_COLUMNS)
                for b in table.histogram:
                    writer.writerow([b.parameter, _fmt(b.lower), _fmt(b.upper), b.count])

    logger.info("report_written", path=str(path), format=fmt.value, rows=len(table.rows))
    return path


def _row_json(row: MetricsRow) -> dict[str, Any]:
    data = asdict(row)
    for key in FLOAT_FIELDS & data.keys():
        if data[key] is not None:
            data[key] = float(_fmt(data[key]))
    return data


def _row_csv(table: MetricsTable, row: MetricsRow) -> list[Any]:
    return [
        table.scenario,
        row.parameter,
        row.t,
        row.trials,
        _fmt(row.rejection_rate),
        _fmt(row.mean_wealth),
        _fmt(row.stop_q10),
        _fmt(row.stop_q50),
        _fmt(row.stop_q90),
        _fmt(row.baseline_rejection_rate),
        table.config_hash,
        table.seed,
    ]


def parse_report(path: Union[str, Path]) -> MetricsTable:
    """Read a report written by emit_report (format chosen by suffix)."""
    path = Path(path)
    if path.suffix == ".json":
        document = json.loads(path.read_text(encoding="utf-8"))
        return MetricsTable(
            scenario=document["scenario"],
            config_hash=document["config_hash"],
            seed=int(document["seed"]),
            rows=[MetricsRow(**row) for row in document["rows"]],
            histogram=[HistogramBin(**b) for b in document["histogram"]],
        )

    with open(path, encoding="utf-8", newline="") as fh:
        records = list(csv.DictReader(fh))
    if not records:
        raise DomainError(f"{path} holds no rows")
    table = MetricsTable(
        scenario=records[0]["scenario"],
        config_hash=records[0]["config_hash"],
        seed=int(records[0]["seed"]),
    )
    for record in records:
        table.rows.append(
            MetricsRow(
                parameter=record["parameter"],
                t=int(record["t"]),
                trials=int(record["trials"]),
                rejection_rate=float(record["rejection_rate"]),
                mean_wealth=float(record["mean_wealth"]),
                stop_q10=_parse_float(record["stop_q10"]),
                stop_q50=_parse_float(record["stop_q50"]),
                stop_q90=_parse_float(record["stop_q90"]),
                baseline_rejection_rate=_parse_float(record["baseline_rejection_rate"]),
            )
        )
    hist = _hist_path(path)
    if hist.exists():
        with open(hist, encoding="utf-8", newline="") as fh:
            for record in csv.DictReader(fh):
                table.histogram.append(
                    HistogramBin(
                        record["parameter"],
                        float(record["lower"]),
                        float(record["upper"]),
                        int(record["count"]),
                    )
                )
    return table
