"""Batch reanalysis: CSV ingestion, hyperparameter sweeps, figure data.

Input schema (UTF-8 CSV, header required):

    id,label,y1,n1,y2,n2

Output rows carry one (study, method, parameter point) cell each and
serialize to CSV or JSON with a fixed column order; floats are written
with 17 significant digits so re-parsing reproduces them bit for bit.
Per-cell numerical failures are recorded in the row (``error``) and
never abort a batch.  Sweeps are pure per-cell computations, so running
them on a process pool is byte-identical to running them serially.

A 39-study corpus of published two-proportion null results ships with
the package; see ``data/nejm_null_results.csv``.
"""

from __future__ import annotations

import csv
import importlib.resources
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import averaging, dep_ib, ib, lt
from .model import (
    DepIBPrior,
    IBPrior,
    LTPrior,
    NumericalError,
    TwoByTwoData,
    ValidationError,
)

__all__ = [
    "StudyRecord",
    "SweepResult",
    "ParseError",
    "METHODS",
    "ingest_csv",
    "default_grids",
    "run_sweep",
    "sensitivity_curve",
    "emit",
    "bundled_corpus_path",
    "load_bundled_corpus",
    "sweep_schema_path",
]

METHODS = ("ib", "lt", "dep_ib", "avg")

CSV_HEADER = ("id", "label", "y1", "n1", "y2", "n2")

#: Hyperparameter columns in serialization order; absent ones stay empty.
PARAM_COLUMNS = ("a", "sigma_beta", "sigma_psi", "sigma_eta", "sigma_zeta")

OUTPUT_COLUMNS = ("study_id", "method") + PARAM_COLUMNS + (
    "log_bf01",
    "bf01",
    "abs_error",
)


class ParseError(ValueError):
    """Malformed batch input; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class StudyRecord:
    id: int
    label: str
    data: TwoByTwoData


@dataclass(frozen=True)
class SweepResult:
    """One sweep cell.  ``error`` holds an error code when the cell failed."""

    study_id: int
    method: str
    params: Mapping[str, float]
    log_bf01: float = float("nan")
    abs_error: float = float("nan")
    error: str | None = None

    def sort_key(self):
        return (self.study_id, self.method, tuple(sorted(self.params.items())))


def ingest_csv(path: str | Path) -> list[StudyRecord]:
    """Parse study records, validating counts and id uniqueness.

    An empty (or header-only) file is an empty batch, not an error.
    Errors carry the offending 1-based line number.
    """
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        return []
    rows = list(csv.reader(io.StringIO(text)))
    header = tuple(h.strip() for h in rows[0])
    if header != CSV_HEADER:
        raise ParseError(1, f"expected header {','.join(CSV_HEADER)}, got {','.join(header)}")
    records: list[StudyRecord] = []
    seen: set[int] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 6:
            raise ParseError(lineno, f"expected 6 fields, got {len(row)}")
        try:
            sid = int(row[0])
            label = row[1].strip()
            y1, n1, y2, n2 = (int(c) for c in row[2:])
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from exc
        if sid in seen:
            raise ParseError(lineno, f"duplicate study id {sid}")
        seen.add(sid)
        try:
            data = TwoByTwoData(y1, n1, y2, n2)
        except ValidationError as exc:
            raise ParseError(lineno, f"study {sid}: {exc}") from exc
        records.append(StudyRecord(id=sid, label=label, data=data))
    return records


def default_grids() -> dict[str, list[dict[str, float]]]:
    """Default parameter grids: a in 1..5 step 0.5, sigma_psi in 1..2 step 0.1."""
    return {
        "ib": [{"a": 1.0 + 0.5 * i} for i in range(9)],
        "lt": [
            {"sigma_beta": 1.0, "sigma_psi": round(1.0 + 0.1 * i, 10)} for i in range(11)
        ],
        "dep_ib": [
            {"sigma_eta": s, "sigma_zeta": 0.5} for s in (0.2, 0.4, 0.6, 0.8, 1.0)
        ],
        "avg": [{"a": 1.0, "sigma_beta": 1.0, "sigma_psi": 1.0}],
    }


def _evaluate_cell(study: StudyRecord, method: str, params: dict) -> SweepResult:
    try:
        if method == "ib":
            res = ib.bf01_ib(study.data, params["a"])
        elif method == "lt":
            res = lt.bf01_lt(
                study.data,
                sigma_beta=params.get("sigma_beta", 1.0),
                sigma_psi=params.get("sigma_psi", 1.0),
            )
        elif method == "dep_ib":
            res = dep_ib.bf01_depib(
                study.data,
                DepIBPrior(
                    sigma_eta=params.get("sigma_eta", 0.2),
                    sigma_zeta=params.get("sigma_zeta", 0.5),
                ),
            )
        elif method == "avg":
            res = averaging.bf_avg01(
                study.data,
                averaging.equal_weights(),
                averaging.ApproachParams(
                    ib=IBPrior(params.get("a", 1.0)),
                    lt=LTPrior(
                        params.get("sigma_beta", 1.0), params.get("sigma_psi", 1.0)
                    ),
                ),
            )
        else:
            raise ValidationError(f"unknown method {method!r}")
    except (ValidationError, NumericalError, ValueError, ArithmeticError) as exc:
        return SweepResult(
            study_id=study.id, method=method, params=dict(params),
            error=type(exc).__name__,
        )
    return SweepResult(
        study_id=study.id, method=method, params=dict(params),
        log_bf01=res.log_bf01, abs_error=res.abs_error_estimate,
    )


def _evaluate_cell_tuple(cell):
    return _evaluate_cell(*cell)


def run_sweep(
    batch: Sequence[StudyRecord],
    methods: Sequence[str] = ("ib", "lt"),
    grids: Mapping[str, Sequence[Mapping[str, float]]] | None = None,
    jobs: int = 1,
) -> list[SweepResult]:
    """Evaluate every (study, method, parameter point) cell.

    The result list is sorted by (study_id, method, parameters) and is
    independent of ``jobs``; workers only ever compute pure cells.
    """
    for m in methods:
        if m not in METHODS:
            raise ValidationError(f"unknown method {m!r}; valid: {METHODS}")
    all_grids = default_grids()
    if grids:
        all_grids.update({k: [dict(p) for p in v] for k, v in grids.items()})
    for m in methods:
        if not all_grids.get(m):
            raise ValidationError(f"empty parameter grid for method {m!r}")
    cells = [
        (study, method, dict(params))
        for study in batch
        for method in methods
        for params in all_grids[method]
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate_cell_tuple, cells, chunksize=8))
    else:
        results = [_evaluate_cell(*c) for c in cells]
    return sorted(results, key=SweepResult.sort_key)


def sensitivity_curve(
    n: int,
    methods: Sequence[str] = ("ib", "lt"),
    params: Mapping[str, Mapping[str, float]] | None = None,
) -> list[tuple[int, str, float]]:
    """log BF01 at simulated equal counts y1 = y2 = y, y in 0..n//2.

    The pattern over the full count range is symmetric about n/2, so
    only the lower half is evaluated.
    """
    if n < 2:
        raise ValidationError(f"n must be >= 2, got {n}")
    defaults: dict[str, dict[str, float]] = {
        "ib": {"a": 1.0},
        "lt": {"sigma_beta": 1.0, "sigma_psi": 1.0},
        "dep_ib": {"sigma_eta": 0.2, "sigma_zeta": 0.5},
        "avg": {"a": 1.0, "sigma_beta": 1.0, "sigma_psi": 1.0},
    }
    if params:
        for m, p in params.items():
            defaults[m].update(p)
    out = []
    for y in range(n // 2 + 1):
        study = StudyRecord(id=y, label=f"simulated-{y}", data=TwoByTwoData(y, n, y, n))
        for method in methods:
            cell = _evaluate_cell(study, method, defaults[method])
            out.append((y, method, cell.log_bf01))
    return out


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _result_fields(r: SweepResult) -> dict[str, object]:
    row: dict[str, object] = {"study_id": r.study_id, "method": r.method}
    for col in PARAM_COLUMNS:
        row[col] = float(r.params[col]) if col in r.params else None
    failed = r.error is not None
    row["log_bf01"] = None if failed else float(r.log_bf01)
    bf01 = None if failed else math.exp(r.log_bf01)
    row["bf01"] = bf01 if bf01 is None or math.isfinite(bf01) else None
    row["abs_error"] = None if failed else float(r.abs_error)
    return row


def emit(results: Iterable[SweepResult], fmt: str, path: str | Path) -> None:
    """Serialize sweep results; ``fmt`` is "csv" or "json".

    Column order is fixed; failed cells leave their numeric fields
    empty (CSV) or null (JSON).
    """
    results = list(results)
    path = Path(path)
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(OUTPUT_COLUMNS)
            for r in results:
                fields = _result_fields(r)
                w.writerow(
                    [
                        fields["study_id"],
                        fields["method"],
                        *[
                            "" if fields[c] is None else _fmt(fields[c])
                            for c in OUTPUT_COLUMNS[2:]
                        ],
                    ]
                )
        return
    if fmt == "json":
        # hand-rolled so float values keep the 17-significant-digit form
        lines = []
        for r in results:
            fields = _result_fields(r)
            parts = []
            for col in OUTPUT_COLUMNS:
                v = fields[col]
                if v is None:
                    enc = "null"
                elif isinstance(v, str):
                    enc = json.dumps(v)
                elif col == "study_id":
                    enc = str(int(v))
                else:
                    enc = _fmt(v)
                parts.append(f'"{col}": {enc}')
            lines.append("  {" + ", ".join(parts) + "}")
        body = "[\n" + ",\n".join(lines) + "\n]\n" if lines else "[]\n"
        path.write_text(body, encoding="utf-8")
        return
    raise ValidationError(f"unknown output format {fmt!r}")


def bundled_corpus_path() -> Path:
    return Path(importlib.resources.files("bf2p").joinpath("data/nejm_null_results.csv"))


def sweep_schema_path() -> Path:
    return Path(importlib.resources.files("bf2p").joinpath("data/sweep_schema.json"))


def load_bundled_corpus() -> list[StudyRecord]:
    """The 39-study two-proportion null-result corpus shipped with the package."""
    return ingest_csv(bundled_corpus_path())
