"""Typed tabular data: CSV ingestion with a schema sidecar, cohort filters,
discretization, and summary statistics."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .graph import Variable

MISSING_TOKENS = {"", "na", "nan", "null", "none"}


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class Dataset:
    schema: tuple[Variable, ...]
    data: np.ndarray  # (n, k) float64, row-major
    n_dropped: int = 0

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.shape[1] != len(self.schema):
            raise DataError(
                f"data shape {self.data.shape} does not match "
                f"{len(self.schema)}-column schema")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.schema)

    def column_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"unknown column {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.column_index(name)]

    def columns(self, names: Iterable[str]) -> np.ndarray:
        return self.data[:, [self.column_index(n) for n in names]]

    def variable(self, name: str) -> Variable:
        return self.schema[self.column_index(name)]

    def take(self, mask: np.ndarray) -> "Dataset":
        return Dataset(self.schema, self.data[mask], self.n_dropped)

    def int_codes(self, names: Sequence[str]) -> np.ndarray:
        """Integer-coded matrix for discrete columns (values must be integral)."""
        out = np.empty((self.n, len(names)), dtype=np.int64)
        for j, name in enumerate(names):
            col = self.column(name)
            codes = np.rint(col).astype(np.int64)
            if not np.allclose(col, codes):
                raise DataError(f"column {name!r} is not integer-coded")
            out[:, j] = codes
        return out

    def discretized(self, columns: Iterable[str], bins: int = 5) -> "Dataset":
        """Quantile-bin the given continuous columns into categorical codes."""
        data = self.data.copy()
        schema = list(self.schema)
        for name in columns:
            j = self.column_index(name)
            col = data[:, j]
            qs = np.quantile(col, np.linspace(0, 1, bins + 1)[1:-1])
            qs = np.unique(qs)
            data[:, j] = np.searchsorted(qs, col, side="right")
            schema[j] = Variable(name, "categorical", levels=max(len(qs) + 1, 2))
        return Dataset(tuple(schema), data, self.n_dropped)


def load_schema(path: str | Path) -> tuple[Variable, ...]:
    raw = json.loads(Path(path).read_text())
    return tuple(
        Variable(v["name"], v.get("kind", "continuous"), v.get("levels"))
        for v in raw["variables"]
    )


def save_schema(schema: Sequence[Variable], path: str | Path) -> None:
    Path(path).write_text(json.dumps({
        "variables": [
            {"name": v.name, "kind": v.kind,
             **({"levels": v.levels} if v.levels is not None else {})}
            for v in schema
        ]
    }, indent=2))


def ingest(csv_path: str | Path, schema_path: str | Path) -> Dataset:
    """Read a headered CSV against its schema sidecar.

    Rows with missing cells are dropped (counted in ``n_dropped``);
    unparseable non-missing cells are an error with coordinates.
    """
    schema = load_schema(schema_path)
    names = [v.name for v in schema]
    rows: list[list[float]] = []
    dropped = 0
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{csv_path}: empty file") from None
        if [h.strip() for h in header] != names:
            raise DataError(
                f"{csv_path}: header {header} does not match schema columns {names}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(names):
                raise DataError(
                    f"{csv_path}: line {lineno} has {len(row)} fields, "
                    f"expected {len(names)}")
            vals: list[float] = []
            missing = False
            for j, cell in enumerate(row):
                text = cell.strip()
                if text.lower() in MISSING_TOKENS:
                    missing = True
                    break
                try:
                    vals.append(float(text))
                except ValueError:
                    raise DataError(
                        f"{csv_path}: unparseable cell at line {lineno}, "
                        f"column {names[j]!r}: {cell!r}") from None
            if missing:
                dropped += 1
                continue
            rows.append(vals)
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(names)))
    return Dataset(schema, data, n_dropped=dropped)


def save_csv(d: Dataset, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(d.names)
        for row in d.data:
            w.writerow([_fmt(x) for x in row])


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


# -- cohort selection ---------------------------------------------------------

COMPARATORS = {
    "==": np.equal, "!=": np.not_equal,
    "<": np.less, "<=": np.less_equal,
    ">": np.greater, ">=": np.greater_equal,
}


@dataclass(frozen=True)
class Filter:
    column: str
    comparator: str
    value: float
    action: str = "include"  # include: keep matching rows; exclude: drop them

    def __post_init__(self):
        if self.comparator not in COMPARATORS:
            raise DataError(f"unknown comparator {self.comparator!r}")
        if self.action not in ("include", "exclude"):
            raise DataError(f"filter action must be include/exclude, got {self.action!r}")

    def describe(self) -> str:
        return f"{self.action} {self.column} {self.comparator} {self.value}"


@dataclass(frozen=True)
class CohortSpec:
    filters: tuple[Filter, ...] = ()
    discretize: tuple[str, ...] = ()
    discretize_bins: int = 5
    summaries: tuple[dict, ...] = ()
    arm_column: str | None = None

    @staticmethod
    def from_json_dict(d: dict) -> "CohortSpec":
        return CohortSpec(
            filters=tuple(
                Filter(f["column"], f["comparator"], float(f["value"]),
                       f.get("action", "include"))
                for f in d.get("filters", ())
            ),
            discretize=tuple(d.get("discretize", ())),
            discretize_bins=int(d.get("discretize_bins", 5)),
            summaries=tuple(d.get("summaries", ())),
            arm_column=d.get("arm_column"),
        )


@dataclass(frozen=True)
class AttritionReport:
    initial: int
    steps: tuple[tuple[str, int], ...]  # (filter description, retained count)

    @property
    def final(self) -> int:
        return self.steps[-1][1] if self.steps else self.initial


def apply_cohort(d: Dataset, spec: CohortSpec) -> tuple[Dataset, AttritionReport]:
    """Apply filters in declared order; error on an empty final cohort."""
    cur = d
    steps: list[tuple[str, int]] = []
    for f in spec.filters:
        mask = COMPARATORS[f.comparator](cur.column(f.column), f.value)
        if f.action == "exclude":
            mask = ~mask
        cur = cur.take(mask)
        steps.append((f.describe(), cur.n))
    if cur.n == 0:
        raise DataError("cohort is empty after filters: "
                        + "; ".join(f"{s} -> {n}" for s, n in steps))
    if spec.discretize:
        cur = cur.discretized(spec.discretize, spec.discretize_bins)
    return cur, AttritionReport(initial=d.n, steps=tuple(steps))


STAT_NAMES = ("mean", "sd", "median", "iqr", "count", "percent")


def summarize(d: Dataset, spec: CohortSpec) -> list[dict]:
    """Per-variable (optionally per-arm) summary rows.

    Each requested entry is {"variable": name, "stats": [...]}; output rows
    carry raw numbers plus a display string in mean(sd) / median(iqr) shape.
    """
    arms: list[tuple[str, Dataset]]
    if spec.arm_column is not None:
        col = d.column(spec.arm_column)
        arms = [
            (f"{spec.arm_column}={_fmt(v)}", d.take(col == v))
            for v in np.unique(col)
        ]
    else:
        arms = [("all", d)]

    out: list[dict] = []
    for req in spec.summaries:
        name = req["variable"]
        stats = tuple(req.get("stats", ("mean", "sd")))
        for s in stats:
            if s not in STAT_NAMES:
                raise DataError(f"unknown statistic {s!r}")
        for arm_name, sub in arms:
            col = sub.column(name)
            row: dict = {"variable": name, "arm": arm_name, "n": sub.n}
            for s in stats:
                row[s] = _stat(s, col, sub.n)
            row["display"] = _display(stats, row)
            out.append(row)
    return out


def _stat(s: str, col: np.ndarray, n: int) -> float:
    if n == 0:
        return float("nan")
    if s == "mean":
        return float(np.mean(col))
    if s == "sd":
        return float(np.std(col, ddof=1)) if n > 1 else 0.0
    if s == "median":
        return float(np.median(col))
    if s == "iqr":
        q1, q3 = np.percentile(col, [25, 75])
        return float(q3 - q1)
    if s == "count":
        return float(np.sum(col != 0))
    if s == "percent":
        return float(100.0 * np.mean(col != 0))
    raise DataError(f"unknown statistic {s!r}")


def _display(stats: tuple[str, ...], row: dict) -> str:
    if "mean" in stats and "sd" in stats:
        return f"{row['mean']:.2f}({row['sd']:.2f})"
    if "median" in stats and "iqr" in stats:
        return f"{row['median']:.2f}({row['iqr']:.2f})"
    if "count" in stats and "percent" in stats:
        return f"{int(row['count'])}({row['percent']:.1f}%)"
    return " ".join(f"{s}={row[s]:.3g}" for s in stats)
