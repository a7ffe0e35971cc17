"""Measure-matrix data model: CSV ingestion, direction harmonization, min-max scaling.

A study evaluates a set of anonymization approaches (rows) against a set of
risk and utility measures (columns). Raw values arrive in arbitrary units and
directions; :func:`harmonize_and_normalize` rescales every column to [0, 1]
with a fixed orientation: utility columns read "higher is more utility" and
risk columns read "higher is more disclosure risk".
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import ValidationError

if TYPE_CHECKING:  # pragma: no cover
    from .config import StudyConfig


class Block(str, Enum):
    RISK = "risk"
    UTILITY = "utility"


class Direction(str, Enum):
    """Orientation of the raw values: which end is the desirable one."""

    HIGHER = "higher"
    LOWER = "lower"


@dataclass(frozen=True)
class MeasureSpec:
    """Declares one measure: block membership and raw-value direction."""

    id: str
    display_name: str
    block: Block
    direction: Direction


@dataclass(frozen=True)
class ApproachRecord:
    """One evaluated approach; `dataset` distinguishes multi-dataset studies."""

    id: str
    dataset: str | None = None
    is_reference: bool = False

    @property
    def label(self) -> str:
        return self.id if self.dataset is None else f"{self.id}@{self.dataset}"


def _validate_specs(specs: Sequence[MeasureSpec]) -> None:
    seen = set()
    for s in specs:
        if s.id in seen:
            raise ValidationError(f"measures: duplicate id '{s.id}'")
        seen.add(s.id)
    n_risk = sum(1 for s in specs if s.block is Block.RISK)
    n_util = sum(1 for s in specs if s.block is Block.UTILITY)
    if n_risk == 0 or n_util == 0:
        raise ValidationError(
            "measures: need at least one risk and one utility measure "
            f"(got {n_risk} risk, {n_util} utility)"
        )


def _validate_rows(rows: Sequence[ApproachRecord]) -> None:
    if len(rows) < 2:
        raise ValidationError(f"data: at least 2 rows required, got {len(rows)}")
    seen = set()
    ref_per_dataset: dict[str | None, int] = {}
    for r in rows:
        key = (r.id, r.dataset)
        if key in seen:
            where = r.id if r.dataset is None else f"{r.id} in dataset {r.dataset}"
            raise ValidationError(f"data: duplicate approach row '{where}'")
        seen.add(key)
        if r.is_reference:
            ref_per_dataset[r.dataset] = ref_per_dataset.get(r.dataset, 0) + 1
    for ds, count in ref_per_dataset.items():
        if count > 1:
            where = "" if ds is None else f" in dataset '{ds}'"
            raise ValidationError(f"data: more than one reference row{where}")


@dataclass(frozen=True)
class MeasureMatrix:
    """Raw measure values, rows = approaches, columns = declared measures."""

    specs: tuple[MeasureSpec, ...]
    rows: tuple[ApproachRecord, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.shape != (len(self.rows), len(self.specs)):
            raise ValidationError(
                f"values: shape {vals.shape} does not match "
                f"{len(self.rows)} rows x {len(self.specs)} measures"
            )
        if not np.all(np.isfinite(vals)):
            i, j = np.argwhere(~np.isfinite(vals))[0]
            raise ValidationError(
                f"row '{self.rows[i].label}', column '{self.specs[j].id}': "
                "non-finite value"
            )
        _validate_specs(self.specs)
        _validate_rows(self.rows)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(r.label for r in self.rows)

    def block_indices(self, block: Block) -> tuple[int, ...]:
        return tuple(j for j, s in enumerate(self.specs) if s.block is block)


@dataclass(frozen=True)
class ColumnScale:
    """Per-column raw range kept for inverse mapping back to raw units."""

    raw_min: float
    raw_max: float
    flipped: bool
    constant: bool


@dataclass(frozen=True)
class NormalizedMatrix:
    """Min-max scaled, direction-harmonized values in [0, 1]."""

    specs: tuple[MeasureSpec, ...]
    rows: tuple[ApproachRecord, ...]
    values: np.ndarray
    scales: tuple[ColumnScale, ...]

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.shape != (len(self.rows), len(self.specs)):
            raise ValidationError("normalized values: shape mismatch")
        if len(self.scales) != len(self.specs):
            raise ValidationError("normalized values: one scale per column required")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("normalized values: non-finite entry")
        if vals.size and (vals.min() < -1e-9 or vals.max() > 1.0 + 1e-9):
            raise ValidationError("normalized values: entry outside [0, 1]")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(r.label for r in self.rows)

    def block_indices(self, block: Block) -> tuple[int, ...]:
        return tuple(j for j, s in enumerate(self.specs) if s.block is block)

    def block_values(self, block: Block) -> np.ndarray:
        return self.values[:, list(self.block_indices(block))]

    def reference_indices(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.rows) if r.is_reference)


def ingest(data: bytes | str, config: "StudyConfig") -> MeasureMatrix:
    """Parse a measures CSV against a study configuration.

    The CSV must carry a header row `approach[,dataset],<measure ids...>`.
    Measure columns may appear in any order in the file; the resulting matrix
    follows the configuration's declaration order (risk block first).

    Raises:
        ValidationError: missing or undeclared columns, non-numeric or
            non-finite cells, duplicate rows, fewer than two rows, or a
            missing reference row.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text))
    raw_rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not raw_rows:
        raise ValidationError("data: empty CSV")

    header = [h.strip() for h in raw_rows[0]]
    if not header or header[0] != "approach":
        raise ValidationError("data: first CSV column must be 'approach'")
    has_dataset = len(header) > 1 and header[1] == "dataset"
    offset = 2 if has_dataset else 1
    file_measures = header[offset:]

    declared = [s.id for s in config.measures]
    dupes = {m for m in file_measures if file_measures.count(m) > 1}
    if dupes:
        raise ValidationError(f"data: duplicate measure column(s): {sorted(dupes)}")
    missing = [m for m in declared if m not in file_measures]
    if missing:
        raise ValidationError(f"data: missing measure column(s): {missing}")
    extra = [m for m in file_measures if m not in declared]
    if extra:
        raise ValidationError(f"data: undeclared measure column(s): {extra}")
    col_pos = {m: offset + file_measures.index(m) for m in declared}

    records: list[ApproachRecord] = []
    values: list[list[float]] = []
    for line_no, row in enumerate(raw_rows[1:], start=2):
        if len(row) != len(header):
            raise ValidationError(
                f"data line {line_no}: expected {len(header)} fields, got {len(row)}"
            )
        approach_id = row[0].strip()
        if not approach_id:
            raise ValidationError(f"data line {line_no}: empty approach id")
        dataset = row[1].strip() or None if has_dataset else None
        cells = []
        for spec in config.measures:
            raw = row[col_pos[spec.id]].strip()
            try:
                v = float(raw)
            except ValueError:
                raise ValidationError(
                    f"row '{approach_id}', column '{spec.id}': "
                    f"non-numeric value '{raw}'"
                ) from None
            if not math.isfinite(v):
                raise ValidationError(
                    f"row '{approach_id}', column '{spec.id}': "
                    f"non-finite value '{raw}'"
                )
            cells.append(v)
        records.append(
            ApproachRecord(
                id=approach_id,
                dataset=dataset,
                is_reference=approach_id == config.reference_id,
            )
        )
        values.append(cells)

    matrix = MeasureMatrix(
        specs=tuple(config.measures),
        rows=tuple(records),
        values=np.array(values, dtype=float),
    )
    datasets = {r.dataset for r in matrix.rows}
    for ds in sorted(datasets, key=lambda d: (d is not None, d)):
        members = [r for r in matrix.rows if r.dataset == ds]
        if not any(r.is_reference for r in members):
            where = "" if ds is None else f" in dataset '{ds}'"
            raise ValidationError(
                f"data: reference approach '{config.reference_id}' not found{where}"
            )
    return matrix


def harmonize_and_normalize(
    matrix: MeasureMatrix, exclude_reference_from_range: bool = False
) -> NormalizedMatrix:
    """Min-max scale each column to [0, 1] and orient it to its block semantics.

    Utility columns end with higher = more utility, risk columns with
    higher = more disclosure risk. By default the reference row takes part in
    the per-column min/max; with `exclude_reference_from_range` the ranges
    come from the candidate rows only and reference values are clamped into
    [0, 1]. Constant columns map to 0.5 everywhere and emit a warning.
    """
    vals = np.array(matrix.values, dtype=float)
    n = len(matrix.rows)
    ref_mask = np.array([r.is_reference for r in matrix.rows], dtype=bool)
    if exclude_reference_from_range:
        pop_mask = ~ref_mask
        if not pop_mask.any():
            raise ValidationError(
                "cannot exclude the reference from ranges: no candidate rows"
            )
    else:
        pop_mask = np.ones(n, dtype=bool)

    out = np.empty_like(vals)
    scales: list[ColumnScale] = []
    for j, spec in enumerate(matrix.specs):
        col = vals[:, j]
        pop = col[pop_mask]
        lo = float(pop.min())
        hi = float(pop.max())
        flip = (spec.block is Block.UTILITY and spec.direction is Direction.LOWER) or (
            spec.block is Block.RISK and spec.direction is Direction.HIGHER
        )
        if hi == lo:
            warnings.warn(
                f"measure '{spec.id}' is constant over the scaling population; "
                "normalized to 0.5",
                UserWarning,
                stacklevel=2,
            )
            out[:, j] = 0.5
            scales.append(ColumnScale(lo, hi, flipped=flip, constant=True))
            continue
        scaled = (col - lo) / (hi - lo)
        if exclude_reference_from_range:
            scaled = np.clip(scaled, 0.0, 1.0)
        if flip:
            scaled = 1.0 - scaled
        out[:, j] = scaled
        scales.append(ColumnScale(lo, hi, flipped=flip, constant=False))

    return NormalizedMatrix(
        specs=matrix.specs, rows=matrix.rows, values=out, scales=tuple(scales)
    )
