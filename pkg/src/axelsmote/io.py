"""CSV ingestion, label encoding, normalization, imputation, and export.

Loading re-encodes arbitrary string labels to dense ids 0..m-1 in
first-appearance order and flags missing cells (configurable markers) as
NaN for later imputation.  Export writes floats with 17 significant digits
so a load/export round trip reproduces every cell exactly; string labels
are restored through the inverse mapping.  Quoting follows RFC 4180 via
the stdlib csv module.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np

from .core import Dataset
from .errors import (
    AllMissingColumn,
    EmptyFile,
    MissingLabelColumn,
    NonFiniteValue,
    ParseError,
)

__all__ = [
    "CsvSchema",
    "NormalizationParams",
    "load_csv",
    "impute_missing",
    "normalize",
    "export_csv",
]

DEFAULT_MISSING_MARKERS = frozenset({"", "NA", "NaN", "?"})


@dataclass(frozen=True)
class CsvSchema:
    """How to read a labeled CSV file.

    ``label_column`` is a header name (requires ``has_header``) or a
    0-based column index.  Cells matching a missing marker (after
    whitespace stripping) load as missing values.
    """

    label_column: Union[str, int]
    delimiter: str = ","
    has_header: bool = True
    missing_markers: frozenset = DEFAULT_MISSING_MARKERS

    def __post_init__(self):
        if len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")
        object.__setattr__(self, "missing_markers", frozenset(self.missing_markers))


@dataclass(frozen=True)
class NormalizationParams:
    """Per-feature (min, max) captured from a dataset.

    Allows applying the same affine map to held-out data and inverting it.
    Held-out values outside the captured range map outside [0, 1]; that is
    intentional.
    """

    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        mins = np.array(self.mins, dtype=np.float64, copy=True)
        maxs = np.array(self.maxs, dtype=np.float64, copy=True)
        if mins.shape != maxs.shape or mins.ndim != 1:
            raise ValueError("mins and maxs must be 1-D arrays of equal length")
        if np.any(maxs < mins):
            raise ValueError("every max must be >= the matching min")
        mins.flags.writeable = False
        maxs.flags.writeable = False
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    @property
    def spans(self) -> np.ndarray:
        return self.maxs - self.mins

    def transform(self, features) -> np.ndarray:
        """Map columns through (x - min) / (max - min); constant columns to 0."""
        X = np.asarray(features, dtype=np.float64)
        spans = self.spans
        safe = np.where(spans > 0, spans, 1.0)
        out = (X - self.mins) / safe
        out[..., spans == 0] = 0.0
        return out

    def inverse(self, features) -> np.ndarray:
        """Undo :meth:`transform`; constant columns recover their min."""
        X = np.asarray(features, dtype=np.float64)
        return X * self.spans + self.mins


def _resolve_label_index(schema: CsvSchema, header, width: int) -> int:
    if isinstance(schema.label_column, int):
        idx = schema.label_column
        if not 0 <= idx < width:
            raise MissingLabelColumn(
                f"label column index {idx} out of range for {width} columns"
            )
        return idx
    if header is None:
        raise MissingLabelColumn(
            f"label column {schema.label_column!r} needs a header row"
        )
    try:
        return header.index(schema.label_column)
    except ValueError:
        raise MissingLabelColumn(
            f"label column {schema.label_column!r} not in header {header}"
        ) from None


def load_csv(path, schema: CsvSchema) -> Tuple[Dataset, Dict[str, int]]:
    """Read a labeled CSV into a Dataset plus the label-string mapping.

    Labels are encoded to 0..m-1 in first-appearance order; missing feature
    cells become NaN and must be imputed before validation or resampling.

    Raises:
        EmptyFile: no data rows.
        MissingLabelColumn: the configured label column is absent.
        ParseError: a cell is neither a number nor a missing marker
            (0-based data row and file column reported).
    """
    with open(path, newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle, delimiter=schema.delimiter) if row]

    header = None
    if schema.has_header:
        if not rows:
            raise EmptyFile(f"{path}: no rows at all")
        header = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
    if not rows:
        raise EmptyFile(f"{path}: no data rows")

    width = len(header) if header is not None else len(rows[0])
    label_idx = _resolve_label_index(schema, header, width)

    label_ids: Dict[str, int] = {}
    labels = []
    features = np.empty((len(rows), width - 1), dtype=np.float64)

    for r, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(r, 0, f"expected {width} cells, found {len(row)}")
        label = row[label_idx].strip()
        if label not in label_ids:
            label_ids[label] = len(label_ids)
        labels.append(label_ids[label])
        j = 0
        for c, cell in enumerate(row):
            if c == label_idx:
                continue
            text = cell.strip()
            if text in schema.missing_markers:
                features[r, j] = np.nan
            else:
                try:
                    value = float(text)
                except ValueError:
                    raise ParseError(r, c, f"cannot parse {cell!r} as a number") from None
                if math.isinf(value):
                    raise ParseError(r, c, f"non-finite value {cell!r}")
                features[r, j] = value  # float("nan") strings count as missing
            j += 1

    feature_names = None
    if header is not None:
        feature_names = tuple(
            name for i, name in enumerate(header) if i != label_idx
        )
    ds = Dataset(
        features=features,
        labels=np.array(labels, dtype=np.int64),
        feature_names=feature_names,
        normalized=False,
    )
    return ds, label_ids


def impute_missing(ds: Dataset, strategy: str = "mean") -> Dataset:
    """Replace missing (NaN) cells column-wise; observed cells are untouched.

    ``strategy`` is "mean" (default), "median", or "zero".

    Raises:
        AllMissingColumn: a column has no observed value to impute from.
    """
    if strategy not in ("mean", "median", "zero"):
        raise ValueError(f"strategy must be mean, median or zero, got {strategy!r}")
    missing = np.isnan(ds.features)
    if not missing.any():
        return ds

    filled = ds.features.copy()
    for col in range(ds.n_features):
        col_missing = missing[:, col]
        if not col_missing.any():
            continue
        observed = filled[~col_missing, col]
        if observed.size == 0:
            raise AllMissingColumn(f"column {col} has no observed values")
        if strategy == "mean":
            fill = float(observed.mean())
        elif strategy == "median":
            fill = float(np.median(observed))
        else:
            fill = 0.0
        filled[col_missing, col] = fill

    return Dataset(
        features=filled,
        labels=ds.labels,
        feature_names=ds.feature_names,
        normalized=ds.normalized,
    )


def normalize(ds: Dataset) -> Tuple[Dataset, NormalizationParams]:
    """Min-max normalize every column into [0, 1]; constant columns map to 0.

    Raises:
        NonFiniteValue: the dataset still holds missing or infinite cells.
    """
    finite = np.isfinite(ds.features)
    if not finite.all():
        row, col = np.argwhere(~finite)[0]
        raise NonFiniteValue(int(row), int(col))
    params = NormalizationParams(
        mins=ds.features.min(axis=0), maxs=ds.features.max(axis=0)
    )
    normalized = Dataset(
        features=params.transform(ds.features),
        labels=ds.labels,
        feature_names=ds.feature_names,
        normalized=True,
    )
    return normalized, params


def export_csv(
    ds: Dataset,
    label_mapping: Optional[Dict[str, int]],
    path,
    include_provenance: bool = False,
    batch=None,
    label_column_name: str = "label",
    n_original: Optional[int] = None,
) -> None:
    """Write a dataset back to CSV, restoring original label strings.

    Floats are written with 17 significant digits (exact round trip);
    missing cells are written as "NaN".  With ``include_provenance``, extra
    columns ``is_synthetic`` and ``base_index`` are appended: synthetic
    rows are the trailing rows covered by ``batch`` (or beyond
    ``n_original`` when no batch is given); original rows get base_index -1,
    as do synthetic rows whose provenance is unknown.
    """
    decode = {}
    if label_mapping:
        decode = {v: k for k, v in label_mapping.items()}

    names = ds.feature_names
    if names is None:
        names = tuple(f"x{i}" for i in range(ds.n_features))
    header = list(names) + [label_column_name]

    first_synth = ds.n_samples
    base_of = {}
    if include_provenance:
        header += ["is_synthetic", "base_index"]
        if batch is not None:
            first_synth = ds.n_samples - len(batch.samples)
            for offset, sample in enumerate(batch.samples):
                base_of[first_synth + offset] = sample.base_index
        elif n_original is not None:
            first_synth = n_original

    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, delimiter=",", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(header)
        for r in range(ds.n_samples):
            cells = [
                "NaN" if math.isnan(v) else format(v, ".17g")
                for v in ds.features[r]
            ]
            label = int(ds.labels[r])
            cells.append(decode.get(label, str(label)))
            if include_provenance:
                synthetic = int(r >= first_synth)
                cells.append(str(synthetic))
                cells.append(str(base_of.get(r, -1)))
            writer.writerow(cells)
