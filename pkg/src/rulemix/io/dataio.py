"""CSV ingestion with row/column diagnostics."""

from __future__ import annotations

import csv
import math
from typing import Union

import numpy as np

from ..model import Dataset


class DataError(Exception):
    """Raised for missing, malformed, or unusable input data."""


def _read_rows(path: str) -> list[list[str]]:
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            return list(csv.reader(handle))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _column_label(names: list[str] | None, index: int) -> str:
    if names is not None:
        return f"{names[index]!r}"
    return f"index {index}"


def _parse_cell(cell: str, line: int, label: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataError(f"non-numeric value {cell!r} at line {line}, column {label}") from None
    if not math.isfinite(value):
        raise DataError(f"non-finite value {cell!r} at line {line}, column {label}")
    return value


def _parse_matrix(rows: list[list[str]], names: list[str] | None, first_line: int) -> np.ndarray:
    width = len(names) if names is not None else len(rows[0])
    parsed = np.empty((len(rows), width), dtype=float)
    for i, row in enumerate(rows):
        line = first_line + i
        if len(row) != width:
            raise DataError(f"ragged row at line {line}: expected {width} cells, got {len(row)}")
        for j, cell in enumerate(row):
            parsed[i, j] = _parse_cell(cell, line, _column_label(names, j))
    return parsed


def _resolve_target(target_column: Union[str, int], names: list[str] | None, width: int) -> int:
    if isinstance(target_column, str) and names is not None:
        hits = [j for j, name in enumerate(names) if name == target_column]
        if len(hits) > 1:
            raise DataError(f"target column {target_column!r} is ambiguous (appears {len(hits)} times)")
        if hits:
            return hits[0]
        # Fall through to index interpretation for numeric strings.
    try:
        index = int(target_column)
    except (TypeError, ValueError):
        available = ", ".join(repr(n) for n in names) if names else f"indices 0..{width - 1}"
        raise DataError(f"target column {target_column!r} not found; available: {available}") from None
    if not 0 <= index < width:
        available = ", ".join(repr(n) for n in names) if names else f"indices 0..{width - 1}"
        raise DataError(f"target column index {index} out of range; available: {available}")
    return index


def load_csv_with_names(
    path: str, target_column: Union[str, int], header: bool = True
) -> tuple[Dataset, list[str], str]:
    """Parse a rectangular numeric CSV into a dataset.

    Returns the dataset, the feature column names (positional ``x{i}`` names
    when the file has no header), and the resolved target column name.
    """
    rows = _read_rows(path)
    names: list[str] | None = None
    first_line = 1
    if header:
        if not rows:
            raise DataError(f"{path} is empty; expected a header row")
        names = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
        first_line = 2
    if not rows:
        raise DataError(f"{path} contains no data rows")
    width = len(names) if names is not None else len(rows[0])
    if width < 2:
        raise DataError("need at least one feature column and one target column")

    target_index = _resolve_target(target_column, names, width)
    matrix = _parse_matrix(rows, names, first_line)

    targets = matrix[:, target_index]
    features = np.delete(matrix, target_index, axis=1)
    if np.all(targets == targets[0]):
        target_label = _column_label(names, target_index)
        raise DataError(f"target column {target_label} is constant")

    if names is not None:
        feature_names = [name for j, name in enumerate(names) if j != target_index]
        target_name = names[target_index]
    else:
        feature_names = [f"x{j}" for j in range(width - 1)]
        target_name = str(target_index)
    return Dataset(features, targets), feature_names, target_name


def load_csv(path: str, target_column: Union[str, int], header: bool = True) -> Dataset:
    """Parse a rectangular numeric CSV into a dataset."""
    dataset, _, _ = load_csv_with_names(path, target_column, header)
    return dataset


def load_feature_matrix(path: str, header: bool = True) -> tuple[np.ndarray, list[str]]:
    """Parse a features-only CSV (no target column) into a matrix."""
    rows = _read_rows(path)
    names: list[str] | None = None
    first_line = 1
    if header:
        if not rows:
            raise DataError(f"{path} is empty; expected a header row")
        names = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
        first_line = 2
    if not rows:
        raise DataError(f"{path} contains no data rows")
    matrix = _parse_matrix(rows, names, first_line)
    feature_names = names if names is not None else [f"x{j}" for j in range(matrix.shape[1])]
    return matrix, feature_names
