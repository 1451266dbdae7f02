"""CSV ingestion and per-variable standardization.

Matrices are stored rows-as-variables, columns-as-samples. The loader
auto-detects an optional header row and an optional row-label column by
looking for non-numeric cells, and reports parse problems with their
line numbers. Saving uses 17 significant digits so a save/load round
trip reproduces every float bit for bit.
"""

from __future__ import annotations

import csv
import math

import numpy as np

from .linalg import DataMatrix

__all__ = ["load_matrix", "save_matrix", "standardize_rows"]


def _parse_cell(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def load_matrix(path: str) -> DataMatrix:
    """Read a rectangular numeric CSV as a variables x samples matrix.

    A first row or first column containing non-numeric text is treated
    as a header or label column and stripped. Ragged rows, non-numeric
    data cells, non-finite values, and fewer than 3 sample columns are
    errors naming the offending line.
    """
    rows: list[tuple[int, list[str]]] = []
    with open(path, newline="") as handle:
        for lineno, cells in enumerate(csv.reader(handle), start=1):
            if not cells or all(not c.strip() for c in cells):
                continue  # blank line
            rows.append((lineno, [c.strip() for c in cells]))
    if not rows:
        raise ValueError(f"{path}: no data rows found")

    width = len(rows[0][1])
    for lineno, cells in rows:
        if len(cells) != width:
            raise ValueError(
                f"{path}: line {lineno}: expected {width} columns, "
                f"found {len(cells)}"
            )

    # label column: any non-numeric first cell below the first row
    label_col = len(rows) > 1 and any(
        _parse_cell(cells[0]) is None for _, cells in rows[1:]
    )
    first_data_col = 1 if label_col else 0
    header_row = any(
        _parse_cell(c) is None for c in rows[0][1][first_data_col:]
    )

    data_rows = rows[1:] if header_row else rows
    if not data_rows:
        raise ValueError(f"{path}: no data rows below the header")
    n = width - first_data_col
    if n < 3:
        raise ValueError(
            f"{path}: need at least 3 data columns (samples), found {n}"
        )

    values = np.empty((len(data_rows), n), dtype=np.float64)
    for i, (lineno, cells) in enumerate(data_rows):
        for j, cell in enumerate(cells[first_data_col:]):
            parsed = _parse_cell(cell)
            if parsed is None:
                raise ValueError(
                    f"{path}: line {lineno}, column {first_data_col + j + 1}: "
                    f"non-numeric value {cell!r}"
                )
            if not math.isfinite(parsed):
                raise ValueError(
                    f"{path}: line {lineno}, column {first_data_col + j + 1}: "
                    f"non-finite value {cell!r}"
                )
            values[i, j] = parsed
    return DataMatrix(values)


def save_matrix(path: str, matrix: DataMatrix | np.ndarray) -> None:
    """Write a matrix as plain numeric CSV with 17 significant digits."""
    values = matrix.values if isinstance(matrix, DataMatrix) else np.asarray(matrix)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        for row in values:
            writer.writerow([f"{v:.17g}" for v in row])


def standardize_rows(matrix: DataMatrix | np.ndarray) -> DataMatrix:
    """Scale each row (variable) to unit sample variance.

    Keeps row means untouched; after centering, the covariance diagonal
    is then all ones, so the dual covariance trace equals d. Rows whose
    sample standard deviation is below 1e-13 relative to their magnitude
    are rejected as constant.
    """
    values = matrix.values if isinstance(matrix, DataMatrix) else None
    if values is None:
        values = np.asarray(matrix, dtype=np.float64)
        values = DataMatrix(values).values  # same validation path
    sd = np.std(values, axis=1, ddof=1)
    floor = 1e-13 * np.maximum(1.0, np.abs(values.mean(axis=1)))
    bad = np.nonzero(sd <= floor)[0]
    if bad.size:
        raise ValueError(
            f"row {bad[0]} has zero sample variance; cannot standardize"
        )
    return DataMatrix(values / sd[:, None])
