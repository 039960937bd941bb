"""CSV input and output for datasets and tables.

Datasets are stored with columns ``w1, ..., wd, y``. Floats are written
with 17 significant digits so a file round-trips exactly and identical
runs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .rho import Dataset


def _read_matrix(path) -> tuple[list[str] | None, np.ndarray]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path} is empty")
    header = None
    try:
        float(rows[0][0])
    except ValueError:
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    try:
        arr = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path} contains a non-numeric entry: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError(f"{path} has no data rows")
    return header, arr


def read_covariates(path) -> np.ndarray:
    """Covariate rows from a CSV file; a ``y`` column, if present, is dropped."""
    header, arr = _read_matrix(path)
    if header is not None and "y" in header:
        arr = np.delete(arr, header.index("y"), axis=1)
    return arr


def read_dataset(path) -> Dataset:
    """Dataset from a CSV file whose last column (or the column named ``y``) is the response."""
    header, arr = _read_matrix(path)
    col = header.index("y") if header is not None and "y" in header else arr.shape[1] - 1
    if arr.shape[1] < 2:
        raise ValueError("a dataset needs at least one covariate column and a response column")
    return Dataset(np.delete(arr, col, axis=1), arr[:, col])


def dataset_to_csv(data: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"w{j + 1}" for j in range(data.covariate_dim)] + ["y"])
    for w, y in zip(data.W, data.y):
        writer.writerow([format(float(v), ".17g") for v in w] + [format(float(y), ".17g")])
    return buf.getvalue()


def write_dataset(data: Dataset, path) -> None:
    Path(path).write_text(dataset_to_csv(data))
