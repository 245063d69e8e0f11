"""LIBSVM text-format ingestion and row normalization.

Lines look like ``label idx:val idx:val ...`` with 1-based, strictly
increasing feature indices.  Blank lines are skipped and anything after a
``#`` is ignored.  Indices are stored 0-based in memory.  Labels are parsed
and kept even when the downstream task ignores them.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .core import SparseVector


class LibsvmParseError(ValueError):
    """Malformed LIBSVM input; message carries the 1-based line number."""


@dataclass
class Dataset:
    rows: list[SparseVector]
    labels: np.ndarray
    dim: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.float64)
        if len(self.rows) != len(self.labels):
            raise ValueError("rows and labels must have equal length")
        if len(self.rows) < 1:
            raise ValueError("dataset must contain at least one row")
        for i, r in enumerate(self.rows):
            if r.nnz and r.indices[-1] >= self.dim:
                raise ValueError(f"row {i} has index beyond dim {self.dim}")

    @property
    def n(self) -> int:
        return len(self.rows)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Dataset)
            and self.dim == other.dim
            and np.array_equal(self.labels, other.labels)
            and self.rows == other.rows
        )


def parse_libsvm(source, dim: int | None = None) -> Dataset:
    """Parse LIBSVM text from a string, a text stream, or a path.

    ``dim`` overrides the inferred dimension (max feature index); rows must
    fit within it.  Duplicate or non-increasing indices within a row are
    rejected rather than summed.
    """
    if isinstance(source, str) and "\n" not in source and ":" not in source:
        with open(source, "r", encoding="utf-8") as fh:
            return parse_libsvm(fh, dim=dim)
    if isinstance(source, str):
        source = io.StringIO(source)

    rows: list[tuple[np.ndarray, np.ndarray]] = []
    labels: list[float] = []
    max_index = 0
    for lineno, raw in enumerate(source, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise LibsvmParseError(f"line {lineno}: bad label {tokens[0]!r}") from None
        idxs: list[int] = []
        vals: list[float] = []
        for tok in tokens[1:]:
            try:
                idx_str, val_str = tok.split(":", 1)
                idx = int(idx_str)
                val = float(val_str)
            except ValueError:
                raise LibsvmParseError(f"line {lineno}: bad feature token {tok!r}") from None
            if idx < 1:
                raise LibsvmParseError(f"line {lineno}: feature index {idx} is not 1-based")
            if idxs and idx <= idxs[-1]:
                raise LibsvmParseError(
                    f"line {lineno}: indices must be strictly increasing "
                    f"({idxs[-1]} then {idx})"
                )
            if val != 0.0:
                idxs.append(idx)
                vals.append(val)
        if idxs:
            max_index = max(max_index, idxs[-1])
        labels.append(label)
        rows.append((np.asarray(idxs, dtype=np.int64) - 1, np.asarray(vals)))

    if not rows:
        raise LibsvmParseError("empty input: no data rows found")
    d = max_index if dim is None else int(dim)
    if d < max_index:
        raise LibsvmParseError(f"dim override {d} below max feature index {max_index}")
    if d < 1:
        raise LibsvmParseError("dataset has no features; cannot infer a dimension")
    sparse_rows = [SparseVector(idx, val, d) for idx, val in rows]
    return Dataset(sparse_rows, np.asarray(labels), d)


def serialize_libsvm(ds: Dataset) -> str:
    """Inverse of :func:`parse_libsvm` (1-based indices, 17 significant digits)."""
    lines = []
    for row, label in zip(ds.rows, ds.labels):
        parts = [f"{label:.17g}"]
        parts += [f"{int(i) + 1}:{v:.17g}" for i, v in zip(row.indices, row.values)]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def normalize_rows(ds: Dataset) -> Dataset:
    """Scale every row to unit Euclidean norm; zero rows are an error."""
    rows = []
    for i, r in enumerate(ds.rows):
        nrm = r.norm()
        if nrm == 0.0:
            raise ValueError(f"row {i} is zero and cannot be normalized")
        rows.append(r.scaled(1.0 / nrm))
    return Dataset(rows, ds.labels.copy(), ds.dim)
