"""Vector kernels and reproducible random sampling shared by all solvers.

Dense vectors are plain 1-D float64 numpy arrays.  Sparse vectors carry an
explicit (indices, values, dim) triple so datasets with large ambient
dimension stay cheap to store.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

Array = np.ndarray

# Pinned generator: PCG64 seeded through SeedSequence.  Both are fixed
# algorithms in numpy, so a given (seed, path) pair yields the same draw
# sequence on every platform.  Reference draws are frozen in the tests.
_BIT_GENERATOR = np.random.PCG64


def as_dense(x, dim: int | None = None) -> Array:
    """Validate and return ``x`` as a finite 1-D float64 array."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"expected dimension {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite entries")
    return arr


@dataclass(eq=False)
class SparseVector:
    """Sparse vector with strictly increasing indices and no stored zeros."""

    indices: Array
    values: Array
    dim: int

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.indices.shape != self.values.shape or self.indices.ndim != 1:
            raise ValueError("indices and values must be matching 1-D arrays")
        if self.indices.size:
            if np.any(np.diff(self.indices) <= 0):
                raise ValueError("indices must be strictly increasing")
            if self.indices[0] < 0 or self.indices[-1] >= self.dim:
                raise ValueError("index out of range for dim")
        if np.any(self.values == 0.0):
            raise ValueError("stored zero values are not allowed")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("vector has non-finite entries")
        self.indices.setflags(write=False)
        self.values.setflags(write=False)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseVector)
            and self.dim == other.dim
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def dot(self, dense: Array) -> float:
        if len(dense) != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {len(dense)}")
        return float(self.values @ dense[self.indices])

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def scaled(self, c: float) -> "SparseVector":
        if c == 0.0:
            return SparseVector(np.empty(0, dtype=np.int64), np.empty(0), self.dim)
        return SparseVector(self.indices.copy(), self.values * c, self.dim)

    def to_dense(self) -> Array:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out


def dot(a, b: Array) -> float:
    """Inner product of a dense or sparse vector with a dense vector."""
    if isinstance(a, SparseVector):
        return a.dot(np.asarray(b, dtype=np.float64))
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(a @ b)


def norm2_sq(a) -> float:
    """Squared Euclidean norm."""
    if isinstance(a, SparseVector):
        return float(a.values @ a.values)
    a = np.asarray(a, dtype=np.float64)
    return float(a @ a)


class RngStream:
    """Seeded random stream with deterministic, platform-independent draws.

    A stream is identified by its integer seed plus a derivation path,
    so `derive(tag)` produces an independent child stream that does not
    depend on how far the parent has been consumed.
    """

    def __init__(self, seed: int, _path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = tuple(int(t) for t in _path)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self.gen = np.random.Generator(_BIT_GENERATOR(ss))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, path={self.path})"

    def derive(self, tag: int) -> "RngStream":
        """Independent child stream; identity depends only on (seed, path, tag)."""
        return RngStream(self.seed, self.path + (int(tag),))

    def integers(self, low: int, high: int, size=None):
        return self.gen.integers(low, high, size=size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.gen.uniform(low, high, size=size)

    def normal(self, size=None):
        return self.gen.standard_normal(size=size)


def sample_with_replacement(rng: RngStream, n: int, b: int) -> Array:
    """Draw ``b`` indices uniformly and independently from ``[0, n)``."""
    if n < 1:
        raise ValueError(f"need at least one index to sample from, got n={n}")
    if b < 1:
        raise ValueError(f"batch size must be positive, got b={b}")
    return rng.integers(0, n, size=b)
