"""Product partitions of the unit cube.

Along each axis the cells are ``[0, 1/N]`` followed by the left-open
intervals ``(k/N, (k+1)/N]``, so a point sitting exactly on a breakpoint
belongs to the cell on its left. Cells are numbered by their multi-index
``(k_1, ..., k_d)`` and flattened in C order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..expfam import DomainError


def _as_points(w, d: int) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim == 0:
        w = w.reshape(1, 1)
    elif w.ndim == 1:
        w = w[:, None] if d == 1 else w[None, :]
    if w.shape[-1] != d:
        raise ValueError(f"expected points in dimension {d}, got shape {w.shape}")
    if not np.all((w >= 0) & (w <= 1)):
        raise DomainError("points must lie in the closed unit cube")
    return w


def axis_cells(x: np.ndarray, n_splits: int) -> np.ndarray:
    """Cell number of ``x`` in ``[0,1]`` cut into ``n_splits`` equal pieces."""
    k = np.ceil(x * n_splits).astype(np.int64) - 1
    return np.clip(k, 0, n_splits - 1)


@dataclass(frozen=True)
class _ProductPartition:
    splits: tuple

    @property
    def d(self) -> int:
        return len(self.splits)

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.splits))

    @property
    def shape(self) -> tuple:
        return tuple(self.splits)

    def cell_index(self, w) -> tuple | np.ndarray:
        """Multi-index of the cell containing ``w``.

        A single point returns a tuple; an ``(n, d)`` array returns an
        ``(n, d)`` integer array.
        """
        single = np.ndim(w) == 0 or (np.ndim(w) == 1 and (self.d > 1 or np.size(w) == 1))
        pts = _as_points(w, self.d)
        idx = np.column_stack([axis_cells(pts[:, j], self.splits[j]) for j in range(self.d)])
        if single:
            return tuple(int(k) for k in idx[0])
        return idx

    def flat_index(self, w) -> np.ndarray:
        pts = _as_points(w, self.d)
        idx = np.column_stack([axis_cells(pts[:, j], self.splits[j]) for j in range(self.d)])
        return np.ravel_multi_index(tuple(idx.T), self.shape)

    def cell_bounds(self, flat: int) -> tuple[np.ndarray, np.ndarray]:
        """Lower and upper corners of a cell."""
        k = np.array(np.unravel_index(flat, self.shape))
        n = np.array(self.splits, dtype=float)
        return k / n, (k + 1) / n

    def cell_volume(self, flat: int) -> float:
        return 1.0 / self.n_cells


@dataclass(frozen=True)
class DyadicPartition(_ProductPartition):
    """Axis ``j`` split into ``2**s_j`` equal intervals."""

    def __init__(self, s):
        s = tuple(int(v) for v in np.atleast_1d(s))
        if not s or any(v < 0 for v in s):
            raise ValueError("s must be a nonempty vector of nonnegative integers")
        object.__setattr__(self, "splits", tuple(2**v for v in s))
        object.__setattr__(self, "s", s)

    def __repr__(self):
        return f"DyadicPartition(s={self.s})"


@dataclass(frozen=True)
class RegularPartition(_ProductPartition):
    """Axis ``j`` split into ``t_j`` equal intervals."""

    def __init__(self, t):
        t = tuple(int(v) for v in np.atleast_1d(t))
        if not t or any(v < 1 for v in t):
            raise ValueError("t must be a nonempty vector of positive integers")
        object.__setattr__(self, "splits", t)
        object.__setattr__(self, "t", t)

    def __repr__(self):
        return f"RegularPartition(t={self.t})"
