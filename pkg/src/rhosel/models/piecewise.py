"""Piecewise tensor polynomials, clamping and composite functions.

Every object here is a pure function of the covariates: calling it on an
``(n, d)`` array returns ``n`` values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..expfam import DomainError
from .partitions import DyadicPartition, RegularPartition, _as_points


def multi_degrees(r: int, d: int) -> list[tuple]:
    """All multi-degrees in ``{0..r}^d``, in ``itertools.product`` order."""
    return list(itertools.product(range(r + 1), repeat=d))


def monomials(w: np.ndarray, r: int) -> np.ndarray:
    """Tensor monomials ``prod_j w_j**k_j`` for every multi-degree, shape ``(n, (r+1)^d)``."""
    w = np.atleast_2d(w)
    n, d = w.shape
    powers = w[:, :, None] ** np.arange(r + 1)[None, None, :]  # (n, d, r+1)
    out = np.ones((n, (r + 1) ** d))
    for col, degs in enumerate(multi_degrees(r, d)):
        for j, k in enumerate(degs):
            if k:
                out[:, col] *= powers[:, j, k]
    return out


@dataclass
class PiecewisePoly:
    """Tensor polynomial of per-variable degree ``r`` on each partition cell.

    Parameters
    ----------
    partition : DyadicPartition or RegularPartition
    degree : int
    coeffs : ndarray of shape (n_cells, (degree+1)**d)
        Monomial coefficients per flat cell index, columns ordered as
        :func:`multi_degrees`.
    """

    partition: DyadicPartition | RegularPartition
    degree: int
    coeffs: np.ndarray
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        expected = (self.partition.n_cells, (self.degree + 1) ** self.partition.d)
        if self.coeffs.shape != expected:
            raise ValueError(f"coefficients must have shape {expected}, got {self.coeffs.shape}")

    @property
    def d(self) -> int:
        return self.partition.d

    @classmethod
    def constant(cls, partition, value: float, degree: int = 0) -> "PiecewisePoly":
        c = np.zeros((partition.n_cells, (degree + 1) ** partition.d))
        c[:, 0] = value
        return cls(partition, degree, c)

    def __call__(self, w) -> np.ndarray:
        pts = _as_points(w, self.d)
        cells = self.partition.flat_index(pts)
        return np.einsum("ij,ij->i", monomials(pts, self.degree), self.coeffs[cells])

    def derivative(self, w, axis: int = 0) -> np.ndarray:
        """Partial derivative along ``axis`` inside the containing cell."""
        pts = _as_points(w, self.d)
        cells = self.partition.flat_index(pts)
        degs = multi_degrees(self.degree, self.d)
        basis = np.zeros((pts.shape[0], len(degs)))
        for col, k in enumerate(degs):
            if k[axis] == 0:
                continue
            term = np.full(pts.shape[0], float(k[axis]))
            for j, kj in enumerate(k):
                e = kj - 1 if j == axis else kj
                if e:
                    term *= pts[:, j] ** e
            basis[:, col] = term
        return np.einsum("ij,ij->i", basis, self.coeffs[cells])


def clamp(values, v_minus: float, v_plus: float) -> np.ndarray:
    """``(values v v_minus) ^ v_plus``."""
    return np.minimum(np.maximum(values, v_minus), v_plus)


def _check_bounds(v_minus, v_plus):
    if not (np.isfinite(v_minus) and np.isfinite(v_plus) and v_minus < v_plus):
        raise ValueError("clamp bounds must be finite with v_minus < v_plus")


@dataclass
class ClampedFunction:
    """``(inner v v_minus) ^ v_plus`` for any callable ``inner``."""

    inner: Callable
    v_minus: float
    v_plus: float

    def __post_init__(self):
        _check_bounds(self.v_minus, self.v_plus)

    def __call__(self, w) -> np.ndarray:
        return clamp(np.asarray(self.inner(w), dtype=float), self.v_minus, self.v_plus)


@dataclass
class AdditiveComposite:
    """``f[(sum_j g_j(w_j) v 0) ^ 1]`` clamped to ``[v_minus, v_plus]``.

    Each ``g_j`` is a univariate piecewise polynomial on ``[0, 1]`` and ``f``
    is a univariate piecewise polynomial on a regular partition of ``[0, 1]``.
    """

    g: list
    f: PiecewisePoly
    v_minus: float
    v_plus: float

    def __post_init__(self):
        _check_bounds(self.v_minus, self.v_plus)
        if not self.g or any(gj.d != 1 for gj in self.g) or self.f.d != 1:
            raise ValueError("additive composites need univariate g_j and f")

    @property
    def d(self) -> int:
        return len(self.g)

    def inner(self, w) -> np.ndarray:
        pts = _as_points(w, self.d)
        z = sum(gj(pts[:, j : j + 1]) for j, gj in enumerate(self.g))
        return clamp(z, 0.0, 1.0)

    def __call__(self, w) -> np.ndarray:
        return clamp(self.f(self.inner(w)[:, None]), self.v_minus, self.v_plus)


@dataclass
class MultiIndexComposite:
    """``f((<a_1,w>+1)/2, ..., (<a_l,w>+1)/2)`` clamped to ``[v_minus, v_plus]``.

    Rows of ``a`` must lie in the closed l1 unit ball, which keeps every
    index inside ``[0, 1]`` for covariates in the unit cube.
    """

    a: np.ndarray
    f: PiecewisePoly
    v_minus: float
    v_plus: float

    def __post_init__(self):
        _check_bounds(self.v_minus, self.v_plus)
        self.a = np.atleast_2d(np.asarray(self.a, dtype=float))
        if np.any(np.abs(self.a).sum(axis=1) > 1 + 1e-12):
            raise ValueError("every direction a_j must satisfy ||a_j||_1 <= 1")
        if self.f.d != self.a.shape[0]:
            raise ValueError("f must take one argument per direction")

    @property
    def d(self) -> int:
        return self.a.shape[1]

    def indices(self, w) -> np.ndarray:
        pts = _as_points(w, self.d)
        # rounding can push an exact +-1 projection a hair outside [0, 1]
        return np.clip((pts @ self.a.T + 1.0) / 2.0, 0.0, 1.0)

    def __call__(self, w) -> np.ndarray:
        return clamp(self.f(self.indices(w)), self.v_minus, self.v_plus)


@dataclass
class LinearVariableModel:
    """``sum_{j in m} beta_j w_j`` clamped to ``[v_minus, v_plus]``.

    ``support`` holds 1-based coordinate indices out of ``p``; the empty
    support is the zero function.
    """

    support: tuple
    coefs: np.ndarray
    p: int
    v_minus: float
    v_plus: float

    def __post_init__(self):
        _check_bounds(self.v_minus, self.v_plus)
        self.support = tuple(sorted(int(j) for j in self.support))
        if len(set(self.support)) != len(self.support) or any(j < 1 or j > self.p for j in self.support):
            raise ValueError("support must be distinct indices in 1..p")
        self.coefs = np.asarray(self.coefs, dtype=float).ravel()
        if self.coefs.shape != (len(self.support),):
            raise ValueError("one coefficient per support index is required")

    def full_coefs(self) -> np.ndarray:
        beta = np.zeros(self.p)
        beta[[j - 1 for j in self.support]] = self.coefs
        return beta

    def __call__(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if w.ndim == 1:
            w = w[None, :]
        if w.shape[-1] != self.p:
            raise DomainError(f"expected {self.p} covariates, got {w.shape[-1]}")
        if not self.support:
            raw = np.zeros(w.shape[0])
        else:
            raw = w[:, [j - 1 for j in self.support]] @ self.coefs
        return clamp(raw, self.v_minus, self.v_plus)
