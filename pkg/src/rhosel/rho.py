"""Penalized rho-type selection over a finite candidate pool.

Candidates are compared pairwise through the bounded statistic

    T(X, g, g') = sum_i psi( sqrt(r_{g'(W_i)}(Y_i) / r_{g(W_i)}(Y_i)) ),
    psi(x) = (x - 1) / (x + 1),

which in log space is ``sum_i tanh((l'_i - l_i) / 4)``. Each candidate
carries a penalty inherited from the cheapest model it belongs to, and the
estimator minimises

    upsilon(g) = max_{g'} [T(X, g, g') - pen(g')] + pen(g)

up to a slack ``delta``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .expfam import DomainError, Parametrization

# numerical constants of the risk bound
C1 = 149.8
C2 = 5013.2
C3 = 1939.8
SIGMA_OFFSET = 1.49


@dataclass(frozen=True)
class Dataset:
    """``n`` pairs ``(w_i, y_i)`` with covariates stacked as an ``(n, d)`` array."""

    W: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float)
        if W.ndim == 1:
            W = W[:, None]
        y = np.asarray(self.y, dtype=float).ravel()
        if W.ndim != 2 or W.shape[0] != y.shape[0]:
            raise ValueError("W must be (n, d) with one row per observation")
        if y.shape[0] < 1:
            raise ValueError("dataset must contain at least one observation")
        W.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def covariate_dim(self) -> int:
        return self.W.shape[1]

    def check_support(self, parametrization: Parametrization):
        parametrization.family.check_support(self.y)


@dataclass
class CandidateFunction:
    """An evaluable ``gamma: W -> I`` with the model indices that own it.

    ``func`` maps an ``(n, d)`` array to ``n`` values.
    """

    func: Callable[[np.ndarray], np.ndarray]
    label: str
    memberships: tuple = ()
    info: dict = field(default_factory=dict)

    def __call__(self, W) -> np.ndarray:
        W = np.asarray(W, dtype=float)
        if W.ndim == 1:
            W = W[:, None]
        return np.asarray(self.func(W), dtype=float).reshape(W.shape[0])


@dataclass(frozen=True)
class ModelRecord:
    """VC bound and weight of one model ``m``."""

    V: float
    delta: float
    kind: str = ""

    def __post_init__(self):
        if not self.V >= 1:
            raise ValueError("V_m must be >= 1")
        if not self.delta >= 0:
            raise ValueError("weight must be nonnegative")


@dataclass
class CandidatePool:
    candidates: list
    model_table: dict

    def __post_init__(self):
        for c in self.candidates:
            if not c.memberships:
                raise ValueError(f"candidate {c.label!r} has no owning model")
            for m in c.memberships:
                if m not in self.model_table:
                    raise ValueError(f"model {m!r} referenced by {c.label!r} is missing from the table")

    def __len__(self):
        return len(self.candidates)

    def subset(self, indices) -> "CandidatePool":
        cands = [self.candidates[i] for i in indices]
        used = {m for c in cands for m in c.memberships}
        return CandidatePool(cands, {m: self.model_table[m] for m in self.model_table if m in used})


@dataclass
class SelectionReport:
    chosen_index: int
    chosen: CandidateFunction
    upsilon: np.ndarray
    penalties: np.ndarray
    slack: float
    near_optimal: np.ndarray
    certificate: dict
    labels: list

    def to_dict(self) -> dict:
        return {
            "chosen": self.chosen.label,
            "chosen_index": int(self.chosen_index),
            "chosen_models": [str(m) for m in self.chosen.memberships],
            "slack": float(self.slack),
            "near_optimal": [self.labels[i] for i in self.near_optimal],
            "candidates": [
                {"label": lab, "upsilon": float(u), "pen": float(p)}
                for lab, u, p in zip(self.labels, self.upsilon, self.penalties)
            ],
            "certificate": {str(m): v for m, v in self.certificate.items()},
        }


def psi(x):
    """``(x - 1)/(x + 1)`` on ``[0, inf)`` and ``1`` at ``+inf``."""
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError("psi is defined on [0, +inf]")
    with np.errstate(invalid="ignore"):
        out = np.where(np.isinf(x), 1.0, (x - 1.0) / (x + 1.0))
    return float(out) if out.ndim == 0 else out


def psi_log_gap(l_new, l_old):
    """``psi(sqrt(exp(l_new - l_old)))`` from two log-densities.

    Equal to ``tanh((l_new - l_old) / 4)``; encodes ``0/0 -> psi(1) = 0`` and
    ``c/0 -> psi(inf) = 1`` when log-densities are ``-inf``.
    """
    l_new = np.asarray(l_new, dtype=float)
    l_old = np.asarray(l_old, dtype=float)
    both = np.isneginf(l_new) & np.isneginf(l_old)
    with np.errstate(invalid="ignore"):
        z = np.where(both, 0.0, l_new - l_old)
    return np.tanh(z / 4.0)


def log_r_values(candidate, data: Dataset, parametrization: Parametrization) -> np.ndarray:
    """``log r_{gamma(W_i)}(Y_i)`` for every observation."""
    g = candidate(data.W)
    if not np.all(parametrization.contains(g)):
        raise DomainError(f"candidate {getattr(candidate, 'label', candidate)!r} leaves I={parametrization.interval}")
    return parametrization.log_r(g, data.y)


def t_statistic(data: Dataset, gamma, gamma_prime, parametrization: Parametrization) -> float:
    """Pairwise statistic ``T(X, gamma, gamma')``.

    Antisymmetric in its two candidates and bounded by ``n`` in absolute value.
    """
    l0 = log_r_values(gamma, data, parametrization)
    l1 = log_r_values(gamma_prime, data, parametrization)
    return math.fsum(psi_log_gap(l1, l0))


def log_plus(x: float) -> float:
    return max(0.0, math.log(x))


def dim_term(V: float, n: int) -> float:
    """``D_n(m) = 1000 V [9.11 + log_+(n / V)]``."""
    if V < 1 or n < 1:
        raise ValueError("dim_term needs V >= 1 and n >= 1")
    return 1e3 * V * (9.11 + log_plus(n / V))


def model_penalty(record: ModelRecord, n: int) -> float:
    """``100 [D_n(m) + 4.7 Delta(m)]`` for a single model."""
    return 1e2 * (dim_term(record.V, n) + 4.7 * record.delta)


def penalty(candidate: CandidateFunction, pool: CandidatePool, n: int, scale: float = 1.0) -> float:
    """``pen(gamma)``: cheapest owning model's ``100 [D_n(m) + 4.7 Delta(m)]``.

    ``scale`` multiplies the result; ``1`` is the reference constant.
    """
    if not candidate.memberships:
        raise ValueError(f"candidate {candidate.label!r} has no owning model")
    return scale * min(model_penalty(pool.model_table[m], n) for m in candidate.memberships)


def log_density_matrix(data: Dataset, pool: CandidatePool, parametrization: Parametrization) -> np.ndarray:
    data.check_support(parametrization)
    return np.vstack([log_r_values(c, data, parametrization) for c in pool.candidates])


def t_matrix(L: np.ndarray, workers: int = 1, compensated: bool = False) -> np.ndarray:
    """All pairwise statistics from a ``(K, n)`` log-density matrix.

    Entry ``[j, k]`` is ``T(X, gamma_j, gamma_k)``. Rows are reduced
    independently, each in a fixed order, so the result does not depend on
    ``workers``. ``compensated=True`` switches the per-row sums to
    ``math.fsum``.
    """
    K = L.shape[0]
    out = np.zeros((K, K))

    def row(j):
        gaps = psi_log_gap(L[j + 1 :], L[j])
        if compensated:
            return np.array([math.fsum(r) for r in gaps])
        return gaps.sum(axis=1)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(row, range(K)))
    else:
        rows = [row(j) for j in range(K)]
    for j, r in enumerate(rows):
        out[j, j + 1 :] = r
    # tanh is odd, so the lower triangle is the exact negation
    out -= out.T
    return out


def pool_penalties(pool: CandidatePool, n: int, scale: float = 1.0) -> np.ndarray:
    return np.array([penalty(c, pool, n, scale) for c in pool.candidates])


def upsilon_from_matrix(T: np.ndarray, pen: np.ndarray) -> np.ndarray:
    return np.max(T - pen[None, :], axis=1) + pen


def upsilon(data: Dataset, gamma: CandidateFunction, pool: CandidatePool, parametrization: Parametrization, penalty_scale: float = 1.0) -> float:
    """``upsilon(X, gamma) = max_{gamma' in pool} [T(X, gamma, gamma') - pen(gamma')] + pen(gamma)``."""
    if len(pool) == 0:
        raise ValueError("empty candidate pool")
    l0 = log_r_values(gamma, data, parametrization)
    best = -math.inf
    for c in pool.candidates:
        t = math.fsum(psi_log_gap(log_r_values(c, data, parametrization), l0))
        best = max(best, t - penalty(c, pool, data.n, penalty_scale))
    return best + penalty(gamma, pool, data.n, penalty_scale)


def bound_certificate(pool: CandidatePool, n: int, xi: float = 1.0) -> dict:
    """Complexity part of the risk bound for every model in the pool.

    For each model ``m`` returns ``Xi(m) = D_n(m)/4.7 + Delta(m)``, the
    deviation term ``c2 (Xi(m) + 1.49 + xi)``, and the expectation term
    ``c2 (Xi(m) + Sigma + 1.49)`` where ``Sigma`` is the pool's weight sum.
    The bias part of the bound is not computable and is left out.
    """
    if not xi > 0:
        raise ValueError("xi must be positive")
    sigma = sum(math.exp(-rec.delta) for rec in pool.model_table.values())
    out = {}
    for m, rec in pool.model_table.items():
        xi_m = dim_term(rec.V, n) / 4.7 + rec.delta
        out[m] = {
            "V": rec.V,
            "delta": rec.delta,
            "Xi": xi_m,
            "deviation_term": C2 * (xi_m + SIGMA_OFFSET + xi),
            "expectation_term": C2 * (xi_m + sigma + SIGMA_OFFSET),
            "per_sample_term": C2 * (C3 + sigma) * (rec.delta / n + rec.V / n * (1 + log_plus(n / rec.V))),
        }
    return out


def select(
    data: Dataset,
    pool: CandidatePool,
    parametrization: Parametrization,
    slack: float = 1.0,
    penalty_scale: float = 1.0,
    xi: float = 1.0,
    workers: int = 1,
    L: Optional[np.ndarray] = None,
) -> SelectionReport:
    """Run the tournament and return the minimiser of ``upsilon``.

    The chosen candidate has the smallest ``upsilon`` (lowest index among
    ties), so it belongs to the near-optimal set
    ``{gamma: upsilon(gamma) <= min upsilon + slack}`` which is reported too.

    Parameters
    ----------
    data : Dataset
    pool : CandidatePool
    parametrization : Parametrization
    slack : float
        Width ``delta > 0`` of the near-optimal set.
    penalty_scale : float
        Multiplier on every penalty; ``1`` gives the reference constants.
    L : ndarray, optional
        Precomputed ``(K, n)`` log-density matrix.
    """
    if len(pool) == 0:
        raise ValueError("empty candidate pool")
    if not slack > 0:
        raise ValueError("slack must be positive")
    if L is None:
        L = log_density_matrix(data, pool, parametrization)
    T = t_matrix(L, workers=workers)
    pen = pool_penalties(pool, data.n, penalty_scale)
    ups = upsilon_from_matrix(T, pen)
    best = int(np.argmin(ups))
    near = np.flatnonzero(ups <= ups[best] + slack)
    return SelectionReport(
        chosen_index=best,
        chosen=pool.candidates[best],
        upsilon=ups,
        penalties=pen,
        slack=float(slack),
        near_optimal=near,
        certificate=bound_certificate(pool, data.n, xi),
        labels=[c.label for c in pool.candidates],
    )
