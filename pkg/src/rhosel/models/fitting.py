"""Conditional maximum-likelihood fits inside each model.

All fits maximise ``sum_i u(gamma(W_i)) T(Y_i) - A(u(gamma(W_i)))`` by Fisher
scoring in the user parametrization, with the working values of ``gamma``
kept inside the clamp window ``[v_minus, v_plus]``. Coefficients are then
snapped to a fixed-point grid so every candidate comes from a countable
set; the snap moves the function by at most ``pitch / 2`` in sup-norm over
the unit cube.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..expfam import Parametrization
from ..rho import Dataset
from .partitions import DyadicPartition, RegularPartition
from .piecewise import (
    AdditiveComposite,
    ClampedFunction,
    LinearVariableModel,
    MultiIndexComposite,
    PiecewisePoly,
    clamp,
    multi_degrees,
    monomials,
)

DEFAULT_PITCH = 2.0**-20


@dataclass
class FitContext:
    """Everything a fit needs besides the data and the model index.

    Parameters
    ----------
    parametrization : Parametrization
    v_minus, v_plus : float
        Clamp window, which must sit inside the parametrization interval.
    pitch : float
        Sup-norm resolution of the coefficient grid.
    max_iter : int
        Fisher-scoring iteration cap.
    restarts : int
        Number of seeded starts for the non-convex composite fits.
    seed : int
        Base seed; each model derives its own stream from it.
    """

    parametrization: Parametrization
    v_minus: float
    v_plus: float
    pitch: float = DEFAULT_PITCH
    max_iter: int = 50
    tol: float = 1e-10
    restarts: int = 3
    seed: int = 0
    composite_iter: int = 6

    def __post_init__(self):
        if not self.v_minus < self.v_plus:
            raise ValueError("need v_minus < v_plus")
        lo, hi = self.parametrization.interval
        if self.v_minus < lo or self.v_plus > hi:
            raise ValueError(f"clamp window [{self.v_minus}, {self.v_plus}] must lie inside I={self.parametrization.interval}")
        if not self.pitch > 0:
            raise ValueError("pitch must be positive")


def snap(values, step: float) -> np.ndarray:
    """Round to the nearest multiple of ``step``."""
    return np.round(np.asarray(values, dtype=float) / step) * step


# --- Fisher scoring -----------------------------------------------------------


def _loglik_terms(gamma, T, ctx: FitContext):
    par = ctx.parametrization
    theta = par.to_natural(clamp(gamma, ctx.v_minus, ctx.v_plus))
    return theta * T - par.family.log_partition(theta)


def _score_weights(gamma, T, ctx: FitContext):
    """Score and Fisher weight of each observation with respect to ``gamma``.

    At a clamped point the score is dropped when it pushes further out, so
    the iterations stop instead of drifting along the flat clamp.
    """
    par = ctx.parametrization
    fam = par.family
    gc = clamp(gamma, ctx.v_minus, ctx.v_plus)
    theta = par.to_natural(gc)
    du = par.du(gc)
    score = du * (T - fam.dlog_partition(theta))
    w = du * du * fam.d2log_partition(theta)
    out_hi = (gamma >= ctx.v_plus) & (score > 0)
    out_lo = (gamma <= ctx.v_minus) & (score < 0)
    score = np.where(out_hi | out_lo, 0.0, score)
    return score, w


def _grouped_gram(X, groups, n_groups, w):
    K = X.shape[1]
    H = np.zeros((n_groups, K, K))
    for a in range(K):
        for b in range(a, K):
            h = np.bincount(groups, weights=w * X[:, a] * X[:, b], minlength=n_groups)
            H[:, a, b] = h
            H[:, b, a] = h
    return H


def grouped_irls(X, groups, n_groups, T, ctx: FitContext, B0, offset=None):
    """Fisher scoring with independent coefficient blocks per group.

    Parameters
    ----------
    X : ndarray (n, K)
        Features of each observation in its group's local basis.
    groups : ndarray (n,)
        Group of each observation.
    B0 : ndarray (n_groups, K)
        Starting coefficients.
    offset : ndarray (n,), optional
        Fixed additive term in ``gamma``.

    Returns
    -------
    B : ndarray (n_groups, K)
    loglik : ndarray (n_groups,)
    """
    K = X.shape[1]
    B = np.array(B0, dtype=float)
    off = 0.0 if offset is None else offset

    def gamma_of(B):
        return np.einsum("ij,ij->i", X, B[groups]) + off

    g = gamma_of(B)
    ll = np.bincount(groups, weights=_loglik_terms(g, T, ctx), minlength=n_groups)
    ridge = 1e-10 * np.eye(K)
    for _ in range(ctx.max_iter):
        score, w = _score_weights(g, T, ctx)
        H = _grouped_gram(X, groups, n_groups, w)
        rhs = np.stack([np.bincount(groups, weights=score * X[:, a], minlength=n_groups) for a in range(K)], axis=1)
        scale = np.trace(H, axis1=1, axis2=2)[:, None, None] / K
        step = np.linalg.solve(H + ridge * (1.0 + scale), rhs[..., None])[..., 0]
        # per-group step halving on the group log-likelihood
        t = np.ones(n_groups)
        for _ in range(30):
            B_try = B + t[:, None] * step
            g_try = gamma_of(B_try)
            ll_try = np.bincount(groups, weights=_loglik_terms(g_try, T, ctx), minlength=n_groups)
            worse = ll_try < ll - 1e-12 * (1.0 + np.abs(ll))
            if not worse.any():
                break
            t = np.where(worse, t / 2, t)
        else:
            t = np.where(worse, 0.0, t)
            B_try = B + t[:, None] * step
            g_try = gamma_of(B_try)
            ll_try = np.bincount(groups, weights=_loglik_terms(g_try, T, ctx), minlength=n_groups)
        moved = np.max(np.abs(B_try - B), initial=0.0)
        B, g, ll = B_try, g_try, ll_try
        if moved < ctx.tol * (1.0 + np.max(np.abs(B), initial=0.0)):
            break
    return B, ll


def fit_constant(data: Dataset, ctx: FitContext) -> float:
    """Global constant MLE, clamped to the window."""
    T = ctx.parametrization.family.suff_stat(data.y)
    return float(clamp(_constant_from_T(T, ctx), ctx.v_minus, ctx.v_plus))


# --- piecewise polynomials ----------------------------------------------------


def _local_to_global(lo, hi, r: int) -> np.ndarray:
    """Matrix taking local tensor coefficients on a box to global monomials.

    The local variable on axis ``j`` is ``x_j = 2 (w_j - lo_j) / (hi_j - lo_j) - 1``.
    """
    mats = []
    for a_lo, a_hi in zip(lo, hi):
        a = 2.0 / (a_hi - a_lo)
        b = -2.0 * a_lo / (a_hi - a_lo) - 1.0
        M = np.zeros((r + 1, r + 1))
        for k in range(r + 1):
            for i in range(k + 1):
                M[k, i] = math.comb(k, i) * a**i * b ** (k - i)
        mats.append(M)
    out = mats[0]
    for M in mats[1:]:
        out = np.kron(out, M)
    return out.T


def _local_features(W, partition, cells, r):
    lo = np.stack([partition.cell_bounds(c)[0] for c in range(partition.n_cells)])
    hi = np.stack([partition.cell_bounds(c)[1] for c in range(partition.n_cells)])
    x = 2.0 * (W - lo[cells]) / (hi[cells] - lo[cells]) - 1.0
    return monomials(x, r), lo, hi


def fit_piecewise(
    W: np.ndarray,
    T: np.ndarray,
    partition: DyadicPartition | RegularPartition,
    degree: int,
    ctx: FitContext,
    snap_coeffs: bool = True,
    offset=None,
    fallback: float | None = None,
) -> PiecewisePoly:
    """Cell-by-cell conditional MLE of a piecewise tensor polynomial.

    Cells without observations take the constant ``fallback`` (the global
    MLE by default) and are listed in ``flags["empty_cells"]``.
    ``flags["snap_shift"]`` bounds the sup-norm move caused by snapping.
    """
    W = np.atleast_2d(W)
    n, d = W.shape
    cells = partition.flat_index(W)
    X, lo, hi = _local_features(W, partition, cells, degree)
    K = X.shape[1]
    G = partition.n_cells
    if fallback is None:
        fallback = _constant_from_T(T, ctx, offset)
    B0 = np.zeros((G, K))
    B0[:, 0] = fallback
    B, _ = grouped_irls(X, cells, G, T, ctx, B0, offset=offset)
    counts = np.bincount(cells, minlength=G)
    empty = np.flatnonzero(counts == 0)
    B[empty] = 0.0
    B[empty, 0] = fallback
    coeffs = np.stack([_local_to_global(lo[c], hi[c], degree) @ B[c] for c in range(G)])
    flags = {"empty_cells": empty.tolist()}
    if snap_coeffs:
        step = ctx.pitch / K
        snapped = snap(coeffs, step)
        flags["snap_shift"] = float(np.abs(snapped - coeffs).sum(axis=1).max())
        coeffs = snapped
    return PiecewisePoly(partition, degree, coeffs, flags=flags)


def _constant_from_T(T, ctx: FitContext, offset=None) -> float:
    n = T.shape[0]
    start = np.full((1, 1), 0.5 * (ctx.v_minus + ctx.v_plus) if offset is None else 0.0)
    B, _ = grouped_irls(np.ones((n, 1)), np.zeros(n, dtype=np.int64), 1, T, ctx, start, offset=offset)
    return float(B[0, 0])


def total_loglik(gamma, T, ctx: FitContext) -> float:
    return math.fsum(_loglik_terms(gamma, T, ctx))


# --- composites -----------------------------------------------------------------


def _glm(X, T, ctx: FitContext, beta0, offset=None):
    n = X.shape[0]
    B, ll = grouped_irls(X, np.zeros(n, dtype=np.int64), 1, T, ctx, beta0[None, :], offset=offset)
    return B[0], float(ll[0])


def _additive_design(W, partitions, r):
    """Stacked local features of every ``g_j`` plus the bookkeeping to rebuild them."""
    blocks, meta = [], []
    for j, part in enumerate(partitions):
        x = W[:, j : j + 1]
        cells = part.flat_index(x)
        F, lo, hi = _local_features(x, part, cells, r)
        G, K = part.n_cells, F.shape[1]
        Z = np.zeros((W.shape[0], G * K))
        rows = np.arange(W.shape[0])
        for k in range(K):
            Z[rows, cells * K + k] = F[:, k]
        blocks.append(Z)
        meta.append((part, lo, hi, G, K))
    return np.hstack(blocks), meta


def _rebuild_g(beta, meta, r, const=0.0):
    out, pos = [], 0
    for j, (part, lo, hi, G, K) in enumerate(meta):
        B = beta[pos : pos + G * K].reshape(G, K)
        pos += G * K
        coeffs = np.stack([_local_to_global(lo[c], hi[c], r) @ B[c] for c in range(G)])
        if j == 0:
            coeffs[:, 0] += const
        out.append(PiecewisePoly(part, r, coeffs))
    return out


def _snap_poly(p: PiecewisePoly, pitch: float) -> PiecewisePoly:
    step = pitch / p.coeffs.shape[1]
    return PiecewisePoly(p.partition, p.degree, snap(p.coeffs, step), flags=dict(p.flags))


def fit_additive(data: Dataset, pi_s, t: int, r: int, ctx: FitContext, model_seed: int = 0) -> AdditiveComposite:
    """Alternating fit of ``f[(sum_j g_j(w_j) v 0) ^ 1]``.

    ``pi_s`` gives the dyadic split level of each ``g_j``. The inner sum is
    first fitted as an additive predictor, rescaled onto ``[0, 1]``, then
    ``f`` and the ``g_j`` are refitted in turn with Gauss-Newton steps on
    the ``g`` coefficients. Restart 0 is deterministic and later restarts
    jitter the inner coefficients; the highest likelihood wins.
    """
    W, T = data.W, ctx.parametrization.family.suff_stat(data.y)
    n, d = W.shape
    parts = [DyadicPartition((s,)) for s in pi_s]
    fpart = RegularPartition((t,))
    Z, meta = _additive_design(W, parts, r)
    X = np.hstack([np.ones((n, 1)), Z])
    start = np.zeros(X.shape[1])
    start[0] = _constant_from_T(T, ctx)
    beta, _ = _glm(X, T, ctx, start)
    rng = np.random.default_rng([ctx.seed, model_seed])

    best, best_ll = None, -math.inf
    for restart in range(max(1, ctx.restarts)):
        b = beta.copy()
        if restart:
            b[1:] += rng.normal(scale=0.25 * (np.std(b[1:]) + 1e-3), size=b.size - 1)
        eta = X @ b
        lo, hi = eta.min(), eta.max()
        span = hi - lo if hi > lo else 1.0
        gb = b[1:] / span  # local-basis coefficients of the g_j
        gconst = (b[0] - lo) / span
        for _ in range(ctx.composite_iter):
            z = clamp(Z @ gb + gconst, 0.0, 1.0)
            f = fit_piecewise(z[:, None], T, fpart, r, ctx, snap_coeffs=False)
            # Gauss-Newton on the inner coefficients with f held fixed
            fz = f(z[:, None])
            slope = _smoothed_slope(f, z, t)
            active = ((Z @ gb + gconst) > 0) & ((Z @ gb + gconst) < 1)
            J = (slope * active)[:, None] * np.hstack([np.ones((n, 1)), Z])
            score, w = _score_weights(fz, T, ctx)
            H = J.T @ (w[:, None] * J)
            step = np.linalg.lstsq(H + 1e-8 * np.trace(H) / H.shape[0] * np.eye(H.shape[0]) + 1e-12 * np.eye(H.shape[0]), J.T @ score, rcond=None)[0]
            cur = total_loglik(fz, T, ctx)
            tstep = 1.0
            for _ in range(20):
                gc_try, gb_try = gconst + tstep * step[0], gb + tstep * step[1:]
                z_try = clamp(Z @ gb_try + gc_try, 0.0, 1.0)
                if total_loglik(f(z_try[:, None]), T, ctx) >= cur:
                    gconst, gb = gc_try, gb_try
                    break
                tstep /= 2
        z = clamp(Z @ gb + gconst, 0.0, 1.0)
        f = fit_piecewise(z[:, None], T, fpart, r, ctx, snap_coeffs=False)
        ll = total_loglik(f(z[:, None]), T, ctx)
        if ll > best_ll:
            best_ll = ll
            best = (_rebuild_g(gb, meta, r, const=gconst), f)
    gs, f = best
    pitch = ctx.pitch / (d + 1)
    gs = [_snap_poly(g, pitch) for g in gs]
    f = _snap_poly(f, ctx.pitch)
    return AdditiveComposite(gs, f, ctx.v_minus, ctx.v_plus)


def _smoothed_slope(f: PiecewisePoly, z, t):
    """Central difference of ``f`` over one cell width, so piecewise constants still give a direction."""
    h = 0.5 / t
    zp = np.clip(z + h, 0.0, 1.0)
    zm = np.clip(z - h, 0.0, 1.0)
    den = np.where(zp > zm, zp - zm, 1.0)
    return (f(zp[:, None]) - f(zm[:, None])) / den


def _l1_project(a):
    """Scale rows of ``a`` into the closed l1 unit ball."""
    norms = np.abs(a).sum(axis=1, keepdims=True)
    return np.where(norms > 1, a / np.maximum(norms, 1e-300), a)


def _snap_direction(a, pitch):
    """Snap towards zero so the l1 constraint survives rounding."""
    return np.trunc(a / pitch) * pitch


def fit_multi_index(data: Dataset, t, r: int, ctx: FitContext, model_seed: int = 0) -> MultiIndexComposite:
    """Fit ``f((<a_j, w> + 1) / 2)`` with ``l = len(t)`` directions.

    Restart 0 takes the first direction from a linear fit and the others
    along coordinate axes; later restarts draw random directions. Each start
    alternates a piecewise-polynomial fit of ``f`` with projected
    Gauss-Newton steps on the directions.
    """
    W, T = data.W, ctx.parametrization.family.suff_stat(data.y)
    n, d = W.shape
    t = tuple(int(v) for v in np.atleast_1d(t))
    l = len(t)
    part = RegularPartition(t)
    rng = np.random.default_rng([ctx.seed, model_seed, 1])

    Xc = np.hstack([np.ones((n, 1)), W - 0.5])
    start = np.zeros(d + 1)
    start[0] = _constant_from_T(T, ctx)
    beta, _ = _glm(Xc, T, ctx, start)
    lead = beta[1:] / max(np.abs(beta[1:]).sum(), 1e-12)

    best, best_ll = None, -math.inf
    for restart in range(max(1, ctx.restarts)):
        if restart == 0:
            a = np.zeros((l, d))
            a[0] = lead
            for j in range(1, l):
                a[j, j % d] = 1.0
        else:
            a = rng.normal(size=(l, d))
            a /= np.abs(a).sum(axis=1, keepdims=True)
        for _ in range(ctx.composite_iter):
            z = np.clip((W @ a.T + 1) / 2, 0, 1)
            f = fit_piecewise(z, T, part, r, ctx, snap_coeffs=False)
            fz = f(z)
            cur = total_loglik(fz, T, ctx)
            J = np.hstack([_smoothed_partial(f, z, j, t[j])[:, None] * W / 2 for j in range(l)])
            score, w = _score_weights(fz, T, ctx)
            H = J.T @ (w[:, None] * J)
            reg = 1e-8 * (np.trace(H) / H.shape[0] + 1e-12)
            step = np.linalg.solve(H + reg * np.eye(H.shape[0]), J.T @ score).reshape(l, d)
            tstep = 1.0
            for _ in range(20):
                a_try = _l1_project(a + tstep * step)
                if total_loglik(f(np.clip((W @ a_try.T + 1) / 2, 0, 1)), T, ctx) >= cur:
                    a = a_try
                    break
                tstep /= 2
        z = np.clip((W @ a.T + 1) / 2, 0, 1)
        f = fit_piecewise(z, T, part, r, ctx, snap_coeffs=False)
        ll = total_loglik(f(z), T, ctx)
        if ll > best_ll:
            best_ll, best = ll, (a.copy(), f)
    a, f = best
    a = _snap_direction(a, ctx.pitch)
    f = fit_piecewise(np.clip((W @ a.T + 1) / 2, 0, 1), T, part, r, ctx)
    return MultiIndexComposite(a, f, ctx.v_minus, ctx.v_plus)


def _smoothed_partial(f: PiecewisePoly, z, axis, t_axis):
    h = 0.5 / t_axis
    zp, zm = z.copy(), z.copy()
    zp[:, axis] = np.clip(z[:, axis] + h, 0, 1)
    zm[:, axis] = np.clip(z[:, axis] - h, 0, 1)
    den = np.where(zp[:, axis] > zm[:, axis], zp[:, axis] - zm[:, axis], 1.0)
    return (f(zp) - f(zm)) / den


def fit_linear(data: Dataset, support, ctx: FitContext) -> LinearVariableModel:
    """MLE of ``sum_{j in m} beta_j w_j`` (no intercept), snapped to the grid."""
    support = tuple(sorted(int(j) for j in support))
    p = data.covariate_dim
    if not support:
        return LinearVariableModel((), np.zeros(0), p, ctx.v_minus, ctx.v_plus)
    T = ctx.parametrization.family.suff_stat(data.y)
    X = data.W[:, [j - 1 for j in support]]
    beta, _ = _glm(X, T, ctx, np.zeros(len(support)))
    beta = snap(beta, ctx.pitch / len(support))
    return LinearVariableModel(support, beta, p, ctx.v_minus, ctx.v_plus)


def piecewise_candidate(data: Dataset, partition, degree: int, ctx: FitContext) -> ClampedFunction:
    """Clamped piecewise-polynomial MLE on ``partition``."""
    T = ctx.parametrization.family.suff_stat(data.y)
    poly = fit_piecewise(data.W, T, partition, degree, ctx)
    return ClampedFunction(poly, ctx.v_minus, ctx.v_plus)


__all__ = [
    "DEFAULT_PITCH",
    "FitContext",
    "fit_additive",
    "fit_constant",
    "fit_linear",
    "fit_multi_index",
    "fit_piecewise",
    "grouped_irls",
    "multi_degrees",
    "piecewise_candidate",
    "snap",
    "total_loglik",
]
