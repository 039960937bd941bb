"""VC-subgraph dimension bounds and model weights for every model family.

Each family has a bound ``V_m`` (used as a real number ``>= 1``) and a weight
``Delta(m) >= 0`` such that ``sum_m exp(-Delta(m))`` is finite.
:func:`sigma_partial` evaluates that sum over a truncated enumeration and is
checked against the family's analytic ceiling.

Enumeration order for the partial sums is graded lexicographic: indices are
sorted by total complexity (the sum of their integer knobs), then
lexicographically.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammaln

FAMILY_KINDS = ("dyadic-poly", "holder-poly", "additive", "multi-index", "relu", "relu-sparse", "linear-varsel")

# analytic ceilings on sum_m exp(-Delta(m))
SIGMA_BOUNDS = {
    "dyadic-poly": math.e / (math.e - 1),
    "additive": math.e / (math.e - 1),
    "multi-index": math.e / (math.e - 1),
    "relu": 1.0,
    "relu-sparse": 2.0,
    "linear-varsel": 1 + math.pi**2 / 6,
}


@dataclass(frozen=True)
class ComplexityRecord:
    model_index: tuple
    V: float
    delta: float
    family_kind: str

    def __post_init__(self):
        if self.family_kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.family_kind!r}")
        if not self.V >= 1:
            raise ValueError("V must be >= 1")
        if not (self.delta >= 0 and math.isfinite(self.delta)):
            raise ValueError("weight must be finite and nonnegative")


def _log2_factor(U: float) -> float:
    return math.log2(4 * math.e * U * math.log2(2 * math.e * U))


# --- VC bounds -------------------------------------------------------------


def vc_dyadic(s: Sequence[int], r: int, d: int | None = None) -> float:
    """``(r+1)^d prod_j 2^{s_j} + 1`` for piecewise polynomials on a dyadic grid."""
    s = tuple(int(v) for v in s)
    if d is None:
        d = len(s)
    if len(s) != d or any(v < 0 for v in s) or r < 0:
        raise ValueError("need s in N^d and r >= 0")
    return float((r + 1) ** d * 2 ** sum(s) + 1)


def vc_partition(n_cells: int, r: int, d: int) -> float:
    """``(r+1)^d |pi| + 1`` for any partition with ``|pi|`` cells."""
    if n_cells < 1 or r < 0 or d < 1:
        raise ValueError("need |pi| >= 1, r >= 0, d >= 1")
    return float((r + 1) ** d * n_cells + 1)


def vc_additive(pi_sizes: Sequence[int], t: int, r: int) -> float:
    """Bound for ``f[(sum_j g_j(w_j) v 0) ^ 1]`` with ``g_j`` piecewise on ``|pi_j|`` cells.

    ``2 + [t(r+1) + 2 sum_j |pi_j| (r+1)] log2[4eU log2(2eU)]`` with ``U = t + r + 2``.
    """
    if t < 1 or r < 0 or any(p < 1 for p in pi_sizes) or not len(pi_sizes):
        raise ValueError("need t >= 1, r >= 0 and |pi_j| >= 1")
    U = t + r + 2
    bracket = t * (r + 1) + 2 * sum(pi_sizes) * (r + 1)
    return 2.0 + bracket * _log2_factor(U)


def vc_multi(t: Sequence[int], r: int, l: int | None, d: int) -> float:
    """Bound for ``f(g_1, ..., g_l)`` with ``g_j = (<a_j, w> + 1)/2``.

    ``2 + [2ld + (prod t_j)(r+1)^l] log2[4eU log2(2eU)]`` with
    ``U = sum t_j + l r + l + 1``.
    """
    t = tuple(int(v) for v in t)
    if l is None:
        l = len(t)
    if len(t) != l or any(v < 1 for v in t) or r < 0 or d < 1:
        raise ValueError("need t in (N*)^l, r >= 0, d >= 1")
    U = sum(t) + l * r + l + 1
    bracket = 2 * l * d + math.prod(t) * (r + 1) ** l
    return 2.0 + bracket * _log2_factor(U)


def vc_neural(L: int, p: int, s0: int) -> float:
    """``(L+1)(||s||_0 + 1) log2[2(2e(L+1)(pL/2 + 1))^2]`` for a sparse ReLU MLP."""
    if L < 1 or p < 1 or s0 < 0:
        raise ValueError("need L, p >= 1 and ||s||_0 >= 0")
    return (L + 1) * (s0 + 1) * math.log2(2 * (2 * math.e * (L + 1) * (p * L / 2 + 1)) ** 2)


def vc_linear(support_size: int) -> float:
    """``|m| + 1`` for linear combinations over a support ``m``."""
    if support_size < 0:
        raise ValueError("support size must be nonnegative")
    return float(support_size + 1)


def param_count(L: int, p: int, d: int) -> int:
    """Number of weights and biases of a width-``p`` depth-``L`` MLP on ``R^d``."""
    if L < 1 or p < 1 or d < 1:
        raise ValueError("need L, p, d >= 1")
    return p * p * (L - 1) + p * (L + d + 1) + 1


# --- weights ----------------------------------------------------------------


def weight_dyadic(s: Sequence[int], r: int, d: int | None = None) -> float:
    d = len(s) if d is None else d
    return math.log(8 * d) * 2 ** sum(s) + r


def weight_partition(n_cells: int, r: int, d: int) -> float:
    return math.log(8 * d) * n_cells + r


def weight_additive(pi_sizes: Sequence[int], t: int, r: int) -> float:
    return 3 * math.log(2) * sum(pi_sizes) + r + t


def weight_multi(t: Sequence[int], r: int) -> float:
    return float(sum(t) + r)


def weight_relu(L: int, p: int) -> float:
    return float(L + p)


def weight_relu_sparse(L: int, p: int, s0: int, d: int) -> float:
    if s0 == 0:
        return float(p + L)
    pbar = param_count(L, p, d)
    if s0 > pbar:
        raise ValueError("||s||_0 exceeds the parameter count")
    return s0 * math.log(2 * math.e * pbar / s0) + p + L


def in_nested_family(support: Iterable[int]) -> bool:
    """True when ``support`` is empty or ``{1, ..., k}`` (1-based)."""
    m = sorted(set(int(j) for j in support))
    return m == list(range(1, len(m) + 1))


def weight_varsel(support: Iterable[int], p: int) -> float:
    """``2 log(1+|m|)`` on nested supports ``{1..k}``, else ``|m| log(2ep/|m|)``."""
    m = set(int(j) for j in support)
    if any(j < 1 or j > p for j in m):
        raise ValueError("support indices are 1-based and must not exceed p")
    k = len(m)
    if in_nested_family(m):
        return 2 * math.log(1 + k)
    return k * math.log(2 * math.e * p / k)


def weight(family_kind: str, **index) -> float:
    """Dispatch to the weight of ``family_kind``.

    Keyword arguments per kind: ``dyadic-poly`` (s, r[, d]) or
    (n_cells, r, d); ``holder-poly`` same as dyadic with ``n_cells``;
    ``additive`` (pi_sizes, t, r); ``multi-index`` (t, r); ``relu`` (L, p);
    ``relu-sparse`` (L, p, s0, d); ``linear-varsel`` (support, p).
    """
    if family_kind == "dyadic-poly":
        if "s" in index:
            return weight_dyadic(index["s"], index["r"], index.get("d"))
        return weight_partition(index["n_cells"], index["r"], index["d"])
    if family_kind == "holder-poly":
        return weight_partition(index["n_cells"], index["r"], index["d"])
    if family_kind == "additive":
        return weight_additive(index["pi_sizes"], index["t"], index["r"])
    if family_kind == "multi-index":
        return weight_multi(index["t"], index["r"])
    if family_kind == "relu":
        return weight_relu(index["L"], index["p"])
    if family_kind == "relu-sparse":
        return weight_relu_sparse(index["L"], index["p"], index["s0"], index["d"])
    if family_kind == "linear-varsel":
        return weight_varsel(index["support"], index["p"])
    raise ValueError(f"unknown family kind {family_kind!r}")


# --- truncated weight sums ----------------------------------------------------


def graded_indices(n_knobs: int, caps: Sequence[int], mins: Sequence[int] | None = None):
    """Integer vectors with ``mins[i] <= x[i] <= caps[i]`` in graded-lex order."""
    mins = [0] * n_knobs if mins is None else list(mins)
    ranges = [range(lo, hi + 1) for lo, hi in zip(mins, caps)]
    return sorted(itertools.product(*ranges), key=lambda x: (sum(x), x))


def _logsumexp(vals) -> float:
    vals = np.asarray(list(vals), dtype=float)
    if vals.size == 0:
        return -math.inf
    m = vals.max()
    return float(m + np.log(np.exp(vals - m).sum()))


def sigma_partial(family_kind: str, cutoff: int, d: int = 1, l: int = 1, p: int = 10) -> float:
    """Partial sum of ``exp(-Delta(m))`` over the family truncated at ``cutoff``.

    ``cutoff`` bounds every integer knob of the index (``s_j, r`` for dyadic;
    ``s_j, t, r`` for additive; ``t_j, r`` for multi-index; ``L, p`` for
    ReLU families). Masks of sparse networks are grouped by ``||s||_0`` with
    binomial multiplicities. ``linear-varsel`` enumerates supports of size
    at most ``cutoff`` out of ``p`` variables.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    total = 0.0
    if family_kind == "dyadic-poly":
        for idx in graded_indices(d + 1, [cutoff] * (d + 1)):
            total += math.exp(-weight_dyadic(idx[:d], idx[d], d))
    elif family_kind == "additive":
        for idx in graded_indices(d + 2, [cutoff] * (d + 2), [0] * d + [1, 0]):
            sizes = [2**s for s in idx[:d]]
            total += math.exp(-weight_additive(sizes, idx[d], idx[d + 1]))
    elif family_kind == "multi-index":
        for idx in graded_indices(l + 1, [cutoff] * (l + 1), [1] * l + [0]):
            total += math.exp(-weight_multi(idx[:l], idx[l]))
    elif family_kind == "relu":
        for L, pp in graded_indices(2, [cutoff, cutoff], [1, 1]):
            total += math.exp(-weight_relu(L, pp))
    elif family_kind == "relu-sparse":
        for L, pp in graded_indices(2, [cutoff, cutoff], [1, 1]):
            pbar = param_count(L, pp, d)
            terms = [-(pp + L)]
            for s0 in range(1, pbar + 1):
                log_count = gammaln(pbar + 1) - gammaln(s0 + 1) - gammaln(pbar - s0 + 1)
                terms.append(log_count - weight_relu_sparse(L, pp, s0, d))
            total += math.exp(_logsumexp(terms))
    elif family_kind == "linear-varsel":
        kmax = min(cutoff, p)
        for k in range(0, kmax + 1):
            # one nested support of each size, the rest are generic
            total += math.exp(-2 * math.log(1 + k))
            if k >= 1:
                n_generic = math.comb(p, k) - 1
                if n_generic:
                    total += math.exp(math.log(n_generic) - k * math.log(2 * math.e * p / k))
    else:
        raise ValueError(f"unknown family kind {family_kind!r}")
    return total


def sigma_bound(family_kind: str) -> float:
    return SIGMA_BOUNDS[family_kind]
