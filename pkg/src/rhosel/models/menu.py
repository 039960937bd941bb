"""Model menus: deterministic enumeration of model indices and pool building.

A menu is a mapping such as::

    {"kind": "dyadic-poly", "s_max": 4, "r_max": 1}

Supported kinds and their budget keys:

``dyadic-poly``
    ``s_max`` (per-axis split level cap), ``r_max``.
``holder-poly``
    ``t_max`` (per-axis regular split cap), ``r_max``.
``additive``
    ``s_max`` for each ``g_j``, ``t_max`` for ``f``, ``r_max``.
``multi-index``
    ``l`` (number of directions), ``t_max``, ``r_max``.
``linear-varsel``
    ``max_support``; full power set when ``p <= full_power_max`` (default
    12), otherwise the nested prefixes plus every subset of size at most
    ``max_support`` among the ``screen`` covariates most correlated with
    the sufficient statistic.
``relu``
    ``L_max``, ``p_max``, ``features`` (random-feature draws per
    architecture), ``takagi`` (optional Takagi constructions).

``max_models`` caps the enumeration; the tail is dropped with a warning.
Several menus can be combined by passing a list.
"""

from __future__ import annotations

import itertools
import warnings
import zlib
from dataclasses import dataclass, field

import numpy as np

from .. import complexity as cx
from ..rho import CandidateFunction, CandidatePool, Dataset, ModelRecord
from .fitting import FitContext, fit_additive, fit_linear, fit_multi_index, piecewise_candidate
from .partitions import DyadicPartition, RegularPartition

MENU_KINDS = ("dyadic-poly", "holder-poly", "additive", "multi-index", "linear-varsel", "relu")


@dataclass(frozen=True)
class MenuEntry:
    """One model ``m`` with its VC bound and weight."""

    kind: str
    index: tuple
    V: float
    delta: float
    label: str = field(default="", compare=False)

    @property
    def key(self) -> str:
        return self.label

    def record(self) -> ModelRecord:
        return ModelRecord(self.V, self.delta, self.kind)


def _label(kind, **parts) -> str:
    body = ",".join(f"{k}={v}" for k, v in parts.items())
    return f"{kind}[{body}]"


def _positive(cfg, key, default=None):
    v = cfg.get(key, default)
    if v is None:
        raise ValueError(f"menu budget {key!r} is required")
    if int(v) != v or v < 0:
        raise ValueError(f"menu budget {key!r} must be a nonnegative integer")
    return int(v)


def _dyadic(cfg, d):
    s_max, r_max = _positive(cfg, "s_max"), _positive(cfg, "r_max", 0)
    out = []
    for r in range(r_max + 1):
        for s in itertools.product(range(s_max + 1), repeat=d):
            out.append(MenuEntry("dyadic-poly", (s, r), cx.vc_dyadic(s, r, d), cx.weight_dyadic(s, r, d), _label("dyadic-poly", s=s, r=r)))
    return sorted(out, key=lambda e: (sum(e.index[0]) + e.index[1], e.index[1], e.index[0]))


def _holder(cfg, d):
    t_max, r_max = _positive(cfg, "t_max"), _positive(cfg, "r_max", 0)
    out = []
    for r in range(r_max + 1):
        for t in itertools.product(range(1, t_max + 1), repeat=d):
            cells = int(np.prod(t))
            out.append(MenuEntry("holder-poly", (t, r), cx.vc_partition(cells, r, d), cx.weight_partition(cells, r, d), _label("holder-poly", t=t, r=r)))
    return sorted(out, key=lambda e: (sum(e.index[0]) + e.index[1], e.index[1], e.index[0]))


def _additive(cfg, d):
    s_max, t_max, r_max = _positive(cfg, "s_max"), _positive(cfg, "t_max"), _positive(cfg, "r_max", 0)
    out = []
    for r in range(r_max + 1):
        for t in range(1, t_max + 1):
            for s in itertools.product(range(s_max + 1), repeat=d):
                sizes = [2**v for v in s]
                out.append(MenuEntry("additive", (s, t, r), cx.vc_additive(sizes, t, r), cx.weight_additive(sizes, t, r), _label("additive", s=s, t=t, r=r)))
    return sorted(out, key=lambda e: (sum(e.index[0]) + e.index[1] + e.index[2], e.index))


def _multi(cfg, d):
    l, t_max, r_max = _positive(cfg, "l", 1), _positive(cfg, "t_max"), _positive(cfg, "r_max", 0)
    if l < 1:
        raise ValueError("multi-index menus need l >= 1")
    out = []
    for r in range(r_max + 1):
        for t in itertools.product(range(1, t_max + 1), repeat=l):
            out.append(MenuEntry("multi-index", (t, r), cx.vc_multi(t, r, l, d), cx.weight_multi(t, r), _label("multi-index", t=t, r=r)))
    return sorted(out, key=lambda e: (sum(e.index[0]) + e.index[1], e.index))


def screen_covariates(data: Dataset, T: np.ndarray, q: int) -> list[int]:
    """1-based indices of the ``q`` covariates most correlated with ``T``; ties keep index order."""
    Wc = data.W - data.W.mean(axis=0)
    Tc = T - T.mean()
    den = np.sqrt((Wc**2).sum(axis=0) * (Tc**2).sum()) + 1e-300
    score = np.abs(Wc.T @ Tc) / den
    order = np.argsort(-score, kind="stable")
    return sorted(int(j) + 1 for j in order[:q])


def _varsel(cfg, p, data=None, T=None):
    max_support = _positive(cfg, "max_support", p)
    full_max = _positive(cfg, "full_power_max", 12)
    supports = []
    if p <= full_max:
        for k in range(0, min(max_support, p) + 1):
            supports.extend(itertools.combinations(range(1, p + 1), k))
    else:
        supports.extend(tuple(range(1, k + 1)) for k in range(0, p + 1))
        if data is not None:
            q = _positive(cfg, "screen", 8)
            pool = screen_covariates(data, T, q)
            for k in range(1, min(max_support, q) + 1):
                supports.extend(itertools.combinations(pool, k))
    seen, out = set(), []
    for m in supports:
        m = tuple(sorted(m))
        if m in seen:
            continue
        seen.add(m)
        out.append(MenuEntry("linear-varsel", (m,), cx.vc_linear(len(m)), cx.weight_varsel(m, p), _label("linear-varsel", m=m)))
    return out


def _relu(cfg, d):
    from ..neural import menu_entries

    return menu_entries(cfg, d)


def enumerate_menu(config, d: int, data: Dataset | None = None, T: np.ndarray | None = None) -> list[MenuEntry]:
    """Deterministic list of models for one menu config (or a list of them).

    Parameters
    ----------
    config : dict or list of dict
    d : int
        Covariate dimension (``p`` for variable selection).
    data, T : optional
        Used only to screen covariates for large variable-selection menus.
    """
    configs = config if isinstance(config, (list, tuple)) else [config]
    out: list[MenuEntry] = []
    for cfg in configs:
        kind = cfg.get("kind")
        if kind == "dyadic-poly":
            entries = _dyadic(cfg, d)
        elif kind == "holder-poly":
            entries = _holder(cfg, d)
        elif kind == "additive":
            entries = _additive(cfg, d)
        elif kind == "multi-index":
            entries = _multi(cfg, d)
        elif kind == "linear-varsel":
            entries = _varsel(cfg, d, data, T)
        elif kind == "relu":
            entries = _relu(cfg, d)
        else:
            raise ValueError(f"unknown menu kind {kind!r}; expected one of {MENU_KINDS}")
        cap = cfg.get("max_models")
        if cap is not None and len(entries) > int(cap):
            warnings.warn(f"{kind} menu truncated from {len(entries)} to {int(cap)} models", RuntimeWarning, stacklevel=2)
            entries = entries[: int(cap)]
        out.extend(entries)
    return out


def _model_seed(entry: MenuEntry) -> int:
    # stable across runs, unlike hash()
    return zlib.crc32(entry.label.encode())


def fit_entry(data: Dataset, entry: MenuEntry, ctx: FitContext, cfg=None) -> list[CandidateFunction]:
    """Fit the candidates of one model."""
    kind = entry.kind
    if kind == "dyadic-poly":
        s, r = entry.index
        fn = piecewise_candidate(data, DyadicPartition(s), r, ctx)
        return [CandidateFunction(fn, entry.label, (entry.label,), {"flags": fn.inner.flags})]
    if kind == "holder-poly":
        t, r = entry.index
        fn = piecewise_candidate(data, RegularPartition(t), r, ctx)
        return [CandidateFunction(fn, entry.label, (entry.label,), {"flags": fn.inner.flags})]
    if kind == "additive":
        s, t, r = entry.index
        fn = fit_additive(data, s, t, r, ctx, model_seed=_model_seed(entry))
        return [CandidateFunction(fn, entry.label, (entry.label,))]
    if kind == "multi-index":
        t, r = entry.index
        fn = fit_multi_index(data, t, r, ctx, model_seed=_model_seed(entry))
        return [CandidateFunction(fn, entry.label, (entry.label,))]
    if kind == "linear-varsel":
        (m,) = entry.index
        fn = fit_linear(data, m, ctx)
        return [CandidateFunction(fn, entry.label, (entry.label,), {"support": list(m)})]
    if kind in ("relu", "relu-sparse"):
        from ..neural import fit_entry as fit_relu

        return fit_relu(data, entry, ctx, cfg or {})
    raise ValueError(f"unknown model kind {kind!r}")


def build_pool(data: Dataset, config, ctx: FitContext) -> CandidatePool:
    """Enumerate the menu, fit every model and assemble the candidate pool."""
    T = ctx.parametrization.family.suff_stat(data.y)
    configs = config if isinstance(config, (list, tuple)) else [config]
    candidates, table = [], {}
    for cfg in configs:
        for entry in enumerate_menu(cfg, data.covariate_dim, data, T):
            table[entry.label] = entry.record()
            candidates.extend(fit_entry(data, entry, ctx, cfg))
    return CandidatePool(candidates, table)
