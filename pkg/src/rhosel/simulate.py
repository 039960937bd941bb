"""Scenario generation, end-to-end selection runs and Monte-Carlo risk.

Randomness is split into independent streams derived from the configured
seeds: covariates, responses and contamination each get their own
generator, so changing the contamination level never moves the clean part
of the sample.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .config import ConfigError, ScenarioConfig
from .expfam import DomainError, Parametrization
from .io import read_covariates
from .models.fitting import FitContext
from .models.menu import build_pool
from .models.partitions import DyadicPartition
from .models.piecewise import PiecewisePoly, multi_degrees
from .neural import hat
from .rho import CandidateFunction, Dataset, select


# --- truths and covariates ------------------------------------------------------------


def _takagi_truth(t: float, terms: int):
    def f(W):
        z = W[:, 0].copy()
        out = np.zeros_like(z)
        for k in range(1, terms + 1):
            z = hat(z)
            out += t**k * z
        return out

    return f


def build_truth(cfg: ScenarioConfig, d: int) -> CandidateFunction | None:
    """The regression function ``gamma*`` described by ``cfg.truth``; None for ``external``."""
    tr = cfg.truth
    kind = tr["kind"]
    if kind == "external":
        return None
    if kind == "constant":
        c = float(tr["value"])
        return CandidateFunction(lambda W: np.full(W.shape[0], c), "truth:constant")
    if kind == "piecewise":
        part = DyadicPartition(tr["s"])
        if part.d != d:
            raise ConfigError("piecewise truth dimension does not match the covariates")
        degree = int(tr.get("degree", 0))
        if "coeffs" in tr:
            coeffs = np.asarray(tr["coeffs"], dtype=float)
        else:
            values = np.asarray(tr["values"], dtype=float).ravel()
            if values.size != part.n_cells:
                raise ConfigError(f"piecewise truth needs {part.n_cells} cell values")
            coeffs = np.zeros((part.n_cells, len(multi_degrees(degree, d))))
            coeffs[:, 0] = values
        poly = PiecewisePoly(part, degree, coeffs)
        return CandidateFunction(poly, "truth:piecewise")
    if kind == "sine":
        amp = float(tr.get("amplitude", 1.0))
        freq = float(tr.get("frequency", 1.0))
        off = float(tr.get("offset", 0.0))
        axis = int(tr.get("axis", 1)) - 1
        return CandidateFunction(lambda W: off + amp * np.sin(2 * np.pi * freq * W[:, axis]), "truth:sine")
    if kind == "takagi":
        t = float(tr.get("t", 0.5))
        if not -1 < t < 1:
            raise ConfigError("takagi truth needs |t| < 1")
        terms = int(tr.get("terms", 60))
        scale, off = float(tr.get("scale", 1.0)), float(tr.get("offset", 0.0))
        f = _takagi_truth(t, terms)
        return CandidateFunction(lambda W: off + scale * f(W), "truth:takagi")
    if kind == "linear":
        coefs = tr["coefs"]
        beta = np.zeros(d)
        if isinstance(coefs, dict):
            for k, v in coefs.items():
                j = int(k)
                if not 1 <= j <= d:
                    raise ConfigError(f"linear truth index {j} outside 1..{d}")
                beta[j - 1] = float(v)
        else:
            arr = np.asarray(coefs, dtype=float).ravel()
            if arr.size != d:
                raise ConfigError("linear truth needs one coefficient per covariate")
            beta[:] = arr
        support = [int(j) + 1 for j in np.flatnonzero(beta)]
        return CandidateFunction(lambda W: W @ beta, "truth:linear", info={"support": support})
    raise ConfigError(f"unknown truth kind {kind!r}")


def covariate_dim(cfg: ScenarioConfig) -> int:
    cov = cfg.covariates
    if cov.get("law", "uniform") == "uniform":
        return int(cov.get("d", 1))
    return read_covariates(cov["path"]).shape[1]


def draw_covariates(cfg: ScenarioConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    cov = cfg.covariates
    if cov.get("law", "uniform") == "uniform":
        return rng.uniform(size=(n, int(cov.get("d", 1))))
    pool = read_covariates(cov["path"])
    return pool[rng.integers(0, pool.shape[0], size=n)]


def _streams(seed, n: int | None = None, rep: int | None = None):
    key = [int(seed)] + ([] if n is None else [int(n)]) + ([] if rep is None else [int(rep)])
    cov, resp, cont = np.random.SeedSequence(key).spawn(3)
    return np.random.default_rng(cov), np.random.default_rng(resp), np.random.default_rng(cont)


def _truth_values(truth: CandidateFunction, W, par: Parametrization) -> np.ndarray:
    g = truth(W)
    if not np.all(par.contains(g)):
        raise ConfigError(f"the truth leaves the parameter interval I={par.interval}")
    return g


def _outliers(cfg: ScenarioConfig, par: Parametrization, g_true, rng) -> np.ndarray:
    law = cfg.contamination.get("outlier", "far-end")
    n = g_true.shape[0]
    if law == "far-end":
        v_lo, v_hi = cfg.clamp
        g_out = np.where(np.abs(g_true - v_lo) > np.abs(g_true - v_hi), v_lo, v_hi)
        return par.sample(g_out, rng)
    if isinstance(law, dict) and "gamma" in law:
        return par.sample(np.full(n, float(law["gamma"])), rng)
    if isinstance(law, dict) and "value" in law:
        y = np.full(n, float(law["value"]))
        par.family.check_support(y)
        return y
    raise ConfigError(f"unknown outlier law {law!r}")


def generate(cfg: ScenarioConfig, n: int | None = None, rep: int | None = None, par: Parametrization | None = None) -> Dataset:
    """Draw ``(W_i, Y_i)`` from the scenario.

    Parameters
    ----------
    n : int, optional
        Overrides ``cfg.n``; it also enters the seed so that different
        sample sizes in a rate study are independent.
    rep : int, optional
        Replicate number, mixed into the seed.
    """
    par = par or cfg.build_parametrization()
    size = cfg.n if n is None else int(n)
    r_cov, r_resp, r_cont = _streams(cfg.seeds["data"], n, rep)
    W = draw_covariates(cfg, size, r_cov)
    truth = build_truth(cfg, W.shape[1])
    if truth is None:
        raise ConfigError("cannot simulate an external truth; pass data instead")
    g = _truth_values(truth, W, par)
    y = par.sample(g, r_resp)
    # the contamination stream is always consumed in full so eps only moves the flips
    flips = r_cont.uniform(size=size) < cfg.eps
    y_out = _outliers(cfg, par, g, r_cont)
    y = np.where(flips, y_out, y)
    return Dataset(W, y)


# --- risk ---------------------------------------------------------------------------


def mc_hellinger_risk(gamma_hat, gamma_star, par: Parametrization, cfg: ScenarioConfig, seed=None) -> tuple[float, float]:
    """Monte-Carlo estimate of ``E_W h^2(R_{gamma*(W)}, R_{gamma_hat(W)})`` and its standard error."""
    m = cfg.mc_points
    rng = np.random.default_rng(np.random.SeedSequence([int(cfg.seeds["mc"] if seed is None else seed), 7]))
    W = draw_covariates(cfg, m, rng)
    h2 = par.hellinger_sq(gamma_star(W), gamma_hat(W))
    est = math.fsum(h2) / m
    se = float(np.std(h2, ddof=1) / math.sqrt(m))
    return est, se


# --- end to end -------------------------------------------------------------------------


@dataclass
class RiskReport:
    selected_label: str
    selected_index: int
    mc_risk: float | None
    mc_stderr: float | None
    n: int
    candidates: list
    certificate: dict
    near_optimal: list
    info: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "selected": self.selected_label,
            "selected_index": self.selected_index,
            "mc_risk": self.mc_risk,
            "mc_stderr": self.mc_stderr,
            "n": self.n,
            "near_optimal": self.near_optimal,
            "candidates": self.candidates,
            "certificate": self.certificate,
            "info": self.info,
        }
        if timing:
            out["wall_time"] = self.wall_time
        return out

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True, allow_nan=False)


def fit_context(cfg: ScenarioConfig, par: Parametrization) -> FitContext:
    return FitContext(par, cfg.clamp[0], cfg.clamp[1], pitch=cfg.pitch, restarts=cfg.restarts, seed=int(cfg.seeds["fit"]))


def run_selection(cfg: ScenarioConfig, data: Dataset | None = None, n: int | None = None, rep: int | None = None) -> RiskReport:
    """Generate (unless ``data`` is given), build the pool, select, and score the choice."""
    start = time.perf_counter()
    par = cfg.build_parametrization()
    if data is None:
        data = generate(cfg, n=n, rep=rep, par=par)
    try:
        data.check_support(par)
    except DomainError as exc:
        raise ConfigError(f"responses outside the family support: {exc}") from exc
    ctx = fit_context(cfg, par)
    pool = build_pool(data, cfg.menu, ctx)
    sel = cfg.selection
    report = select(
        data,
        pool,
        par,
        slack=float(sel.get("slack", 1.0)),
        penalty_scale=float(sel.get("penalty_scale", 1.0)),
        xi=float(sel.get("xi", 1.0)),
    )
    truth = build_truth(cfg, data.covariate_dim)
    risk = se = None
    if truth is not None:
        risk, se = mc_hellinger_risk(report.chosen, truth, par, cfg)
    cands = [
        {"label": lab, "upsilon": float(u), "pen": float(p)}
        for lab, u, p in zip(report.labels, report.upsilon, report.penalties)
    ]
    info = {k: v for k, v in report.chosen.info.items() if k in ("support", "flags", "coefs")}
    return RiskReport(
        selected_label=report.chosen.label,
        selected_index=int(report.chosen_index),
        mc_risk=risk,
        mc_stderr=se,
        n=data.n,
        candidates=cands,
        certificate={str(k): v for k, v in report.certificate.items()},
        near_optimal=[report.labels[i] for i in report.near_optimal],
        info=info,
        wall_time=time.perf_counter() - start,
    )


@dataclass
class RateStudy:
    n_grid: list
    reps: int
    rows: list
    medians: list
    slope: float
    intercept: float

    def to_dict(self) -> dict:
        return {
            "n_grid": self.n_grid,
            "reps": self.reps,
            "median_risk": self.medians,
            "slope": self.slope,
            "intercept": self.intercept,
            "rows": self.rows,
        }

    def to_csv(self) -> str:
        lines = ["n,rep,mc_risk,mc_stderr,selected"]
        for r in self.rows:
            lines.append(f"{r['n']},{r['rep']},{r['mc_risk']:.17g},{r['mc_stderr']:.17g},{r['selected']}")
        return "\n".join(lines) + "\n"


def rate_study(cfg: ScenarioConfig, n_grid=None, reps: int | None = None) -> RateStudy:
    """Median risk per sample size and the least-squares slope of log risk on log n."""
    n_grid = [int(v) for v in (n_grid or cfg.rate.get("n_grid", []))]
    reps = int(reps or cfg.rate.get("reps", 10))
    if len(n_grid) < 2 or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ConfigError("n_grid must contain at least two increasing sizes")
    if reps < 5:
        raise ConfigError("rate studies need reps >= 5")
    rows, medians = [], []
    for n in n_grid:
        risks = []
        for rep in range(reps):
            rr = run_selection(cfg, n=n, rep=rep)
            if rr.mc_risk is None:
                raise ConfigError("rate studies need a known truth")
            rows.append({"n": n, "rep": rep, "mc_risk": rr.mc_risk, "mc_stderr": rr.mc_stderr, "selected": rr.selected_label})
            risks.append(rr.mc_risk)
        medians.append(float(np.median(risks)))
    slope, intercept = np.polyfit(np.log(n_grid), np.log(medians), 1)
    return RateStudy(n_grid, reps, rows, medians, float(slope), float(intercept))
