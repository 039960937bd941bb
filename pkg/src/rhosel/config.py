"""Scenario configuration files.

Configs are YAML (or JSON, which YAML also reads). A minimal example::

    family: gaussian(sigma=1)
    parametrization: {kind: natural, interval: [-10, 10]}
    clamp: [-3, 3]
    covariates: {law: uniform, d: 1}
    truth: {kind: sine, amplitude: 1.0}
    n: 1000
    menu: {kind: dyadic-poly, s_max: 6, r_max: 1}
    selection: {penalty_scale: 1.0e-6, slack: 1.0}
    seeds: {data: 1, fit: 2, mc: 3}
    mc_points: 20000

Truth kinds: ``constant`` (value), ``piecewise`` (s, values, optional
degree/coeffs), ``sine`` (amplitude, frequency, offset, axis), ``takagi``
(t, terms, scale, offset), ``linear`` (coefs as a list of length p or a
mapping from 1-based index to value) and ``external`` (no known truth).

``contamination: {eps: 0.05, outlier: far-end}`` replaces each response
with probability ``eps``. Outlier laws: ``far-end`` (the family member at
the end of the clamp window farther from the truth), ``{gamma: x}`` (a
fixed member) or ``{value: y}`` (a point mass).
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .expfam import Parametrization, parse_family, parse_parametrization


class ConfigError(ValueError):
    """Invalid or inconsistent scenario configuration."""


TRUTH_KINDS = ("constant", "piecewise", "sine", "takagi", "linear", "external")


@dataclass
class ScenarioConfig:
    family: str
    parametrization: dict
    clamp: tuple
    covariates: dict
    truth: dict
    n: int
    menu: Any
    contamination: dict = field(default_factory=lambda: {"eps": 0.0, "outlier": "far-end"})
    selection: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=lambda: {"data": 0, "fit": 0, "mc": 0})
    mc_points: int = 20000
    pitch: float = 2.0**-20
    restarts: int = 3
    rate: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError("n must be a positive integer")
        self.n = int(self.n)
        eps = float(self.contamination.get("eps", 0.0))
        if not 0 <= eps < 0.5:
            raise ConfigError("contamination eps must lie in [0, 0.5)")
        if int(self.mc_points) < 100:
            raise ConfigError("mc_points must be at least 100")
        self.mc_points = int(self.mc_points)
        if len(self.clamp) != 2 or not float(self.clamp[0]) < float(self.clamp[1]):
            raise ConfigError("clamp must be [v_minus, v_plus] with v_minus < v_plus")
        self.clamp = (float(self.clamp[0]), float(self.clamp[1]))
        if self.truth.get("kind") not in TRUTH_KINDS:
            raise ConfigError(f"truth kind must be one of {TRUTH_KINDS}")
        law = self.covariates.get("law", "uniform")
        if law not in ("uniform", "csv"):
            raise ConfigError("covariate law must be 'uniform' or 'csv'")
        if law == "uniform" and int(self.covariates.get("d", 1)) < 1:
            raise ConfigError("covariate dimension must be >= 1")
        for key in ("data", "fit", "mc"):
            self.seeds.setdefault(key, 0)
        if not self.pitch > 0:
            raise ConfigError("pitch must be positive")

    @property
    def eps(self) -> float:
        return float(self.contamination.get("eps", 0.0))

    def build_parametrization(self) -> Parametrization:
        try:
            fam = parse_family(self.family)
            p = dict(self.parametrization) if isinstance(self.parametrization, dict) else {"kind": self.parametrization}
            par = parse_parametrization(
                fam,
                p.get("kind", "natural"),
                interval=p.get("interval"),
                anchor=p.get("anchor"),
                theta_range=p.get("theta_range"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        lo, hi = par.interval
        if self.clamp[0] < lo or self.clamp[1] > hi:
            raise ConfigError(f"clamp window {list(self.clamp)} must lie inside I={[lo, hi]}")
        return par

    def replace(self, **changes) -> "ScenarioConfig":
        raw = copy.deepcopy(self.raw)
        raw.update(copy.deepcopy(changes))
        return from_dict(raw)

    def to_dict(self) -> dict:
        return copy.deepcopy(self.raw)


_REQUIRED = ("family", "clamp", "truth", "n", "menu")


def from_dict(raw: dict) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    missing = [k for k in _REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"missing config keys: {missing}")
    known = set(ScenarioConfig.__dataclass_fields__) - {"raw"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    kwargs = copy.deepcopy(raw)
    kwargs.setdefault("parametrization", {"kind": "natural"})
    kwargs.setdefault("covariates", {"law": "uniform", "d": 1})
    try:
        cfg = ScenarioConfig(**kwargs, raw=copy.deepcopy(raw))
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path) -> ScenarioConfig:
    """Read a YAML or JSON scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    cfg = from_dict(raw)
    cov = cfg.covariates
    if cov.get("law") == "csv" and not Path(cov["path"]).is_absolute():
        cov["path"] = str(path.parent / cov["path"])
    return cfg
