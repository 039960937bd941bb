"""Scenario configurations shared by the acceptance and integration tests.

The penalty multiplier is pinned once for every desk-scale scenario; see
the README section on penalty calibration.
"""

import copy

PENALTY_SCALE = 4e-7

GAUSS = {"family": "gaussian(sigma=1)", "parametrization": {"kind": "natural", "interval": [-10, 10]}}


def piecewise_recovery(seed=2024):
    """Two-cell step truth that lies inside a dyadic menu."""
    return copy.deepcopy({
        **GAUSS,
        "clamp": [-3, 3],
        "covariates": {"law": "uniform", "d": 1},
        "truth": {"kind": "piecewise", "s": [1], "values": [-1.0, 1.0]},
        "n": 1000,
        "menu": {"kind": "dyadic-poly", "s_max": 8, "r_max": 1},
        "selection": {"penalty_scale": PENALTY_SCALE, "slack": 1.0},
        "seeds": {"data": seed, "fit": seed + 1, "mc": seed + 2},
        "mc_points": 20000,
    })


def sine_rate(seed=2025):
    cfg = piecewise_recovery(seed)
    cfg["truth"] = {"kind": "sine", "amplitude": 1.0, "frequency": 1.0}
    cfg["rate"] = {"n_grid": [2**k for k in range(8, 14)], "reps": 10}
    return cfg


def contamination(eps, seed=2026):
    cfg = sine_rate(seed)
    cfg.pop("rate")
    cfg["n"] = 2000
    cfg["contamination"] = {"eps": eps, "outlier": "far-end"}
    return cfg


def variable_selection(family, seed=2027):
    if family == "gaussian":
        fam = {**GAUSS, "clamp": [-5, 5]}
    else:
        fam = {"family": "bernoulli", "parametrization": {"kind": "natural", "interval": [-8, 8]}, "clamp": [-6, 6]}
    return copy.deepcopy({
        **fam,
        "covariates": {"law": "uniform", "d": 50},
        "truth": {"kind": "linear", "coefs": {1: 2.0, 2: -1.5, 3: 1.5}},
        "n": 2000,
        "menu": {"kind": "linear-varsel", "max_support": 3, "screen": 8},
        "selection": {"penalty_scale": PENALTY_SCALE, "slack": 1.0},
        "seeds": {"data": seed, "fit": seed + 1, "mc": seed + 2},
        "mc_points": 5000,
    })
