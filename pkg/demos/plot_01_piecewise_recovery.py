"""
Recovering a step function
==========================

The regression function is piecewise constant on two dyadic cells and the
responses are Gaussian. The menu holds every dyadic piecewise polynomial
with up to ``2^8`` cells and degree at most one, so the truth is one of the
models. We look at which model the tournament picks and how the
pseudo-Hellinger risk behaves as ``n`` grows.
"""

# %%
# Load the scenario and run one selection.
from pathlib import Path

import numpy as np

from rhosel.config import load_config
from rhosel.simulate import run_selection

cfg = load_config(Path(__file__).parent / "configs" / "piecewise.yaml")
report = run_selection(cfg)
print(f"selected {report.selected_label}, risk {report.mc_risk:.2e} +- {report.mc_stderr:.1e}")

# %%
# The five candidates with the smallest criterion value. Each row shows the
# criterion ``upsilon`` and the penalty inherited from the candidate's model.
rows = sorted(report.candidates, key=lambda c: c["upsilon"])[:5]
for c in rows:
    print(f"{c['label']:<28} upsilon={c['upsilon']:9.2f}  pen={c['pen']:7.2f}")

# %%
# Risk against sample size, median over 10 replicates.
for n in (250, 1000, 4000):
    risks = [run_selection(cfg, n=n, rep=r).mc_risk for r in range(10)]
    print(f"n={n:5d}  median risk {np.median(risks):.2e}")
