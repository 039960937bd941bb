"""
Rate of convergence for a Lipschitz truth
=========================================

``gamma*(w) = sin(2 pi w)`` is Lipschitz but not piecewise polynomial, so
the selected partition has to refine as the sample grows. For a 1-Hölder
truth in one dimension the risk should fall roughly like ``n^{-2/3}`` up
to logarithmic factors. The study fits the log-log slope of the median
risk.
"""

# %%
from pathlib import Path

from rhosel.config import load_config
from rhosel.simulate import rate_study

cfg = load_config(Path(__file__).parent / "configs" / "sine_rate.yaml")
study = rate_study(cfg)

# %%
# Median risk per sample size, with the most frequently selected model.
from collections import Counter  # noqa: E402

for n, med in zip(study.n_grid, study.medians):
    top = Counter(r["selected"] for r in study.rows if r["n"] == n).most_common(1)[0][0]
    print(f"n={n:5d}  median risk {med:.2e}  typical model {top}")
print(f"log-log slope {study.slope:.3f} (reference -2/3)")
