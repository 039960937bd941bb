"""
Sparse logistic regression
==========================

Fifty uniform covariates, three of which enter the logit. Enumerating all
``2^50`` supports is impossible. The menu keeps the nested supports
``{1..k}`` and every support of size at most three among the eight
covariates most correlated with the response.
"""

# %%
from collections import Counter
from pathlib import Path

from rhosel.config import load_config
from rhosel.simulate import run_selection

cfg = load_config(Path(__file__).parent / "configs" / "varsel_bernoulli.yaml")
supports = [tuple(run_selection(cfg, rep=r).info["support"]) for r in range(10)]
for support, count in Counter(supports).most_common():
    print(f"{count:2d}/10  support {support}")
