"""
Exact ReLU constructions
========================

The hat function is a two-neuron ReLU network, its iterates are networks
of growing depth, and partial sums ``sum_k t^k h^{o k}`` of the Takagi
series fit in a single network of depth ``m + 1`` and width five. This demo
checks those identities numerically and then runs selection with a menu
mixing networks and piecewise polynomials.
"""

# %%
from pathlib import Path

import numpy as np

from rhosel.config import load_config
from rhosel.neural import hat, hat_network, identity_network, iterate_network, takagi_network, takagi_partial
from rhosel.simulate import run_selection

w = np.linspace(0, 1, 10001)
print("hat network error       ", np.max(np.abs(hat_network()(w) - hat(w))))
for k in (2, 5, 10):
    x = 2.0 ** (k - 1) * w
    err = np.max(np.abs(iterate_network(hat_network(), k)(w) - 2 * np.abs(x - np.round(x))))
    print(f"{k:2d}-fold iterate error   {err}")

# %%
# The Takagi partial sum as one network.
m = 8
net = takagi_network(identity_network(), hat_network(), [0.5**k for k in range(1, m + 1)])
ref = takagi_partial(m, 0.5, identity_network(), hat_network(), w)
print(f"depth {net.depth}, width {net.width}, max error {np.max(np.abs(net(w) - ref)):.1e}")

# %%
# Selection with networks in the menu. Deep networks carry large VC bounds,
# so at this sample size a cheaper piecewise-linear fit usually wins.
cfg = load_config(Path(__file__).parent / "configs" / "takagi.yaml")
report = run_selection(cfg)
print(f"selected {report.selected_label}, risk {report.mc_risk:.2e}")
best_net = min((c for c in report.candidates if c["label"].startswith("relu")), key=lambda c: c["upsilon"])
print(f"best network candidate {best_net['label']} with penalty {best_net['pen']:.1f}")
