"""
Tight three-link instances
==========================

Builds the three parallel links (gamma, f, 1) on which altruists cannot use
the bottom link, solves every Nash flow, and compares the worst ratio to the
all-selfish latency with the closed form.
"""

# %%
from __future__ import annotations

import numpy as np

from perversity import lemma3_instance, pi_theoretical, solve_heterogeneous
from perversity.metrics import perversity_breakdown

# %% One instance in detail
game = lemma3_instance(2.0, 0.5)
for k, eq in enumerate(solve_heterogeneous(game)):
    print(f"Nash flow {k}: L = {eq.total_latency:.6f}")
    print("  selfish   ", eq.flow.selfish.round(6))
    print("  altruistic", eq.flow.altruistic.round(6))

res = perversity_breakdown(game)
print(f"worst L = {res.worst.total_latency:.6f}, all-selfish L = {res.reference.total_latency:.6f}")
print(f"PI = {res.ratio:.6f}")

# %% Sweep over the selfish fraction
grid = np.round(np.linspace(0.0, 1.0, 11), 12)
print(f"{'gamma':>6} " + " ".join(f"{r:>6.1f}" for r in grid))
for gamma in (1.5, 2.0, 3.0, 5.0):
    empirical = [perversity_breakdown(lemma3_instance(gamma, r)).ratio for r in grid]
    gap = max(abs(e - pi_theoretical(gamma, r)) for e, r in zip(empirical, grid))
    print(f"{gamma:>6g} " + " ".join(f"{e:6.3f}" for e in empirical) + f"   max gap {gap:.1e}")

# %% The peak sits at an even split and equals (1 + gamma) / 2
for gamma in (1.5, 2.0, 3.0, 5.0):
    print(gamma, perversity_breakdown(lemma3_instance(gamma, 0.5)).ratio, (1 + gamma) / 2)
