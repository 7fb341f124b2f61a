"""
Randomised property suite and the selfish-cost counterexamples
==============================================================

Runs the seeded suite over random series-parallel games and looks at the
games where selfish users end up slower than in the all-selfish game. All of
them restrict selfish users to fewer paths than altruists.
"""

# %%
from __future__ import annotations

import time

from perversity.equilibrium import SELFISH, solve_heterogeneous, solve_homogeneous_selfish, type_cost_total
from perversity.network import homogenize
from perversity.suite import PROPERTIES, run_property_suite

# %%
t0 = time.perf_counter()
result = run_property_suite(count=200, seed=42)
print(f"{result.count} games, {result.equilibria} Nash flows, {time.perf_counter() - t0:.0f}s")
for name in PROPERTIES:
    print(f"  {name:20s} worst margin {result.worst_margins[name]: .3g}")

# %% The failures
for i, game, res in result.failures:
    broken = [n for n, m in res.margins.items() if m < 0.0]
    print(f"instance {i}: {broken}, P^s={game.selfish_paths}, P^a={game.altruistic_paths}, r_s={game.r_s:g}")

# %% One counterexample in detail
i, game, _ = result.failures[0]
gbar = homogenize(game)
bar = solve_homogeneous_selfish(gbar)
print("all-selfish selfish cost", type_cost_total(gbar, bar.flow, SELFISH))
for eq in solve_heterogeneous(game):
    print("heterogeneous selfish cost", type_cost_total(game, eq.flow, SELFISH), "L =", eq.total_latency)
