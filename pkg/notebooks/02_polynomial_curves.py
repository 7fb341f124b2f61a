"""
Polynomial latencies: perversity index against the selfish price of anarchy
===========================================================================

For degree-p polynomials the perversity index peaks at 1 + p/2, above the
classical price of anarchy of all-selfish traffic. The crossing fractions
r* and 1 - r* bound the window where partial altruism does worse than the
selfish worst case. Writes the sweep CSV to the working directory.
"""

# %%
from __future__ import annotations

from pathlib import Path

from perversity import pi_poly, poa_selfish_poly, r_star
from perversity.cli import SweepConfig, sweep_rows, write_csv

# %% Closed forms
print(f"{'p':>2} {'PoA':>8} {'peak PI':>8} {'r*':>8}  window")
for p in range(1, 7):
    rs = r_star(p)
    print(f"{p:>2} {poa_selfish_poly(p):8.4f} {pi_poly(p, 0.5):8.4f} {rs:8.4f}  ({rs:.4f}, {1 - rs:.4f})")

# %% Solved curves on the tight instances
config = SweepConfig("by_degree", (1, 2, 3, 4), step=0.05)
rows = sweep_rows(config)
worst = max(row["gap"] for row in rows)
print(f"{len(rows)} grid points, max |empirical - closed form| = {worst:.2e}")

out = Path("polynomial_curves.csv")
with open(out, "w", newline="") as fh:
    write_csv(rows, fh)
print(f"wrote {out}")

# %% Where altruism is worse than the selfish worst case
for p in (1, 2, 3, 4):
    above = [row["r_s"] for row in rows if row["param"] == p and row["pi_empirical"] > poa_selfish_poly(p)]
    print(f"p={p}: PI above selfish PoA for r_s in [{min(above):.2f}, {max(above):.2f}] on the grid")
