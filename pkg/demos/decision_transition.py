"""Satisfiable fraction and DPLL effort across clause density."""
from phasebench.sweep import SweepConfig, crossing_density, density_grid, run_sweep

cfg = SweepConfig("decision", n=50, k=3, densities=density_grid(3, 6, 0.5), instances=60, seed=1)
res = run_sweep(cfg)

alpha, frac = res.series("sat_fraction")
_, effort = res.series("mean_decisions")
for a, p, d in zip(alpha, frac, effort):
    print(f"alpha={a:4.2f}  P(sat)={p:4.2f}  mean decisions={d:8.1f}")
print("0.5 crossing near alpha =", round(crossing_density(alpha, frac), 2))
