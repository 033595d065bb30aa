"""Ground-state weight of the Gibbs distribution dips near the transition."""
from phasebench.sweep import SweepConfig, density_grid, run_sweep

cfg = SweepConfig("gibbs", n=12, k=3, densities=density_grid(1, 7, 1.0), instances=30,
                  seed=3, betas=[2.0], mcmc=True, mcmc_chains=8)
res = run_sweep(cfg)

alpha, exact = res.series("mean_p_gs", 2.0)
_, mcmc = res.series("mean_p_gs_mcmc", 2.0)
_, se = res.series("mcmc_se", 2.0)
for a, e, s, err in zip(alpha, exact, mcmc, se):
    print(f"alpha={a:3.1f}  exact={e:.4f}  metropolis={s:.4f} +/- {err:.4f}")
