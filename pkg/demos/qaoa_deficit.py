"""Shallow QAOA error on MAX-3-SAT grows with clause density."""
from phasebench import build_hamiltonian, generate_random_ksat, optimize_qaoa

n = 8
for alpha in (0.5, 1.0, 2.0, 4.0, 6.0):
    f = generate_random_ksat(n, round(alpha * n), 3, seed=11)
    h = build_hamiltonian(f)
    warm = None
    errors = []
    for p in (1, 2, 3):
        out = optimize_qaoa(h, p, restarts=10, seed=0, warm_start=warm)
        warm = out.best_params
        errors.append(out.error)
    print(f"alpha={alpha:3.1f}  ground={h.ground_energy}  error p=1..3: "
          + "  ".join(f"{e:.3f}" for e in errors))
