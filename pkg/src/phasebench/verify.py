"""Cross-checks of every exact engine against an independent brute-force path."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import build_hamiltonian, expand_to_ising
from .sat import count_unsatisfied, generate_random_ksat, index_to_bits
from .solvers import Status, brute_force_maxsat, dpll_solve


@dataclass
class OracleReport:
    formulas: int = 0
    checks: dict = field(default_factory=lambda: {
        "dpll_status": 0,
        "diagonal": 0,
        "ising": 0,
        "ground_energy": 0,
    })
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and all(v == self.formulas for v in self.checks.values())

    def summary(self) -> str:
        lines = [f"{name}: {passed}/{self.formulas}" for name, passed in self.checks.items()]
        return "\n".join(lines)


def random_small_formulas(count: int = 500, max_n: int = 12, alpha_range=(0.5, 8.0),
                          seed: int = 0):
    """Random formulas with ``n <= max_n``, ``k`` in 2..3 and density in ``alpha_range``."""
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(3, max_n + 1))
        k = int(rng.integers(2, 4))
        alpha = float(rng.uniform(*alpha_range))
        m = max(1, int(round(alpha * n)))
        yield generate_random_ksat(n, m, k, int(rng.integers(2**63)))


def check_formula(f, report: OracleReport):
    n = f.n
    # per-assignment evaluator, independent of the vectorised table
    direct = np.array([count_unsatisfied(f, index_to_bits(s, n)) for s in range(1 << n)])
    truth_sat = bool((direct == 0).any())
    report.formulas += 1

    res = dpll_solve(f)
    if (res.status is Status.SAT) == truth_sat and res.status is not Status.TIMEOUT:
        report.checks["dpll_status"] += 1
    else:
        report.failures.append(("dpll_status", f))

    h = build_hamiltonian(f)
    if np.array_equal(h.diagonal.astype(np.int64), direct):
        report.checks["diagonal"] += 1
    else:
        report.failures.append(("diagonal", f))

    poly = expand_to_ising(f).evaluate_all()
    if np.allclose(poly, direct, rtol=0, atol=1e-9):
        report.checks["ising"] += 1
    else:
        report.failures.append(("ising", f))

    if h.ground_energy == brute_force_maxsat(f).min_unsat == int(direct.min()):
        report.checks["ground_energy"] += 1
    else:
        report.failures.append(("ground_energy", f))


def verify_oracles(count: int = 500, max_n: int = 12, seed: int = 0,
                   alpha_range=(0.5, 8.0)) -> OracleReport:
    report = OracleReport()
    for f in random_small_formulas(count, max_n, alpha_range, seed):
        check_formula(f, report)
    return report
