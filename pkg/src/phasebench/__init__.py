"""Random k-SAT phase-transition benchmarks for classical solvers, Gibbs samplers and QAOA."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    DimacsError,
    FormulaDomainError,
    InvalidEnsembleError,
    LimitExceededError,
    PhaseBenchError,
)
from .sat import (  # noqa: E402
    CnfFormula,
    Literal,
    clause_density,
    count_satisfied,
    count_unsatisfied,
    generate_random_ksat,
    worked_example,
    read_dimacs,
    write_dimacs,
)
from .solvers import (  # noqa: E402
    Status,
    backbone_fraction,
    brute_force_maxsat,
    dpll_solve,
)
from .hamiltonian import build_hamiltonian, expand_to_ising, ground_states  # noqa: E402
from .gibbs import (  # noqa: E402
    GibbsSpec,
    exact_ground_probability,
    metropolis_ground_probability,
)
from .qaoa import (  # noqa: E402
    QaoaParams,
    apply_mixer,
    apply_phase_separator,
    finite_difference_gradient,
    initial_plus_state,
    optimize_qaoa,
    qaoa_expectation,
)
from .sweep import (  # noqa: E402
    SweepConfig,
    SweepResult,
    density_grid,
    read_results,
    run_decision_sweep,
    run_gibbs_sweep,
    run_qaoa_sweep,
    run_sweep,
    write_results,
)
