import numpy as np
import pytest

from phasebench.errors import LimitExceededError
from phasebench.hamiltonian import (
    IsingExpansion,
    build_hamiltonian,
    expand_to_ising,
    ground_states,
)
from phasebench.sat import CnfFormula, generate_random_ksat, worked_example
from phasebench.solvers import brute_force_maxsat

from conftest import all_assignments, naive_unsat


def test_single_clause_spectrum(single_clause3):
    diag = build_hamiltonian(single_clause3).diagonal
    assert sorted(diag.tolist()) == [0] * 7 + [1]
    assert diag[0] == 1  # all variables false


def test_worked_example_ground_energy():
    assert build_hamiltonian(worked_example()).ground_energy == 0


def test_diagonal_matches_direct_evaluation():
    f = generate_random_ksat(10, 45, 3, seed=9)
    diag = build_hamiltonian(f).diagonal
    clauses = f.to_dimacs_clauses()
    for s, bits in all_assignments(10):
        assert diag[s] == naive_unsat(clauses, bits)


def test_energy_bounds_and_psd():
    f = generate_random_ksat(8, 40, 3, seed=1)
    diag = build_hamiltonian(f).diagonal
    assert diag.min() >= 0 and diag.max() <= f.m


def test_lazy_mode_point_evaluation():
    f = generate_random_ksat(30, 90, 3, seed=2)
    h = build_hamiltonian(f, lazy=True)
    bits = np.zeros(30, dtype=bool)
    assert h.energy(0) == naive_unsat(f.to_dimacs_clauses(), bits.astype(int))
    with pytest.raises(LimitExceededError):
        build_hamiltonian(f)
    with pytest.raises(LimitExceededError):
        ground_states(h)


def test_two_literal_clause_expansion():
    f = CnfFormula.from_dimacs_clauses(2, [[1, 2]])
    ising = expand_to_ising(f)
    assert ising.coefficients == {(): 0.25, (0,): 0.25, (1,): 0.25, (0, 1): 0.25}


def test_negated_literal_flips_sign():
    f = CnfFormula.from_dimacs_clauses(2, [[1, -2]])
    ising = expand_to_ising(f)
    assert ising.coefficients == {(): 0.25, (0,): 0.25, (1,): -0.25, (0, 1): -0.25}
    other = expand_to_ising(f, convention="z=2x-1")
    assert other.coefficients == {(): 0.25, (0,): -0.25, (1,): 0.25, (0, 1): -0.25}


def test_empty_formula_expansion():
    assert expand_to_ising(CnfFormula(4, ())).coefficients == {}


@pytest.mark.parametrize("convention", ["z=1-2x", "z=2x-1"])
def test_polynomial_reproduces_diagonal(convention):
    for seed in range(10):
        f = generate_random_ksat(12, 12 * (1 + seed % 5), 3, seed=seed)
        ising = expand_to_ising(f, convention)
        assert ising.degree <= 3
        np.testing.assert_allclose(ising.evaluate_all(), build_hamiltonian(f).diagonal, atol=1e-9)


def test_pointwise_evaluation():
    f = worked_example()
    ising = expand_to_ising(f)
    assert ising.evaluate([1, 1, 0, 1, 0]) == 0
    assert ising.evaluate([0, 1, 0, 1, 1]) == 1  # first clause only


def test_table_round_trip():
    f = generate_random_ksat(9, 30, 3, seed=3)
    ising = expand_to_ising(f, "z=2x-1")
    back = IsingExpansion.from_table(ising.to_table())
    assert back.n == 9 and back.convention == "z=2x-1"
    assert back.coefficients == ising.coefficients


def test_ground_states_unit():
    f = CnfFormula.from_dimacs_clauses(1, [[1]])
    e0, states = ground_states(build_hamiltonian(f))
    assert e0 == 0 and states.tolist() == [1]


def test_ground_states_degenerate(contradiction):
    e0, states = ground_states(build_hamiltonian(contradiction))
    assert e0 == 1 and states.tolist() == [0, 1]


def test_ground_states_match_brute_force_argmin():
    f = generate_random_ksat(10, 60, 3, seed=21)
    clauses = f.to_dimacs_clauses()
    counts = [naive_unsat(clauses, bits) for _, bits in all_assignments(10)]
    best = min(counts)
    e0, states = ground_states(build_hamiltonian(f))
    assert e0 == best == brute_force_maxsat(f).min_unsat
    assert states.tolist() == [s for s, c in enumerate(counts) if c == best]
