from functools import reduce

import numpy as np
import pytest
from scipy.linalg import expm

from phasebench.errors import FormulaDomainError, LimitExceededError
from phasebench.hamiltonian import build_hamiltonian
from phasebench.qaoa import (
    QaoaParams,
    apply_mixer,
    apply_mixer_generator,
    apply_phase_separator,
    expectation,
    finite_difference_gradient,
    initial_plus_state,
    optimize_qaoa,
    qaoa_expectation,
    qaoa_gradient,
    qaoa_state,
)
from phasebench.sat import CnfFormula, generate_random_ksat

X = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def dense_b(n):
    # qubit q is bit q of the index, i.e. the rightmost Kronecker factor is qubit 0
    terms = []
    for q in range(n):
        ops = [X if i == q else I2 for i in reversed(range(n))]
        terms.append(reduce(np.kron, ops))
    return sum(terms)


def dense_state(h, params):
    n = h.n
    V = np.diag(h.diagonal.astype(float))
    B = dense_b(n)
    psi = np.full(2**n, 2 ** (-n / 2), dtype=complex)
    for g, b in zip(params.gamma, params.beta):
        psi = expm(-1j * b * B) @ (expm(-1j * g * V) @ psi)
    return psi


def random_state(n, rng):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


def test_plus_state():
    np.testing.assert_allclose(initial_plus_state(1), [2**-0.5, 2**-0.5])
    psi = initial_plus_state(3)
    np.testing.assert_allclose(psi, 2**-1.5)
    assert np.vdot(psi, psi).real == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(LimitExceededError):
        initial_plus_state(25)


@pytest.mark.parametrize("n,m,k", [(3, 5, 3), (8, 30, 2), (12, 50, 3), (20, 60, 3)])
def test_plus_state_expectation(n, m, k):
    h = build_hamiltonian(generate_random_ksat(n, m, k, seed=n))
    assert expectation(initial_plus_state(n), h) == pytest.approx(m * 2.0**-k, abs=1e-10)


def test_phase_separator_identities():
    h = build_hamiltonian(generate_random_ksat(4, 9, 3, seed=0))
    psi = random_state(4, np.random.default_rng(0))
    np.testing.assert_array_equal(apply_phase_separator(psi, h, 0.0), psi)
    np.testing.assert_allclose(apply_phase_separator(psi, h, 2 * np.pi), psi, atol=1e-12)
    with pytest.raises(FormulaDomainError):
        apply_phase_separator(psi[:8], h, 0.3)


def test_phase_separator_matches_dense():
    h = build_hamiltonian(CnfFormula.from_dimacs_clauses(2, [[1, -2]]))
    psi = random_state(2, np.random.default_rng(1))
    for g in (0.1, 0.7, 2.5):
        dense = expm(-1j * g * np.diag(h.diagonal.astype(float))) @ psi
        np.testing.assert_allclose(apply_phase_separator(psi, h, g), dense, atol=1e-10)


def test_mixer_identities():
    psi = random_state(3, np.random.default_rng(2))
    np.testing.assert_allclose(apply_mixer(psi, 0.0), psi, atol=1e-15)
    plus = initial_plus_state(5)
    b = 0.37
    np.testing.assert_allclose(apply_mixer(plus, b), np.exp(-1j * b * 5) * plus, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mixer_matches_kronecker_oracle(n):
    rng = np.random.default_rng(n)
    psi = random_state(n, rng)
    for b in rng.uniform(0, np.pi, 4):
        single = expm(-1j * b * X)
        dense = reduce(np.kron, [single] * n)
        np.testing.assert_allclose(apply_mixer(psi, b), dense @ psi, atol=1e-10)
        np.testing.assert_allclose(apply_mixer_generator(psi), dense_b(n) @ psi, atol=1e-12)


def test_norm_preserved_through_deep_circuit():
    rng = np.random.default_rng(3)
    h = build_hamiltonian(generate_random_ksat(10, 40, 3, seed=3))
    psi = initial_plus_state(10)
    for _ in range(10):
        psi = apply_phase_separator(psi, h, rng.uniform(0, 2 * np.pi))
        assert abs(np.vdot(psi, psi).real - 1) < 1e-10
        psi = apply_mixer(psi, rng.uniform(0, np.pi))
        assert abs(np.vdot(psi, psi).real - 1) < 1e-10


def test_expectation_depth_zero_and_zero_gamma():
    f = generate_random_ksat(6, 14, 3, seed=5)
    h = build_hamiltonian(f)
    assert qaoa_expectation(h, QaoaParams.zeros(0)) == pytest.approx(14 / 8, abs=1e-12)
    params = QaoaParams([0.0, 0.0], [0.4, 1.3])
    assert qaoa_expectation(h, params) == pytest.approx(14 / 8, abs=1e-10)


def test_expectation_matches_dense_simulation_grid():
    h = build_hamiltonian(CnfFormula.from_dimacs_clauses(2, [[1, 2]]))
    for g in np.linspace(0, 2 * np.pi, 7):
        for b in np.linspace(0, np.pi, 7):
            params = QaoaParams([g], [b])
            psi = dense_state(h, params)
            dense = float(np.real(np.vdot(psi, h.diagonal * psi)))
            assert qaoa_expectation(h, params) == pytest.approx(dense, abs=1e-8)


def test_compiled_path_matches_gate_composition():
    rng = np.random.default_rng(4)
    h = build_hamiltonian(generate_random_ksat(7, 20, 3, seed=4))
    for _ in range(5):
        params = QaoaParams(rng.uniform(0, 6, 3), rng.uniform(0, 3, 3))
        assert qaoa_expectation(h, params) == pytest.approx(
            expectation(qaoa_state(h, params), h), abs=1e-10)
        np.testing.assert_allclose(qaoa_state(h, params), dense_state(h, params), atol=1e-10)


def test_expectation_bounds_and_periodicity():
    rng = np.random.default_rng(6)
    f = generate_random_ksat(6, 30, 3, seed=6)
    h = build_hamiltonian(f)
    for _ in range(20):
        params = QaoaParams(rng.uniform(0, 6, 2), rng.uniform(0, 3, 2))
        val = qaoa_expectation(h, params)
        assert h.ground_energy - 1e-10 <= val <= h.max_energy + 1e-10
        shifted = QaoaParams(params.gamma + [2 * np.pi, 0], params.beta + [0, np.pi])
        assert qaoa_expectation(h, shifted) == pytest.approx(val, abs=1e-8)


def dense_gradient_p1(h, g, b):
    V = np.diag(h.diagonal.astype(float)).astype(complex)
    B = dense_b(h.n)
    plus = np.full(2**h.n, 2 ** (-h.n / 2), dtype=complex)
    phi = expm(-1j * g * V) @ plus
    M = expm(-1j * b * B)
    psi = M @ phi
    d_beta = 1j * np.vdot(psi, (B @ V - V @ B) @ psi)
    W = M.conj().T @ V @ M
    d_gamma = 1j * np.vdot(phi, (V @ W - W @ V) @ phi)
    return np.array([d_gamma.real, d_beta.real])


def test_gradient_matches_dense_commutator_formula():
    h = build_hamiltonian(generate_random_ksat(3, 5, 2, seed=8))
    for g, b in [(0.0, 0.0), (0.3, 0.2), (1.7, 2.4)]:
        params = QaoaParams([g], [b])
        oracle = dense_gradient_p1(h, g, b)
        np.testing.assert_allclose(finite_difference_gradient(h, params, 1e-5), oracle, atol=1e-8)
        np.testing.assert_allclose(qaoa_gradient(h, params), oracle, atol=1e-10)


def test_gradient_vanishes_at_stationary_origin():
    h = build_hamiltonian(generate_random_ksat(5, 12, 3, seed=2))
    grad = finite_difference_gradient(h, QaoaParams.zeros(2), 1e-4)
    np.testing.assert_allclose(grad, 0, atol=1e-10)


def test_finite_difference_second_order():
    rng = np.random.default_rng(11)
    h = build_hamiltonian(generate_random_ksat(6, 18, 3, seed=11))
    params = QaoaParams(rng.uniform(0, 6, 2), rng.uniform(0, 3, 2))
    exact = qaoa_gradient(h, params)
    e1 = np.abs(finite_difference_gradient(h, params, 0.04) - exact)
    e2 = np.abs(finite_difference_gradient(h, params, 0.02) - exact)
    ratio = np.linalg.norm(e1) / np.linalg.norm(e2)
    assert 3.5 < ratio < 4.5
    with pytest.raises(FormulaDomainError):
        finite_difference_gradient(h, params, 0.0)


def test_optimize_depth_zero_is_plus_state_baseline():
    f = generate_random_ksat(6, 30, 3, seed=1)
    h = build_hamiltonian(f)
    out = optimize_qaoa(h, 0)
    assert out.error == pytest.approx(30 / 8 - h.ground_energy, abs=1e-12)


def test_optimize_empty_formula():
    h = build_hamiltonian(CnfFormula(4, (), 3))
    for p in (0, 2):
        assert optimize_qaoa(h, p).error == 0


def test_optimize_outcome_invariants():
    h = build_hamiltonian(generate_random_ksat(6, 18, 3, seed=3))
    prev = None
    best = []
    for p in (1, 2, 3):
        out = optimize_qaoa(h, p, restarts=5, seed=0, warm_start=prev)
        prev = out.best_params
        assert out.best_params.p == p
        assert out.error >= -1e-8
        assert all(out.best_expectation <= v for _, v in out.optimizer_trace)
        assert out.restarts_used == 5
        best.append(out.best_expectation)
    assert best[1] <= best[0] + 1e-6 and best[2] <= best[1] + 1e-6


def test_optimize_deterministic_and_bfgs_agrees():
    h = build_hamiltonian(generate_random_ksat(5, 10, 3, seed=6))
    a = optimize_qaoa(h, 2, restarts=4, seed=3)
    b = optimize_qaoa(h, 2, restarts=4, seed=3)
    assert a.best_expectation == b.best_expectation
    np.testing.assert_array_equal(a.best_params.to_vector(), b.best_params.to_vector())
    c = optimize_qaoa(h, 2, restarts=20, seed=3, method="bfgs")
    assert c.best_expectation == pytest.approx(a.best_expectation, abs=1e-3)


def test_optimize_without_ground_energy():
    h = build_hamiltonian(generate_random_ksat(6, 10, 3, seed=6))
    out = optimize_qaoa(h, 1, restarts=2, exhaustive_limit=3)
    assert out.error is None and out.ground_energy is None
    assert np.isfinite(out.best_expectation)
