"""Statevector QAOA on the diagonal MAX-SAT Hamiltonian.

A state is a complex ``ndarray`` of length ``2**n``; qubit ``i`` is bit ``i``
of the basis index, matching the variable order of the formula. One layer is
the phase separator ``exp(-i gamma V)`` followed by the transverse-field mixer
``exp(-i beta sum_i X_i)``; the circuit starts from ``|+>^n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.optimize import minimize

from .errors import FormulaDomainError, LimitExceededError
from .hamiltonian import DiagonalHamiltonian
from .solvers import EXHAUSTIVE_LIMIT

SIMULATOR_LIMIT = 24
MIXER = "transverse field: B = sum_i X_i, start |+>^n"

GAMMA_PERIOD = 2 * np.pi  # integer spectrum
BETA_PERIOD = np.pi


@dataclass(frozen=True)
class QaoaParams:
    gamma: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.gamma, dtype=float)).copy()
        b = np.atleast_1d(np.asarray(self.beta, dtype=float)).copy()
        if g.shape != b.shape or g.ndim != 1:
            raise FormulaDomainError("gamma and beta must be 1-d vectors of equal length")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "beta", b)

    @property
    def p(self) -> int:
        return self.gamma.size

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.gamma, self.beta])

    @classmethod
    def from_vector(cls, x) -> "QaoaParams":
        x = np.asarray(x, dtype=float)
        p = x.size // 2
        return cls(x[:p], x[p:])

    @classmethod
    def zeros(cls, p: int) -> "QaoaParams":
        return cls(np.zeros(p), np.zeros(p))

    def extended(self, p: int) -> "QaoaParams":
        """Pad with identity layers (gamma = beta = 0) up to depth ``p``."""
        pad = p - self.p
        return QaoaParams(np.r_[self.gamma, np.zeros(pad)], np.r_[self.beta, np.zeros(pad)])

    def to_dict(self) -> dict:
        return {"gamma": self.gamma.tolist(), "beta": self.beta.tolist()}


@dataclass
class QaoaOutcome:
    best_params: QaoaParams
    best_expectation: float
    error: float | None  # None when the exact ground energy is unavailable
    ground_energy: int | None
    optimizer_trace: list = field(default_factory=list)  # (params, value) per restart
    restarts_used: int = 0
    converged: bool = True
    evaluations: int = 0


# --------------------------------------------------------------------------
# gates

def initial_plus_state(n: int, limit: int = SIMULATOR_LIMIT) -> np.ndarray:
    if n < 1:
        raise FormulaDomainError("need at least one qubit")
    if n > limit:
        raise LimitExceededError("statevector", n, limit)
    return np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128)


def _num_qubits(state) -> int:
    n = int(state.size).bit_length() - 1
    if 1 << n != state.size:
        raise FormulaDomainError(f"state length {state.size} is not a power of two")
    return n


def apply_phase_separator(state, h: DiagonalHamiltonian, gamma: float) -> np.ndarray:
    """Multiply amplitude ``s`` by ``exp(-i gamma E(s))``."""
    if state.size != 1 << h.n:
        raise FormulaDomainError(f"state has dimension {state.size}, Hamiltonian 2**{h.n}")
    return state * np.exp(-1j * gamma * h.diagonal)


def apply_mixer(state, beta: float) -> np.ndarray:
    """Apply ``exp(-i beta X)`` to every qubit."""
    n = _num_qubits(state)
    c, s = np.cos(beta), -1j * np.sin(beta)
    out = np.array(state, dtype=np.complex128, copy=True)
    for q in range(n):
        v = out.reshape(-1, 2, 1 << q)
        a = v[:, 0, :].copy()
        b = v[:, 1, :]
        v[:, 0, :] = c * a + s * b
        v[:, 1, :] = c * b + s * a
    return out


def apply_mixer_generator(state) -> np.ndarray:
    """``sum_i X_i |state>``."""
    n = _num_qubits(state)
    out = np.zeros_like(state)
    for q in range(n):
        out += state.reshape(-1, 2, 1 << q)[:, ::-1, :].reshape(-1)
    return out


def expectation(state, h: DiagonalHamiltonian) -> float:
    return float(np.dot(np.abs(state) ** 2, h.diagonal))


def qaoa_state(h: DiagonalHamiltonian, params: QaoaParams) -> np.ndarray:
    psi = initial_plus_state(h.n)
    for g, b in zip(params.gamma, params.beta):
        psi = apply_mixer(apply_phase_separator(psi, h, g), b)
    return psi


# --------------------------------------------------------------------------
# compiled evaluation path used by the optimizer

@numba.njit(cache=True)
def _mix_inplace(psi, n, beta):
    c = np.cos(beta)
    s = -1j * np.sin(beta)
    dim = psi.size
    for q in range(n):
        stride = 1 << q
        for base in range(0, dim, 2 * stride):
            for j in range(base, base + stride):
                a = psi[j]
                b = psi[j + stride]
                psi[j] = c * a + s * b
                psi[j + stride] = c * b + s * a


@numba.njit(cache=True)
def _generator(psi, n):
    out = np.zeros_like(psi)
    for q in range(n):
        stride = 1 << q
        for j in range(psi.size):
            out[j] += psi[j ^ stride]
    return out


@numba.njit(cache=True)
def _evolve(energies, n, gammas, betas):
    dim = energies.size
    psi = np.full(dim, 2.0 ** (-n / 2.0) + 0j)
    for k in range(gammas.size):
        g = gammas[k]
        for j in range(dim):
            psi[j] *= np.exp(-1j * g * energies[j])
        _mix_inplace(psi, n, betas[k])
    return psi


@numba.njit(cache=True)
def _expect(energies, n, gammas, betas):
    psi = _evolve(energies, n, gammas, betas)
    acc = 0.0
    for j in range(psi.size):
        acc += (psi[j].real ** 2 + psi[j].imag ** 2) * energies[j]
    return acc


@numba.njit(cache=True)
def _expect_and_grad(energies, n, gammas, betas):
    # adjoint differentiation: walk the circuit backwards carrying V|psi>
    p = gammas.size
    psi = _evolve(energies, n, gammas, betas)
    value = 0.0
    for j in range(psi.size):
        value += (psi[j].real ** 2 + psi[j].imag ** 2) * energies[j]
    lam = psi * energies
    gg = np.zeros(p)
    gb = np.zeros(p)
    for k in range(p - 1, -1, -1):
        bpsi = _generator(psi, n)
        gb[k] = 2.0 * np.vdot(lam, bpsi).imag
        _mix_inplace(psi, n, -betas[k])
        _mix_inplace(lam, n, -betas[k])
        gg[k] = 2.0 * np.vdot(lam, psi * energies).imag
        g = gammas[k]
        for j in range(psi.size):
            ph = np.exp(1j * g * energies[j])
            psi[j] *= ph
            lam[j] *= ph
    return value, gg, gb


def _energies(h: DiagonalHamiltonian) -> np.ndarray:
    if h.n > SIMULATOR_LIMIT:
        raise LimitExceededError("statevector", h.n, SIMULATOR_LIMIT)
    return h.diagonal.astype(np.float64)


def qaoa_expectation(h: DiagonalHamiltonian, params: QaoaParams) -> float:
    """``<psi(gamma, beta)| V |psi(gamma, beta)>`` for the depth-p ansatz."""
    if h.n < 1:
        return float(h.m)  # no qubits: the only "state" violates every (empty) clause
    return float(_expect(_energies(h), h.n, params.gamma, params.beta))


def qaoa_gradient(h: DiagonalHamiltonian, params: QaoaParams) -> np.ndarray:
    """Analytic gradient ``[d/dgamma..., d/dbeta...]`` by adjoint differentiation."""
    _, gg, gb = _expect_and_grad(_energies(h), h.n, params.gamma, params.beta)
    return np.concatenate([gg, gb])


def finite_difference_gradient(h: DiagonalHamiltonian, params: QaoaParams,
                               step: float = 1e-4) -> np.ndarray:
    """Central differences of the expectation in each of the 2p angles."""
    if step <= 0:
        raise FormulaDomainError("step must be positive")
    x = params.to_vector()
    grad = np.empty_like(x)
    for i in range(x.size):
        up, down = x.copy(), x.copy()
        up[i] += step
        down[i] -= step
        grad[i] = (qaoa_expectation(h, QaoaParams.from_vector(up))
                   - qaoa_expectation(h, QaoaParams.from_vector(down))) / (2 * step)
    return grad


# --------------------------------------------------------------------------
# outer loop

def _random_start(rng, p):
    return np.concatenate([rng.uniform(0, GAMMA_PERIOD, p), rng.uniform(0, BETA_PERIOD, p)])


def optimize_qaoa(h: DiagonalHamiltonian, p: int, restarts: int = 50,
                  iterations: int = 500, seed: int = 0, method: str = "nelder-mead",
                  warm_start: QaoaParams | None = None,
                  exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> QaoaOutcome:
    """Multi-start local minimisation of the QAOA expectation over 2p angles.

    Starts are uniform in ``[0, 2pi)^p x [0, pi)^p``. ``warm_start`` (a
    shallower solution, padded with identity layers) is tried first and
    counts as one of the restarts. ``method`` is ``"nelder-mead"`` (default,
    gradient-free) or ``"bfgs"`` (L-BFGS with the adjoint gradient).
    """
    if p < 0 or restarts < 1:
        raise FormulaDomainError("need p >= 0 and at least one restart")
    ground = h.ground_energy if h.n <= exhaustive_limit and not h.lazy else None

    if p == 0 or h.m == 0 or h.n == 0:
        params = QaoaParams.zeros(p)
        value = qaoa_expectation(h, params)
        err = None if ground is None else value - ground
        return QaoaOutcome(params, value, err, ground, [(params, value)], 0, True, 1)

    energies = _energies(h)
    n = h.n
    rng = np.random.default_rng(seed)

    def fun(x):
        return _expect(energies, n, x[:p], x[p:])

    def fun_grad(x):
        v, gg, gb = _expect_and_grad(energies, n, x[:p], x[p:])
        return v, np.concatenate([gg, gb])

    starts = []
    if warm_start is not None:
        starts.append(warm_start.extended(p).to_vector())
    while len(starts) < restarts:
        starts.append(_random_start(rng, p))

    trace = []
    best_x, best_val, best_ok = None, np.inf, True
    evals = 0
    for x0 in starts:
        if method == "nelder-mead":
            res = minimize(fun, x0, method="Nelder-Mead",
                           options={"maxiter": iterations, "xatol": 1e-6, "fatol": 1e-8})
        elif method == "bfgs":
            res = minimize(fun_grad, x0, jac=True, method="L-BFGS-B",
                           options={"maxiter": iterations, "gtol": 1e-8})
        else:
            raise FormulaDomainError(f"unknown optimizer {method!r}")
        evals += int(res.nfev)
        x, val = res.x, float(res.fun)
        x0_val = fun(x0)
        evals += 1
        if x0_val < val:  # never report worse than where we started
            x, val = x0, float(x0_val)
        trace.append((QaoaParams.from_vector(x), val))
        if val < best_val:
            best_x, best_val, best_ok = x, val, bool(res.success)
    params = QaoaParams.from_vector(best_x)
    err = None if ground is None else best_val - ground
    return QaoaOutcome(params, best_val, err, ground, trace, len(starts), best_ok, evals)
