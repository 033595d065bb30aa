"""Ground-state probability of the thermal distribution ``p(s) ~ exp(-beta E(s))``.

Energies are violated-clause counts and ``beta`` is dimensionless (k_B = 1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import FormulaDomainError, LimitExceededError
from .hamiltonian import DiagonalHamiltonian, TABLE_LIMIT
from .solvers import EXHAUSTIVE_LIMIT

MCMC_RNG = "numba np.random (MT19937), one stream per chain"


@dataclass(frozen=True)
class GibbsSpec:
    beta: float
    hamiltonian: DiagonalHamiltonian

    def __post_init__(self):
        if not self.beta >= 0:
            raise FormulaDomainError(f"beta must be nonnegative, got {self.beta}")


@dataclass(frozen=True)
class GroundProbability:
    value: float
    method: str  # "exact" or "mcmc"
    std_error: float = 0.0
    samples_used: int = 0
    acceptance_rate: float | None = None
    ground_energy: int | None = None
    # True when the reference energy is the best one seen, not the proven minimum
    lower_bound_reference: bool = False


def exact_ground_probability(spec: GibbsSpec, limit: int = EXHAUSTIVE_LIMIT) -> GroundProbability:
    h = spec.hamiltonian
    if h.n > limit or h.lazy:
        raise LimitExceededError("exact_ground_probability", h.n, limit)
    table = h.diagonal
    e0 = int(table.min())
    counts = np.bincount(table - e0)
    # shift by the ground energy so the largest weight is exactly 1
    weights = np.exp(-spec.beta * np.arange(counts.size, dtype=float))
    z = float(np.dot(counts, weights))
    value = float(counts[0]) / z
    return GroundProbability(min(value, 1.0), "exact", 0.0, 1 << h.n, None, e0)


# --------------------------------------------------------------------------
# Metropolis

def _occurrences(formula):
    """Per-variable CSR of (clause id, literal is negated)."""
    n = formula.n
    buckets = [[] for _ in range(n)]
    for j, clause in enumerate(formula.clauses):
        for lit in clause:
            buckets[lit.variable].append((j, int(lit.negated)))
    ptr = np.zeros(n + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(b) for b in buckets])
    flat = [x for b in buckets for x in b]
    clause_ids = np.array([c for c, _ in flat], dtype=np.int64)
    negs = np.array([s for _, s in flat], dtype=np.int64)
    return ptr, clause_ids, negs


@numba.njit(cache=True)
def _metropolis_chain(n, m, ptr, clause_ids, negs, beta, sweeps, burn_in,
                      seed, e_ref, record_trace):
    np.random.seed(seed)
    x = np.empty(n, dtype=np.int64)
    for i in range(n):
        x[i] = np.random.randint(0, 2)
    n_true = np.zeros(m, dtype=np.int64)
    for v in range(n):
        for t in range(ptr[v], ptr[v + 1]):
            if x[v] != negs[t]:
                n_true[clause_ids[t]] += 1
    energy = 0
    for c in range(m):
        if n_true[c] == 0:
            energy += 1
    best = energy
    hit_series = np.zeros(sweeps, dtype=np.int64)
    samples = 0
    accepted = 0
    proposals = 0
    steps = (burn_in + sweeps) * n
    trace = np.empty(steps if record_trace else 0, dtype=np.int64)
    for step in range(steps):
        v = np.random.randint(0, n)
        delta = 0
        for t in range(ptr[v], ptr[v + 1]):
            c = clause_ids[t]
            if x[v] != negs[t]:
                if n_true[c] == 1:
                    delta += 1
            elif n_true[c] == 0:
                delta -= 1
        u = np.random.random()
        proposals += 1
        if delta <= 0 or u < np.exp(-beta * delta):
            accepted += 1
            for t in range(ptr[v], ptr[v + 1]):
                c = clause_ids[t]
                if x[v] != negs[t]:
                    n_true[c] -= 1
                else:
                    n_true[c] += 1
            x[v] = 1 - x[v]
            energy += delta
            if energy < best:
                best = energy
        if record_trace:
            s = 0
            for i in range(n):
                s |= x[i] << i
            trace[step] = s
        # one sample at the end of every post-burn-in sweep
        if (step + 1) % n == 0 and step + 1 > burn_in * n:
            if energy == e_ref:
                hit_series[samples] = 1
            samples += 1
    return hit_series, accepted, proposals, best, trace


def _chain_seeds(seed, chains):
    ss = np.random.SeedSequence(seed)
    return [int(c.generate_state(1, dtype=np.uint32)[0]) for c in ss.spawn(chains)]


def metropolis_ground_probability(spec: GibbsSpec, sweeps: int = 200,
                                  burn_in: int | None = None, chains: int = 32,
                                  seed: int = 0,
                                  limit: int = TABLE_LIMIT) -> GroundProbability:
    """Single-spin-flip Metropolis estimate of the ground-state probability.

    One sweep is ``n`` uniformly chosen flip proposals, accepted with
    probability ``min(1, exp(-beta * dE))``; the chain is sampled once per
    sweep after ``burn_in`` sweeps (default ``10 * n``). Chains start from uniform
    random states with independent streams derived from ``(seed, chain)``.
    The standard error comes from the spread of per-chain estimates, or from
    10 batch means of the sample series when there is a single chain.

    When the Hamiltonian is too large for exact minimisation the reference
    energy is the best energy any chain visited; in that case a first pass
    finds it, the chains are rerun, and the result is flagged.
    """
    if sweeps < 1 or chains < 1:
        raise FormulaDomainError("sweeps and chains must be >= 1")
    h = spec.hamiltonian
    f = h.formula
    if f.n == 0:
        return GroundProbability(1.0, "mcmc", 0.0, 0, 1.0, 0)
    burn = 10 * f.n if burn_in is None else int(burn_in)
    ptr, cids, negs = _occurrences(f)
    seeds = _chain_seeds(seed, chains)
    lower_bound = h.lazy or h.n > limit
    if lower_bound:
        e_ref = min(
            _metropolis_chain(f.n, f.m, ptr, cids, negs, float(spec.beta), sweeps,
                              burn, s, -1, False)[3]
            for s in seeds
        )
    else:
        e_ref = h.ground_energy

    series = []
    acc = prop = 0
    for s in seeds:
        hit_series, a, p, _, _ = _metropolis_chain(
            f.n, f.m, ptr, cids, negs, float(spec.beta), sweeps, burn, s, e_ref, False
        )
        series.append(hit_series)
        acc += a
        prop += p
    if chains == 1:
        estimates = np.array([b.mean() for b in np.array_split(series[0], min(10, sweeps))])
    else:
        estimates = np.array([h.mean() for h in series])
    used = chains * sweeps
    value = float(np.mean([h.mean() for h in series]))
    se = float(estimates.std(ddof=1) / np.sqrt(estimates.size)) if estimates.size > 1 else float("inf")
    return GroundProbability(value, "mcmc", se, used, acc / prop, int(e_ref), lower_bound)


def metropolis_trajectory(h: DiagonalHamiltonian, beta: float, steps: int, seed: int = 0):
    """State index after each of ``steps`` single-flip proposals (for diagnostics)."""
    f = h.formula
    ptr, cids, negs = _occurrences(f)
    sweeps = -(-steps // f.n)
    *_, trace = _metropolis_chain(f.n, f.m, ptr, cids, negs, float(beta), sweeps, 0,
                                  _chain_seeds(seed, 1)[0], -1, True)
    return trace[:steps]
