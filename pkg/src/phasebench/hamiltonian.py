"""Diagonal MAX-SAT Hamiltonian and its expansion into spin couplings.

The operator is diagonal in the computational basis; its entry at basis state
``s`` is the number of clauses violated by the assignment encoded in ``s``
(variable ``i`` at bit ``i``). It is real, nonnegative and integer valued.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import FormulaDomainError, LimitExceededError
from .sat import CnfFormula, count_unsatisfied, index_to_bits, unsat_table

#: Dense tables are built up to this many variables.
TABLE_LIMIT = 26

#: Spin conventions. ``"z=1-2x"`` maps x=0 to z=+1.
SPIN_CONVENTIONS = ("z=1-2x", "z=2x-1")


class DiagonalHamiltonian:
    """Violated-clause-count operator for a CNF formula.

    Dense mode stores all ``2**n`` energies; lazy mode evaluates clauses on
    demand, which is all the Metropolis sampler needs.
    """

    def __init__(self, formula: CnfFormula, lazy: bool = False,
                 table_limit: int = TABLE_LIMIT):
        self.formula = formula
        self.n = formula.n
        self.m = formula.m
        self.lazy = lazy
        if lazy:
            self._table = None
        else:
            if formula.n > table_limit:
                raise LimitExceededError("dense Hamiltonian table", formula.n, table_limit)
            self._table = unsat_table(formula)
            self._table.flags.writeable = False

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def diagonal(self) -> np.ndarray:
        if self._table is None:
            raise LimitExceededError("materialized diagonal (lazy Hamiltonian)", self.n, -1)
        return self._table

    def energy(self, s: int) -> int:
        if self._table is not None:
            return int(self._table[s])
        return count_unsatisfied(self.formula, index_to_bits(s, self.n))

    def energy_of(self, assignment) -> int:
        return count_unsatisfied(self.formula, assignment)

    @property
    def ground_energy(self) -> int:
        return int(self.diagonal.min())

    @property
    def max_energy(self) -> int:
        return int(self.diagonal.max())

    def __repr__(self):
        mode = "lazy" if self.lazy else "dense"
        return f"DiagonalHamiltonian(n={self.n}, m={self.m}, {mode})"


def build_hamiltonian(formula: CnfFormula, lazy: bool = False,
                      table_limit: int = TABLE_LIMIT) -> DiagonalHamiltonian:
    return DiagonalHamiltonian(formula, lazy=lazy, table_limit=table_limit)


def ground_states(h: DiagonalHamiltonian, limit: int = TABLE_LIMIT):
    """``(ground energy, sorted array of minimizing basis indices)``."""
    if h.n > limit or h.lazy:
        raise LimitExceededError("ground_states", h.n, limit)
    table = h.diagonal
    e0 = int(table.min())
    return e0, np.flatnonzero(table == e0)


# --------------------------------------------------------------------------
# Ising expansion

@dataclass
class IsingExpansion:
    """Multilinear polynomial in +-1 spins: ``sum_S c_S prod_{i in S} z_i``.

    Keys are sorted tuples of spin indices; the empty tuple is the constant.
    """

    n: int
    coefficients: dict = field(default_factory=dict)
    convention: str = "z=1-2x"

    @property
    def degree(self) -> int:
        return max((len(s) for s in self.coefficients), default=0)

    def spins(self, assignment) -> np.ndarray:
        x = np.asarray(assignment, dtype=np.int64)
        return 1 - 2 * x if self.convention == "z=1-2x" else 2 * x - 1

    def evaluate(self, assignment) -> float:
        z = self.spins(assignment)
        return float(sum(c * np.prod(z[list(S)]) for S, c in self.coefficients.items()))

    def evaluate_all(self) -> np.ndarray:
        """Polynomial value on every basis state (variable i at bit i)."""
        s = np.arange(1 << self.n, dtype=np.int64)
        x = (s[:, None] >> np.arange(self.n)) & 1
        z = 1 - 2 * x if self.convention == "z=1-2x" else 2 * x - 1
        out = np.zeros(s.size)
        for S, c in self.coefficients.items():
            term = np.full(s.size, c, dtype=float)
            for i in S:
                term *= z[:, i]
            out += term
        return out

    def to_table(self) -> str:
        """Plain-text export, one ``indices : coefficient`` line per term."""
        lines = [f"# n={self.n} convention={self.convention}"]
        for S in sorted(self.coefficients, key=lambda t: (len(t), t)):
            idx = " ".join(str(i) for i in S) if S else "-"
            lines.append(f"{idx} : {self.coefficients[S]!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_table(cls, text: str) -> "IsingExpansion":
        n, convention, coeffs = None, "z=1-2x", {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    key, _, val = tok.partition("=")
                    if key == "n":
                        n = int(val)
                    elif key == "convention":
                        convention = val
                continue
            idx, _, coef = line.partition(":")
            idx = idx.strip()
            S = () if idx == "-" else tuple(int(t) for t in idx.split())
            coeffs[S] = float(coef)
        if n is None:
            raise FormulaDomainError("Ising table lacks the '# n=...' header")
        return cls(n, coeffs, convention)


def expand_to_ising(formula: CnfFormula, convention: str = "z=1-2x") -> IsingExpansion:
    """Expand the violated-clause count into spin couplings of order <= k.

    A literal is false with indicator ``(1 + sign * z)/2`` where ``sign`` is
    +1 for a positive literal under ``z = 1 - 2x`` and flips with negation or
    with the opposite convention. A clause is violated iff all its literals
    are false, so it contributes ``prod (1 + sign_j z_j) / 2**w``.
    """
    if convention not in SPIN_CONVENTIONS:
        raise FormulaDomainError(f"unknown spin convention {convention!r}")
    flip = 1 if convention == "z=1-2x" else -1
    coeffs: dict = {}
    for clause in formula.clauses:
        w = len(clause)
        scale = 1.0 / (1 << w)
        signs = {lit.variable: flip * (-1 if lit.negated else 1) for lit in clause}
        vs = sorted(signs)
        for r in range(w + 1):
            for S in combinations(vs, r):
                c = scale
                for v in S:
                    c *= signs[v]
                coeffs[S] = coeffs.get(S, 0.0) + c
    coeffs = {S: c for S, c in coeffs.items() if c != 0.0}
    return IsingExpansion(formula.n, coeffs, convention)
