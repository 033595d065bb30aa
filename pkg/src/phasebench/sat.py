"""CNF formulas, the uniform random k-SAT ensemble and DIMACS I/O.

Variables are 0-indexed internally. An assignment is a length-n boolean
vector; the computational-basis index of an assignment puts variable ``i`` at
bit ``i`` (little-endian), so ``s = sum(x[i] << i)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DimacsClauseCountError,
    DimacsHeaderError,
    DimacsLiteralError,
    DimacsWidthError,
    FormulaDomainError,
    InvalidEnsembleError,
)

#: Identifier of the bit generator used for ensemble generation.
RNG_ALGORITHM = "numpy.random.Generator(PCG64)"


class Literal(NamedTuple):
    variable: int
    negated: bool = False

    def to_dimacs(self) -> int:
        return -(self.variable + 1) if self.negated else self.variable + 1

    @classmethod
    def from_dimacs(cls, lit: int) -> "Literal":
        return cls(abs(lit) - 1, lit < 0)

    def value(self, x) -> bool:
        return bool(x[self.variable]) != self.negated


Clause = tuple  # tuple[Literal, ...]


def make_clause(lits: Iterable) -> Clause:
    """Build a clause from Literals or signed 1-indexed DIMACS integers."""
    out = []
    for lit in lits:
        if isinstance(lit, Literal):
            out.append(lit)
        elif isinstance(lit, tuple):
            out.append(Literal(int(lit[0]), bool(lit[1])))
        else:
            lit = int(lit)
            if lit == 0:
                raise FormulaDomainError("literal 0 is not a valid DIMACS literal")
            out.append(Literal.from_dimacs(lit))
    return tuple(out)


@dataclass(frozen=True)
class CnfFormula:
    """A CNF formula over ``n`` variables.

    ``k`` is the uniform clause width. Formulas read from DIMACS in relaxed
    mode may mix widths; those carry ``k=None``.
    """

    n: int
    clauses: tuple
    # determined by the clauses whenever m > 0, so left out of equality
    k: int | None = field(default=None, compare=False)
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        clauses = tuple(make_clause(c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if self.n < 0:
            raise FormulaDomainError(f"variable count must be nonnegative, got {self.n}")
        for j, clause in enumerate(clauses):
            vs = [lit.variable for lit in clause]
            if len(set(vs)) != len(vs):
                raise FormulaDomainError(f"clause {j} repeats a variable: {clause}")
            if any(v < 0 or v >= self.n for v in vs):
                raise FormulaDomainError(f"clause {j} has a variable outside [0, {self.n})")
            if self.k is not None and len(clause) != self.k:
                raise FormulaDomainError(
                    f"clause {j} has width {len(clause)}, expected uniform k={self.k}"
                )

    @classmethod
    def from_dimacs_clauses(cls, n, clauses, k=None) -> "CnfFormula":
        """Build from lists of signed 1-indexed ints; ``k`` inferred when uniform."""
        clauses = [make_clause(c) for c in clauses]
        if k is None:
            widths = {len(c) for c in clauses}
            if len(widths) == 1:
                k = widths.pop()
        return cls(n, tuple(clauses), k)

    @property
    def m(self) -> int:
        return len(self.clauses)

    @property
    def widths(self) -> np.ndarray:
        return np.array([len(c) for c in self.clauses], dtype=np.int64)

    @cached_property
    def arrays(self):
        """Padded ``(vars, negs, widths)`` arrays; padding uses variable -1."""
        width = max((len(c) for c in self.clauses), default=0)
        vars_ = np.full((self.m, width), -1, dtype=np.int64)
        negs = np.zeros((self.m, width), dtype=bool)
        for j, clause in enumerate(self.clauses):
            for i, lit in enumerate(clause):
                vars_[j, i] = lit.variable
                negs[j, i] = lit.negated
        return vars_, negs, self.widths

    def to_dimacs_clauses(self) -> list:
        return [[lit.to_dimacs() for lit in c] for c in self.clauses]

    def __hash__(self):
        return hash((self.n, self.clauses))


def worked_example() -> CnfFormula:
    """The 5-variable, 3-clause 3-SAT formula used throughout the docs and tests.

    (x1 v ~x2 v x3) ^ (~x1 v x4 v ~x5) ^ (x2 v x3 v ~x4)
    """
    return CnfFormula.from_dimacs_clauses(5, [[1, -2, 3], [-1, 4, -5], [2, 3, -4]])


# --------------------------------------------------------------------------
# ensemble generation

def generate_random_ksat(n: int, m: int, k: int, seed: int) -> CnfFormula:
    """Draw a formula from the uniform random k-SAT ensemble.

    Each of the ``m`` clauses picks ``k`` distinct variables uniformly at random
    and negates each independently with probability 1/2. Clauses are drawn
    independently, so duplicate clauses may occur. The result is a pure
    function of ``(n, m, k, seed)``.
    """
    if k < 1 or k > n:
        raise InvalidEnsembleError(f"need 1 <= k <= n, got k={k}, n={n}")
    if m < 0:
        raise InvalidEnsembleError(f"clause count must be nonnegative, got m={m}")
    rng = np.random.Generator(np.random.PCG64(seed))
    if 2 * k <= n:
        # rejection sampling: redraw rows that repeat a variable
        vars_ = rng.integers(0, n, size=(m, k))
        while True:
            srt = np.sort(vars_, axis=1)
            bad = np.flatnonzero((np.diff(srt, axis=1) == 0).any(axis=1))
            if bad.size == 0:
                break
            vars_[bad] = rng.integers(0, n, size=(bad.size, k))
    else:
        vars_ = np.argsort(rng.random((m, n)), axis=1)[:, :k]
    negs = rng.integers(0, 2, size=(m, k)).astype(bool)
    clauses = tuple(
        tuple(Literal(int(v), bool(s)) for v, s in zip(vrow, srow))
        for vrow, srow in zip(vars_, negs)
    )
    meta = {"rng": RNG_ALGORITHM, "seed": int(seed), "duplicates_allowed": True}
    return CnfFormula(n, clauses, k, meta)


def clauses_for_density(alpha: float, n: int) -> int:
    """Clause count for a nominal density: nearest integer to ``alpha * n``."""
    return int(round(alpha * n))


def clause_density(formula: CnfFormula) -> Fraction:
    """Exact clause-to-variable ratio m/n; ``float()`` it for the real value."""
    if formula.n <= 0:
        raise FormulaDomainError("clause density undefined for n = 0")
    return Fraction(formula.m, formula.n)


# --------------------------------------------------------------------------
# evaluation

def _as_bits(formula: CnfFormula, assignment) -> np.ndarray:
    bits = np.asarray(assignment, dtype=bool).ravel()
    if bits.shape[0] != formula.n:
        raise FormulaDomainError(
            f"assignment has length {bits.shape[0]}, formula has n={formula.n}"
        )
    return bits


def clause_satisfied(formula: CnfFormula, assignment) -> np.ndarray:
    """Boolean vector, one entry per clause."""
    bits = _as_bits(formula, assignment)
    vars_, negs, _ = formula.arrays
    if formula.m == 0:
        return np.zeros(0, dtype=bool)
    vals = bits[np.where(vars_ < 0, 0, vars_)] != negs
    vals &= vars_ >= 0
    return vals.any(axis=1)


def count_unsatisfied(formula: CnfFormula, assignment) -> int:
    """Number of clauses in which every literal is false."""
    return int(formula.m - clause_satisfied(formula, assignment).sum())


def count_satisfied(formula: CnfFormula, assignment) -> int:
    return int(clause_satisfied(formula, assignment).sum())


def index_to_bits(s: int, n: int) -> np.ndarray:
    return ((int(s) >> np.arange(n)) & 1).astype(bool)


def bits_to_index(bits) -> int:
    return int(sum(1 << i for i, b in enumerate(bits) if b))


def unsat_table(formula: CnfFormula) -> np.ndarray:
    """Violated-clause count for every one of the 2**n basis states.

    Each clause is falsified by exactly one pattern on its own variables, so
    the table accumulates ``(s & mask) == pattern`` clause by clause.
    """
    n = formula.n
    dtype = np.uint16 if formula.m < 2**16 else np.uint32
    table = np.zeros(1 << n, dtype=dtype)
    if formula.m == 0:
        return table
    s = np.arange(1 << n, dtype=np.int64)
    # clauses sharing a falsifying (mask, pattern) pair are counted once, then weighted
    patterns: dict = {}
    for clause in formula.clauses:
        mask = 0
        pattern = 0
        for lit in clause:
            mask |= 1 << lit.variable
            if lit.negated:
                pattern |= 1 << lit.variable
        patterns[(mask, pattern)] = patterns.get((mask, pattern), 0) + 1
    for (mask, pattern), mult in patterns.items():
        table += (mult * ((s & mask) == pattern)).astype(dtype)
    return table


# --------------------------------------------------------------------------
# DIMACS

def write_dimacs(formula: CnfFormula, comments: Sequence[str] = ()) -> str:
    """Serialize as DIMACS CNF: ``p cnf n m`` then one 0-terminated clause per line."""
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {formula.n} {formula.m}")
    for clause in formula.clauses:
        lines.append(" ".join(str(lit.to_dimacs()) for lit in clause) + " 0")
    return "\n".join(lines) + "\n"


def read_dimacs(text: str, relaxed: bool = False) -> CnfFormula:
    """Parse DIMACS CNF text.

    Strict mode (default) requires every clause to have the same width. With
    ``relaxed=True`` mixed widths are accepted and the formula gets ``k=None``.
    Clauses may span lines; a ``%`` line ends the clause section (SATLIB style).
    """
    header = None
    header_line = None
    clauses: list = []
    clause_lines: list = []
    current: list = []
    current_start = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if header is not None:
                raise DimacsHeaderError("duplicate problem line", lineno)
            fields = line.split()
            if len(fields) != 4 or fields[0] != "p" or fields[1] != "cnf":
                raise DimacsHeaderError(f"malformed problem line {line!r}", lineno)
            try:
                n, m = int(fields[2]), int(fields[3])
            except ValueError:
                raise DimacsHeaderError(f"non-integer counts in {line!r}", lineno) from None
            if n < 0 or m < 0:
                raise DimacsHeaderError(f"negative counts in {line!r}", lineno)
            header, header_line = (n, m), lineno
            continue
        if header is None:
            raise DimacsHeaderError("clause data before the 'p cnf' line", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsLiteralError(f"non-integer token {tok!r}", lineno) from None
            if current_start is None:
                current_start = lineno
            if lit == 0:
                if not current:
                    raise DimacsLiteralError("empty clause", lineno)
                clauses.append(current)
                clause_lines.append(current_start)
                current, current_start = [], None
                continue
            if abs(lit) > header[0]:
                raise DimacsLiteralError(
                    f"literal {lit} out of range for n={header[0]}", lineno
                )
            current.append(lit)
    if header is None:
        raise DimacsHeaderError("missing 'p cnf' line", None)
    if current:
        raise DimacsClauseCountError("last clause is not 0-terminated", current_start)
    n, m = header
    if len(clauses) != m:
        raise DimacsClauseCountError(
            f"header declares {m} clauses, found {len(clauses)}", header_line
        )
    for clause, lineno in zip(clauses, clause_lines):
        if len({abs(x) for x in clause}) != len(clause):
            raise DimacsLiteralError(f"clause repeats a variable: {clause}", lineno)
    widths = {len(c) for c in clauses}
    if len(widths) > 1 and not relaxed:
        w0 = len(clauses[0])
        for clause, lineno in zip(clauses, clause_lines):
            if len(clause) != w0:
                raise DimacsWidthError(
                    f"clause width {len(clause)} differs from {w0} (use relaxed mode)",
                    lineno,
                )
    k = widths.pop() if len(widths) == 1 else None
    return CnfFormula.from_dimacs_clauses(n, clauses, k)


def load_dimacs(path, relaxed: bool = False) -> CnfFormula:
    with open(path) as fh:
        return read_dimacs(fh.read(), relaxed=relaxed)


def save_dimacs(formula: CnfFormula, path, comments: Sequence[str] = ()) -> None:
    with open(path, "w") as fh:
        fh.write(write_dimacs(formula, comments))
