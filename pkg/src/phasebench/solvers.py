"""Exact classical reference engines.

* :func:`dpll_solve` -- backtracking search with unit propagation (no clause
  learning). Branches on the lowest-index unassigned variable that still occurs
  in an unsatisfied clause, trying ``True`` first.
* :func:`brute_force_maxsat` -- exhaustive minimum of the violated-clause count.
* :func:`backbone_fraction` -- variables frozen across every optimal assignment.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import LimitExceededError
from .sat import CnfFormula, count_unsatisfied, index_to_bits, unsat_table

#: Largest n accepted by the exhaustive routines unless overridden.
EXHAUSTIVE_LIMIT = 24

BRANCHING_HEURISTIC = "lowest-index, true-first"


class Status(str, enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    TIMEOUT = "TIMEOUT"


@dataclass(frozen=True)
class SearchEffort:
    decisions: int = 0
    propagations: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class DecisionResult:
    status: Status
    witness: np.ndarray | None
    effort: SearchEffort
    heuristic: str = BRANCHING_HEURISTIC

    @property
    def satisfiable(self) -> bool | None:
        if self.status is Status.TIMEOUT:
            return None
        return self.status is Status.SAT


@dataclass(frozen=True)
class MaxSatResult:
    min_unsat: int
    optimal_count: int
    optima: np.ndarray | None = field(default=None, repr=False)  # basis indices


@dataclass(frozen=True)
class BackboneReport:
    fixed_fraction: float
    fixed_variables: list  # (variable, forced value)
    min_unsat: int = 0


# --------------------------------------------------------------------------
# DPLL

def _occurrence_lists(formula: CnfFormula):
    """CSR lists of clause ids per literal code; code ``2*v + negated``."""
    n = formula.n
    buckets = [[] for _ in range(2 * n)]
    for j, clause in enumerate(formula.clauses):
        for lit in clause:
            buckets[2 * lit.variable + int(lit.negated)].append(j)
    ptr = np.zeros(2 * n + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(b) for b in buckets])
    idx = np.array([j for b in buckets for j in b], dtype=np.int64)
    return ptr, idx


def _clause_codes(formula: CnfFormula):
    width = max((len(c) for c in formula.clauses), default=0)
    codes = np.full((formula.m, max(width, 1)), -1, dtype=np.int64)
    for j, clause in enumerate(formula.clauses):
        for i, lit in enumerate(clause):
            codes[j, i] = 2 * lit.variable + int(lit.negated)
    return codes, formula.widths


@numba.njit(cache=True)
def _dpll_kernel(n, codes, widths, occ_ptr, occ_idx, max_decisions, pure_literals):
    # value[v]: -1 unassigned, 0 false, 1 true
    m = codes.shape[0]
    value = np.full(n, -1, dtype=np.int64)
    n_true = np.zeros(m, dtype=np.int64)   # true literals per clause
    n_false = np.zeros(m, dtype=np.int64)  # false literals per clause
    trail = np.empty(n, dtype=np.int64)    # literal codes made true, in order
    trail_len = 0
    qhead = 0
    # decision stack: trail position and whether the second branch is in use
    dec_pos = np.empty(n, dtype=np.int64)
    dec_flipped = np.zeros(n, dtype=np.bool_)
    depth = 0
    n_sat = 0
    decisions = 0
    propagations = 0

    for j in range(m):
        if widths[j] == 0:
            return 1, value, decisions, propagations  # empty clause

    # 0 = ok, 1 = conflict
    while True:
        # ---- unit propagation from qhead
        conflict = False
        # seed units from original unit clauses at the root
        if trail_len == 0 and depth == 0:
            for j in range(m):
                if widths[j] == 1:
                    code = codes[j, 0]
                    v = code >> 1
                    want = 1 - (code & 1)
                    if value[v] == -1:
                        value[v] = want
                        trail[trail_len] = code
                        trail_len += 1
                        propagations += 1
                        # counters are updated in the propagation loop below
                    elif value[v] != want:
                        conflict = True
                        break
            # re-run the counter update for seeded units via qhead = 0
        while not conflict and qhead < trail_len:
            code = trail[qhead]
            qhead += 1
            for t in range(occ_ptr[code], occ_ptr[code + 1]):
                c = occ_idx[t]
                if n_true[c] == 0:
                    n_sat += 1
                n_true[c] += 1
            neg = code ^ 1
            for t in range(occ_ptr[neg], occ_ptr[neg + 1]):
                c = occ_idx[t]
                n_false[c] += 1
                if n_true[c] > 0 or conflict:
                    continue
                free = widths[c] - n_false[c]
                if free == 0:
                    conflict = True
                elif free == 1:
                    for i in range(widths[c]):
                        u = codes[c, i]
                        if value[u >> 1] == -1:
                            value[u >> 1] = 1 - (u & 1)
                            trail[trail_len] = u
                            trail_len += 1
                            propagations += 1
                            break
            if conflict:
                # finish counter bookkeeping is not needed: undo walks qhead
                break

        if conflict:
            # ---- chronological backtracking
            while True:
                if depth == 0:
                    return 1, value, decisions, propagations
                top = depth - 1
                pos = dec_pos[top]
                # undo trail entries >= pos; only entries < qhead touched counters
                for t in range(trail_len - 1, pos - 1, -1):
                    code = trail[t]
                    if t < qhead:
                        for s in range(occ_ptr[code], occ_ptr[code + 1]):
                            c = occ_idx[s]
                            n_true[c] -= 1
                            if n_true[c] == 0:
                                n_sat -= 1
                        neg = code ^ 1
                        for s in range(occ_ptr[neg], occ_ptr[neg + 1]):
                            n_false[occ_idx[s]] -= 1
                    value[code >> 1] = -1
                code = trail[pos]
                trail_len = pos
                qhead = pos
                if dec_flipped[top]:
                    depth -= 1
                    continue
                dec_flipped[top] = True
                decisions += 1
                code = code ^ 1
                value[code >> 1] = 1 - (code & 1)
                trail[trail_len] = code
                trail_len += 1
                break
            if decisions > max_decisions >= 0:
                return 2, value, decisions, propagations
            continue

        if n_sat == m:
            return 0, value, decisions, propagations

        if pure_literals:
            added = False
            for v in range(n):
                if value[v] != -1:
                    continue
                pos_live = False
                neg_live = False
                for t in range(occ_ptr[2 * v], occ_ptr[2 * v + 1]):
                    if n_true[occ_idx[t]] == 0:
                        pos_live = True
                        break
                for t in range(occ_ptr[2 * v + 1], occ_ptr[2 * v + 2]):
                    if n_true[occ_idx[t]] == 0:
                        neg_live = True
                        break
                if pos_live != neg_live:
                    code = 2 * v + (0 if pos_live else 1)
                    value[v] = 1 - (code & 1)
                    trail[trail_len] = code
                    trail_len += 1
                    propagations += 1
                    added = True
            if added:
                continue

        # ---- branch on the lowest-index variable still in a live clause
        branch = -1
        for v in range(n):
            if value[v] != -1:
                continue
            live = False
            for code in (2 * v, 2 * v + 1):
                for t in range(occ_ptr[code], occ_ptr[code + 1]):
                    if n_true[occ_idx[t]] == 0:
                        live = True
                        break
                if live:
                    break
            if live:
                branch = v
                break
        if branch < 0:
            # no live clause contains an unassigned variable, yet not all satisfied:
            # cannot happen without a conflict having been detected
            return 1, value, decisions, propagations
        decisions += 1
        if decisions > max_decisions >= 0:
            return 2, value, decisions, propagations
        dec_pos[depth] = trail_len
        dec_flipped[depth] = False
        depth += 1
        value[branch] = 1
        trail[trail_len] = 2 * branch
        trail_len += 1


def dpll_solve(formula: CnfFormula, max_decisions: int | None = None,
               pure_literals: bool = False) -> DecisionResult:
    """Decide satisfiability by DPLL.

    ``max_decisions`` caps the number of branch assignments (both branches of a
    node count); exceeding it yields ``Status.TIMEOUT`` rather than an answer.
    Unassigned variables in a SAT witness are set to ``False``.
    """
    codes, widths = _clause_codes(formula)
    ptr, idx = _occurrence_lists(formula)
    cap = -1 if max_decisions is None else int(max_decisions)
    t0 = time.perf_counter()
    status, value, decisions, props = _dpll_kernel(
        formula.n, codes, widths, ptr, idx, cap, pure_literals
    )
    wall = time.perf_counter() - t0
    effort = SearchEffort(int(decisions), int(props), wall)
    if status == 0:
        witness = value == 1
        if count_unsatisfied(formula, witness) != 0:
            raise AssertionError("DPLL produced a witness that violates a clause")
        return DecisionResult(Status.SAT, witness, effort)
    if status == 1:
        return DecisionResult(Status.UNSAT, None, effort)
    return DecisionResult(Status.TIMEOUT, None, effort)


# --------------------------------------------------------------------------
# exhaustive MAX-SAT

def _check_limit(formula, limit, what):
    limit = EXHAUSTIVE_LIMIT if limit is None else limit
    if formula.n > limit:
        raise LimitExceededError(what, formula.n, limit)


def brute_force_maxsat(formula: CnfFormula, limit: int | None = None,
                       keep_optima: bool = True) -> MaxSatResult:
    """Minimum violated-clause count over all 2**n assignments."""
    _check_limit(formula, limit, "brute_force_maxsat")
    table = unsat_table(formula)
    best = int(table.min())
    optima = np.flatnonzero(table == best)
    return MaxSatResult(best, int(optima.size), optima if keep_optima else None)


def backbone_fraction(formula: CnfFormula, limit: int | None = None) -> BackboneReport:
    """Fraction of variables that take the same value in every optimal assignment."""
    _check_limit(formula, limit, "backbone_fraction")
    res = brute_force_maxsat(formula, limit)
    n = formula.n
    if n == 0:
        return BackboneReport(0.0, [], res.min_unsat)
    optima = res.optima
    fixed = []
    for v in range(n):
        bits = (optima >> v) & 1
        if bits.min() == bits.max():
            fixed.append((v, bool(bits[0])))
    return BackboneReport(len(fixed) / n, fixed, res.min_unsat)


def enumerate_satisfiable(formula: CnfFormula, limit: int | None = None) -> bool:
    """Satisfiability by exhaustive evaluation; reference for the DPLL solver."""
    _check_limit(formula, limit, "enumerate_satisfiable")
    return bool(unsat_table(formula).min() == 0) if formula.m else True


def optimal_assignments(formula: CnfFormula, limit: int | None = None) -> list:
    res = brute_force_maxsat(formula, limit)
    return [index_to_bits(s, formula.n) for s in res.optima]
