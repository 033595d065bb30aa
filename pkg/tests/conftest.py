import pytest

from phasebench.sat import CnfFormula

ACCEPTANCE_LINES = []


def naive_unsat(dimacs_clauses, bits):
    """Violated-clause count straight from signed 1-indexed literals."""
    count = 0
    for clause in dimacs_clauses:
        if not any((bits[abs(l) - 1] == 1) == (l > 0) for l in clause):
            count += 1
    return count


def all_assignments(n):
    # little-endian to match basis indexing: variable i is bit i of the index
    for s in range(1 << n):
        yield s, [(s >> i) & 1 for i in range(n)]


@pytest.fixture
def contradiction():
    return CnfFormula.from_dimacs_clauses(1, [[1], [-1]])


@pytest.fixture
def single_clause3():
    return CnfFormula.from_dimacs_clauses(3, [[1, 2, 3]])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
