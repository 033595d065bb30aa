"""Draw a random 3-SAT instance, write it as DIMACS and read it back."""
from phasebench import generate_random_ksat, read_dimacs, write_dimacs
from phasebench.sat import clause_density, clauses_for_density

n = 20
m = clauses_for_density(4.25, n)
f = generate_random_ksat(n, m, 3, seed=7)
print(f"n={f.n} m={f.m} k={f.k} density={clause_density(f)}")

text = write_dimacs(f, ["demo instance"])
print(text.splitlines()[0:4])

again = read_dimacs(text)
print("round trip preserved:", again == f)
