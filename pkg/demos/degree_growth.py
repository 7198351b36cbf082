"""Degrees of iterates from the lattice action, checked against brute-force iteration."""

import time

from painleve4d import catalog, lattice
from painleve4d.maps import symbolic_degree_tables

for case in ("a2a2", "a5"):
    act = lattice.builtin_action(case)
    total = [sum(map(sum, lattice.degree_table(act, n))) for n in range(1, 21)]
    print(f"{case}: total degree for n = 1..20: {total}")
    t0 = time.perf_counter()
    sym = symbolic_degree_tables(catalog.get_map(case), 4)
    same = sym == [lattice.degree_table(act, n) for n in range(1, 5)]
    print(f"  exact iteration up to n=4 agrees: {same} ({time.perf_counter() - t0:.1f} s)")
    print(f"  {lattice.jordan_signature(act).describe()}")
