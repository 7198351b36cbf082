"""Integrate the two commuting flows of the second mapping and write a CSV."""

import csv
import sys

from painleve4d import flows

start = flows.FlowState(0.0, (0.3, 0.2, -0.25, 0.4), {"a": 0.7, "b1": 0.3, "b2": -0.4})
tr = flows.integrate(flows.hamiltonian_system("a5", "I1"), start, 2.0, 1e-3)
w = csv.writer(sys.stdout, lineterminator="\n")
w.writerow(["t", "q1", "p1", "q2", "p2", "I1", "I2"])
for row in tr.rows()[::100]:
    w.writerow([f"{x:.10g}" for x in row])
print(f"# drift I1 {tr.drift('I1'):.2e}, I2 {tr.drift('I2'):.2e}", file=sys.stderr)
