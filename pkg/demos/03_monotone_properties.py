"""
Monotone functionals on seeded random instances
================================================

``F(G) = int H d[-G]`` grows with ``G`` when ``H`` is increasing.  The
generators build ordered pairs ``G1 < G2`` that vanish at the right end, and
the suite checks every property on each instance.
"""

import math
from collections import Counter

from stieltjes_pop import InstanceFamily, Interval, check_prop1, gen_H, gen_pair_A, hm_evaluate
from stieltjes_pop.monotone_props import gen_hm_instance, run_property_suite

# one ordered pair on the half-line and an increasing weight
G1, G2 = gen_pair_A(InstanceFamily("exp_decay", {"a": 0.0, "b": math.inf}, seed=11))
H = gen_H("saturating", Interval(0.0), seed=11)
chk = check_prop1(H, G1, G2)
print(f"F(G2) - F(G1) = {chk.delta_F:.6g}  strict: {chk.strict_ok}")

# the power-mean inequality flips direction at p = 1
h, g = gen_hm_instance(5)
for p in (0.5, 1.0, 2.0):
    r = hm_evaluate(h, g, p)
    print(f"p = {p}: lhs = {r.lhs:.6f}  rhs = {r.rhs_hm:.6f}  holds: {r.holds_hm}")

# the whole suite: asserted properties must all pass; reported ones are informative
report = run_property_suite(50, seed=42)
passed = Counter(r.property for r in report.rows if r.passed)
total = Counter(r.property for r in report.rows)
for prop in sorted(total):
    asserted = next(r.asserted for r in report.rows if r.property == prop)
    print(f"{prop:24s} {passed[prop]:3d}/{total[prop]:3d}  {'asserted' if asserted else 'reported'}")
print("suite ok:", report.ok)
