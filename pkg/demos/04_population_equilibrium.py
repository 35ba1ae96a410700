"""
Net reproduction and a nontrivial equilibrium
==============================================

Birth rate 2, growth 1, and mortality that rises with total population
``mu = 1 + P``.  ``R(0) = 2`` so an equilibrium is expected; at equilibrium
``R = 1`` forces ``P = 1`` and the density is ``2 e^{-2x}``.
"""

import time

import numpy as np

from stieltjes_pop import (
    EnvironmentKernel,
    Modulation,
    VitalRates,
    net_reproduction_R,
    solve_equilibrium,
    threshold_report,
)

crowding = Modulation("linear_up", 1.0, EnvironmentKernel("total"))

for beta0 in (0.5, 2.0):
    rates = VitalRates.constant(beta0, 1.0, 1.0, mu=crowding)
    rep = threshold_report(rates)
    print(f"beta0 = {beta0}: R(0) = {rep.R0:.6f}, {rep.message}")

rates = VitalRates.constant(2.0, 1.0, 1.0, mu=crowding)
t0 = time.perf_counter()
res = solve_equilibrium(rates)
print(f"solved in {time.perf_counter() - t0:.2f}s: status {res.status}, B* = {res.B_star:.8f}")
x = res.grid
l1 = np.trapezoid(np.abs(res.u_star.u.values - 2 * np.exp(-2 * x)), x)
print(f"||u* - 2e^(-2x)||_1 = {l1:.2e},  R(u*) = {res.R_at_star:.9f},  total = {res.u_star.total:.8f}")

# R is non-increasing in the density when the rates are in monotone mode
for s in (0.0, 0.5, 1.0, 2.0):
    print(f"R({s} u*) = {net_reproduction_R(res.u_star.scaled(s), rates):.9f}")
