"""
Stieltjes integrals and integration by parts
=============================================

``int h d[-g]`` weights ``h`` by the mass that ``g`` loses.  Over a half-line
the integral is truncated where the remaining variation of ``g`` can no longer
matter, and the bound on what was dropped is returned with the value.
"""

import math

import numpy as np

from stieltjes_pop import (
    Direction,
    GridFn,
    Interval,
    MonotoneFn,
    TailSpec,
    functional_I,
    improper_stieltjes,
    integrate_by_parts_residual,
    stieltjes_integral,
)

# finite interval: h(x) = x against g(x) = 1 - x on [0, 1] gives 1/2
h = GridFn([0.0, 1.0], [0.0, 1.0])
g = GridFn([0.0, 1.0], [1.0, 0.0])
print("int_0^1 x d[-(1-x)] =", stieltjes_integral(h, g, Interval(0.0, 1.0)).value)

# half-line: h = 1 against g = e^{-x} gives 1 up to the tail tolerance
one = GridFn.constant(1.0)
exp_down = GridFn([0.0, 1e-9], [1.0, math.exp(-1e-9)], TailSpec.exponential(1.0))
res = improper_stieltjes(one, exp_down, 0.0)
print(f"int_0^inf d[-e^-x] = {res.value:.12f}, cut at x = {res.truncation_point:.2f}, "
      f"dropped <= {res.est_tail_error:.1e}")

# integration by parts holds to round-off on a finite interval
H = GridFn(np.linspace(0, 3, 7), np.sqrt(np.linspace(0, 3, 7)))
G = GridFn(np.linspace(0, 3, 5), [1.0, 0.6, 0.5, 0.1, 0.0])
print("IBP residual:", integrate_by_parts_residual(H, G, Interval(0.0, 3.0)))

# I(h, f) = int h d[-exp(-int f)]: with h = 1 - e^{-x} and f = c it equals 1/(c+1)
x = np.linspace(0, 0.05, 51)
hI = MonotoneFn(GridFn(x, -np.expm1(-x), TailSpec.exponential(1.0, limit=1.0)), Direction.INCREASING)
for c in (0.5, 1.0, 2.0, 5.0):
    val = functional_I(hI, GridFn([0, 0.05], [c, c], TailSpec.constant(c)))
    print(f"c = {c}: I = {val:.9f}, 1/(c+1) = {1 / (c + 1):.9f}")
