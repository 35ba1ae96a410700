"""
Piecewise-linear functions with exact tails
============================================

A ``GridFn`` is linear between its nodes and continues past the last node
either as a constant or as an exponential decay toward a limit.
"""

import math

import numpy as np

from stieltjes_pop import GridFn, TailSpec, classify_monotone, total_variation

# a decreasing profile that decays like e^{-x} after x = 1
g = GridFn([0.0, 0.5, 1.0], [1.0, 0.7, 0.5], TailSpec.exponential(1.0))
print("g(0.25) =", g(0.25))
print("g(1 + ln 2) =", g(1 + math.log(2)), "(half of g(1))")

# total variation includes the tail exactly: 1.0 - 0.5 on the grid plus 0.5 in the tail
print("TV(g) =", total_variation(g))

# monotonicity is classified over the grid and the tail together
print("g is", classify_monotone(g).direction.value)
bump = GridFn([0.0, 1.0, 2.0], [0.0, 1.0, 0.5])
print("a bump has direction", classify_monotone(bump).direction)

# integrals are exact on each linear piece and in the tail
print("int_0^inf g =", g.integral(), "vs", 0.25 * (1.0 + 0.7) + 0.25 * (0.7 + 0.5) + 0.5)

# refining the grid never changes the function
x = np.linspace(0, 5, 11)
print("refinement invisible:", np.array_equal(g.refine([0.3, 0.8])(x), g(x)))

# records round-trip through plain dicts (the CLI reads the same layout)
print(g.to_dict())
