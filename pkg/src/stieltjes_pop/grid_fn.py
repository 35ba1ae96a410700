"""Continuous piecewise-linear functions on [a, b] or [a, inf).

A :class:`GridFn` stores samples on a strictly increasing grid and, for
half-infinite domains, a :class:`TailSpec` describing the function beyond the
last node.  Between nodes the function is the linear interpolant, so every
``GridFn`` is continuous and of bounded variation by construction.

Integration routines elsewhere in the package work segment by segment on the
local basis ``c0 + c1*t + c2*exp(-k*t)`` (``t`` measured from the segment
start), which covers both the linear pieces and the exponential tails exactly.
See :meth:`GridFn.pieces`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np

__all__ = [
    "STRICT_TOL",
    "SET_A_TOL",
    "DomainError",
    "Interval",
    "TailSpec",
    "GridFn",
    "Direction",
    "Monotonicity",
    "MonotoneFn",
    "BVFn",
    "evaluate",
    "total_variation",
    "classify_monotone",
    "moment",
]

STRICT_TOL = 1e-12
SET_A_TOL = 1e-9


class DomainError(ValueError):
    """Raised when a function is evaluated or integrated outside its domain."""


@dataclass(frozen=True)
class Interval:
    a: float
    b: float = math.inf

    def __post_init__(self):
        if not math.isfinite(self.a):
            raise ValueError("left endpoint must be finite")
        if math.isnan(self.b) or not self.a < self.b:
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.b)


@dataclass(frozen=True)
class TailSpec:
    """Behaviour of a function beyond its last grid node.

    ``kind="limit_value"`` keeps the function constant at ``limit``.
    ``kind="exponential_decay"`` uses
    ``limit + (value - limit) * exp(-rate * (x - x_last))``; ``value`` defaults
    to the last grid value when omitted.
    """

    kind: str
    limit: float = 0.0
    rate: Optional[float] = None
    value: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("limit_value", "exponential_decay"):
            raise ValueError(f"unknown tail kind {self.kind!r}")
        if not math.isfinite(self.limit):
            raise ValueError("tail limit must be finite")
        if self.kind == "exponential_decay":
            if self.rate is None or not (self.rate > 0 and math.isfinite(self.rate)):
                raise ValueError("exponential_decay tail requires rate > 0")
        elif self.rate is not None:
            raise ValueError("limit_value tail takes no rate")

    @classmethod
    def constant(cls, limit: float) -> "TailSpec":
        return cls("limit_value", limit=float(limit))

    @classmethod
    def exponential(cls, rate: float, limit: float = 0.0, value: Optional[float] = None) -> "TailSpec":
        return cls("exponential_decay", limit=float(limit), rate=float(rate),
                   value=None if value is None else float(value))

    def to_dict(self) -> dict:
        if self.kind == "limit_value":
            return {"kind": self.kind, "limit": self.limit}
        out = {"kind": self.kind, "rate": self.rate, "limit": self.limit}
        if self.value is not None:
            out["value"] = self.value
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "TailSpec":
        return cls(d["kind"], limit=float(d.get("limit", 0.0)),
                   rate=None if d.get("rate") is None else float(d["rate"]),
                   value=None if d.get("value") is None else float(d["value"]))


def moment(n: int, k, L):
    """``int_0^L t**n * exp(-k*t) dt`` for n in {0, 1, 2}, vectorized, stable as k -> 0."""
    k, L = np.broadcast_arrays(np.asarray(k, dtype=float), np.asarray(L, dtype=float))
    shape = k.shape
    k, L = k.ravel(), L.ravel()
    x = k * L
    out = np.empty(x.shape)
    small = np.abs(x) < 1.0
    if np.any(small):
        xs = x[small]
        # L**(n+1) * sum_m (-x)^m / (m! (n+m+1))
        acc = np.zeros_like(xs)
        term = np.ones_like(xs)
        for m in range(30):
            acc += term / (n + m + 1)
            term = term * (-xs) / (m + 1)
        out[small] = L[small] ** (n + 1) * acc
    big = ~small
    if np.any(big):
        xb, kb = x[big], k[big]
        e = np.exp(-xb)
        if n == 0:
            val = -np.expm1(-xb) / kb
        elif n == 1:
            val = (1.0 - e * (1.0 + xb)) / kb**2
        elif n == 2:
            val = (2.0 - e * (xb * xb + 2.0 * xb + 2.0)) / kb**3
        else:
            raise ValueError("moment order must be 0, 1 or 2")
        out[big] = val
    return out.reshape(shape)


class Pieces(NamedTuple):
    """Local representation ``c0 + c1*t + c2*exp(-k*t)`` on each segment."""

    c0: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    k: np.ndarray
    length: np.ndarray

    def values_at_start(self):
        return self.c0 + self.c2

    def integral(self):
        return self.c0 * self.length + self.c1 * self.length**2 / 2 + self.c2 * moment(0, self.k, self.length)

    def density(self) -> "Pieces":
        """Pieces of ``-f'`` (the density of d[-f])."""
        return Pieces(-self.c1, np.zeros_like(self.c1), self.k * self.c2, self.k, self.length)


def product_integral(p: Pieces, q: Pieces) -> np.ndarray:
    """Per-segment ``int p(t) q(t) dt`` for two piece sets on the same segments."""
    L = p.length
    out = p.c0 * q.c0 * L
    out = out + (p.c0 * q.c1 + p.c1 * q.c0) * L**2 / 2
    out = out + p.c1 * q.c1 * L**3 / 3
    # exponential terms only where their coefficient is non-zero (tail segments)
    for e, lin in ((q, p), (p, q)):
        m = e.c2 != 0
        if np.any(m):
            k, Lm = e.k[m], L[m]
            out[m] += e.c2[m] * (lin.c0[m] * moment(0, k, Lm) + lin.c1[m] * moment(1, k, Lm))
    m = (p.c2 != 0) & (q.c2 != 0)
    if np.any(m):
        out[m] += p.c2[m] * q.c2[m] * moment(0, p.k[m] + q.k[m], L[m])
    return out


def _readonly(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


class GridFn:
    """Continuous piecewise-linear function with an optional tail.

    Parameters
    ----------
    grid : array_like
        Strictly increasing nodes; ``grid[0]`` is the left endpoint.
    values : array_like
        Function values at the nodes.
    tail : TailSpec, optional
        Required for functions on ``[a, inf)``; absent means the domain ends at
        ``grid[-1]``.
    """

    __slots__ = ("grid", "values", "tail", "_cum")

    def __init__(self, grid, values, tail: Optional[TailSpec] = None):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or values.shape != grid.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if grid.size < 2:
            raise ValueError("need at least 2 grid nodes")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(values))):
            raise ValueError("grid and values must be finite")
        if not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if tail is not None:
            scale = max(1.0, abs(values[-1]))
            if tail.kind == "limit_value" and abs(values[-1] - tail.limit) > 1e-12 * scale:
                raise ValueError("limit_value tail must match the last grid value (continuity)")
            if tail.value is not None and abs(values[-1] - tail.value) > 1e-12 * scale:
                raise ValueError("exponential tail value must match the last grid value (continuity)")
        object.__setattr__(self, "grid", _readonly(grid))
        object.__setattr__(self, "values", _readonly(values))
        object.__setattr__(self, "tail", tail)
        cum = np.concatenate(([0.0], np.cumsum(np.diff(grid) * (values[1:] + values[:-1]) / 2)))
        object.__setattr__(self, "_cum", _readonly(cum))

    def __setattr__(self, name, value):
        raise AttributeError("GridFn is immutable")

    # construction helpers -------------------------------------------------

    @classmethod
    def from_callable(cls, fn, grid, tail: Optional[TailSpec] = None) -> "GridFn":
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.asarray(fn(grid), dtype=float) * np.ones_like(grid), tail)

    @classmethod
    def constant(cls, c: float, a: float = 0.0, b: float = math.inf) -> "GridFn":
        if math.isfinite(b):
            return cls([a, b], [c, c])
        return cls([a, a + 1.0], [c, c], TailSpec.constant(c))

    def to_dict(self) -> dict:
        out = {"grid": self.grid.tolist(), "values": self.values.tolist()}
        if self.tail is not None:
            out["tail"] = self.tail.to_dict()
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "GridFn":
        tail = d.get("tail")
        return cls(d["grid"], d["values"], None if tail is None else TailSpec.from_dict(tail))

    # basic properties -----------------------------------------------------

    @property
    def a(self) -> float:
        return float(self.grid[0])

    @property
    def b(self) -> float:
        return float(self.grid[-1]) if self.tail is None else math.inf

    @property
    def interval(self) -> Interval:
        return Interval(self.a, self.b)

    @property
    def x_last(self) -> float:
        return float(self.grid[-1])

    @property
    def right_value(self) -> float:
        """Value at b, or the declared limit when b is infinite."""
        return float(self.values[-1]) if self.tail is None else self.tail.limit

    @property
    def tail_variation(self) -> float:
        if self.tail is None or self.tail.kind == "limit_value":
            return 0.0
        return abs(float(self.values[-1]) - self.tail.limit)

    def sup_abs(self) -> float:
        out = float(np.max(np.abs(self.values)))
        if self.tail is not None:
            out = max(out, abs(self.tail.limit))
        return out

    def __repr__(self):
        tail = "" if self.tail is None else f", tail={self.tail}"
        return f"GridFn(n={self.grid.size}, [{self.a}, {self.b}]{tail})"

    # evaluation -----------------------------------------------------------

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.grid[0]) or np.any(np.isnan(x)):
            raise DomainError(f"x below left endpoint {self.a}")
        if self.tail is None and np.any(x > self.grid[-1]):
            raise DomainError(f"x above right endpoint {self.b}")
        out = np.interp(x, self.grid, self.values)
        # np.interp is exact at nodes; only the tail needs extra work
        beyond = x > self.grid[-1]
        if np.any(beyond) and self.tail.kind == "exponential_decay":
            t = x[beyond] - self.grid[-1]
            lim = self.tail.limit
            out = np.array(out, dtype=float, copy=True)
            out[beyond] = lim + (self.values[-1] - lim) * np.exp(-self.tail.rate * t)
        if out.ndim == 0:
            return float(out)
        return out

    def variation_from(self, x: float) -> float:
        """Total variation of the function on [x, b)."""
        x = float(x)
        if x < self.grid[0]:
            raise DomainError("x below left endpoint")
        if x >= self.grid[-1]:
            if self.tail is None or self.tail.kind == "limit_value":
                return 0.0
            return self.tail_variation * math.exp(-self.tail.rate * (x - self.grid[-1]))
        i = int(np.searchsorted(self.grid, x, side="right"))
        head = abs(self(self.grid[i]) - self(x))
        return head + float(np.sum(np.abs(np.diff(self.values[i:])))) + self.tail_variation

    def antiderivative(self, x):
        """``int_a^x f``, exact for the representation (vectorized)."""
        x = np.asarray(x, dtype=float)
        if np.any(x < self.grid[0]):
            raise DomainError("x below left endpoint")
        g, v = self.grid, self.values
        xi = np.minimum(x, g[-1])
        i = np.clip(np.searchsorted(g, xi, side="right") - 1, 0, g.size - 2)
        t = xi - g[i]
        L = g[i + 1] - g[i]
        out = self._cum[i] + v[i] * t + (v[i + 1] - v[i]) * t * t / (2 * L)
        beyond = x > g[-1]
        if np.any(beyond):
            if self.tail is None:
                raise DomainError("x above right endpoint")
            t = x[beyond] - g[-1] if x.ndim else x - g[-1]
            lim = self.tail.limit
            extra = lim * t
            if self.tail.kind == "exponential_decay":
                extra = extra + (v[-1] - lim) * (-np.expm1(-self.tail.rate * t)) / self.tail.rate
            if x.ndim:
                out = np.array(out, copy=True)
                out[beyond] = self._cum[-1] + extra
            else:
                out = self._cum[-1] + extra
        return float(out) if np.ndim(out) == 0 else out

    def integral(self) -> float:
        """``int_a^b f``; infinite when a non-zero tail limit is declared."""
        total = float(self._cum[-1])
        if self.tail is None:
            return total
        if self.tail.limit != 0.0:
            return math.copysign(math.inf, self.tail.limit)
        if self.tail.kind == "exponential_decay":
            total += float(self.values[-1]) / self.tail.rate
        return total

    # segment basis ----------------------------------------------------------

    def pieces(self, breaks) -> Pieces:
        """Exact local basis on each segment of ``breaks``.

        ``breaks`` must be increasing, inside the domain and contain every grid
        node lying strictly between its first and last entries.
        """
        breaks = np.asarray(breaks, dtype=float)
        x0, x1 = breaks[:-1], breaks[1:]
        L = x1 - x0
        xl = self.grid[-1]
        in_grid = x0 < xl
        c0 = np.empty_like(x0)
        c1 = np.zeros_like(x0)
        c2 = np.zeros_like(x0)
        k = np.zeros_like(x0)
        if np.any(in_grid):
            y0 = np.interp(x0[in_grid], self.grid, self.values)
            y1 = np.interp(x1[in_grid], self.grid, self.values)
            c0[in_grid] = y0
            c1[in_grid] = (y1 - y0) / L[in_grid]
        tail_seg = ~in_grid
        if np.any(tail_seg):
            if self.tail is None:
                raise DomainError("segment beyond right endpoint")
            lim = self.tail.limit
            c0[tail_seg] = lim
            if self.tail.kind == "exponential_decay":
                c2[tail_seg] = (self.values[-1] - lim) * np.exp(-self.tail.rate * (x0[tail_seg] - xl))
                k[tail_seg] = self.tail.rate
        return Pieces(c0, c1, c2, k, L)

    # transformations ------------------------------------------------------

    def refine(self, points) -> "GridFn":
        """Same function with extra nodes inserted at ``points`` (finite part only)."""
        points = np.asarray(points, dtype=float)
        points = points[(points > self.grid[0]) & (points < self.grid[-1])]
        grid = np.union1d(self.grid, points)
        return GridFn(grid, np.interp(grid, self.grid, self.values), self.tail)

    def with_values(self, values, tail: Optional[TailSpec] = None) -> "GridFn":
        return GridFn(self.grid, values, tail)


def evaluate(f, x):
    """Value of ``f`` at ``x`` (piecewise-linear inside the grid, tail beyond)."""
    return _base(f)(x)


def total_variation(f) -> float:
    f = _base(f)
    return float(np.sum(np.abs(np.diff(f.values)))) + f.tail_variation


class Direction(str, Enum):
    INCREASING = "increasing"
    NON_DECREASING = "non_decreasing"
    DECREASING = "decreasing"
    NON_INCREASING = "non_increasing"

    @property
    def strict(self) -> bool:
        return self in (Direction.INCREASING, Direction.DECREASING)

    @property
    def upward(self) -> bool:
        return self in (Direction.INCREASING, Direction.NON_DECREASING)

    def implies(self, other: "Direction") -> bool:
        """True when a function with this direction also has ``other``."""
        if self == other:
            return True
        return self.strict and not other.strict and self.upward == other.upward


class Monotonicity(NamedTuple):
    direction: Optional[Direction]
    constant: bool = False


def _steps(f: GridFn) -> np.ndarray:
    d = np.diff(f.values)
    if f.tail is not None and f.tail.kind == "exponential_decay":
        d = np.append(d, f.tail.limit - f.values[-1])
    return d


def classify_monotone(f, tol: float = STRICT_TOL) -> Monotonicity:
    """Strongest monotone direction of ``f`` under the tie rule.

    Strict directions need every step beyond ``tol``; non-strict ones allow
    steps down to ``-tol``.  Constant functions report ``NON_DECREASING`` with
    ``constant=True`` (they are also non-increasing).
    """
    d = _steps(_base(f))
    if np.all(np.abs(d) <= tol):
        return Monotonicity(Direction.NON_DECREASING, True)
    if np.all(d > tol):
        return Monotonicity(Direction.INCREASING)
    if np.all(d < -tol):
        return Monotonicity(Direction.DECREASING)
    if np.all(d >= -tol):
        return Monotonicity(Direction.NON_DECREASING)
    if np.all(d <= tol):
        return Monotonicity(Direction.NON_INCREASING)
    return Monotonicity(None)


def _has_direction(m: Monotonicity, want: Direction) -> bool:
    if m.direction is None:
        return False
    if m.constant:
        return not want.strict
    return m.direction.implies(want)


class MonotoneFn:
    """Bounded, non-negative, monotone ``GridFn`` (the H, h of the functionals)."""

    __slots__ = ("base", "direction", "bound")

    def __init__(self, base: GridFn, direction, bound: Optional[float] = None, tol: float = STRICT_TOL):
        direction = Direction(direction)
        if not _has_direction(classify_monotone(base, tol), direction):
            raise ValueError(f"values are not {direction.value}")
        lo = min(float(np.min(base.values)), base.right_value)
        if lo < -tol:
            raise ValueError("monotone function must be non-negative")
        sup = base.sup_abs()
        if bound is None:
            bound = sup
        elif bound < sup:
            raise ValueError(f"bound {bound} below sup {sup}")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "direction", direction)
        object.__setattr__(self, "bound", float(bound))

    def __setattr__(self, name, value):
        raise AttributeError("MonotoneFn is immutable")

    @classmethod
    def infer(cls, base: GridFn, tol: float = STRICT_TOL) -> "MonotoneFn":
        m = classify_monotone(base, tol)
        if m.direction is None:
            raise ValueError("function is not monotone")
        return cls(base, m.direction, tol=tol)

    def __call__(self, x):
        return self.base(x)

    def __getattr__(self, name):
        return getattr(self.base, name)

    def __repr__(self):
        return f"MonotoneFn({self.direction.value}, bound={self.bound}, {self.base!r})"


class BVFn:
    """Continuous bounded-variation ``GridFn`` with a known right value (G, g)."""

    __slots__ = ("base",)

    def __init__(self, base: GridFn):
        object.__setattr__(self, "base", _base(base))

    def __setattr__(self, name, value):
        raise AttributeError("BVFn is immutable")

    @property
    def right_value(self) -> float:
        return self.base.right_value

    @property
    def variation(self) -> float:
        return total_variation(self.base)

    def in_A(self, tol: float = SET_A_TOL) -> bool:
        """Membership in the set of integrators vanishing at the right endpoint."""
        return abs(self.right_value) <= tol

    def __call__(self, x):
        return self.base(x)

    def __getattr__(self, name):
        return getattr(self.base, name)

    def __repr__(self):
        return f"BVFn(right_value={self.right_value}, {self.base!r})"


def _base(f) -> GridFn:
    return f.base if isinstance(f, (MonotoneFn, BVFn)) else f
