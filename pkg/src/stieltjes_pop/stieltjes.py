"""Riemann-Stieltjes integrals against continuous piecewise-linear integrators.

For a piecewise-linear ``g`` the measure ``d[-g]`` has density ``-g'`` on each
segment, so ``int h d[-g]`` reduces to ordinary integrals over the merged grid
of ``h`` and ``g``.  Both functions are exactly represented on every merged
segment (linear pieces or exponential tails), which makes the reduction exact
up to round-off.  Improper integrals are truncated where the remaining
variation of the integrator, times a bound on ``|h|``, drops below
``tail_tol``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid_fn import (
    SET_A_TOL,
    BVFn,
    DomainError,
    GridFn,
    Interval,
    MonotoneFn,
    TailSpec,
    _base,
    classify_monotone,
    product_integral,
)

__all__ = [
    "QuadratureConfig",
    "DEFAULT_CFG",
    "IntegralResult",
    "TruncationError",
    "PreconditionError",
    "HypothesisWarning",
    "stieltjes_integral",
    "improper_stieltjes",
    "integrate",
    "integrate_by_parts_residual",
    "functional_F",
    "functional_F_sides",
    "functional_F0",
    "functional_I",
    "survival_integrator",
]


@dataclass(frozen=True)
class QuadratureConfig:
    panel_points: int = 512
    tail_tol: float = 1e-10
    max_domain: float = 1e6

    def __post_init__(self):
        if int(self.panel_points) != self.panel_points or self.panel_points < 2:
            raise ValueError("panel_points must be an integer >= 2")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be > 0")
        if not self.max_domain > 0:
            raise ValueError("max_domain must be > 0")


DEFAULT_CFG = QuadratureConfig()


@dataclass(frozen=True)
class IntegralResult:
    value: float
    truncation_point: Optional[float] = None
    est_tail_error: float = 0.0

    def __float__(self):
        return self.value


class TruncationError(ArithmeticError):
    """The truncation criterion was not met before ``max_domain``."""

    def __init__(self, message: str, best: IntegralResult):
        super().__init__(message)
        self.best = best


class PreconditionError(ValueError):
    """Inputs violate the hypotheses an operation requires."""


class HypothesisWarning(UserWarning):
    """A result was computed although a hypothesis of the underlying theorem fails."""


def _bound(h) -> float:
    if isinstance(h, MonotoneFn):
        return h.bound
    return _base(h).sup_abs()


def _segment_integral(h: GridFn, g: GridFn, lo: float, hi: float) -> float:
    """Exact ``int_lo^hi h d[-g]`` on the merged breakpoints."""
    if hi <= lo:
        return 0.0
    pts = np.concatenate((h.grid, g.grid))
    pts = pts[(pts > lo) & (pts < hi)]
    breaks = np.unique(np.concatenate(([lo], pts, [hi])))
    ph = h.pieces(breaks)
    dg = g.pieces(breaks).density()
    return float(np.sum(product_integral(ph, dg)))


def _check_cover(f: GridFn, lo: float, hi: float, name: str):
    if f.a > lo or f.b < hi:
        raise DomainError(f"{name} defined on [{f.a}, {f.b}] does not cover [{lo}, {hi}]")


def stieltjes_integral(h, g, iv: Interval, cfg: QuadratureConfig = DEFAULT_CFG) -> IntegralResult:
    """``int_a^b h d[-g]`` on a finite interval."""
    h, g = _base(h), _base(g)
    if not iv.finite:
        raise DomainError("infinite interval: use improper_stieltjes")
    _check_cover(h, iv.a, iv.b, "h")
    _check_cover(g, iv.a, iv.b, "g")
    value = _segment_integral(h, g, iv.a, iv.b)
    if not math.isfinite(value):
        raise ArithmeticError("non-finite integral")
    return IntegralResult(value)


def _truncation_point(g: GridFn, a: float, bound: float, tol: float) -> float:
    if bound * g.variation_from(a) < tol:
        return a
    # suffix variation after each node
    steps = np.abs(np.diff(g.values))
    after = np.concatenate((np.cumsum(steps[::-1])[::-1], [0.0])) + g.tail_variation
    ok = (g.grid >= a) & (bound * after < tol)
    if np.any(ok):
        return float(g.grid[np.argmax(ok)])
    tv = g.tail_variation
    # here tv > 0, so the tail is exponential
    # step just past the point where the bound equals tol, so the bound is strict
    return float(g.grid[-1]) + (math.log(bound * tv / tol) + 1e-9) / g.tail.rate


def improper_stieltjes(h, g, a: float, cfg: QuadratureConfig = DEFAULT_CFG) -> IntegralResult:
    """``int_a^inf h d[-g]`` with a rigorous tail bound.

    The cut ``b*`` is the first grid or tail point where
    ``sup|h| * Var_[b*, inf)(g) < tail_tol``; that product is reported as
    ``est_tail_error``.
    """
    bound = _bound(h)
    h, g = _base(h), _base(g)
    if g.tail is None:
        raise DomainError("integrator needs a declared limit at infinity")
    if h.tail is None:
        raise DomainError("integrand must be defined on [a, inf)")
    if a < max(h.a, g.a):
        raise DomainError("a below the left endpoint")
    b_star = max(a, _truncation_point(g, a, bound, cfg.tail_tol))
    if b_star > cfg.max_domain:
        value = _segment_integral(h, g, a, cfg.max_domain)
        best = IntegralResult(value, cfg.max_domain, bound * g.variation_from(cfg.max_domain))
        raise TruncationError(
            f"tail criterion needs b*={b_star:.6g} > max_domain={cfg.max_domain:.6g}", best)
    value = _segment_integral(h, g, a, b_star)
    if not math.isfinite(value):
        raise ArithmeticError("non-finite integral")
    return IntegralResult(value, b_star, bound * g.variation_from(b_star))


def integrate(h, g, cfg: QuadratureConfig = DEFAULT_CFG, a: Optional[float] = None) -> IntegralResult:
    """``int h d[-g]`` over the domain of ``g`` (finite or improper)."""
    gb = _base(g)
    a = gb.a if a is None else a
    if gb.tail is None:
        return stieltjes_integral(h, g, Interval(a, gb.b), cfg)
    return improper_stieltjes(h, g, a, cfg)


def integrate_by_parts_residual(h, g, iv: Optional[Interval] = None,
                                cfg: QuadratureConfig = DEFAULT_CFG) -> float:
    """``|LHS - RHS|`` for ``int h d[-g] = h(a)g(a) - h(b)g(b) + int g dh``."""
    hb, gb = _base(h), _base(g)
    iv = iv or Interval(gb.a, gb.b)
    if iv.finite:
        lhs = stieltjes_integral(h, g, iv, cfg).value
        # int g dh = -int g d[-h]
        rhs = float(hb(iv.a) * gb(iv.a) - hb(iv.b) * gb(iv.b)) - stieltjes_integral(g, h, iv, cfg).value
    else:
        if hb.tail is None:
            raise DomainError("h needs a declared limit at infinity")
        lhs = improper_stieltjes(h, g, iv.a, cfg).value
        h_inf, g_inf = hb.right_value, gb.right_value
        rhs = float(hb(iv.a) * gb(iv.a)) - h_inf * g_inf - improper_stieltjes(g, h, iv.a, cfg).value
    return abs(lhs - rhs)


def _ibp_tolerance(g: GridFn, cfg: QuadratureConfig) -> float:
    return 1e-7 if g.tail is None else 10 * cfg.tail_tol


def _require_A(G, eps: float = SET_A_TOL):
    if abs(_base(G).right_value) > eps:
        raise PreconditionError(f"G is not in A: right value {_base(G).right_value:.3g}")


def _require_monotone(H, upward: bool, name: str) -> MonotoneFn:
    if not isinstance(H, MonotoneFn):
        H = MonotoneFn.infer(H)
    if H.direction.upward != upward and not _is_constant(H):
        want = "non-decreasing" if upward else "non-increasing"
        raise PreconditionError(f"{name} must be {want}, got {H.direction.value}")
    return H


def _is_constant(H: MonotoneFn) -> bool:
    return classify_monotone(H.base).constant


def functional_F_sides(H, G, cfg: QuadratureConfig = DEFAULT_CFG) -> tuple[float, float]:
    """Both evaluations of ``F(G)``: ``int H d[-G]`` and ``H(a)G(a) + int G dH``."""
    H = _require_monotone(H, True, "H")
    _require_A(G)
    Gb = _base(G)
    direct = integrate(H, Gb, cfg).value
    by_parts = float(H(Gb.a) * Gb(Gb.a)) - integrate(Gb, H.base, cfg, a=Gb.a).value
    return direct, by_parts


def functional_F(H, G, cfg: QuadratureConfig = DEFAULT_CFG) -> float:
    """``F(G) = int_a^b H d[-G]`` for non-decreasing ``H`` and ``G`` in A.

    Both sides of the integration-by-parts formula are evaluated; a
    disagreement beyond the residual tolerance raises a warning.
    """
    direct, by_parts = functional_F_sides(H, G, cfg)
    gap = abs(direct - by_parts)
    if gap > _ibp_tolerance(_base(G), cfg):
        warnings.warn(f"F(G) sides disagree by {gap:.3g}", RuntimeWarning, stacklevel=2)
    return direct


def functional_F0(H, G, cfg: QuadratureConfig = DEFAULT_CFG) -> float:
    """``F0(G) = int_a^b H dG`` for non-increasing ``H`` and ``G`` in A."""
    H = _require_monotone(H, False, "H")
    _require_A(G)
    return -integrate(H, G, cfg).value


def survival_integrator(f, cfg: QuadratureConfig = DEFAULT_CFG, extra_nodes=None) -> tuple[BVFn, bool]:
    """``g(x) = exp(-int_0^x f)`` as a piecewise-linear integrator.

    Each segment of ``f``'s grid merged with ``extra_nodes`` is split into
    ``cfg.panel_points`` nodes; the cumulative integral of ``f`` is exact there.
    Returns ``(g, divergent)`` where ``divergent`` says whether ``int f``
    is infinite according to ``f``'s declared tail.
    """
    f = _base(f)
    if f.tail is None:
        raise DomainError("f must be defined on [a, inf)")
    if np.any(f.values < 0) or f.tail.limit < 0:
        raise PreconditionError("f must be non-negative")
    n = cfg.panel_points
    base = f.grid
    if extra_nodes is not None:
        extra = np.asarray(extra_nodes, dtype=float)
        base = np.union1d(base, extra[extra >= f.a])
    sub = np.linspace(0.0, 1.0, n)[1:-1]
    x0, x1 = base[:-1, None], base[1:, None]
    nodes = [base, (x0 + (x1 - x0) * sub).ravel()]
    lim = f.tail.limit
    divergent = lim > 0
    if f.tail.kind == "exponential_decay":
        # extend the grid through the transient part of the tail
        v = f.values[-1]
        rate = f.tail.rate
        gap = abs(v - lim)
        if gap > 0:
            span = max(0.0, math.log(gap / (1e-14 * max(lim, gap))) / rate)
            step = min(1.0 / rate, 1.0 / max(v, lim)) / (n - 1)
            count = min(int(math.ceil(span / step)) + 1, 200_000)
            nodes.append(f.grid[-1] + np.linspace(0.0, span, max(count, 2)))
    grid = np.unique(np.concatenate(nodes))
    cum = f.antiderivative(grid)
    values = np.exp(-cum)
    if divergent:
        tail = TailSpec.exponential(lim, 0.0)
    else:
        tail = TailSpec.constant(values[-1])
    return BVFn(GridFn(grid, values, tail)), divergent


def functional_I(h, f, cfg: QuadratureConfig = DEFAULT_CFG) -> float:
    """``I(f) = int_0^inf h(x) f(x) exp(-int_0^x f) dx`` as ``int h d[-g]``.

    Emits :class:`HypothesisWarning` when ``int f`` converges (the integrator
    then does not vanish at infinity); the value is still returned.
    """
    hb = _base(h)
    g, divergent = survival_integrator(f, cfg, extra_nodes=hb.grid)
    if not divergent:
        warnings.warn("int f < inf: integrator limit is not 0", HypothesisWarning, stacklevel=2)
    return improper_stieltjes(h, g, _base(f).a, cfg).value

