"""Seeded instance families and property checks for the monotone functionals.

Every generator takes an explicit seed and builds its own
``numpy.random.Generator``, so a (family, seed) pair always yields the same
functions.  The batch driver :func:`run_property_suite` seeds instance ``i``
with ``(seed, i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .grid_fn import (
    STRICT_TOL,
    BVFn,
    Direction,
    GridFn,
    Interval,
    MonotoneFn,
    TailSpec,
    _base,
    classify_monotone,
)
from .stieltjes import (
    DEFAULT_CFG,
    PreconditionError,
    QuadratureConfig,
    functional_F,
    functional_F0,
    functional_I,
    integrate,
    integrate_by_parts_residual,
)

__all__ = [
    "G_KINDS",
    "H_KINDS",
    "InstanceFamily",
    "Prop1Check",
    "HMReport",
    "SuiteRow",
    "SuiteReport",
    "gen_G",
    "gen_pair_A",
    "gen_H",
    "gen_f_pair",
    "gen_hm_instance",
    "power_transform",
    "check_prop1",
    "hm_evaluate",
    "run_property_suite",
]

G_KINDS = ("exp_decay", "rational_decay", "piecewise_random")
H_KINDS = ("saturating", "rational_ramp", "staircase")
HM_PS = (0.25, 0.5, 0.75, 1.0, 2.0, 4.0)
NONSTRICT_TOL = 1e-10
HM_MARGIN = -1e-8
HM_EQ_TOL = 1e-9


@dataclass(frozen=True)
class InstanceFamily:
    """A sampler for integrators in A.

    ``params`` may fix ``a``, ``b`` (``math.inf`` for half-line), ``n`` (grid
    nodes) and the family shape parameters ``amp``, ``rate``, ``q``; anything
    left out is drawn from ``seed``.  ``pin_left=True`` makes
    :func:`gen_pair_A` return pairs that also agree at ``a``.
    """

    kind: str
    params: Mapping = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in G_KINDS:
            raise ValueError(f"unknown family {self.kind!r}; expected one of {G_KINDS}")


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _param(params, name, draw):
    return float(params[name]) if name in params else float(draw())


def gen_G(family: InstanceFamily, rng: Optional[np.random.Generator] = None) -> BVFn:
    """One integrator in A drawn from ``family``."""
    rng = rng or _rng(family.seed)
    p = family.params
    a = float(p.get("a", 0.0))
    b = float(p.get("b", math.inf))
    n = int(p.get("n", 200))
    amp = _param(p, "amp", lambda: rng.uniform(0.5, 2.0))
    finite = math.isfinite(b)
    if family.kind == "exp_decay":
        rate = _param(p, "rate", lambda: rng.uniform(0.3, 3.0))
        X = b if finite else a + 30.0 / rate
        x = np.linspace(a, X, n)
        if finite:
            return BVFn(GridFn(x, amp * (np.exp(-rate * (x - a)) - np.exp(-rate * (b - a)))))
        return BVFn(GridFn(x, amp * np.exp(-rate * (x - a)), TailSpec.exponential(rate)))
    if family.kind == "rational_decay":
        q = _param(p, "q", lambda: rng.uniform(0.5, 3.0))
        X = b if finite else a + 50.0
        x = np.linspace(a, X, n)
        y = amp * (1.0 + x - a) ** (-q)
        if finite:
            return BVFn(GridFn(x, y - y[-1]))
        # continue with the log-slope of the rational profile at the cut
        return BVFn(GridFn(x, y, TailSpec.exponential(q / (1.0 + X - a))))
    # piecewise_random: any sign, forced zero right value
    span = b - a if finite else _param(p, "span", lambda: rng.uniform(2.0, 10.0))
    inner = np.sort(rng.uniform(a, a + span, n - 2))
    x = np.unique(np.concatenate(([a], inner, [a + span])))
    y = amp * rng.normal(size=x.size)
    if finite:
        y[-1] = 0.0
        return BVFn(GridFn(x, y))
    return BVFn(GridFn(x, y, TailSpec.exponential(rng.uniform(0.5, 3.0))))


def gen_pair_A(family: InstanceFamily) -> tuple[BVFn, BVFn]:
    """``G1 < G2`` in A: ``G2 = G1 + bump`` with a positive bump vanishing at b.

    The bump is positive at ``a`` unless ``params["pin_left"]`` is set.
    """
    rng = _rng(family.seed)
    G1 = gen_G(family, rng).base
    x, a = G1.grid, G1.a
    pin = bool(family.params.get("pin_left", False))
    eps = rng.uniform(0.05, 0.5) * max(1.0, float(np.max(np.abs(G1.values))))
    if G1.tail is None:
        b = G1.b
        r = rng.uniform(0.5, 2.0)
        bump = eps * ((b - x) / (b - a)) ** r
        if pin:
            bump = 4 * bump * (x - a) / (b - a)
        G2 = GridFn(x, G1.values + bump)
    else:
        kappa = rng.uniform(0.2, 2.0)
        # the bump must stay visible next to G1 in floating point at the last node
        kappa = min(kappa, 20.0 / (x[-1] - a))
        bump = eps * np.exp(-kappa * (x - a))
        if pin:
            bump = bump * kappa * (x - a)
            # the bump decays like t*exp(-kappa t); a slower tail rate keeps G2 above G1
            kappa = kappa * 0.5
        y2 = G1.values + bump
        rate = G1.tail.rate
        if y2[-1] > 0:
            rate = min(rate, kappa)
        G2 = GridFn(x, y2, TailSpec.exponential(rate))
    return BVFn(G1), BVFn(G2)


def gen_H(kind: str, iv: Interval, seed, decreasing: bool = False, n: int = 150) -> MonotoneFn:
    """Bounded, non-negative, strictly monotone integrand on ``iv``."""
    if kind not in H_KINDS:
        raise ValueError(f"unknown H family {kind!r}")
    rng = _rng(seed)
    a, b = iv.a, iv.b
    amp = rng.uniform(0.5, 3.0)
    floor = rng.uniform(0.0, 1.0)
    tail = None
    if kind == "saturating":
        kappa = rng.uniform(0.2, 3.0)
        if iv.finite:
            # keep node steps above the strict tie threshold
            kappa = min(kappa, 15.0 / (b - a))
        X = b if iv.finite else a + 15.0 / kappa
        x = np.linspace(a, X, n)
        s = -np.expm1(-kappa * (x - a))
        if not iv.finite:
            tail = TailSpec.exponential(kappa, limit=1.0)
    elif kind == "rational_ramp":
        scale = rng.uniform(0.2, 3.0)
        X = b if iv.finite else a + 40.0 * scale
        x = np.linspace(a, X, n)
        s = (x - a) / (scale + x - a)
        if not iv.finite:
            tail = TailSpec.exponential(1.0 / (scale + X - a), limit=1.0)
    else:
        X = b if iv.finite else a + rng.uniform(2.0, 10.0)
        x = np.linspace(a, X, n)
        # smoothed staircase: a few ramps of random height and width
        s = np.zeros_like(x)
        for _ in range(rng.integers(2, 6)):
            c, w = rng.uniform(a, X), rng.uniform(0.02, 0.3) * (X - a)
            s += rng.uniform(0.2, 1.0) * np.clip((x - c) / w + 0.5, 0.0, 1.0)
        s = s + 0.05 * (x - a) / (X - a)  # keeps every step strictly positive
        top = s[-1] * 1.1
        s = s / top
        if not iv.finite:
            tail = TailSpec.exponential(rng.uniform(0.5, 2.0), limit=1.0)
    if decreasing:
        y = floor + amp * (1.0 - s)
        if tail is not None:
            tail = TailSpec.exponential(tail.rate, limit=floor)
        direction = Direction.DECREASING
    else:
        y = floor + amp * s
        if tail is not None:
            tail = TailSpec.exponential(tail.rate, limit=floor + amp)
        direction = Direction.INCREASING
    return MonotoneFn(GridFn(x, y, tail), direction)


def gen_f_pair(seed, n: int = 40) -> tuple[GridFn, GridFn]:
    """Hazard-like ``0 <= f1 <= f2`` with divergent integrals and ``f1 != f2``."""
    rng = _rng(seed)
    X = rng.uniform(2.0, 8.0)
    x = np.linspace(0.0, X, n)
    f1 = rng.uniform(0.1, 2.0, n)
    bump = rng.uniform(0.0, 1.0, n) * (rng.uniform(size=n) < 0.7)
    bump[n // 2] += 0.5  # f1 != f2 on a set of positive measure
    f2 = f1 + bump
    return (GridFn(x, f1, TailSpec.constant(f1[-1])),
            GridFn(x, f2, TailSpec.constant(f2[-1])))


def _hm_g(rng, iv: Interval, n: int) -> BVFn:
    a, b = iv.a, iv.b
    kind = rng.choice(["exp", "rational", "random"])
    if kind == "exp":
        rate = rng.uniform(0.3, 3.0)
        X = b if iv.finite else a + 30.0 / rate
        x = np.linspace(a, X, n)
        if iv.finite:
            return BVFn(GridFn(x, np.exp(-rate * (x - a)) - np.exp(-rate * (b - a))))
        return BVFn(GridFn(x, np.exp(-rate * (x - a)), TailSpec.exponential(rate)))
    if kind == "rational":
        q = rng.uniform(0.5, 3.0)
        X = b if iv.finite else a + 50.0
        x = np.linspace(a, X, n)
        y = (1.0 + x - a) ** (-q)
        if iv.finite:
            return BVFn(GridFn(x, y - y[-1]))
        return BVFn(GridFn(x, y, TailSpec.exponential(q / (1.0 + X - a))))
    X = b if iv.finite else a + rng.uniform(2.0, 10.0)
    x = np.linspace(a, X, n)
    drops = rng.gamma(0.7, size=n - 1) + 1e-3
    y = np.concatenate((np.cumsum(drops[::-1])[::-1], [0.0]))
    y = y / y[0] * rng.uniform(0.5, 2.0)
    if iv.finite:
        return BVFn(GridFn(x, y))
    # strictly positive on the half-line: lift the last node, decay from there
    y = y + y[-2] * 0.5
    return BVFn(GridFn(x, y, TailSpec.exponential(rng.uniform(0.5, 3.0))))


def gen_hm_instance(seed, n: int = 200) -> tuple[MonotoneFn, BVFn]:
    """Positive increasing ``h`` and positive decreasing ``g`` with ``g(b-) = 0``.

    On the half-line ``h`` gets a constant tail so that powers of it stay exact.
    """
    rng = _rng(seed)
    a = float(rng.choice([0.0, rng.uniform(0.0, 2.0)]))
    finite = rng.uniform() < 0.5
    iv = Interval(a, a + rng.uniform(1.0, 10.0)) if finite else Interval(a)
    g = _hm_g(rng, iv, n)
    H = gen_H(str(rng.choice(H_KINDS)), Interval(a, g.x_last), rng.integers(2**32), n=n)
    hb = H.base
    if not finite:
        hb = GridFn(hb.grid, hb.values, TailSpec.constant(hb.values[-1]))
        H = MonotoneFn(hb, Direction.NON_DECREASING)
    return H, g


def power_transform(f, p: float) -> GridFn:
    """Nodewise ``f**p`` with the tail re-fit in the same family."""
    f = _base(f)
    values = f.values**p
    tail = f.tail
    if tail is not None:
        lim = tail.limit**p
        if tail.kind == "limit_value":
            tail = TailSpec.constant(values[-1])
        elif tail.limit == 0.0:
            tail = TailSpec.exponential(p * tail.rate, 0.0)
        else:
            tail = TailSpec.exponential(tail.rate, lim)
    return GridFn(f.grid, values, tail)


@dataclass(frozen=True)
class Prop1Check:
    strict_ok: bool
    nonstrict_ok: bool
    delta_F: float


def check_prop1(H, G1, G2, cfg: QuadratureConfig = DEFAULT_CFG,
                functional: Callable = functional_F) -> Prop1Check:
    """``F(G2) - F(G1)`` for ``G1 <= G2`` in A and non-decreasing ``H``."""
    g1, g2 = _base(G1), _base(G2)
    pts = np.union1d(g1.grid, g2.grid)
    if np.any(g1(pts) > g2(pts) + STRICT_TOL):
        raise PreconditionError("G1 <= G2 fails on the sampled grid")
    dF = functional(H, G2, cfg) - functional(H, G1, cfg)
    return Prop1Check(dF > 0, dF >= -NONSTRICT_TOL, dF)


@dataclass(frozen=True)
class HMReport:
    p: float
    lhs: float
    rhs_hm: float
    rhs_paper: float
    holds_hm: bool
    holds_paper: bool

    @property
    def margin_hm(self) -> float:
        return _hm_margin(self.p, self.lhs, self.rhs_hm)

    @property
    def margin_paper(self) -> float:
        return _hm_margin(self.p, self.lhs, self.rhs_paper)


def _hm_margin(p, lhs, rhs):
    # positive when the inequality holds; p = 1 demands equality
    if p < 1:
        return rhs - lhs
    if p > 1:
        return lhs - rhs
    return -abs(lhs - rhs)


def _interior(f: GridFn) -> np.ndarray:
    v = f.values[1:]
    return v if f.tail is not None else v[:-1]


def hm_evaluate(h, g, p: float, cfg: QuadratureConfig = DEFAULT_CFG) -> HMReport:
    """Compare ``int h d[-g]`` with ``m = int h^p d[-g^p]`` raised to ``1/p`` and to ``p``.

    For ``p <= 1`` the holding direction is ``lhs <= rhs``; for ``p >= 1`` it
    is reversed.
    """
    if not p > 0:
        raise PreconditionError("p must be > 0")
    hb, gb = _base(h), _base(g)
    if np.any(_interior(hb) <= 0) or np.any(_interior(gb) <= 0):
        raise PreconditionError("h and g must be positive on the open interval")
    if np.any(hb.values < 0) or np.any(gb.values < 0):
        raise PreconditionError("h and g must be non-negative")
    if classify_monotone(gb).direction not in (Direction.DECREASING, Direction.NON_INCREASING):
        raise PreconditionError("g must be decreasing")
    if abs(gb.right_value) > 1e-12:
        raise PreconditionError("g must vanish at b")
    lhs = integrate(hb, gb, cfg).value
    if p == 1:
        m = lhs
    else:
        m = integrate(power_transform(hb, p), power_transform(gb, p), cfg).value
    rhs_hm = m ** (1.0 / p)
    rhs_paper = m**p
    tol = HM_EQ_TOL if p == 1 else -HM_MARGIN
    return HMReport(p, lhs, rhs_hm, rhs_paper,
                    _hm_margin(p, lhs, rhs_hm) >= -tol,
                    _hm_margin(p, lhs, rhs_paper) >= -tol)


@dataclass(frozen=True)
class SuiteRow:
    instance_id: int
    property: str
    margin: float
    passed: bool
    asserted: bool = True


@dataclass
class SuiteReport:
    seed: int
    rows: list

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.rows if r.asserted)

    def summary(self) -> dict:
        """Pass counts and worst margin per property."""
        out = {}
        for r in self.rows:
            s = out.setdefault(r.property, {"passed": 0, "total": 0, "worst_margin": math.inf,
                                            "asserted": r.asserted})
            s["total"] += 1
            s["passed"] += int(r.passed)
            s["worst_margin"] = min(s["worst_margin"], r.margin)
        return out


def _instance_rows(i: int, seed: int, cfg: QuadratureConfig, functional: Callable,
                   ps) -> list:
    rng = _rng([seed, i])
    rows = []
    finite = bool(i % 2)
    a = 0.0 if rng.uniform() < 0.5 else float(rng.uniform(0.0, 2.0))
    b = a + float(rng.uniform(1.0, 10.0)) if finite else math.inf
    kind = G_KINDS[int(rng.integers(len(G_KINDS)))]
    fam = InstanceFamily(kind, {"a": a, "b": b}, int(rng.integers(2**32)))
    G1, G2 = gen_pair_A(fam)
    iv = Interval(a, G1.x_last)
    H = gen_H(H_KINDS[int(rng.integers(len(H_KINDS)))], iv if finite else Interval(a),
              int(rng.integers(2**32)))

    res = integrate_by_parts_residual(H, G1, Interval(a, b), cfg)
    tol = 1e-7 if finite else 10 * cfg.tail_tol
    rows.append(SuiteRow(i, "ibp_residual", tol - res, res < tol))

    chk = check_prop1(H, G1, G2, cfg, functional)
    rows.append(SuiteRow(i, "F_nonstrict", chk.delta_F + NONSTRICT_TOL, chk.nonstrict_ok))
    rows.append(SuiteRow(i, "F_strict", chk.delta_F, chk.strict_ok))

    c = float(rng.uniform(0.1, 3.0))
    Hc = MonotoneFn(GridFn.constant(c, a, b), Direction.NON_DECREASING)
    dFc = check_prop1(Hc, G1, G2, cfg, functional).delta_F
    err = abs(dFc - c * (G2(a) - G1(a)))
    rows.append(SuiteRow(i, "F_constant_H", 1e-9 - err, err < 1e-9))

    Hd = gen_H(H_KINDS[int(rng.integers(len(H_KINDS)))], iv if finite else Interval(a),
               int(rng.integers(2**32)), decreasing=True)
    d0 = functional_F0(Hd, G2, cfg) - functional_F0(Hd, G1, cfg)
    # increase in G fails whenever H(a)*(G2 - G1)(a) dominates; report only
    rows.append(SuiteRow(i, "F0_as_stated", d0, d0 > 0, asserted=False))
    P1, P2 = gen_pair_A(InstanceFamily(kind, {"a": a, "b": b, "pin_left": True},
                                       int(rng.integers(2**32))))
    d0 = functional_F0(Hd, P2, cfg) - functional_F0(Hd, P1, cfg)
    rows.append(SuiteRow(i, "F0_pinned_strict", d0, d0 > 0))

    f1, f2 = gen_f_pair(int(rng.integers(2**32)))
    hI = gen_H(H_KINDS[int(rng.integers(len(H_KINDS)))], Interval(0.0), int(rng.integers(2**32)))
    dI = functional_I(hI, f1, cfg) - functional_I(hI, f2, cfg)
    rows.append(SuiteRow(i, "I_decreasing", dI, dI > 0))

    h, g = gen_hm_instance(int(rng.integers(2**32)))
    for p in ps:
        rep = hm_evaluate(h, g, p, cfg)
        rows.append(SuiteRow(i, f"hm_p{p:g}", rep.margin_hm, rep.holds_hm))
        rows.append(SuiteRow(i, f"hm_exponent_p_p{p:g}", rep.margin_paper, rep.holds_paper, asserted=False))
    return rows


def run_property_suite(n_instances: int, seed: int, cfg: QuadratureConfig = DEFAULT_CFG,
                       functional: Callable = functional_F, ps=HM_PS) -> SuiteReport:
    """Run every property check on ``n_instances`` seeded instances.

    ``functional`` replaces ``F`` in the monotonicity checks of F; the CLI uses it to
    inject a broken integrator and exercise the failure path.
    """
    if int(n_instances) != n_instances or n_instances < 1:
        raise ValueError("n_instances must be a positive integer")
    rows = []
    for i in range(int(n_instances)):
        rows.extend(_instance_rows(i, seed, cfg, functional, ps))
    rows.sort(key=lambda r: r.instance_id)
    return SuiteReport(seed, rows)
