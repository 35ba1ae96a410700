"""Net reproduction rate and stationary states of a size-structured population.

Vital rates depend on the whole density ``u`` through environment functionals
``E(x; u) = int w(x, y) u(y) dy``; each rate is a base profile in ``x`` times a
response ``phi(E)`` with ``phi(0) = 1``.  Everything is evaluated on one model
grid (see :class:`PopulationConfig`).  Hazards and ``G`` use trapezoid sums;
``R`` integrates ``beta/g`` against the exponential of the cumulative hazard
segment by segment, which stays accurate when ``mu/g`` is large.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grid_fn import GridFn, TailSpec, moment
from .monotone_props import SuiteReport, SuiteRow
from .stieltjes import PreconditionError, TruncationError, IntegralResult

log = logging.getLogger(__name__)

__all__ = [
    "KERNEL_KINDS",
    "RESPONSES",
    "PopulationConfig",
    "EnvironmentKernel",
    "Modulation",
    "RateSpec",
    "VitalRates",
    "MonotoneMode",
    "Density",
    "EquilibriumResult",
    "RMonotoneCheck",
    "ThresholdReport",
    "InnerIterationError",
    "environment_E",
    "survival_Pi",
    "net_reproduction_R",
    "birth_functional_G",
    "stationary_residual",
    "solve_equilibrium",
    "check_R_monotone",
    "threshold_report",
    "monotone_mode",
    "gen_monotone_rates",
    "gen_ordered_densities",
    "run_R_monotone_suite",
]

KERNEL_KINDS = ("total", "window", "above", "custom")
RESPONSES = ("exp_decay", "hill", "linear_up")


@dataclass(frozen=True)
class PopulationConfig:
    """Model grid and solver tolerances.

    ``x_max`` defaults to ``hazard_span / h_inf`` where ``h_inf`` is the
    far-field hazard ``mu / g`` of the unmodulated base profiles.  If feedback
    slows decay past that point, ``R`` raises instead of truncating silently.
    """

    n_nodes: int = 100_001
    x_max: Optional[float] = None
    hazard_span: float = 50.0
    tail_tol: float = 1e-10
    tol_R: float = 1e-6
    tol_inner: float = 1e-8
    tol_fix: float = 1e-6
    max_inner: int = 500
    damping: float = 0.5
    bracket_tol: float = 1e-8
    max_outer: int = 200

    def __post_init__(self):
        if self.n_nodes < 3:
            raise ValueError("n_nodes must be >= 3")
        for name in ("hazard_span", "tail_tol", "tol_R", "tol_inner", "tol_fix", "bracket_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.x_max is not None and not self.x_max > 0:
            raise ValueError("x_max must be > 0")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must be in (0, 1]")
        if self.max_inner < 1 or self.max_outer < 1:
            raise ValueError("iteration limits must be >= 1")


DEFAULT_POP = PopulationConfig()


@dataclass(frozen=True, eq=False)
class EnvironmentKernel:
    """Weight ``w(x, y) >= 0`` of the environment functional.

    ``total``: w = 1.  ``window``: w = 1 on ``[x, x + width]``.  ``above``:
    w = 1 for ``y >= x``.  ``custom``: ``w`` sampled on ``xs`` x ``ys``
    (trapezoid in y, linear in x, zero beyond ``ys[-1]``).
    """

    kind: str
    width: Optional[float] = None
    xs: Optional[np.ndarray] = None
    ys: Optional[np.ndarray] = None
    w: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "window" and not (self.width is not None and self.width > 0):
            raise ValueError("window kernel needs width > 0")
        if self.kind == "custom":
            xs, ys, w = (np.asarray(v, dtype=float) for v in (self.xs, self.ys, self.w))
            if w.shape != (xs.size, ys.size):
                raise ValueError("custom kernel w must have shape (len(xs), len(ys))")
            if np.any(w < 0):
                raise ValueError("kernel weights must be non-negative")
            if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
                raise ValueError("custom kernel axes must be strictly increasing")
            object.__setattr__(self, "xs", xs)
            object.__setattr__(self, "ys", ys)
            object.__setattr__(self, "w", w)

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "window":
            out["width"] = self.width
        if self.kind == "custom":
            out.update(x=self.xs.tolist(), y=self.ys.tolist(), w=self.w.tolist())
        return out


@dataclass(frozen=True)
class Modulation:
    response: str
    c: float
    kernel: EnvironmentKernel

    def __post_init__(self):
        if self.response not in RESPONSES:
            raise ValueError(f"unknown response {self.response!r}")
        if not self.c >= 0:
            raise ValueError("modulation strength c must be >= 0")

    def phi(self, E):
        E = np.asarray(E, dtype=float)
        if self.response == "exp_decay":
            return np.exp(-self.c * E)
        if self.response == "hill":
            return 1.0 / (1.0 + self.c * E)
        return 1.0 + self.c * E


@dataclass(frozen=True)
class RateSpec:
    base: GridFn
    modulation: Optional[Modulation] = None

    def __post_init__(self):
        if self.base.tail is None or self.base.a != 0.0:
            raise ValueError("rate profiles must be defined on [0, inf)")

    @classmethod
    def constant(cls, value: float, modulation: Optional[Modulation] = None) -> "RateSpec":
        return cls(GridFn.constant(value), modulation)


@dataclass(frozen=True)
class VitalRates:
    beta: RateSpec
    mu: RateSpec
    growth: RateSpec

    @classmethod
    def constant(cls, beta0: float, mu0: float, g0: float, **modulations) -> "VitalRates":
        """Constant profiles; keyword ``beta=``/``mu=``/``growth=`` attach modulations."""
        return cls(RateSpec.constant(beta0, modulations.get("beta")),
                   RateSpec.constant(mu0, modulations.get("mu")),
                   RateSpec.constant(g0, modulations.get("growth")))

    def specs(self):
        return (("beta", self.beta), ("mu", self.mu), ("growth", self.growth))


@dataclass(frozen=True)
class MonotoneMode:
    beta_nonincreasing: bool
    mu_nondecreasing: bool
    growth_nonincreasing: bool
    ratio_nondecreasing_in_x: Optional[bool]
    reasons: tuple = ()

    @property
    def monotone(self) -> bool:
        ok = self.beta_nonincreasing and self.mu_nondecreasing and self.growth_nonincreasing
        return ok and self.ratio_nondecreasing_in_x is not False


def _response(spec: RateSpec) -> Optional[str]:
    return None if spec.modulation is None else spec.modulation.response


def monotone_mode(rates: VitalRates) -> MonotoneMode:
    """Decide whether the rate construction forces ``R`` to be non-increasing in ``u``.

    ``beta`` must not grow and ``mu`` must not shrink with ``u``.  When growth
    depends on ``u`` the survival factor ``1/g`` no longer moves with the
    hazard, and the argument goes through the hazard form instead, which
    needs ``x -> beta/mu`` non-decreasing.  That is checked on the base
    profiles and by restricting the kernels to ``total``/``above``.
    """
    reasons = []
    b_ok = _response(rates.beta) in (None, "exp_decay", "hill")
    m_ok = _response(rates.mu) in (None, "linear_up")
    g_ok = _response(rates.growth) in (None, "exp_decay", "hill")
    if not b_ok:
        reasons.append("beta increases with u")
    if not m_ok:
        reasons.append("mu decreases with u")
    if not g_ok:
        reasons.append("growth increases with u")
    ratio = None
    if rates.growth.modulation is not None:
        ratio = True
        for name, spec in (("beta", rates.beta), ("mu", rates.mu)):
            if spec.modulation is not None and spec.modulation.kernel.kind not in ("total", "above"):
                ratio = False
                reasons.append(f"{name} kernel {spec.modulation.kernel.kind} breaks x-monotonicity of beta/mu")
        xb, xm = rates.beta.base, rates.mu.base
        pts = np.union1d(xb.grid, xm.grid)
        pts = np.union1d(pts, (pts[1:] + pts[:-1]) / 2)
        pts = np.append(pts, pts[-1] + 1e3)
        mu = xm(pts)
        if np.any(mu <= 0):
            ratio = False
            reasons.append("mu must be positive when growth depends on u")
        elif np.any(np.diff(xb(pts) / mu) < -1e-12):
            ratio = False
            reasons.append("beta/mu base profile decreases in x")
    return MonotoneMode(b_ok, m_ok, g_ok, ratio, tuple(reasons))


class Density:
    """Non-negative integrable density on ``[0, inf)`` with its total mass."""

    __slots__ = ("u", "total")

    def __init__(self, u: GridFn):
        if u.a != 0.0 or u.tail is None or u.tail.limit != 0.0:
            raise ValueError("density must live on [0, inf) and decay to 0")
        if np.any(u.values < 0):
            raise ValueError("density must be non-negative")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "total", u.integral())

    def __setattr__(self, name, value):
        raise AttributeError("Density is immutable")

    @classmethod
    def zero(cls) -> "Density":
        return cls(GridFn([0.0, 1.0], [0.0, 0.0], TailSpec.constant(0.0)))

    @classmethod
    def from_callable(cls, fn, grid, tail_rate: float) -> "Density":
        return cls(GridFn.from_callable(fn, grid, TailSpec.exponential(tail_rate)))

    def __call__(self, x):
        return self.u(x)

    def scaled(self, c: float) -> "Density":
        return Density(self.u.with_values(self.u.values * c, _scaled_tail(self.u.tail, c)))

    def __repr__(self):
        return f"Density(total={self.total:.6g}, {self.u!r})"


def _scaled_tail(tail: TailSpec, c: float) -> TailSpec:
    if tail.kind == "limit_value":
        return TailSpec.constant(tail.limit * c)
    return TailSpec.exponential(tail.rate, tail.limit * c)


def _kernel_E(u: GridFn, total: float, kernel: EnvironmentKernel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if kernel.kind == "total":
        return np.full(x.shape, total)
    if kernel.kind == "above":
        return total - u.antiderivative(x)
    if kernel.kind == "window":
        return u.antiderivative(x + kernel.width) - u.antiderivative(x)
    uy = u(kernel.ys)
    Ek = np.trapezoid(kernel.w * uy[None, :], kernel.ys, axis=1)
    return np.interp(x, kernel.xs, Ek)


def environment_E(u: Density, kernel: EnvironmentKernel, x):
    """``E(x; u) = int_0^inf w(x, y) u(y) dy``."""
    out = np.asarray(_kernel_E(u.u, u.total, kernel, x))
    return float(out) if out.ndim == 0 else out


class InnerIterationError(ArithmeticError):
    """The damped fixed-point iteration for ``u_B`` did not converge."""

    def __init__(self, message, B, iterations, last_change):
        super().__init__(message)
        self.B = B
        self.iterations = iterations
        self.last_change = last_change


@dataclass
class _State:
    """Rates and survival on the model grid for one density."""

    beta: np.ndarray
    mu: np.ndarray
    g: np.ndarray
    cum_hazard: np.ndarray
    Pi: np.ndarray
    tail_rate: float


class _Model:
    def __init__(self, rates: VitalRates, cfg: PopulationConfig):
        self.rates = rates
        self.cfg = cfg
        xmax = cfg.x_max
        if xmax is None:
            hz = self._min_hazard()
            if not hz > 0:
                raise TruncationError("unmodulated hazard mu/g is not bounded away from 0",
                                      IntegralResult(math.nan))
            xmax = cfg.hazard_span / hz
        x = np.linspace(0.0, xmax, cfg.n_nodes)
        kinks = np.concatenate([s.base.grid for _, s in rates.specs()])
        self.x = np.union1d(x, kinks[(kinks > 0) & (kinks < xmax)])
        self.dx = np.diff(self.x)
        self.base = {name: spec.base(self.x) for name, spec in rates.specs()}
        self.base_tail = {name: spec.base.right_value for name, spec in rates.specs()}
        if np.any(self.base["growth"] <= 0):
            raise PreconditionError("growth must be positive")

    def _min_hazard(self) -> float:
        mu, g = self.rates.mu.base, self.rates.growth.base
        pts = np.union1d(mu.grid, g.grid)
        gv = g(pts)
        if np.any(gv <= 0) or g.right_value <= 0:
            raise PreconditionError("growth must be positive")
        # hazard far out governs decay; the tail limits give it exactly
        return float(mu.right_value / g.right_value)

    def trapz(self, y) -> float:
        return float(np.sum(self.dx * (y[1:] + y[:-1])) / 2)

    def density(self, values, tail_rate) -> Density:
        return Density(GridFn(self.x, values, TailSpec.exponential(tail_rate)))

    def state(self, u: Density) -> _State:
        out = {}
        for name, spec in self.rates.specs():
            r = self.base[name]
            if spec.modulation is not None:
                E = _kernel_E(u.u, u.total, spec.modulation.kernel, self.x)
                r = r * spec.modulation.phi(E)
            out[name] = r
        g = out["growth"]
        if np.any(g <= 0):
            raise PreconditionError("growth(x, u) <= 0: survival is singular")
        hz = out["mu"] / g
        cum = np.concatenate(([0.0], np.cumsum(self.dx * (hz[1:] + hz[:-1]) / 2)))
        logPi = -cum - np.log(g)
        Pi = np.exp(logPi)
        # exponential continuation fitted to the last two decades of Pi
        target = logPi[-1] + math.log(100.0)
        j = int(np.searchsorted(-logPi, -target, side="right")) - 1
        j = min(max(j, 0), self.x.size - 2)
        rate = (logPi[j] - logPi[-1]) / (self.x[-1] - self.x[j])
        if not rate > 0:
            raise TruncationError("survival does not decay at x_max", IntegralResult(math.nan))
        return _State(out["beta"], out["mu"], g, cum, Pi, float(rate))

    def R(self, st: _State) -> float:
        # beta/g Pi = (beta/mu) d[-exp(-cum_hazard)]: beta/mu linear and the
        # cumulative hazard linear on each segment, the exponential integrated
        # exactly.  beta/mu stays smooth where mu/g is stiff; segments touching
        # mu = 0 fall back to beta/g linear.
        k = np.diff(st.cum_hazard) / self.dx
        m0, m1 = moment(0, k, self.dx), moment(1, k, self.dx)
        pos = st.mu > 0
        q = np.where(pos, st.beta / np.where(pos, st.mu, 1.0), 0.0)
        seg_q = k * (q[:-1] * m0 + (np.diff(q) / self.dx) * m1)
        p = st.beta / st.g
        seg_p = p[:-1] * m0 + (np.diff(p) / self.dx) * m1
        seg = np.where(pos[:-1] & pos[1:], seg_q, seg_p)
        value = float(np.sum(np.exp(-st.cum_hazard[:-1]) * seg))
        tail = st.beta[-1] * st.Pi[-1] / st.tail_rate
        bound = max(float(np.max(st.beta)), 0.0) * st.Pi[-1] / st.tail_rate
        if bound > self.cfg.tail_tol * max(1.0, abs(value)):
            raise TruncationError(f"integrand beta*Pi not negligible at x_max={self.x[-1]:.6g}",
                                  IntegralResult(value + tail, float(self.x[-1]), bound))
        return value + tail

    def G(self, u: Density, st: _State) -> float:
        uv = u.u(self.x)
        beyond = u.total - u.u.antiderivative(self.x[-1])
        return self.trapz(st.beta * uv) + st.beta[-1] * beyond

    def l1_diff(self, u: Density, v_vals, v_rate) -> float:
        """``||u - v||_1`` for ``v`` given on the model grid with an exponential tail."""
        uv = u.u(self.x)
        body = self.trapz(np.abs(uv - v_vals))
        ut = u.u.tail
        if u.u.x_last <= self.x[-1] and ut.kind == "exponential_decay":
            u_rate, u_last = ut.rate, float(uv[-1])
        elif u.u.x_last <= self.x[-1]:
            u_rate, u_last = None, 0.0
        else:
            # u still has grid nodes past x_max: bound its remaining mass directly
            rest = u.total - u.u.antiderivative(self.x[-1])
            return body + rest + abs(v_vals[-1]) / v_rate
        return body + _exp_l1(u_last, u_rate, float(v_vals[-1]), v_rate)

    def fixed_point(self, B: float, start: Optional[np.ndarray] = None):
        """Damped iteration ``u <- (1-d) u + d B Pi(u)``; returns (density, state, iterations)."""
        cfg = self.cfg
        if B == 0.0:
            u = self.density(np.zeros_like(self.x), 1.0)
            return u, self.state(u), 0
        vals = np.zeros_like(self.x) if start is None else start
        rate = 1.0
        u = self.density(vals, rate)
        change = math.inf
        for it in range(1, cfg.max_inner + 1):
            st = self.state(u)
            new = (1 - cfg.damping) * vals + cfg.damping * B * st.Pi
            # tail of a mixture: keep the slower rate, it bounds both pieces
            rate = st.tail_rate if it == 1 else min(rate, st.tail_rate)
            change = self.trapz(np.abs(new - vals))
            vals = new
            u = self.density(vals, rate)
            if change < cfg.tol_inner:
                st = self.state(u)
                return u, st, it
        raise InnerIterationError(
            f"fixed point for B={B:.6g} not reached in {cfg.max_inner} iterations "
            f"(last L1 change {change:.3g})", B, cfg.max_inner, change)


def _exp_l1(a: float, p: Optional[float], b: float, q: float) -> float:
    """``int_0^inf |a e^{-pt} - b e^{-qt}| dt`` (``p=None`` means a = 0)."""
    if p is None or a == 0.0:
        return abs(b) / q
    if b == 0.0:
        return abs(a) / p
    F = lambda t0, t1: (a * (math.exp(-p * t0) - math.exp(-p * t1)) / p  # noqa: E731
                        - b * (math.exp(-q * t0) - math.exp(-q * t1)) / q)
    if p != q and a * b > 0:
        t = math.log(a / b) / (p - q)
        if t > 0:
            return abs(F(0.0, t)) + abs(F(t, math.inf))
    return abs(F(0.0, math.inf))


def survival_Pi(x, u: Density, rates: VitalRates, cfg: PopulationConfig = DEFAULT_POP):
    """``Pi(x, u) = exp(-int_0^x mu/g dy) / g(x, u)`` (cumulative trapezoid on the model grid)."""
    m = _Model(rates, cfg)
    st = m.state(u)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs < 0):
        raise ValueError("x must be >= 0")
    out = np.empty_like(xs)
    inside = xs <= m.x[-1]
    if np.any(inside):
        xi = xs[inside]
        i = np.clip(np.searchsorted(m.x, xi, side="right") - 1, 0, m.x.size - 2)
        t = xi - m.x[i]
        rates_x = {}
        for name, spec in rates.specs():
            r = spec.base(xi)
            if spec.modulation is not None:
                r = r * spec.modulation.phi(_kernel_E(u.u, u.total, spec.modulation.kernel, xi))
            rates_x[name] = r
        if np.any(rates_x["growth"] <= 0):
            raise PreconditionError("growth(x, u) <= 0: survival is singular")
        hz_x = rates_x["mu"] / rates_x["growth"]
        hz_i = st.mu[i] / st.g[i]
        H = st.cum_hazard[i] + t * (hz_i + hz_x) / 2
        out[inside] = np.exp(-H) / rates_x["growth"]
    if np.any(~inside):
        out[~inside] = st.Pi[-1] * np.exp(-st.tail_rate * (xs[~inside] - m.x[-1]))
    return float(out[0]) if np.ndim(x) == 0 else out


def net_reproduction_R(u: Density, rates: VitalRates, cfg: PopulationConfig = DEFAULT_POP) -> float:
    """``R(u) = int_0^inf beta(x, u) Pi(x, u) dx``."""
    m = _Model(rates, cfg)
    return m.R(m.state(u))


def birth_functional_G(u: Density, rates: VitalRates, cfg: PopulationConfig = DEFAULT_POP) -> float:
    """``G(u) = int_0^inf beta(x, u) u(x) dx``."""
    m = _Model(rates, cfg)
    return m.G(u, m.state(u))


def stationary_residual(u: Density, rates: VitalRates, cfg: PopulationConfig = DEFAULT_POP) -> float:
    """L1 norm of ``u - G(u) Pi(., u)``; exactly 0 for the zero density."""
    m = _Model(rates, cfg)
    st = m.state(u)
    Gu = m.G(u, st)
    if Gu == 0.0 and u.total == 0.0:
        return 0.0
    return m.l1_diff(u, Gu * st.Pi, st.tail_rate)


@dataclass
class EquilibriumResult:
    B_star: float
    u_star: Optional[Density]
    R_at_star: float
    residual: float
    iterations: tuple
    converged: bool
    status: str
    R0: float
    bracket: tuple = ()
    Pi_star: Optional[np.ndarray] = field(default=None, repr=False)
    grid: Optional[np.ndarray] = field(default=None, repr=False)


def solve_equilibrium(rates: VitalRates, cfg: PopulationConfig = DEFAULT_POP,
                      B_bracket: tuple = (0.0, 100.0)) -> EquilibriumResult:
    """Nontrivial stationary density via ``R(u_B) = 1``.

    For each birth flux ``B`` the candidate ``u_B = B * Pi(., u_B)`` comes from
    a damped fixed-point iteration started at ``u = 0`` (warm-started during
    bisection); ``B`` is bisected on the sign of ``R(u_B) - 1``.

    Returns ``status="no_sign_change"`` (and ``converged=False``) when
    ``R(u_B) - 1`` keeps one sign on the bracket; iteration failures raise
    :class:`InnerIterationError`.
    """
    lo, hi = map(float, B_bracket)
    if not 0 <= lo < hi:
        raise ValueError("bracket must satisfy 0 <= lo < hi")
    m = _Model(rates, cfg)
    R0 = m.R(m.state(Density.zero()))
    inner_total = 0

    def probe(B, start=None):
        nonlocal inner_total
        u, st, it = m.fixed_point(B, start)
        inner_total += it
        return u, st, m.R(st) - 1.0

    u_lo, _, f_lo = probe(lo)
    u_hi, _, f_hi = probe(hi)
    log.debug("bracket f(%g)=%g f(%g)=%g", lo, f_lo, hi, f_hi)
    if f_lo * f_hi > 0:
        return EquilibriumResult(math.nan, None, math.nan, math.nan, (0, inner_total), False,
                                 "no_sign_change", R0, (lo, hi))
    outer = 0
    while hi - lo > cfg.bracket_tol and outer < cfg.max_outer:
        outer += 1
        mid = 0.5 * (lo + hi)
        start = u_hi.u.values if u_lo.total == 0.0 else u_lo.u.values
        u_mid, _, f_mid = probe(mid, np.array(start))
        if f_mid == 0.0:
            lo = hi = mid
            break
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo, u_lo = mid, f_mid, u_mid
        else:
            hi, f_hi, u_hi = mid, f_mid, u_mid
    B = 0.5 * (lo + hi)
    u, st, _ = m.fixed_point(B, np.array(u_hi.u.values))
    R_star = m.R(st)
    Gu = m.G(u, st)
    residual = m.l1_diff(u, Gu * st.Pi, st.tail_rate)
    B_flux = float(st.g[0] * u.u.values[0])
    converged = abs(R_star - 1.0) <= cfg.tol_R and residual <= cfg.tol_fix
    status = "converged" if converged else "not_converged"
    if B == 0.0:
        status, converged = "trivial", False
    return EquilibriumResult(B_flux, u, R_star, residual, (outer, inner_total), converged,
                             status, R0, (lo, hi), st.Pi, m.x)


@dataclass(frozen=True)
class RMonotoneCheck:
    ok: bool
    delta_R: float


def _ordered(u1: Density, u2: Density) -> bool:
    pts = np.union1d(u1.u.grid, u2.u.grid)
    far = pts[-1] + np.array([1.0, 10.0, 100.0])
    pts = np.concatenate((pts, far))
    return bool(np.all(u1(pts) <= u2(pts) * (1 + 1e-12) + 1e-300))


def check_R_monotone(rates: VitalRates, u1: Density, u2: Density,
                     cfg: PopulationConfig = DEFAULT_POP) -> RMonotoneCheck:
    """``R(u2) - R(u1)`` for ``u1 <= u2``; ``ok`` when it is ``<= 1e-8``."""
    mode = monotone_mode(rates)
    if not mode.monotone:
        raise PreconditionError("rates are not in monotone mode: " + "; ".join(mode.reasons))
    if not _ordered(u1, u2):
        raise PreconditionError("u1 <= u2 fails")
    m = _Model(rates, cfg)
    dR = m.R(m.state(u2)) - m.R(m.state(u1))
    return RMonotoneCheck(dR <= 1e-8, dR)


@dataclass(frozen=True)
class ThresholdReport:
    R0: float
    mode: MonotoneMode
    conclusion: str
    message: str


def threshold_report(rates: VitalRates, cfg: PopulationConfig = DEFAULT_POP) -> ThresholdReport:
    """What ``R(0)`` implies about nontrivial equilibria.

    ``expected`` when ``R(0) > 1``; ``excluded`` when ``R(0) < 1`` and the rates
    are in monotone mode; otherwise ``indeterminate``.
    """
    R0 = net_reproduction_R(Density.zero(), rates, cfg)
    mode = monotone_mode(rates)
    if R0 > 1 + cfg.tol_R:
        return ThresholdReport(R0, mode, "expected", f"nontrivial equilibrium expected (R(0)={R0:.6g}>1)")
    if R0 < 1 - cfg.tol_R and mode.monotone:
        return ThresholdReport(R0, mode, "excluded", f"excluded (R(0)={R0:.6g}<1, R monotone)")
    why = "R(0)=1 within tolerance" if R0 >= 1 - cfg.tol_R else "R not known to be monotone"
    return ThresholdReport(R0, mode, "indeterminate", f"indeterminate (R(0)={R0:.6g}; {why})")


# seeded instances for the monotonicity suite

_PROFILE_X = np.linspace(0.0, 20.0, 41)


def _profile(values) -> GridFn:
    values = np.asarray(values, dtype=float)
    return GridFn(_PROFILE_X, values, TailSpec.constant(values[-1]))


def _modulation(rng, responses, kernels) -> Optional[Modulation]:
    response = responses[int(rng.integers(len(responses)))]
    if response is None:
        return None
    kind = kernels[int(rng.integers(len(kernels)))]
    width = float(rng.uniform(0.5, 5.0)) if kind == "window" else None
    return Modulation(response, float(rng.uniform(0.0, 2.0)), EnvironmentKernel(kind, width))


def gen_monotone_rates(rng: np.random.Generator) -> VitalRates:
    """Random vital rates whose construction puts them in monotone mode."""
    x = _PROFILE_X
    g_mod = _modulation(rng, (None, "exp_decay", "hill"), ("total", "window", "above"))
    kernels = ("total", "above") if g_mod is not None else ("total", "window", "above")
    b_mod = _modulation(rng, (None, "exp_decay", "hill"), kernels)
    m_mod = _modulation(rng, (None, "linear_up"), kernels)
    b0 = rng.uniform(0.5, 4.0)
    m0 = rng.uniform(0.3, 2.0)
    if g_mod is not None:
        # keep x -> beta/mu non-decreasing: rising fertility, flat mortality
        beta = b0 * (1.0 - rng.uniform(0.0, 0.9) * np.exp(-rng.uniform(0.2, 2.0) * x))
        mu = np.full_like(x, m0)
    else:
        beta = b0 * (1.0 + rng.uniform(-0.5, 0.5) * np.sin(rng.uniform(0.1, 1.0) * x))
        mu = m0 * (1.0 + rng.uniform(0.0, 1.0) * (1.0 - np.exp(-0.3 * x)))
    growth = rng.uniform(0.5, 2.0) * (1.0 + rng.uniform(0.0, 1.0) * np.exp(-0.5 * x))
    return VitalRates(RateSpec(_profile(beta), b_mod), RateSpec(_profile(mu), m_mod),
                      RateSpec(_profile(growth), g_mod))


def gen_ordered_densities(rng: np.random.Generator) -> tuple[Density, Density]:
    """A pair ``u1 <= u2`` (pointwise, tails included) with ``u1 != u2``."""
    X = float(rng.uniform(5.0, 20.0))
    grid = np.linspace(0.0, X, 401)
    A, r = rng.uniform(0.1, 2.0), rng.uniform(0.3, 2.0)
    w, ph = rng.uniform(0.2, 3.0), rng.uniform(0, 2 * np.pi)
    u1 = A * np.exp(-r * grid) * (1.0 + 0.5 * np.sin(w * grid + ph))
    scale = 1.0 + rng.uniform(0.0, 1.0)
    sigma = rng.uniform(0.5, 3.0)
    bump = rng.uniform(0.05, 1.0) * grid * np.exp(-grid / sigma)
    u2 = scale * u1 + bump
    d1 = Density(GridFn(grid, u1, TailSpec.exponential(float(r))))
    d2 = Density(GridFn(grid, u2, TailSpec.exponential(float(min(r, 1.0 / sigma)))))
    return d1, d2


def run_R_monotone_suite(n_instances: int, seed: int,
                         cfg: PopulationConfig = DEFAULT_POP) -> SuiteReport:
    """``R(u2) <= R(u1) + 1e-8`` over seeded monotone-mode rates and ordered pairs."""
    if int(n_instances) != n_instances or n_instances < 1:
        raise ValueError("n_instances must be a positive integer")
    rows = []
    for i in range(int(n_instances)):
        rng = np.random.default_rng([seed, i])
        rates = gen_monotone_rates(rng)
        u1, u2 = gen_ordered_densities(rng)
        chk = check_R_monotone(rates, u1, u2, cfg)
        rows.append(SuiteRow(i, "R_nonincreasing", 1e-8 - chk.delta_R, chk.ok))
    return SuiteReport(seed, rows)
