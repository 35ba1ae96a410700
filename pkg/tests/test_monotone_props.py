import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from stieltjes_pop.grid_fn import Direction, GridFn, Interval, MonotoneFn, TailSpec, classify_monotone
from stieltjes_pop.monotone_props import (
    G_KINDS,
    H_KINDS,
    InstanceFamily,
    check_prop1,
    gen_H,
    gen_hm_instance,
    gen_pair_A,
    hm_evaluate,
    power_transform,
    run_property_suite,
)
from stieltjes_pop.stieltjes import PreconditionError, functional_F


def _h_identity():
    # h(x) = x, capped at 60 where e^{-x} has no mass left worth counting
    x = np.concatenate(([0.0], np.geomspace(1e-10, 60.0, 40001)))
    return MonotoneFn(GridFn(x, x, TailSpec.constant(60.0)), Direction.NON_DECREASING)


EXP = GridFn([0, 1e-9], [1.0, math.exp(-1e-9)], TailSpec.exponential(1.0))


@pytest.mark.parametrize("kind", G_KINDS)
@pytest.mark.parametrize("b", [5.0, math.inf])
def test_pairs_are_ordered_and_in_A(kind, b):
    G1, G2 = gen_pair_A(InstanceFamily(kind, {"a": 0.5, "b": b}, seed=1))
    assert G1.in_A() and G2.in_A()
    x = np.union1d(G1.grid, G2.grid)
    inner = x[x < G1.x_last] if math.isfinite(b) else np.append(x, x[-1] + [1.0, 10.0, 100.0])
    assert np.min(G2(inner) - G1(inner)) > 0


def test_pairs_are_deterministic():
    fam = InstanceFamily("piecewise_random", {"a": 0.0, "b": math.inf}, seed=7)
    (a1, a2), (b1, b2) = gen_pair_A(fam), gen_pair_A(fam)
    assert np.array_equal(a1.values, b1.values) and np.array_equal(a2.values, b2.values)


def test_pinned_pairs_agree_at_left_end():
    G1, G2 = gen_pair_A(InstanceFamily("exp_decay", {"a": 0.0, "b": 3.0, "pin_left": True}, 4))
    assert G1(0.0) == G2(0.0)
    assert np.all(G2.values[1:-1] > G1.values[1:-1])


def test_unknown_family_rejected():
    with pytest.raises(ValueError):
        InstanceFamily("gaussian")


@pytest.mark.parametrize("kind", H_KINDS)
@pytest.mark.parametrize("decreasing", [False, True])
def test_gen_H_contract(kind, decreasing):
    for iv in (Interval(0.0, 4.0), Interval(1.0)):
        H = gen_H(kind, iv, seed=3, decreasing=decreasing)
        want = Direction.DECREASING if decreasing else Direction.INCREASING
        assert H.direction is want
        assert np.all(H.values >= 0) and H.bound >= np.max(H.values)


def test_check_prop1_examples():
    H = MonotoneFn(GridFn([0, 1], [0, 1]), Direction.INCREASING)
    G1, G2 = GridFn([0, 1], [0.5, 0]), GridFn([0, 1], [1, 0])
    chk = check_prop1(H, G1, G2)
    assert chk.delta_F == pytest.approx(0.25, abs=1e-15) and chk.strict_ok
    Hc = MonotoneFn(GridFn.constant(2.0, 0, 1), Direction.NON_DECREASING)
    P1, P2 = GridFn([0, 0.5, 1], [1, 0.5, 0]), GridFn([0, 0.5, 1], [1, 0.9, 0])
    chk = check_prop1(Hc, P1, P2)
    assert abs(chk.delta_F) < 1e-15 and chk.nonstrict_ok
    assert check_prop1(H, G2, G2).delta_F == 0.0


def test_check_prop1_rejects_unordered():
    H = MonotoneFn(GridFn([0, 1], [0, 1]), Direction.INCREASING)
    with pytest.raises(PreconditionError):
        check_prop1(H, GridFn([0, 1], [1, 0]), GridFn([0, 1], [0.5, 0]))


def test_hm_p1_equality():
    for seed in range(20):
        h, g = gen_hm_instance(seed)
        r = hm_evaluate(h, g, 1.0)
        assert abs(r.lhs - r.rhs_hm) < 1e-9 and abs(r.lhs - r.rhs_paper) < 1e-9


def test_hm_half_power_closed_form():
    r = hm_evaluate(_h_identity(), EXP, 0.5)
    assert r.lhs == pytest.approx(1.0, abs=1e-9)
    m = math.sqrt(math.pi / 2)
    assert r.rhs_hm == pytest.approx(m**2, rel=1e-6)
    assert r.rhs_paper == pytest.approx(m**0.5, rel=1e-6)
    assert r.holds_hm


def test_hm_square_reversed():
    # m = int x^2 d[-e^{-2x}] = 1/2, so m^{1/2} < 1 = lhs
    r = hm_evaluate(_h_identity(), EXP, 2.0)
    assert r.rhs_hm == pytest.approx(math.sqrt(0.5), rel=1e-6)
    want = quad(lambda x: x**2 * 2 * math.exp(-2 * x), 0, np.inf)[0] ** 0.5
    assert r.rhs_hm == pytest.approx(want, rel=1e-6)
    assert r.holds_hm and r.margin_hm > 0.2


def test_hm_rejects_bad_inputs():
    h, g = gen_hm_instance(0)
    with pytest.raises(PreconditionError):
        hm_evaluate(h, g, 0.0)
    up = GridFn([0, 1], [0, 1], TailSpec.exponential(1.0))
    with pytest.raises(PreconditionError):
        hm_evaluate(h, up, 0.5)


def test_power_transform_tails():
    f = GridFn([0, 1], [2, 1], TailSpec.exponential(1.5))
    p = power_transform(f, 3.0)
    assert p.tail.rate == 4.5 and p(1.0) == 1.0
    x = np.array([1.0, 2.0, 4.0])
    assert np.allclose(p(x), f(x) ** 3, rtol=1e-14)


def test_suite_deterministic_and_green():
    r1 = run_property_suite(20, seed=42)
    r2 = run_property_suite(20, seed=42)
    assert r1.rows == r2.rows
    assert r1.ok
    props = {r.property for r in r1.rows}
    assert {"ibp_residual", "F_strict", "F_nonstrict", "F0_pinned_strict", "I_decreasing"} <= props


def test_suite_reports_but_does_not_assert_F0_as_stated():
    rows = [r for r in run_property_suite(20, seed=1).rows if r.property == "F0_as_stated"]
    assert rows and not any(r.asserted for r in rows)
    assert not all(r.passed for r in rows)


def test_suite_catches_broken_functional():
    bad = run_property_suite(5, seed=0, functional=lambda H, G, cfg: -functional_F(H, G, cfg))
    assert not bad.ok


def test_suite_rejects_empty():
    with pytest.raises(ValueError):
        run_property_suite(0, seed=0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from(G_KINDS), st.booleans())
def test_prop1_on_random_pairs(seed, kind, finite):
    b = 6.0 if finite else math.inf
    G1, G2 = gen_pair_A(InstanceFamily(kind, {"a": 0.0, "b": b}, seed))
    H = gen_H(H_KINDS[seed % 3], Interval(0.0, G1.x_last) if finite else Interval(0.0), seed)
    chk = check_prop1(H, G1, G2)
    assert chk.strict_ok and chk.nonstrict_ok


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_hm_direction_on_random_instances(seed):
    h, g = gen_hm_instance(seed)
    for p in (0.25, 0.5, 0.75):
        assert hm_evaluate(h, g, p).margin_hm >= -1e-8
    for p in (2.0, 4.0):
        assert hm_evaluate(h, g, p).margin_hm >= -1e-8


def test_hm_instances_meet_hypotheses():
    for seed in range(10):
        h, g = gen_hm_instance(seed)
        assert classify_monotone(g.base).direction in (Direction.DECREASING, Direction.NON_INCREASING)
        assert np.all(g.values[1:-1] > 0) and g.right_value == 0.0
        assert h.direction.upward
