import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from parkinglot.curtains import (Disjointness, Side, disjoint, fan,
                                 foot_parameters, meets, member,
                                 parse_curtain, seg, separates, sides, strip)
from parkinglot.geometry import DomainError, PointX, project

from conftest import points

P = PointX


def test_fan_membership_examples():
    assert member(fan(0), P(0.4, 7)) is Side.ON
    assert member(fan(0), P(0.6, 1)) is Side.PLUS
    assert member(fan(0), P(0.5, 2)) is Side.ON
    assert member(fan(0), P(-0.6, 3)) is Side.MINUS


def test_fan_generic_path_agrees_on_examples():
    for x in (P(0.4, 7), P(0.6, 1), P(-3.0, 2.5)):
        assert member(fan(0), x, fast=False) is member(fan(0), x)


def test_separates_examples():
    assert separates(fan(5), P(0, 1), P(10, 1))
    assert not separates(fan(5), P(0, 1), P(5, 3))
    x = P(2.0, 4.0)
    assert not separates(fan(5), x, x)


def test_pole_must_be_interior():
    with pytest.raises(DomainError):
        strip(0.0, 0.5)
    with pytest.raises(DomainError):
        seg(P(0, 2), P(0, 2.5), 0.3)


def test_disjoint_fans():
    assert disjoint(fan(0), fan(2)).status is Disjointness.CERTIFIED_DISJOINT


def test_overlapping_fans_refuted_with_witness():
    res = disjoint(fan(0), fan(0.9))
    assert res.status is Disjointness.REFUTED
    assert res.witness == P(0.45, 1.0)


def test_identical_curtains_refuted():
    h = seg(P(-1, 3), P(2, 5), 1.5)
    res = disjoint(h, h)
    assert res.status is Disjointness.REFUTED
    assert member(h, res.witness) is Side.ON


def test_strips_in_common_half_flat_meet():
    w = meets(strip(0, 3), strip(math.pi / 2, 3))
    assert w is not None
    assert (w.theta, w.rad) == pytest.approx((math.pi / 4, 4 * math.sqrt(2)))
    assert member(strip(0, 3), w, fast=False) is Side.ON
    assert member(strip(math.pi / 2, 3), w, fast=False) is Side.ON


def test_disjoint_fans_do_not_meet():
    assert meets(fan(0), fan(2), 500) is None


def test_curtain_meets_itself():
    h = strip(1.0, 2.0)
    w = meets(h, h)
    assert member(h, w) is Side.ON


def test_strip_meets_fan_closed_form():
    w = meets(strip(0.3, 4.0), fan(0.0))
    assert member(fan(0.0), w) is Side.ON
    assert member(strip(0.3, 4.0), w, fast=False) is Side.ON


def test_strips_with_different_duals_only_refutable():
    res = disjoint(strip(0.0, 3.0), strip(2.0, 3.0), budget=200)
    assert res.status in (Disjointness.REFUTED, Disjointness.UNKNOWN)
    assert res.status is not Disjointness.CERTIFIED_DISJOINT


def test_seg_curtain_sampled_refutation():
    h1 = seg(P(-2, 4), P(2, 4), 2.0)
    h2 = seg(P(-2, 5), P(2, 5), 2.5)
    res = disjoint(h1, h2, budget=2000)
    assert res.status is Disjointness.REFUTED
    assert member(h1, res.witness) is Side.ON and member(h2, res.witness) is Side.ON


def test_parse_descriptors():
    assert parse_curtain("fan:2.5") == fan(2.5)
    assert parse_curtain("strip:0.1:3") == strip(0.1, 3.0)
    h = parse_curtain("seg:0,2:3,2:1")
    assert h.center == 1.0 and h.dual.p == P(0, 2)
    assert parse_curtain(h.describe()) == h
    with pytest.raises(ValueError):
        parse_curtain("blob:1")


curtain_strategy = st.one_of(
    st.builds(fan, st.floats(-8, 8)),
    st.builds(strip, st.floats(-8, 8), st.floats(0.6, 8)),
)


@given(curtain_strategy, points())
def test_exactly_one_side(h, x):
    s = member(h, x)
    t = foot_parameters(h, [x.theta], [x.rad])[0]
    lo, hi = h.pole
    assert (s is Side.MINUS) == (t < lo)
    assert (s is Side.PLUS) == (t > hi)
    assert (s is Side.ON) == (lo <= t <= hi)


def test_fast_path_agreement_bulk():
    rng = np.random.default_rng(11)
    mismatches = 0
    total = 0
    for k in range(100):
        h = fan(rng.uniform(-6, 6)) if k % 2 else strip(rng.uniform(-6, 6), rng.uniform(0.6, 6))
        th = rng.uniform(-3 * math.pi, 3 * math.pi, 100)
        r = rng.uniform(1, 10, 100)
        fast = foot_parameters(h, th, r, fast=True)
        slow = foot_parameters(h, th, r, fast=False)
        assert np.allclose(fast, slow, atol=1e-6)
        a, b = sides(h, th, r, True), sides(h, th, r, False)
        lo, hi = h.pole
        near = (np.abs(fast - lo) < 1e-6) | (np.abs(fast - hi) < 1e-6)
        mismatches += np.count_nonzero((a != b) & ~near)
        total += len(th)
    assert total == 10 ** 4
    assert mismatches == 0


@given(st.floats(-5, 5), st.floats(0.6, 5))
def test_strip_chart_foot_matches_projection(theta0, s):
    h = strip(theta0, s)
    for d in (-1.5, -0.3, 0.0, 0.9, 1.5):
        x = P(theta0 + d, 1.0 + 3.0 * abs(d) + 0.5)
        fast = foot_parameters(h, [x.theta], [x.rad])[0]
        assert fast == pytest.approx(project(x, h.dual), abs=1e-6)


@given(st.floats(-5, 5), st.floats(1.6, 6), st.floats(0.1, 3))
def test_same_dual_middle_separates(s, gap, beyond):
    left, mid, right = fan(s - gap), fan(s), fan(s + gap)
    x = P(left.pole[0] - beyond, 2.0)
    y = P(right.pole[1] + beyond, 5.0)
    assert separates(mid, x, y)


@given(st.floats(-5, 5), st.floats(1.0, 9.0))
def test_curtain_has_unit_thickness(s, r):
    """Moving along a fiber-transverse direction by the pole width crosses the curtain."""
    h = fan(s)
    on = P(s, r)
    assert member(h, on) is Side.ON
    assert member(h, P(s - 0.5 - 1e-9, r)) is Side.MINUS
    assert member(h, P(s + 0.5 + 1e-9, r)) is Side.PLUS
    assert member(h, P(s - 0.5, r)) is Side.ON and member(h, P(s + 0.5, r)) is Side.ON
