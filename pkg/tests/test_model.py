import math

import pytest
from hypothesis import given, strategies as st

from parkinglot.experiments import crossover_theta
from parkinglot.geometry import DomainError, PointX, dist
from parkinglot.model import (FanChainProvider, WeightError, WeightSeq,
                              check_weights, dhat_bounds, dhat_diam_bounds,
                              radial_diameter_bound)

from conftest import points

P = PointX
W = WeightSeq()


def test_geometric_sums_half():
    d = check_weights(WeightSeq(rho=0.5))
    assert (d.total, d.first_moment, d.second_moment) == pytest.approx((1, 2, 6), abs=1e-12)
    # independent check by partial sums
    part = [sum(L ** p * 0.5 ** L for L in range(1, 200)) for p in (0, 1, 2)]
    assert part == pytest.approx([1, 2, 6], abs=1e-12)


@pytest.mark.parametrize("rho", [0.1, 0.5, 0.9, 0.99])
def test_closed_forms_match_partial_sums(rho):
    w = WeightSeq(rho=rho)
    for N in (1, 3, 17):
        for p in (0, 1, 2):
            brute = math.fsum(L ** p * rho ** L for L in range(N, 20000))
            assert w.tail(N, p) == pytest.approx(brute, rel=1e-9)


def test_rho_near_one_is_finite_and_ordered():
    d = check_weights(WeightSeq(rho=0.99))
    assert d.finite and d.ordered


def test_explicit_weight_out_of_range():
    with pytest.raises(WeightError, match="L=1"):
        check_weights([1.5])
    with pytest.raises(WeightError):
        WeightSeq(rho=1.0)


def test_explicit_head_with_geometric_tail():
    w = WeightSeq(rho=0.5, head=(0.3, 0.2))
    assert w.weight(1) == 0.3 and w.weight(3) == 0.1
    brute = math.fsum(w.weight(L) * L for L in range(1, 400))
    assert w.tail(1, 1) == pytest.approx(brute, rel=1e-12)


def test_dhat_same_point():
    est = dhat_bounds(P(1, 3), P(1, 3))
    assert (est.lower, est.upper) == (0.0, 0.0)


def test_dhat_upper_example():
    est = dhat_bounds(P(0, 1), P(3, 1), WeightSeq(0.5, 30))
    assert est.upper <= 4.0 + 1e-12
    assert est.tail == pytest.approx(4 * 2.0 ** -30)


def test_dhat_lower_example():
    est = dhat_bounds(P(0, 1), P(10, 1), W, FanChainProvider(1.0, 1))
    assert est.lower == pytest.approx(10.0)
    assert est.tag == "conditional-L0=1"


def test_unconditional_lower_for_close_points():
    est = dhat_bounds(P(0, 1), P(0.5, 1))
    assert est.lower == pytest.approx(1.0) and est.tag == "certified"


def test_radial_diameter_constant():
    assert radial_diameter_bound(W) == pytest.approx(18.0, abs=1e-12)
    assert math.fsum(2.0 ** -L * (4 * L + 10) for L in range(1, 200)) == pytest.approx(18.0, abs=1e-12)


def test_diam_radial_ray():
    est = dhat_diam_bounds([P(0, 2.0 ** i) for i in range(11)], W)
    assert est.upper <= 18.0 + 1e-9


def test_diam_singleton_and_empty():
    est = dhat_diam_bounds([P(2, 2)], W)
    assert (est.lower, est.upper) == (0.0, 0.0)
    with pytest.raises(DomainError):
        dhat_diam_bounds([], W)


def test_diam_long_spiral_pair_conditional_on_ten():
    est = dhat_diam_bounds([P(0, 1), P(1e4, 1)], W, FanChainProvider(1.0, 10))
    assert est.lower >= (1e4 - 1) * 2.0 ** -9
    assert est.lower == pytest.approx(19.53, abs=0.01)
    assert est.lower > 18 and est.tag == "conditional-L0=10"


def test_unit_spacing_crossover_with_separation_ten():
    """Unit-spaced chains with separation 10: the bound passes 18 right after theta = 9216."""
    prov = FanChainProvider(1.0, 10)
    at = dhat_bounds(P(0, 1), P(9216.0, 1), W, prov).lower
    assert at == pytest.approx(18.0, abs=1e-9)
    t = crossover_theta(prov, W, 18.0)
    predicted = 1 + 18 / W.tail(10)
    assert predicted == 9217.0
    assert abs(t - predicted) <= 1.0


@given(points(), points(), st.sampled_from([FanChainProvider(1.0, 1), FanChainProvider(5.0, 1),
                                            FanChainProvider(1.0, 10)]))
def test_interval_consistency_and_symmetry(x, y, prov):
    a = dhat_bounds(x, y, W, prov)
    b = dhat_bounds(y, x, W, prov)
    assert a == b
    assert a.lower <= a.upper


@given(points(), points())
def test_unconditional_sandwich(x, y):
    est = dhat_bounds(x, y, W)
    assert 0 <= est.upper <= (1 + dist(x, y)) * W.tail(1) + 1e-9


@given(points(), points())
def test_larger_lmax_never_widens(x, y):
    ups = [dhat_bounds(x, y, WeightSeq(0.5, n)).upper for n in (1, 5, 10, 30, 60)]
    assert all(b <= a + 1e-12 for a, b in zip(ups, ups[1:]))


@given(st.floats(-20, 20), st.lists(st.floats(0, 60), min_size=1, max_size=8))
def test_radial_subsets_bounded(theta, exps):
    pts = [P(theta, 2.0 ** e) for e in exps]
    assert dhat_diam_bounds(pts, W).upper <= 18.0 + 1e-9
