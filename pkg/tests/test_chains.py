from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from parkinglot import chains as ch
from parkinglot.curtains import fan, separates, strip
from parkinglot.geometry import PointX, RadialRay, SpiralLine

P = PointX


def packing_oracle(D: Fraction, step=Fraction(1, 16)) -> int:
    """Exhaustive enumeration of unit intervals with disjoint interiors inside (0, D).

    Left endpoints range over a grid of width ``step``; every feasible
    placement sequence is visited.
    """
    lefts = []
    x = step
    while x + 1 < D:
        lefts.append(x)
        x += step
    best = 0

    def extend(count, min_left):
        nonlocal best
        best = max(best, count)
        for a in lefts:
            if a >= min_left:
                extend(count + 1, a + 1)

    extend(0, Fraction(0))
    return best


@pytest.mark.parametrize("D", [Fraction(k, 2) for k in range(1, 13)])
def test_cardinality_matches_packing_oracle(D):
    expected = packing_oracle(D)
    chain = ch.max_same_dual_chain(SpiralLine(), P(0.0, 1.0), P(float(D), 1.0))
    assert len(chain) == expected == ch.chain_cardinality(float(D))


def test_packing_oracle_frozen_values():
    assert [packing_oracle(Fraction(k, 2)) for k in range(1, 13)] == [0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5]


def test_max_chain_examples():
    assert len(ch.max_same_dual_chain(SpiralLine(), P(0, 1), P(10, 1))) == 9
    assert len(ch.max_same_dual_chain(SpiralLine(), P(3, 2), P(3, 2))) == 0
    assert len(ch.max_same_dual_chain(SpiralLine(), P(0, 1), P(0.8, 1))) == 0


@given(st.floats(-50, 50), st.floats(0.0, 60.0), st.sampled_from([1.0, 2.5, 5.0]))
def test_max_chain_is_certified_and_separates(a, gap, spacing):
    x, y = P(a, 1.0), P(a + gap, 3.0)
    c = ch.max_same_dual_chain(SpiralLine(), x, y, spacing)
    assert c.certification is ch.Certification.CERTIFIED
    assert ch.verify_chain(c, budget=0).certification is ch.Certification.CERTIFIED
    assert all(separates(h, x, y) for h in c.curtains)
    centers = c.centers()
    assert all(b - a >= max(spacing, 1 + ch.POLE_GAP) - 1e-9 for a, b in zip(centers, centers[1:]))


def test_chain_reversed_order():
    c = ch.max_same_dual_chain(SpiralLine(), P(10, 1), P(0, 1))
    assert c.centers() == tuple(sorted(c.centers(), reverse=True))
    assert ch.verify_chain(c).certification is ch.Certification.CERTIFIED


def test_radial_chain():
    c = ch.max_same_dual_chain(RadialRay(0.0), P(0, 2), P(0, 12))
    assert len(c) == 9
    assert all(h.dual == RadialRay(0.0) for h in c.curtains)


def test_verify_examples():
    assert ch.verify_chain([fan(0), fan(2), fan(4)]).certification is ch.Certification.CERTIFIED
    bad = ch.verify_chain([fan(0), fan(0.9)])
    assert bad.certification is ch.Certification.REFUTED
    assert bad.witness == P(0.45, 1.0)
    assert ch.verify_chain([]).certification is ch.Certification.CERTIFIED


def test_verify_unordered_same_dual():
    assert ch.verify_chain([fan(0), fan(4), fan(2)]).certification is ch.Certification.REFUTED


def test_verify_mixed_duals_is_at_most_sampled():
    c = ch.verify_chain([strip(0.0, 3.0), strip(3.0, 3.0)], budget=200)
    assert c.certification is not ch.Certification.CERTIFIED


def test_refuter_fig2_pair():
    rep = ch.separation_refuter(strip(0.4, 3), strip(0.4, 6), ch.perpendicular_strips(0.4, 50), 50)
    assert rep.max_chain >= 50
    assert rep.witness_chain.certification is ch.Certification.CERTIFIED
    from parkinglot.curtains import meets
    for c in rep.witness_chain.curtains:
        assert meets(c, strip(0.4, 3)) is not None and meets(c, strip(0.4, 6)) is not None


def test_refuter_empty_family():
    rep = ch.separation_refuter(fan(0), fan(5), [], 0)
    assert rep.max_chain == 0 and len(rep.witness_chain) == 0


def test_refuter_rejects_intersecting_pair():
    with pytest.raises(ValueError):
        ch.separation_refuter(fan(0), fan(0.5), [], 10)


def test_refuter_close_fans_are_not_separated():
    # strips dual to the ray between two close fans cross both
    rep = ch.separation_refuter(fan(0), fan(1.2), [strip(0.6, 1.0 + 1.01 * k) for k in range(20)], 20)
    assert rep.max_chain == 20


def test_refuter_spacing_five_record():
    """Empirical separation estimate for fans five apart (budget-limited search)."""
    h1, h2 = fan(0), fan(5)
    rep = ch.separation_refuter(h1, h2, ch.default_family(h1, h2), 600)
    assert rep.max_chain == 0
    assert rep.assumed_separation == 1
    rec = rep.as_record()
    assert set(rec) == {"pair", "budget", "maxChain", "assumedSeparation"}


def test_refuter_is_deterministic():
    h1, h2 = fan(0), fan(1.3)
    fam = ch.default_family(h1, h2, rays_per_quarter=8, seg_grid=4)
    a = ch.separation_refuter(h1, h2, fam, 300, seed=4)
    b = ch.separation_refuter(h1, h2, list(fam), 300, seed=4)
    assert a == b


def test_dl_lower_examples():
    assert ch.dl_lower(P(0, 1), P(10, 1), L=5, assumed_separation=3).value == 10
    assert ch.dl_lower(P(2, 3), P(2, 3), L=1, assumed_separation=1).value == 0
    assert ch.dl_lower(P(0, 1), P(0.5, 1), L=1, assumed_separation=1).value == 1


def test_dl_lower_conditionality():
    b = ch.dl_lower(P(0, 1), P(10, 1), L=5, assumed_separation=3)
    assert b.assumed_separation == 3 and not b.unconditional
    below = ch.dl_lower(P(0, 1), P(10, 1), L=2, assumed_separation=3)
    assert below.value == 1 and below.unconditional


@given(st.floats(0, 100), st.integers(1, 30))
def test_dl_lower_nonincreasing_in_assumption(theta, L):
    vals = [ch.dl_lower(P(0, 1), P(theta, 1), L, a).value for a in range(1, 35)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_dl_upper_examples():
    assert ch.dl_upper(P(0, 1), P(3, 1), 2) == 4.0
    assert ch.dl_upper(P(0, 2), P(0, 1000), 1) == 14.0
    assert ch.dl_upper(P(1, 2), P(1, 2), 7) == 0.0


@given(st.floats(-10, 10), st.floats(1, 1e6), st.floats(1, 1e6))
def test_dl_upper_radial_monotone_in_L(t, r1, r2):
    x, y = P(t, r1), P(t, r2)
    ups = [ch.dl_upper(x, y, L) for L in range(1, 30)]
    assert all(a <= b for a, b in zip(ups, ups[1:]))


@given(st.floats(0, 200), st.integers(1, 20), st.integers(1, 20))
def test_unconditional_lower_below_upper(theta, L, assumed):
    x, y = P(0, 1), P(theta, 1)
    low = ch.dl_lower(x, y, L, assumed)
    if low.unconditional:
        assert low.value <= ch.dl_upper(x, y, L)


@pytest.mark.parametrize("L", [1, 5, 20])
def test_radial_pairs_have_no_long_verified_l_chains(L):
    x, y = P(0.3, 2.0), P(0.3, 1000.0)
    c = ch.search_l_chain(x, y, L, refute_budget=64)
    assert len(c) <= 4 * L + 10
