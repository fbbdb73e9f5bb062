import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from parkinglot.geometry import DomainError, PointX, dist
from parkinglot.spaces import (W, Z, Base, RayPoint, dist_W, dist_Z,
                               fit_constants, format_glued, glued_sampler,
                               identity_arrays, parse_glued, phi, phi_arrays,
                               phi_inv, phibar, phibar_inv, qi_fit, qi_fit_x,
                               window_sampler)

P = PointX


def test_phi_examples():
    assert phi(P(0, 1)) == P(0, 1)
    assert phi(P(3, 2)) == P(2, 2)
    for i in range(1, 41):
        assert phi(P(float(i), 2.0 ** i)) == P(0.0, 2.0 ** i)


def test_phi_roundtrip_bulk():
    rng = np.random.default_rng(5)
    th = rng.uniform(-20, 20, 10 ** 4)
    r = 2.0 ** rng.uniform(0, 20, 10 ** 4)
    for t, s in zip(th, r):
        p = P(float(t), float(s))
        back = phi(phi_inv(p))
        assert back.rad == p.rad
        assert back.theta == pytest.approx(p.theta, abs=1e-12)


def test_attach_images_on_one_radial_ray():
    assert {phi(W.attach(i)).theta for i in range(1, 41)} == {0.0}


def test_glued_distance_examples():
    assert dist_W(RayPoint(2, 1.5), RayPoint(2, 4.0)) == 2.5
    p = P(0.5, 3.0)
    assert dist_W(Base(p), RayPoint(3, 2.0)) == dist(p, P(3.0, 8.0)) + 2.0
    assert dist_Z(RayPoint(1, 1), RayPoint(2, 1)) == 4.0


def test_ray_point_at_zero_is_attach_point():
    for i in (1, 4):
        q = Base(P(-2.0, 5.0))
        assert dist_W(RayPoint(i, 0.0), q) == dist_W(Base(W.attach(i)), q)
        assert dist_W(RayPoint(i, 0.0), Base(W.attach(i))) == 0.0


def test_bad_index():
    with pytest.raises(DomainError):
        RayPoint(0, 1.0)


glued = st.one_of(
    st.builds(lambda t, e: Base(P(t, 2.0 ** e)), st.floats(-10, 50), st.floats(0, 30)),
    st.builds(RayPoint, st.integers(1, 30), st.floats(0, 100)),
)


@pytest.mark.parametrize("space", [W, Z], ids=["W", "Z"])
@given(a=glued, b=glued, c=glued)
def test_glued_metric_axioms(space, a, b, c):
    assert space.dist(a, b) == space.dist(b, a)
    assert space.dist(a, c) <= space.dist(a, b) + space.dist(b, c) + 1e-9 * max(1.0, space.dist(a, c))
    assert space.dist(a, a) == 0.0


@given(glued)
def test_phibar_bijective(a):
    back = phibar_inv(phibar(a))
    if isinstance(a, RayPoint):
        assert back == a
    else:
        assert back.p.rad == a.p.rad
        assert back.p.theta == pytest.approx(a.p.theta, abs=1e-12)


def test_phibar_examples():
    for i in (1, 7, 30):
        assert phibar(Base(W.attach(i))) == Base(Z.attach(i))
        assert phibar(RayPoint(i, 2.5)) == RayPoint(i, 2.5)
    assert phibar(Base(P(0, 1))) == Base(P(0, 1))


def test_glued_text_roundtrip():
    for a in (Base(P(1.25, 3.0)), RayPoint(4, 0.5)):
        assert parse_glued(format_glued(a)) == a
    with pytest.raises(ValueError):
        parse_glued("edge:1")


def test_fit_identity():
    f = qi_fit_x(identity_arrays, window_sampler(), 1000, seed=1)
    assert (f.lam, f.eps, f.max_violation) == (1.0, 0.0, 0.0)


def test_fit_phi_window():
    f = qi_fit_x(phi_arrays, window_sampler(-20, 20, 20), 10 ** 4, seed=0)
    assert f.fits and f.sample_pairs == 10 ** 4
    assert math.isfinite(f.lam) and math.isfinite(f.eps)


def test_fit_phibar():
    f = qi_fit(phibar, glued_sampler(), 2000, seed=0)
    assert f.fits


def test_square_map_distortion_grows():
    def square(t, r):
        return t, r * r
    lams = [qi_fit_x(square, window_sampler(-2, 2, k), 3000, seed=0) for k in (2, 4, 8)]
    key = [(f.lam, f.max_violation) for f in lams]
    assert key == sorted(key)
    assert key[0] < key[-1]
    assert not lams[-1].fits


def test_fit_constants_lexicographic():
    d = np.array([1.0, 2.0, 4.0])
    # lambda = 1 already works with eps = 4
    assert (fit_constants(d, 2 * d).lam, fit_constants(d, 2 * d).eps) == (1.0, 4.0)
    far = np.array([1.0, 1000.0])
    f = fit_constants(far, 2 * far)
    assert (f.lam, f.eps) == (2.0, 0.0)
    g = fit_constants(d, d + 3)
    assert (g.lam, g.eps) == (1.0, 3.0)
