"""Metric and geodesics of the infinite parking lot.

The space is the universal cover of the plane with the open unit disk
removed.  Points are written in spiral-polar coordinates ``(theta, rad)``
where ``theta`` is an unbounded real (never reduced mod 2*pi) and
``rad >= 1`` is the distance from the puncture.

Distances follow the obstacle-avoidance rule: two points see each other
along a straight chord iff their angular gap is at most
``arccos(1/r1) + arccos(1/r2)``; otherwise the shortest path runs along a
tangent, wraps the unit circle, and leaves along a second tangent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class DomainError(ValueError):
    """Input lies outside the domain of an operation."""


class DegenerateGeodesicError(ValueError):
    pass


class ToleranceError(RuntimeError):
    """Iterative search failed to converge within its iteration cap."""


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class PointX:
    theta: float
    rad: float

    def __post_init__(self):
        if not math.isfinite(self.theta) or not math.isfinite(self.rad):
            raise DomainError(f"non-finite coordinate in {self!r}")
        if self.rad < 1.0:
            raise DomainError(f"rad must be >= 1, got {self.rad}")

    def __iter__(self):
        yield self.theta
        yield self.rad


def _phi(r):
    # angle between the radius and the tangent line from a point at radius r
    return np.arccos(1.0 / r)


def _tangent_len(r):
    return np.sqrt((r - 1.0) * (r + 1.0))


def dist_arrays(t1, r1, t2, r2):
    """Vectorised distance between points given as coordinate arrays."""
    t1, r1, t2, r2 = np.broadcast_arrays(
        np.asarray(t1, float), np.asarray(r1, float),
        np.asarray(t2, float), np.asarray(r2, float))
    gap = np.abs(t1 - t2)
    reach = _phi(r1) + _phi(r2)
    # (r1 - r2)^2 + 4 r1 r2 sin^2(gap/2) avoids cancellation for close points
    half = np.sin(np.minimum(gap, reach) / 2.0)
    chord = np.sqrt((r1 - r2) ** 2 + 4.0 * r1 * r2 * half * half)
    wrap = _tangent_len(r1) + _tangent_len(r2) + (gap - reach)
    return np.where(gap <= reach, chord, wrap)


def dist(p: PointX, q: PointX) -> float:
    """Geodesic distance between two points of X."""
    for pt in (p, q):
        if pt.rad < 1.0:
            raise DomainError(f"rad must be >= 1, got {pt.rad}")
    return float(dist_arrays(p.theta, p.rad, q.theta, q.rad))


class GeodesicKind(Enum):
    CHORD = "chord"
    TANGENT_ARC_TANGENT = "tangent-arc-tangent"


@dataclass(frozen=True)
class GeodesicClass:
    tag: GeodesicKind
    tangent_len1: float = 0.0
    arc_len: float = 0.0
    tangent_len2: float = 0.0
    tangency_angle1: float | None = None
    tangency_angle2: float | None = None

    @property
    def length(self) -> float:
        return self.tangent_len1 + self.arc_len + self.tangent_len2


def classify(p: PointX, q: PointX) -> GeodesicClass:
    gap = q.theta - p.theta
    phi1, phi2 = math.acos(1.0 / p.rad), math.acos(1.0 / q.rad)
    if abs(gap) <= phi1 + phi2:
        return GeodesicClass(GeodesicKind.CHORD)
    sign = 1.0 if gap > 0 else -1.0
    return GeodesicClass(
        GeodesicKind.TANGENT_ARC_TANGENT,
        tangent_len1=math.sqrt((p.rad - 1) * (p.rad + 1)),
        arc_len=abs(gap) - phi1 - phi2,
        tangent_len2=math.sqrt((q.rad - 1) * (q.rad + 1)),
        tangency_angle1=p.theta + sign * phi1,
        tangency_angle2=q.theta - sign * phi2,
    )


def _lerp_chart(t_a, r_a, t_b, r_b, frac):
    """Points on the straight chart segment between two mutually visible points.

    The chart is centred on ``t_a``; the angular gap is below pi, so atan2
    recovers a continuous angle.
    """
    gap = t_b - t_a
    xa, ya = r_a, 0.0
    xb, yb = r_b * np.cos(gap), r_b * np.sin(gap)
    x = xa + frac * (xb - xa)
    y = ya + frac * (yb - ya)
    return t_a + np.arctan2(y, x), np.hypot(x, y)


class Geodesic:
    """Arclength-parameterised geodesic with domain ``[lo, hi]``.

    Subclasses implement :meth:`eval_arrays`, which maps an array of
    parameters to ``(theta, rad)`` arrays.
    """

    lo: float = 0.0
    hi: float = math.inf

    @property
    def domain(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def eval_arrays(self, t):
        raise NotImplementedError

    def eval(self, t: float) -> PointX:
        if not (self.lo - 1e-12 <= t <= self.hi + 1e-12):
            raise DomainError(f"parameter {t} outside domain {self.domain}")
        th, r = self.eval_arrays(np.asarray(min(max(t, self.lo), self.hi), float))
        return PointX(float(th), max(float(r), 1.0))

    def guess(self, theta: float) -> float:
        """Starting parameter for projection searches on unbounded domains."""
        return self.lo if math.isfinite(self.lo) else 0.0


@dataclass(frozen=True, eq=True)
class SpiralLine(Geodesic):
    """The lift of the unit circle, ``t -> (t, 1)`` for all real t."""

    lo: float = -math.inf
    hi: float = math.inf

    def eval_arrays(self, t):
        t = np.asarray(t, float)
        return t, np.ones_like(t)

    def guess(self, theta):
        return theta


@dataclass(frozen=True, eq=True)
class SpiralRay(Geodesic):
    base: PointX = PointX(0.0, 1.0)
    direction: int = 1
    lo: float = 0.0
    hi: float = math.inf

    def __post_init__(self):
        if self.base.rad != 1.0:
            raise DomainError("spiral rays start on the spiral (rad == 1)")
        if self.direction not in (1, -1):
            raise DomainError("direction must be +1 or -1")

    def eval_arrays(self, t):
        t = np.asarray(t, float)
        return self.base.theta + self.direction * t, np.ones_like(t)

    def guess(self, theta):
        return max(0.0, self.direction * (theta - self.base.theta))


@dataclass(frozen=True, eq=True)
class RadialRay(Geodesic):
    """``t -> (theta0, 1 + t)`` for t >= 0."""

    theta0: float = 0.0
    lo: float = 0.0
    hi: float = math.inf

    def eval_arrays(self, t):
        t = np.asarray(t, float)
        return np.full_like(t, self.theta0), 1.0 + t


@dataclass(frozen=True, eq=True)
class Segment(Geodesic):
    """Geodesic segment from ``p`` to ``q``; use :func:`geodesic_between`."""

    p: PointX = PointX(0.0, 1.0)
    q: PointX = PointX(0.0, 2.0)
    lo: float = 0.0
    hi: float = 1.0
    shape: GeodesicClass = GeodesicClass(GeodesicKind.CHORD)

    def eval_arrays(self, t):
        t = np.asarray(t, float)
        p, q, c = self.p, self.q, self.shape
        if c.tag is GeodesicKind.CHORD:
            return _lerp_chart(p.theta, p.rad, q.theta, q.rad, t / self.hi)
        a1, a2 = c.tangency_angle1, c.tangency_angle2
        sign = 1.0 if q.theta > p.theta else -1.0
        l1, la, l2 = c.tangent_len1, c.arc_len, c.tangent_len2
        # the tangent pieces degenerate when an endpoint sits on the circle
        f1 = np.clip(t / l1, 0, 1) if l1 > 0 else np.ones_like(t)
        th1, r1 = _lerp_chart(p.theta, p.rad, a1, 1.0, f1)
        th_arc = a1 + sign * np.clip(t - l1, 0, la)
        f2 = np.clip((t - l1 - la) / l2, 0, 1) if l2 > 0 else np.zeros_like(t)
        th2, r2 = _lerp_chart(a2, 1.0, q.theta, q.rad, f2)
        on1, on2 = t <= l1, t >= l1 + la
        theta = np.where(on1, th1, np.where(on2, th2, th_arc))
        rad = np.where(on1, r1, np.where(on2, r2, 1.0))
        return theta, np.maximum(rad, 1.0)


def geodesic_between(p: PointX, q: PointX) -> Segment:
    if p == q:
        raise DegenerateGeodesicError(f"no nondegenerate geodesic from {p} to itself")
    shape = classify(p, q)
    length = dist(p, q)
    return Segment(p=p, q=q, lo=0.0, hi=length, shape=shape)


def _bracket(f, g: Geodesic, start: float, max_doublings: int = 200):
    """Find ``[a, b]`` inside the domain containing the minimiser of convex f."""
    lo, hi = g.lo, g.hi
    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi
    c = min(max(start, lo), hi)
    fc = f(c)
    step = 1.0
    # which side decreases
    right = c + step if c + step <= hi else hi
    left = c - step if c - step >= lo else lo
    if right > c and f(right) < fc:
        direction = 1.0
    elif left < c and f(left) < fc:
        direction = -1.0
    else:
        return max(lo, c - step), min(hi, c + step)
    prev, cur, fcur = c, c, fc
    for _ in range(max_doublings):
        nxt = cur + direction * step
        nxt = min(max(nxt, lo), hi)
        fn = f(nxt)
        if fn >= fcur or nxt == cur:
            a, b = sorted((prev, nxt))
            return a, b
        prev, cur, fcur = cur, nxt, fn
        step *= 2.0
    raise ToleranceError("could not bracket projection minimum")


def project(x: PointX, g: Geodesic, tol: float = 1e-9, max_iter: int = 2000) -> float:
    """Closest-point projection parameter of ``x`` onto ``g``.

    ``t -> d(x, g(t))`` is convex, so a ternary search on a bracketing
    interval converges to the minimiser.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    def f(t):
        th, r = g.eval_arrays(np.asarray(t, float))
        return float(dist_arrays(x.theta, x.rad, th, np.maximum(r, 1.0)))

    a, b = _bracket(f, g, g.guess(x.theta))
    for _ in range(max_iter):
        if b - a <= tol:
            break
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if f(m1) <= f(m2):
            b = m2
        else:
            a = m1
    else:
        raise ToleranceError(f"projection did not reach tol={tol} in {max_iter} steps")
    return 0.5 * (a + b)


def project_many(thetas, rads, g: Geodesic, tol: float = 1e-9, max_iter: int = 2000):
    """Vectorised :func:`project` over arrays of point coordinates."""
    thetas = np.asarray(thetas, float)
    rads = np.asarray(rads, float)

    def f(t):
        th, r = g.eval_arrays(t)
        return dist_arrays(thetas, rads, th, np.maximum(r, 1.0))

    if math.isfinite(g.lo) and math.isfinite(g.hi):
        a = np.full(thetas.shape, g.lo)
        b = np.full(thetas.shape, g.hi)
    else:
        a, b = _bracket_many(f, g, thetas)
    for _ in range(max_iter):
        if np.all(b - a <= tol):
            break
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        left = f(m1) <= f(m2)
        b = np.where(left, m2, b)
        a = np.where(left, a, m1)
    else:
        raise ToleranceError(f"projection did not reach tol={tol} in {max_iter} steps")
    return 0.5 * (a + b)


def _bracket_many(f, g: Geodesic, thetas, max_doublings: int = 200):
    guess = np.array([g.guess(t) for t in thetas.ravel()]).reshape(thetas.shape)
    lo, hi = g.lo, g.hi
    c = np.clip(guess, lo, hi)
    fc = f(c)
    right = np.clip(c + 1.0, lo, hi)
    left = np.clip(c - 1.0, lo, hi)
    go_right = (right > c) & (f(right) < fc)
    go_left = ~go_right & (left < c) & (f(left) < fc)
    direction = np.where(go_right, 1.0, np.where(go_left, -1.0, 0.0))
    a = np.clip(c - 1.0, lo, hi)
    b = np.clip(c + 1.0, lo, hi)
    prev, cur, fcur = c.copy(), c.copy(), fc
    active = direction != 0.0
    step = np.ones_like(c)
    for _ in range(max_doublings):
        if not active.any():
            return a, b
        nxt = np.clip(cur + direction * step, lo, hi)
        fn = f(nxt)
        stop = active & ((fn >= fcur) | (nxt == cur))
        a = np.where(stop, np.minimum(prev, nxt), a)
        b = np.where(stop, np.maximum(prev, nxt), b)
        adv = active & ~stop
        prev = np.where(adv, cur, prev)
        cur = np.where(adv, nxt, cur)
        fcur = np.where(adv, fn, fcur)
        step = np.where(adv, step * 2.0, step)
        active = adv
    raise ToleranceError("could not bracket projection minimum")


def alexandrov_angle(g1: Geodesic, g2: Geodesic, t0: float = 0.25,
                     tol: float = 1e-7, max_halvings: int = 40) -> float:
    """Angle between two geodesics issuing from a common point.

    Comparison angles ``2 arcsin(d(g1(t), g2(t)) / 2t)`` are evaluated on
    ``t = t0 * 2**-k``; successive values are Richardson-extrapolated
    assuming an O(t) error.
    """
    b1, b2 = g1.eval(g1.lo), g2.eval(g2.lo)
    if dist(b1, b2) > 1e-12:
        raise DomainError(f"geodesics start at different points: {b1} vs {b2}")
    t0 = min(t0, g1.length, g2.length)

    def comparison(t):
        d = dist(g1.eval(g1.lo + t), g2.eval(g2.lo + t))
        return 2.0 * math.asin(min(1.0, d / (2.0 * t)))

    prev = comparison(t0)
    prev_extrap = None
    t = t0
    for _ in range(max_halvings):
        t /= 2.0
        cur = comparison(t)
        # comparison angles are nondecreasing in t
        if cur > prev + 1e-9:
            raise ConvergenceError(f"comparison angles increased as t shrank: {prev} -> {cur}")
        extrap = 2.0 * cur - prev
        if prev_extrap is not None and abs(extrap - prev_extrap) < tol:
            return min(max(extrap, 0.0), math.pi)
        prev, prev_extrap = cur, extrap
    raise ConvergenceError("alexandrov angle did not converge")


def sample_ball(center: PointX, radius: float, samples: int, rng: np.random.Generator):
    """Uniform samples from a ball that avoids the unit disk.

    Such a ball is a Euclidean disk in the chart around ``center``; the
    returned arrays always include ``samples`` boundary points.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    if radius == 0:
        return np.array([center.theta]), np.array([center.rad])
    ang = rng.uniform(0, 2 * math.pi, samples)
    rr = radius * np.sqrt(rng.uniform(0, 1, samples))
    # half the budget on the boundary circle, where extreme projections live
    rr[: samples // 2] = radius
    ang[: samples // 2] = np.linspace(0, 2 * math.pi, samples // 2, endpoint=False)
    x = center.rad + rr * np.cos(ang)
    y = rr * np.sin(ang)
    return center.theta + np.arctan2(y, x), np.hypot(x, y)


def dist_to_geodesic(x: PointX, g: Geodesic) -> float:
    t = project(x, g)
    return dist(x, g.eval(t))


def contraction_probe(g: Geodesic, center: PointX, radius: float, samples: int,
                      seed: int = 0) -> float:
    """Lower bound on the diameter of the projection of a ball onto ``g``.

    Geodesics are arclength parameterised, so the diameter of the
    projection equals the spread of projection parameters.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    if radius >= center.rad - 1.0:
        # the ball must avoid the puncture to be sampled in one chart
        raise DomainError("ball reaches the unit circle")
    if dist_to_geodesic(center, g) <= radius:
        raise DomainError("ball is not disjoint from the geodesic")
    rng = np.random.default_rng(seed)
    th, r = sample_ball(center, radius, samples, rng)
    ts = project_many(th, r, g)
    return float(ts.max() - ts.min())
