"""Curtains: closest-point-projection preimages of unit poles.

A curtain is never stored as a region.  Membership is decided by projecting
a point onto the dual geodesic and comparing the parameter with the pole
``[s - 1/2, s + 1/2]`` (closed, so pole endpoints count as on the curtain).

Two families have closed-form projections:

* fans, dual to the spiral: a point ``(theta, r)`` projects to ``theta``;
* strips, dual to a radial ray ``theta0``: inside the half-flat
  ``|theta - theta0| <= pi/2`` the foot is ``max(0, r cos(theta - theta0) - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import (DomainError, Geodesic, PointX, RadialRay, SpiralLine,
                       geodesic_between, project_many)

HALF = 0.5
# slack for numeric projections at pole endpoints
BOUNDARY_TOL = 1e-7


class Form(Enum):
    GENERIC = "seg"
    FAN = "fan"
    STRIP = "strip"


class Side(Enum):
    MINUS = -1
    ON = 0
    PLUS = 1


@dataclass(frozen=True)
class Curtain:
    dual: Geodesic
    center: float
    form: Form = Form.GENERIC

    def __post_init__(self):
        lo, hi = self.dual.domain
        if not (lo < self.center - HALF and self.center + HALF < hi):
            raise DomainError(
                f"pole [{self.center - HALF}, {self.center + HALF}] not interior to {self.dual.domain}")

    @property
    def pole(self) -> tuple[float, float]:
        return (self.center - HALF, self.center + HALF)

    def describe(self) -> str:
        if self.form is Form.FAN:
            return f"fan:{self.center!r}"
        if self.form is Form.STRIP:
            return f"strip:{self.dual.theta0!r}:{self.center!r}"
        p, q = self.dual.p, self.dual.q
        return f"seg:{p.theta!r},{p.rad!r}:{q.theta!r},{q.rad!r}:{self.center!r}"


def fan(s: float) -> Curtain:
    return Curtain(SpiralLine(), float(s), Form.FAN)


def strip(theta0: float, s: float) -> Curtain:
    return Curtain(RadialRay(float(theta0)), float(s), Form.STRIP)


def seg(p: PointX, q: PointX, s: float) -> Curtain:
    return Curtain(geodesic_between(p, q), float(s), Form.GENERIC)


def parse_curtain(text: str) -> Curtain:
    """Parse ``fan:s``, ``strip:theta0:s`` or ``seg:t1,r1:t2,r2:s``."""
    kind, _, rest = text.partition(":")
    parts = rest.split(":")
    if kind == "fan" and len(parts) == 1:
        return fan(float(parts[0]))
    if kind == "strip" and len(parts) == 2:
        return strip(float(parts[0]), float(parts[1]))
    if kind == "seg" and len(parts) == 3:
        p = PointX(*map(float, parts[0].split(",")))
        q = PointX(*map(float, parts[1].split(",")))
        return seg(p, q, float(parts[2]))
    raise ValueError(f"bad curtain descriptor {text!r}")


def foot_parameters(h: Curtain, thetas, rads, fast: bool = True):
    """Projection parameters onto ``h.dual`` for arrays of points."""
    thetas = np.atleast_1d(np.asarray(thetas, float))
    rads = np.atleast_1d(np.asarray(rads, float))
    if fast and h.form is Form.FAN:
        return thetas.copy()
    if fast and h.form is Form.STRIP:
        delta = thetas - h.dual.theta0
        in_chart = np.abs(delta) <= math.pi / 2
        out = np.empty_like(thetas)
        out[in_chart] = np.maximum(0.0, rads[in_chart] * np.cos(delta[in_chart]) - 1.0)
        if (~in_chart).any():
            out[~in_chart] = project_many(thetas[~in_chart], rads[~in_chart], h.dual)
        return out
    return project_many(thetas, rads, h.dual)


def sides(h: Curtain, thetas, rads, fast: bool = True):
    """Side codes (-1, 0, +1) for arrays of points."""
    t = foot_parameters(h, thetas, rads, fast)
    lo, hi = h.pole
    slack = 0.0 if (fast and h.form is not Form.GENERIC) else BOUNDARY_TOL
    return np.where(t < lo - slack, -1, np.where(t > hi + slack, 1, 0))


def member(h: Curtain, x: PointX, fast: bool = True) -> Side:
    return Side(int(sides(h, x.theta, x.rad, fast)[0]))


def separates(h: Curtain, x: PointX, y: PointX) -> bool:
    a, b = sides(h, [x.theta, y.theta], [x.rad, y.rad])
    return a * b == -1


def _same_dual(h1: Curtain, h2: Curtain) -> bool:
    return h1.dual == h2.dual


def _pole_overlap(h1: Curtain, h2: Curtain):
    lo = max(h1.pole[0], h2.pole[0])
    hi = min(h1.pole[1], h2.pole[1])
    return (lo, hi) if lo <= hi else None


class Disjointness(Enum):
    CERTIFIED_DISJOINT = "certified-disjoint"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class DisjointResult:
    status: Disjointness
    witness: PointX | None = None


def _pole_points(h: Curtain, n: int):
    ts = np.linspace(h.pole[0], h.pole[1], max(n, 2))
    return h.dual.eval_arrays(ts)


def _search_box(h1: Curtain, h2: Curtain):
    th = []
    rr = []
    for h in (h1, h2):
        t, r = _pole_points(h, 5)
        th.extend(t)
        rr.extend(r)
    t_lo, t_hi = min(th) - 2.0, max(th) + 2.0
    r_hi = 2.0 * max(rr) + 4.0
    return t_lo, t_hi, r_hi


def _common_point_search(h1: Curtain, h2: Curtain, budget: int, seed: int):
    """Sampled search for a point on both curtains."""
    if budget <= 0:
        return None
    rng = np.random.default_rng(seed)
    n_pole = min(budget // 4, 256)
    cand_t, cand_r = [], []
    for h in (h1, h2):
        if n_pole > 0:
            t, r = _pole_points(h, n_pole)
            cand_t.append(t)
            cand_r.append(r)
    n_rand = budget - sum(len(c) for c in cand_t)
    if n_rand > 0:
        t_lo, t_hi, r_hi = _search_box(h1, h2)
        cand_t.append(rng.uniform(t_lo, t_hi, n_rand))
        cand_r.append(np.exp(rng.uniform(0.0, math.log(r_hi), n_rand)))
    th = np.concatenate(cand_t)[:budget]
    rr = np.maximum(np.concatenate(cand_r)[:budget], 1.0)
    on1 = sides(h1, th, rr) == 0
    if not on1.any():
        return None
    th, rr = th[on1], rr[on1]
    on2 = sides(h2, th, rr) == 0
    hits = np.flatnonzero(on2)
    if len(hits) == 0:
        return None
    return PointX(float(th[hits[0]]), float(rr[hits[0]]))


def disjoint(h1: Curtain, h2: Curtain, budget: int = 1000, seed: int = 0) -> DisjointResult:
    """Certify, refute, or fail to decide disjointness of two curtains.

    Certification only happens for curtains sharing a dual geodesic (fans
    included), where disjointness is disjointness of the closed poles.
    """
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    if _same_dual(h1, h2):
        overlap = _pole_overlap(h1, h2)
        if overlap is None:
            return DisjointResult(Disjointness.CERTIFIED_DISJOINT)
        th, r = h1.dual.eval_arrays(np.asarray(0.5 * (overlap[0] + overlap[1])))
        return DisjointResult(Disjointness.REFUTED, PointX(float(th), max(float(r), 1.0)))
    w = _closed_form_meet(h1, h2)
    if w is None:
        w = _common_point_search(h1, h2, budget, seed)
    if w is not None:
        return DisjointResult(Disjointness.REFUTED, w)
    return DisjointResult(Disjointness.UNKNOWN)


def _verify(h1: Curtain, h2: Curtain, p: PointX | None):
    if p is None:
        return None
    if member(h1, p) is Side.ON and member(h2, p) is Side.ON:
        return p
    return None


def _chart_point(theta_ref, x, y):
    r = math.hypot(x, y)
    if r < 1.0:
        return None
    return PointX(theta_ref + math.atan2(y, x), r)


def _closed_form_meet(h1: Curtain, h2: Curtain):
    if h1.form is Form.FAN and h2.form is Form.STRIP:
        h1, h2 = h2, h1
    if h1.form is Form.STRIP and h2.form is Form.STRIP:
        a, b = h1.dual.theta0, h2.dual.theta0
        gap = b - a
        if abs(gap) >= math.pi or gap == 0:
            return None
        # u . e_a = 1 + s1 and u . e_b = 1 + s2 in the chart centred on a
        c1, c2 = 1.0 + h1.center, 1.0 + h2.center
        cg, sg = math.cos(gap), math.sin(gap)
        x = c1
        y = (c2 - c1 * cg) / sg
        return _verify(h1, h2, _chart_point(a, x, y))
    if h1.form is Form.STRIP and h2.form is Form.FAN:
        a = h1.dual.theta0
        lo, hi = h2.pole
        th = min(max(a, lo), hi)
        if abs(th - a) >= math.pi / 2:
            return None
        r = (1.0 + h1.center) / math.cos(th - a)
        if r < 1.0:
            return None
        return _verify(h1, h2, PointX(th, r))
    return None


def meets(h1: Curtain, h2: Curtain, budget: int = 1000, seed: int = 0) -> PointX | None:
    """Return a point lying on both curtains, or None if none was found."""
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    if _same_dual(h1, h2):
        overlap = _pole_overlap(h1, h2)
        if overlap is None:
            return None
        th, r = h1.dual.eval_arrays(np.asarray(0.5 * (overlap[0] + overlap[1])))
        return PointX(float(th), max(float(r), 1.0))
    w = _closed_form_meet(h1, h2)
    if w is not None:
        return w
    return _common_point_search(h1, h2, budget, seed)
