"""Chains of curtains and two-sided bounds on the L-metrics.

Only chains inside a single dual geodesic are ever certified: there,
disjointness and separation reduce to ordering of closed pole intervals.
L-separation quantifies over every chain in the space and is therefore
only ever *refuted* by exhibiting long chains meeting both curtains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import zip_longest
from typing import Iterable, Sequence

import numpy as np

from .curtains import (Curtain, Disjointness, Form, disjoint, fan,
                       meets, seg, sides, strip)
from .geometry import (Geodesic, PointX, RadialRay, SpiralLine, dist,
                       project)

# extra gap between consecutive unit poles so closed poles never touch
POLE_GAP = 1e-6


class Certification(Enum):
    CERTIFIED = "certified"
    SAMPLED = "sampled"
    REFUTED = "refuted"


@dataclass(frozen=True)
class Chain:
    curtains: tuple[Curtain, ...] = ()
    certification: Certification = Certification.CERTIFIED
    budget: int | None = None
    witness: PointX | None = None

    def __len__(self):
        return len(self.curtains)

    def centers(self) -> tuple[float, ...]:
        return tuple(h.center for h in self.curtains)


@dataclass(frozen=True)
class SeparationReport:
    pair: tuple[Curtain, Curtain]
    max_chain: int
    budget: int
    witness_chain: Chain = field(default_factory=Chain)

    @property
    def assumed_separation(self) -> int:
        """Smallest L not refuted by this report (L counts from 1)."""
        return max(1, self.max_chain)

    def as_record(self) -> dict:
        return {
            "pair": [h.describe() for h in self.pair],
            "budget": self.budget,
            "maxChain": self.max_chain,
            "assumedSeparation": self.assumed_separation,
        }


def dual_parameter(g: Geodesic, x: PointX) -> float:
    """Projection parameter of ``x`` on ``g``, closed form where available."""
    if isinstance(g, SpiralLine):
        return x.theta
    if isinstance(g, RadialRay) and abs(x.theta - g.theta0) <= math.pi / 2:
        return max(0.0, x.rad * math.cos(x.theta - g.theta0) - 1.0)
    return project(x, g)


def chain_cardinality(gap: float, spacing: float = 1.0) -> int:
    """Most unit poles fitting strictly inside an open interval of length ``gap``.

    Consecutive pole centres are at least ``max(spacing, 1 + POLE_GAP)``
    apart.
    """
    step = max(spacing, 1.0 + POLE_GAP)
    if gap <= 1.0:
        return 0
    return int(math.ceil((gap - 1.0) / step))


def _pole_centers(a: float, b: float, spacing: float) -> list[float]:
    lo, hi = min(a, b), max(a, b)
    room = hi - lo - 1.0
    k = chain_cardinality(hi - lo, spacing)
    if k == 0:
        return []
    if k == 1:
        centers = [0.5 * (lo + hi)]
    else:
        step = max(spacing, 1.0 + POLE_GAP)
        sigma = 0.5 * (step + room / (k - 1))
        margin = 0.5 * (room - (k - 1) * sigma)
        centers = [lo + 0.5 + margin + i * sigma for i in range(k)]
    return centers if a <= b else centers[::-1]


def _curtain_on(g: Geodesic, center: float) -> Curtain:
    if isinstance(g, SpiralLine):
        return fan(center)
    if isinstance(g, RadialRay):
        return strip(g.theta0, center)
    return Curtain(g, center, Form.GENERIC)


def max_same_dual_chain(g: Geodesic, x: PointX, y: PointX, spacing: float = 1.0) -> Chain:
    """Certified chain dual to ``g`` separating ``x`` from ``y``, as long as possible."""
    a, b = dual_parameter(g, x), dual_parameter(g, y)
    if a == b:
        return Chain()
    curtains = tuple(_curtain_on(g, c) for c in _pole_centers(a, b, spacing))
    return Chain(curtains, Certification.CERTIFIED)


def _same_dual_check(curtains: Sequence[Curtain]):
    """Return None if the ordered same-dual chain is valid, else a witness."""
    if len(curtains) < 2:
        return None
    sign = 1.0 if curtains[1].center > curtains[0].center else -1.0
    for prev, nxt in zip(curtains, curtains[1:]):
        if sign * (nxt.center - prev.center) <= 1.0:
            lo = max(prev.pole[0], nxt.pole[0])
            hi = min(prev.pole[1], nxt.pole[1])
            t = 0.5 * (lo + hi) if lo <= hi else nxt.center
            th, r = nxt.dual.eval_arrays(np.asarray(t))
            return PointX(float(th), max(float(r), 1.0))
    return None


def _curtain_samples(h: Curtain, n: int, rng):
    """Points of ``h``: its pole plus random points filtered by membership."""
    ts = np.linspace(h.pole[0], h.pole[1], max(2, n // 4))
    th, r = h.dual.eval_arrays(ts)
    th_c, r_c = [np.asarray(th)], [np.asarray(r)]
    mid_t, mid_r = h.dual.eval_arrays(np.asarray(h.center))
    n_rand = n - len(ts)
    if n_rand > 0:
        span = 3.0 + 0.5 * float(mid_r)
        th_c.append(float(mid_t) + rng.uniform(-span, span, n_rand))
        r_c.append(np.exp(rng.uniform(0, math.log(2 * float(mid_r) + 4), n_rand)))
    th = np.concatenate(th_c)
    r = np.maximum(np.concatenate(r_c), 1.0)
    on = sides(h, th, r) == 0
    return th[on], r[on]


def verify_chain(chain: Chain | Sequence[Curtain], budget: int = 1000, seed: int = 0) -> Chain:
    """Re-derive the certification of a chain.

    Closed-form checks for same-dual chains; otherwise pairwise sampled
    disjointness and separation tests with ``budget`` samples each.
    """
    curtains = tuple(chain.curtains if isinstance(chain, Chain) else chain)
    if all(h.dual == curtains[0].dual for h in curtains[1:]):
        w = _same_dual_check(curtains)
        if w is None:
            return Chain(curtains, Certification.CERTIFIED)
        return Chain(curtains, Certification.REFUTED, witness=w)
    for i, h in enumerate(curtains):
        for other in curtains[i + 1:]:
            res = disjoint(h, other, budget, seed)
            if res.status is Disjointness.REFUTED:
                return Chain(curtains, Certification.REFUTED, budget, res.witness)
    rng = np.random.default_rng(seed)
    for prev, mid, nxt in zip(curtains, curtains[1:], curtains[2:]):
        side_sets = []
        for h in (prev, nxt):
            th, r = _curtain_samples(h, budget, rng)
            s = sides(mid, th, r)
            side_sets.append((th, r, s))
        (t1, r1, s1), (t2, r2, s2) = side_sets
        ref = s1[0] if len(s1) else (-s2[0] if len(s2) else -1)
        for th, r, s, want in ((t1, r1, s1, ref), (t2, r2, s2, -ref)):
            bad = np.flatnonzero(s != want)
            if len(bad):
                return Chain(curtains, Certification.REFUTED, budget,
                             PointX(float(th[bad[0]]), float(r[bad[0]])))
    return Chain(curtains, Certification.SAMPLED, budget)


def _greedy_packing(cands: list[Curtain]) -> list[Curtain]:
    """Maximum set of pairwise-disjoint closed poles (earliest-finish greedy)."""
    chosen = []
    last = -math.inf
    for h in sorted(cands, key=lambda c: (c.pole[1], c.center)):
        if h.pole[0] > last:
            chosen.append(h)
            last = h.pole[1]
    return chosen


def _dual_key(g: Geodesic):
    return (type(g).__name__, repr(g))


def separation_refuter(h1: Curtain, h2: Curtain, family: Iterable[Curtain],
                       budget: int, meet_budget: int = 256, seed: int = 0) -> SeparationReport:
    """Search ``family`` for the longest chain whose members all meet h1 and h2.

    At most ``budget`` candidates are examined, in family order.  A report
    with ``max_chain = K`` shows the pair is not L-separated for L < K; it
    never shows L-separation.
    """
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    pre = disjoint(h1, h2, min(max(budget, 16), 1000), seed)
    if pre.status is Disjointness.REFUTED:
        raise ValueError(f"curtains {h1.describe()} and {h2.describe()} intersect at {pre.witness}")
    groups: dict = {}
    for n, c in enumerate(family):
        if n >= budget:
            break
        if meets(c, h1, meet_budget, seed) is None:
            continue
        if meets(c, h2, meet_budget, seed) is None:
            continue
        groups.setdefault(_dual_key(c.dual), []).append(c)
    best: Chain = Chain()
    for key in sorted(groups):
        packed = _greedy_packing(groups[key])
        cand = verify_chain(packed)
        if cand.certification is not Certification.CERTIFIED:
            continue
        if len(cand) > len(best) or (len(cand) == len(best) and len(cand) > 0
                                      and cand.centers() < best.centers()):
            best = cand
    return SeparationReport((h1, h2), len(best), budget, best)


def perpendicular_strips(theta0: float, count: int, start: float = 1.0) -> list[Curtain]:
    """Strips dual to the ray a quarter turn below ``theta0``, poles spaced 1 + POLE_GAP."""
    return [strip(theta0 - math.pi / 2, start + i * (1.0 + POLE_GAP)) for i in range(count)]


def default_family(h1: Curtain, h2: Curtain, fan_step: float = 0.25, rays_per_quarter: int = 64,
                   strip_step: float = 0.25, strip_reach: float = 16.0,
                   seg_grid: int = 32) -> list[Curtain]:
    """Candidate curtains around a pair: fans, radial strips and chord-dual curtains.

    Rays closest in angle to the pair come first, and the three
    sub-families are interleaved, so a truncated budget still samples the
    promising candidates of each kind.
    """
    pts = []
    for h in (h1, h2):
        th, r = h.dual.eval_arrays(np.array(h.pole))
        pts.extend(zip(np.atleast_1d(th), np.atleast_1d(r)))
    t_lo = min(p[0] for p in pts) - math.pi
    t_hi = max(p[0] for p in pts) + math.pi
    r_hi = max(4.0, 2.0 * max(p[1] for p in pts) + 2.0)

    fans = [fan(s) for s in np.arange(t_lo, t_hi + 1e-12, fan_step)]
    n_rays = int(math.ceil((t_hi - t_lo) / (math.pi / 2) * rays_per_quarter))
    mid = 0.5 * (t_lo + t_hi)
    rays = sorted(np.linspace(t_lo, t_hi, n_rays + 1), key=lambda a: (abs(a - mid), a))
    strips = [strip(a, s)
              for a in rays
              for s in np.arange(1.0, max(r_hi, strip_reach), strip_step)]
    segs = []
    ends_t = np.linspace(t_lo, t_hi, seg_grid)
    ends_r = np.exp(np.linspace(0.0, math.log(r_hi), seg_grid))
    for i in range(seg_grid):
        for j in range(seg_grid):
            p = PointX(float(ends_t[i]), float(ends_r[j]))
            q = PointX(float(ends_t[-1 - i]), float(ends_r[-1 - j]))
            if p == q:
                continue
            length = dist(p, q)
            if length <= 1.0 + 1e-9:
                continue
            segs.append(seg(p, q, 0.5 * length))
    family = []
    for trio in zip_longest(fans, strips, segs):
        family.extend(c for c in trio if c is not None)
    return family


@dataclass(frozen=True)
class DLBound:
    """Lower bound on d_L, with the separation assumption it rests on."""

    value: int
    assumed_separation: int | None
    L: int

    @property
    def unconditional(self) -> bool:
        return self.assumed_separation is None


def dl_lower(x: PointX, y: PointX, L: int, assumed_separation: int,
             spacing: float = 1.0) -> DLBound:
    """``1 + k`` for the longest fan chain separating x from y.

    The fan chain counts only when ``L >= assumed_separation``; below that
    the unconditional bound for distinct points (1) is returned.
    """
    if x == y:
        return DLBound(0, None, L)
    k = chain_cardinality(abs(x.theta - y.theta), spacing)
    if k == 0 or L < assumed_separation:
        return DLBound(1, None, L)
    return DLBound(1 + k, assumed_separation, L)


def on_common_radial_ray(x: PointX, y: PointX) -> bool:
    return x.theta == y.theta


def dl_upper(x: PointX, y: PointX, L: int) -> float:
    """``1 + d(x, y)``, improved to ``4L + 10`` along a radial ray."""
    if x == y:
        return 0.0
    bound = 1.0 + dist(x, y)
    if on_common_radial_ray(x, y):
        bound = min(bound, 4.0 * L + 10.0)
    return bound


def search_l_chain(x: PointX, y: PointX, L: int, refute_budget: int = 64,
                   spacing: float = 1.0) -> Chain:
    """Longest same-dual chain separating x from y that survives L-refutation.

    Candidates are the fan chain and, for points on a common radial ray,
    the strip chain along that ray.  A chain is discarded once a pair of
    its consecutive curtains is shown to be met by more than L disjoint
    curtains.
    """
    candidates = [max_same_dual_chain(SpiralLine(), x, y, spacing)]
    if on_common_radial_ray(x, y) and x != y:
        candidates.append(max_same_dual_chain(RadialRay(x.theta), x, y, spacing))
    best = Chain()
    for c in candidates:
        if len(c) >= 2:
            h1, h2 = c.curtains[0], c.curtains[1]
            if h1.form is Form.STRIP:
                fam = perpendicular_strips(h1.dual.theta0, refute_budget)
            else:
                fam = default_family(h1, h2, rays_per_quarter=8, strip_step=1.0, seg_grid=4)
            rep = separation_refuter(h1, h2, fam, refute_budget)
            if rep.max_chain > L:
                continue
        if len(c) > len(best):
            best = c
    return best
