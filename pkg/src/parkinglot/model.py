"""Curtain-model distance as a certified interval.

The model distance is ``sum_L w_L d_L(x, y)``.  The d_L are not
computable, so the distance is reported as ``[lower, upper]``:

* upper: per-L bounds ``1 + d(x, y)`` (improved to ``4L + 10`` for points on
  a common radial ray), summed to ``lmax`` plus a closed-form tail;
* lower: ``(1 + k) * sum_{L >= L0} w_L`` for a fan chain of k curtains whose
  pairwise separation was not refuted below ``L0``.  Monotonicity of d_L in
  L (an L-chain is an L'-chain for L' >= L) carries one chain to all
  larger L.  The bound is tagged with ``L0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .chains import chain_cardinality, dl_upper, on_common_radial_ray
from .geometry import DomainError, PointX, dist


class WeightError(ValueError):
    pass


@dataclass(frozen=True)
class WeightSeq:
    """Weights ``w_1, w_2, ...``: an explicit head then a geometric tail.

    With an empty head the weights are ``rho**L``.  Otherwise the last
    explicit weight is continued as ``w_n * rho**(L - n)``.
    """

    rho: float = 0.5
    lmax: int = 30
    head: tuple[float, ...] = ()

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise WeightError(f"tail ratio must lie in (0, 1), got {self.rho}")
        if self.lmax < 1:
            raise WeightError("lmax must be >= 1")
        for i, w in enumerate(self.head, start=1):
            if not 0.0 < w < 1.0:
                raise WeightError(f"weight at L={i} is {w}, outside (0, 1)")

    def weight(self, L: int) -> float:
        n = len(self.head)
        if L <= n:
            return self.head[L - 1]
        if n == 0:
            return self.rho ** L
        return self.head[-1] * self.rho ** (L - n)

    def _geo_scale(self) -> float:
        """Factor c with ``w_L = c * rho**L`` for every L beyond the head."""
        n = len(self.head)
        return 1.0 if n == 0 else self.head[-1] * self.rho ** (-n)

    def tail(self, N: int, power: int = 0) -> float:
        """``sum_{L >= N} L**power * w_L`` in closed form (power 0, 1 or 2)."""
        N = max(N, 1)
        n = len(self.head)
        head = sum(L ** power * self.head[L - 1] for L in range(N, n + 1))
        start = max(N, n + 1)
        return head + self._geo_scale() * _geometric_moment(self.rho, start, power)

    def sums(self) -> tuple[float, float, float]:
        return self.tail(1, 0), self.tail(1, 1), self.tail(1, 2)


def _geometric_moment(rho: float, N: int, power: int) -> float:
    """``sum_{L >= N} L**power * rho**L``."""
    q = 1.0 - rho
    rn = rho ** N
    if power == 0:
        return rn / q
    if power == 1:
        return rn * (N - (N - 1) * rho) / q ** 2
    if power == 2:
        # sum_{j>=0} (N+j)^2 rho^j = N^2/q + 2N rho/q^2 + rho(1+rho)/q^3
        return rn * (N * N / q + 2 * N * rho / q ** 2 + rho * (1 + rho) / q ** 3)
    raise ValueError("power must be 0, 1 or 2")


@dataclass(frozen=True)
class WeightDiagnostics:
    total: float
    first_moment: float
    second_moment: float

    @property
    def ordered(self) -> bool:
        return self.total < self.first_moment < self.second_moment

    @property
    def finite(self) -> bool:
        return all(math.isfinite(v) for v in (self.total, self.first_moment, self.second_moment))


def check_weights(w: WeightSeq | Sequence[float], rho: float = 0.5) -> WeightDiagnostics:
    """Closed-form weight sums; a bare sequence is read as an explicit head."""
    if not isinstance(w, WeightSeq):
        w = WeightSeq(rho=rho, head=tuple(float(v) for v in w))
    diag = WeightDiagnostics(*w.sums())
    if not (diag.finite and diag.ordered):
        raise WeightError(f"weight sums not finite and strictly increasing: {diag}")
    return diag


def radial_bound_tail(w: WeightSeq, N: int) -> float:
    """``sum_{L >= N} w_L (4L + 10)``."""
    return 4.0 * w.tail(N, 1) + 10.0 * w.tail(N, 0)


def radial_diameter_bound(w: WeightSeq) -> float:
    """Bound on the model diameter of a radial ray: ``sum_L w_L (4L + 10)``."""
    return radial_bound_tail(w, 1)


@dataclass(frozen=True)
class FanChainProvider:
    """Fan chains at a fixed minimum pole spacing, with their separation estimate.

    ``assumed_separation`` is the empirical L-hat from the refuter for
    two fans ``spacing`` apart.
    """

    spacing: float = 1.0
    assumed_separation: int = 1

    def best_chain(self, x: PointX, y: PointX) -> tuple[int, int]:
        return chain_cardinality(abs(x.theta - y.theta), self.spacing), self.assumed_separation


@dataclass(frozen=True)
class DhatEstimate:
    lower: float
    upper: float
    tail: float
    assumed_separation: int | None = None

    @property
    def tag(self) -> str:
        if self.assumed_separation is None:
            return "certified"
        return f"conditional-L0={self.assumed_separation}"


def _upper_and_tail(x: PointX, y: PointX, w: WeightSeq) -> tuple[float, float]:
    if x == y:
        return 0.0, 0.0
    head = sum(w.weight(L) * dl_upper(x, y, L) for L in range(1, w.lmax + 1))
    linear_tail = (1.0 + dist(x, y)) * w.tail(w.lmax + 1)
    if on_common_radial_ray(x, y):
        # per-L bound there is min(1 + d, 4L + 10); either closed form bounds the tail
        tail = min(linear_tail, radial_bound_tail(w, w.lmax + 1))
    else:
        tail = linear_tail
    return head + tail, tail


def dhat_bounds(x: PointX, y: PointX, w: WeightSeq | None = None,
                chains: FanChainProvider | None = None) -> DhatEstimate:
    w = w or WeightSeq()
    chains = chains or FanChainProvider()
    if x == y:
        return DhatEstimate(0.0, 0.0, 0.0, None)
    upper, tail = _upper_and_tail(x, y, w)
    # distinct points have d_L >= 1 for every L
    lower = w.tail(1)
    tag = None
    k, L0 = chains.best_chain(x, y)
    if k > 0:
        conditional = (1 + k) * w.tail(L0)
        if conditional > lower:
            lower, tag = conditional, L0
    return DhatEstimate(lower, upper, tail, tag)


def dhat_diam_bounds(points: Sequence[PointX], w: WeightSeq | None = None,
                     chains: FanChainProvider | None = None) -> DhatEstimate:
    """Interval for the model diameter of a finite point set."""
    w = w or WeightSeq()
    pts = list(points)
    if not pts:
        raise DomainError("diameter of an empty set")
    if len(set(pts)) == 1:
        return DhatEstimate(0.0, 0.0, 0.0, None)
    upper = tail = 0.0
    best_lower = (0.0, None)
    for x, y in combinations(pts, 2):
        est = dhat_bounds(x, y, w, chains)
        upper = max(upper, est.upper)
        tail = max(tail, est.tail)
        if est.lower > best_lower[0]:
            best_lower = (est.lower, est.assumed_separation)
    if all(p.theta == pts[0].theta for p in pts):
        upper = min(upper, radial_diameter_bound(w))
    return DhatEstimate(best_lower[0], upper, tail, best_lower[1])
