"""Spaces built by gluing rays to X, the shear map phi, and QI fitting.

``W`` glues a ray at every ``(i, 2**i)``; ``Z`` glues one at every
``(0, 2**i)``.  Gluing at single points gives the path metric: a path
between points on different pieces passes through the attach points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .geometry import DomainError, PointX, dist, dist_arrays


def phi(p: PointX) -> PointX:
    """Logarithmic shear ``(t, r) -> (t - log2 r, r)``."""
    return PointX(p.theta - math.log2(p.rad), p.rad)


def phi_inv(p: PointX) -> PointX:
    return PointX(p.theta + math.log2(p.rad), p.rad)


@dataclass(frozen=True)
class Base:
    p: PointX


@dataclass(frozen=True)
class RayPoint:
    index: int
    s: float

    def __post_init__(self):
        if self.index <= 0:
            raise DomainError(f"ray index must be positive, got {self.index}")
        if self.s < 0:
            raise DomainError(f"ray parameter must be >= 0, got {self.s}")


GluedPoint = Union[Base, RayPoint]


@dataclass(frozen=True)
class GluedSpace:
    name: str
    attach: Callable[[int], PointX]

    def anchor(self, a: GluedPoint) -> tuple[PointX, float]:
        """Point of X a path must pass through, and the remaining ray length."""
        if isinstance(a, Base):
            return a.p, 0.0
        return self.attach(a.index), a.s

    def dist(self, a: GluedPoint, b: GluedPoint) -> float:
        if isinstance(a, RayPoint) and isinstance(b, RayPoint) and a.index == b.index:
            return abs(a.s - b.s)
        pa, sa = self.anchor(a)
        pb, sb = self.anchor(b)
        return dist(pa, pb) + (sa + sb)


W = GluedSpace("W", lambda i: PointX(float(i), 2.0 ** i))
Z = GluedSpace("Z", lambda i: PointX(0.0, 2.0 ** i))


def dist_W(a: GluedPoint, b: GluedPoint) -> float:
    return W.dist(a, b)


def dist_Z(a: GluedPoint, b: GluedPoint) -> float:
    return Z.dist(a, b)


def phibar(a: GluedPoint) -> GluedPoint:
    """W -> Z: shear on the base, identity on the glued rays."""
    if isinstance(a, Base):
        return Base(phi(a.p))
    return a


def phibar_inv(a: GluedPoint) -> GluedPoint:
    if isinstance(a, Base):
        return Base(phi_inv(a.p))
    return a


def parse_glued(text: str) -> GluedPoint:
    """Parse ``base:theta:r`` or ``ray:i:s``."""
    kind, *rest = text.split(":")
    if kind == "base" and len(rest) == 2:
        return Base(PointX(float(rest[0]), float(rest[1])))
    if kind == "ray" and len(rest) == 2:
        return RayPoint(int(rest[0]), float(rest[1]))
    raise ValueError(f"bad glued-space point {text!r}")


def format_glued(a: GluedPoint) -> str:
    if isinstance(a, Base):
        return f"base:{a.p.theta!r}:{a.p.rad!r}"
    return f"ray:{a.index}:{a.s!r}"


@dataclass(frozen=True)
class QIFit:
    lam: float
    eps: float
    sample_pairs: int
    max_violation: float

    @property
    def fits(self) -> bool:
        return self.max_violation <= 0.0


LAMBDA_GRID = np.round(np.arange(1.0, 20.0 + 1e-9, 0.1), 10)
EPS_GRID = np.arange(0.0, 50.0 + 1e-9, 0.5)


def fit_constants(d_src, d_img) -> QIFit:
    """Smallest grid ``(lambda, eps)`` in lexicographic order satisfying

    ``d_src / lambda - eps <= d_img <= lambda * d_src + eps`` on every pair.
    If no grid point works, the largest grid point is reported together
    with its worst violation.
    """
    d_src = np.asarray(d_src, float)
    d_img = np.asarray(d_img, float)
    for lam in LAMBDA_GRID:
        need = float(np.max(np.maximum(d_img - lam * d_src, d_src / lam - d_img), initial=0.0))
        idx = np.searchsorted(EPS_GRID, need - 1e-12)
        if idx < len(EPS_GRID):
            return QIFit(float(lam), float(EPS_GRID[idx]), len(d_src), 0.0)
    lam, eps = float(LAMBDA_GRID[-1]), float(EPS_GRID[-1])
    worst = float(np.max(np.maximum(d_img - lam * d_src, d_src / lam - d_img) - eps))
    return QIFit(lam, eps, len(d_src), worst)


def window_sampler(theta_lo=-20.0, theta_hi=20.0, log2_rad_hi=20.0):
    """Sampler of PointX arrays: uniform angle, log-uniform radius."""
    def sample(rng: np.random.Generator, n: int):
        th = rng.uniform(theta_lo, theta_hi, n)
        r = 2.0 ** rng.uniform(0.0, log2_rad_hi, n)
        return th, r
    return sample


def qi_fit_x(f_arrays, sampler, pairs: int, seed: int = 0) -> QIFit:
    """QI fit of a map X -> X given as ``(theta, r) arrays -> (theta, r) arrays``."""
    if pairs <= 0:
        raise ValueError("pairs must be positive")
    rng = np.random.default_rng(seed)
    t1, r1 = sampler(rng, pairs)
    t2, r2 = sampler(rng, pairs)
    u1, s1 = f_arrays(t1, r1)
    u2, s2 = f_arrays(t2, r2)
    return fit_constants(dist_arrays(t1, r1, t2, r2), dist_arrays(u1, s1, u2, s2))


def phi_arrays(t, r):
    return t - np.log2(r), r


def identity_arrays(t, r):
    return t, r


def glued_sampler(max_index: int = 40, theta_lo=-20.0, theta_hi=60.0, log2_rad_hi=40.0,
                  ray_fraction: float = 0.5, ray_len: float = 100.0):
    """Sampler of glued-space points: base points and points on rays 1..max_index."""
    def sample(rng: np.random.Generator, n: int) -> list[GluedPoint]:
        out = []
        on_ray = rng.uniform(0, 1, n) < ray_fraction
        idx = rng.integers(1, max_index + 1, n)
        s = rng.uniform(0, ray_len, n)
        th = rng.uniform(theta_lo, theta_hi, n)
        r = 2.0 ** rng.uniform(0.0, log2_rad_hi, n)
        for k in range(n):
            if on_ray[k]:
                out.append(RayPoint(int(idx[k]), float(s[k])))
            else:
                out.append(Base(PointX(float(th[k]), float(r[k]))))
        return out
    return sample


def qi_fit(f, sampler, pairs: int, seed: int = 0, src: GluedSpace = W,
           dst: GluedSpace = Z) -> QIFit:
    """QI fit of a map between glued spaces on ``pairs`` sampled pairs."""
    if pairs <= 0:
        raise ValueError("pairs must be positive")
    rng = np.random.default_rng(seed)
    a = sampler(rng, pairs)
    b = sampler(rng, pairs)
    d_src = [src.dist(p, q) for p, q in zip(a, b)]
    d_img = [dst.dist(f(p), f(q)) for p, q in zip(a, b)]
    return fit_constants(d_src, d_img)
