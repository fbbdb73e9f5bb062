"""Grid-graph shortest paths as an independent check on the distance formula.

Nodes sit on a log-polar grid: uniform angular steps and log-spaced radial
levels with the same step in ``log r``.  Log-polar coordinates are
conformal, so a square stencil is locally isotropic.  Edges join nodes
whose straight chart segment stays outside the open unit disk and are
weighted by that segment's Euclidean length; consecutive nodes on the unit
circle are joined by arcs.  Every grid path is an honest path in X, so the
oracle never undershoots the true distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .geometry import DomainError, PointX

# primitive offsets (d_theta, d_u) with |components| <= 3; one of each +/- pair
_STENCIL = [(a, b) for a in range(0, 4) for b in range(-3, 4)
            if math.gcd(a, b) == 1 and (a > 0 or b > 0)]


@dataclass(frozen=True)
class Window:
    theta_lo: float = -3 * math.pi
    theta_hi: float = 3 * math.pi
    rad_hi: float = 10.0

    def contains(self, p: PointX) -> bool:
        return (self.theta_lo <= p.theta <= self.theta_hi) and p.rad <= self.rad_hi


def _chord(t1, r1, t2, r2):
    gap = np.abs(t1 - t2)
    visible = gap <= np.arccos(1.0 / r1) + np.arccos(1.0 / r2)
    s = np.sin(gap / 2.0)
    return np.sqrt((r1 - r2) ** 2 + 4 * r1 * r2 * s * s), visible


def _grid_edges(theta_lo, theta_hi, rad_hi, h):
    """Edge lists of the grid graph, with node coordinates.

    Angular steps are uniform, so an edge's weight depends only on its
    radial level and stencil offset; weights are computed once per level
    and repeated across angles.
    """
    n_t = max(2, int(math.ceil((theta_hi - theta_lo) / h)) + 1)
    thetas = np.linspace(theta_lo, theta_hi, n_t)
    step = (theta_hi - theta_lo) / (n_t - 1)
    u_hi = math.log(rad_hi)
    n_u = max(2, int(math.ceil(u_hi / h)) + 1)
    rads = np.exp(np.linspace(0.0, u_hi, n_u))
    rads[0] = 1.0
    idx = np.arange(n_t * n_u).reshape(n_t, n_u)
    rows, cols, wts = [], [], []
    for da, db in _STENCIL:
        if da >= n_t:
            continue
        b = np.arange(max(0, -db), n_u - max(0, db))
        if len(b) == 0:
            continue
        w, ok = _chord(0.0, rads[b], da * step, rads[b + db])
        b, w = b[ok], w[ok]
        src = idx[: n_t - da][:, b]
        rows.append(src.ravel())
        cols.append((src + da * n_u + db).ravel())
        wts.append(np.broadcast_to(w, src.shape).ravel())
    # arcs along the unit circle
    rows.append(idx[:-1, 0])
    cols.append(idx[1:, 0])
    wts.append(np.diff(thetas))
    T, R = np.meshgrid(thetas, rads, indexing="ij")
    return rows, cols, wts, T.ravel(), R.ravel()


def _attach(graph_nodes_t, graph_nodes_r, p: PointX, h, reach=3.5):
    """Edges from an off-grid point to grid nodes near it."""
    u = math.log(p.rad)
    du = np.log(graph_nodes_r) - u
    dt = graph_nodes_t - p.theta
    near = np.flatnonzero((np.abs(dt) <= reach * h) & (np.abs(du) <= reach * h))
    w, ok = _chord(p.theta, p.rad, graph_nodes_t[near], graph_nodes_r[near])
    if p.rad == 1.0:
        on_circle = graph_nodes_r[near] == 1.0
        w = np.where(on_circle, np.abs(dt[near]), w)
        ok = ok | on_circle
    return near[ok], w[ok]


def oracle_dist(p: PointX, q: PointX, resolution: float = 0.01,
                window: Window | None = None) -> float:
    """Dijkstra distance on a log-polar grid of step ``resolution``.

    Geodesics never leave the angular range of their endpoints nor exceed
    the larger radius, so the grid only covers that box (plus a margin).
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    window = window or Window()
    for pt in (p, q):
        if not window.contains(pt):
            raise DomainError(f"{pt} outside oracle window {window}")
    if p == q:
        return 0.0
    margin = 4 * resolution
    t_lo = min(p.theta, q.theta) - margin
    t_hi = max(p.theta, q.theta) + margin
    r_hi = max(p.rad, q.rad) * math.exp(margin)
    rows, cols, wts, nt, nr = _grid_edges(t_lo, t_hi, r_hi, resolution)
    n = len(nt)
    ip, wp = _attach(nt, nr, p, resolution)
    iq, wq = _attach(nt, nr, q, resolution)
    rows += [np.full(len(ip), n), np.full(len(iq), n + 1)]
    cols += [ip, iq]
    wts += [wp, wq]
    w_direct, ok = _chord(p.theta, p.rad, q.theta, q.rad)
    if ok and abs(math.log(p.rad / q.rad)) <= 3.5 * resolution \
            and abs(p.theta - q.theta) <= 3.5 * resolution:
        rows.append(np.array([n]))
        cols.append(np.array([n + 1]))
        wts.append(np.array([float(w_direct)]))
    graph = coo_matrix((np.concatenate(wts), (np.concatenate(rows), np.concatenate(cols))),
                       shape=(n + 2, n + 2)).tocsr()
    d = dijkstra(graph, directed=False, indices=n)
    return float(d[n + 1])
