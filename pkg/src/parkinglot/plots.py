"""SVG figures for experiment results (matplotlib, imported lazily)."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np


def _figure():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _save(fig, path: Path):
    # fixed metadata keeps the SVG stable across runs
    fig.savefig(path, format="svg", metadata={"Date": None})


def plot_parking_lot(path: Path, levels: float = 2.0):
    """Spiral, a few radial rays and one tangent-arc-tangent geodesic, drawn as a helix."""
    from .geometry import PointX, geodesic_between
    plt = _figure()
    fig = plt.figure(figsize=(5, 5))
    ax = fig.add_subplot(projection="3d")
    t = np.linspace(0, levels * 2 * math.pi, 400)
    ax.plot(np.cos(t), np.sin(t), t, color="k", lw=1.5)
    for a in np.arange(0, levels * 2 * math.pi, math.pi / 2):
        r = np.linspace(1, 5, 2)
        ax.plot(r * math.cos(a), r * math.sin(a), [a, a], color="0.6", lw=0.8)
    g = geodesic_between(PointX(0.0, 4.0), PointX(2 * math.pi + 1.0, 4.0))
    s = np.linspace(0, g.length, 200)
    th, rr = g.eval_arrays(s)
    ax.plot(rr * np.cos(th), rr * np.sin(th), th, color="tab:red")
    ax.set_zlabel("theta")
    _save(fig, path)
    plt.close(fig)


def plot_fig2(res, cfg, path: Path):
    """Strips of the radial-ray pair and the perpendicular chain in the half-flat chart."""
    plt = _figure()
    fig, ax = plt.subplots(figsize=(5, 5))
    header, rows = res.tables["fig2"]
    circle = np.linspace(-math.pi / 2, math.pi / 2, 100)
    ax.plot(np.cos(circle), np.sin(circle), color="k")
    for pole in (3.0, 6.0):
        ax.axvspan(1 + pole - 0.5, 1 + pole + 0.5, color="tab:blue", alpha=0.3)
    for row in rows[:20]:
        s = float(row[2].split(":")[2])
        ax.axhspan(-(1 + s + 0.5), -(1 + s - 0.5), color="tab:orange", alpha=0.25)
        for th, r in ((row[3], row[4]), (row[5], row[6])):
            a = th - cfg.fig2_theta0
            ax.plot([r * math.cos(a)], [r * math.sin(a)], "k.", ms=3)
    ax.set_xlim(0, 9)
    ax.set_ylim(-22, 2)
    ax.set_aspect("equal")
    _save(fig, path)
    plt.close(fig)


def plot_wz(res, cfg, path: Path):
    """Model distance from the first attach point: Z bounded above, W growing."""
    plt = _figure()
    fig, ax = plt.subplots(figsize=(6, 4))
    header, rows = res.tables["wz"]
    z = [(r[2], r[5]) for r in rows if r[0] == "Z" and r[1] == 1]
    w = [(r[2], r[4]) for r in rows if r[0] == "W" and r[1] == 1]
    ax.plot(*zip(*z), label="Z: upper bound")
    ax.plot(*zip(*w), label="W: conditional lower bound")
    ax.axhline(18.0, color="0.5", ls="--", lw=0.8)
    ax.set_xlabel("attach index j")
    ax.set_ylabel("model distance to attach point 1")
    ax.legend()
    _save(fig, path)
    plt.close(fig)


def plot_experiment(res, cfg, out_dir):
    out = Path(out_dir)
    if res.name == "fig2":
        plot_parking_lot(out / "fig1_parking_lot.svg")
        plot_fig2(res, cfg, out / "fig2_strips.svg")
    elif res.name == "wz":
        plot_wz(res, cfg, out / "fig3_wz.svg")
