"""Command line front end: ``explab <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import chains as ch
from .curtains import disjoint, meets, member, parse_curtain
from .experiments import EXPERIMENTS, ExperimentConfig, run, write_result
from .geometry import (PointX, RadialRay, SpiralLine, SpiralRay,
                       alexandrov_angle, dist, geodesic_between, project)
from .model import FanChainProvider, WeightSeq, dhat_bounds
from .oracle import oracle_dist
from .spaces import (format_glued, identity_arrays, parse_glued, phi,
                     phi_arrays, phibar, glued_sampler, qi_fit, qi_fit_x,
                     window_sampler, W, Z)


def _point(text: str) -> PointX:
    t, r = text.split(",")
    return PointX(float(t), float(r))


def parse_geodesic(text: str):
    """``spiral``, ``radial:theta0``, ``spiralray:theta:dir`` or ``seg:t1,r1:t2,r2``."""
    kind, *rest = text.split(":")
    if kind == "spiral" and not rest:
        return SpiralLine()
    if kind == "radial" and len(rest) == 1:
        return RadialRay(float(rest[0]))
    if kind == "spiralray" and len(rest) == 2:
        return SpiralRay(PointX(float(rest[0]), 1.0), int(rest[1]))
    if kind == "seg" and len(rest) == 2:
        return geodesic_between(_point(rest[0]), _point(rest[1]))
    raise argparse.ArgumentTypeError(f"bad geodesic {text!r}")


def _csv_line(*vals) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="").writerow(
        [repr(v) if isinstance(v, float) else str(v) for v in vals])
    return buf.getvalue()


def _coords(p):
    p.add_argument("theta1", type=float)
    p.add_argument("r1", type=float)
    p.add_argument("theta2", type=float)
    p.add_argument("r2", type=float)


def cmd_dist(a):
    p, q = PointX(a.theta1, a.r1), PointX(a.theta2, a.r2)
    print(_csv_line(p.theta, p.rad, q.theta, q.rad, dist(p, q)))


def cmd_oracle(a):
    p, q = PointX(a.theta1, a.r1), PointX(a.theta2, a.r2)
    print(_csv_line(p.theta, p.rad, q.theta, q.rad, oracle_dist(p, q, a.resolution)))


def cmd_geodesic(a):
    p, q = PointX(a.theta1, a.r1), PointX(a.theta2, a.r2)
    g = geodesic_between(p, q)
    c = g.shape
    print(f"# class={c.tag.value} length={g.length!r} tangency=({c.tangency_angle1!r},{c.tangency_angle2!r})")
    print("t,theta,r")
    for k in range(a.samples + 1):
        t = g.length * k / a.samples
        x = g.eval(t)
        print(_csv_line(t, x.theta, x.rad))


def cmd_project(a):
    g = parse_geodesic(a.geodesic)
    x = PointX(a.theta, a.r)
    t = project(x, g, a.tol)
    y = g.eval(t)
    print(_csv_line(x.theta, x.rad, t, y.theta, y.rad, dist(x, y)))


def cmd_angle(a):
    print(repr(alexandrov_angle(parse_geodesic(a.g1), parse_geodesic(a.g2))))


def cmd_curtain(a):
    if a.action == "member":
        h = parse_curtain(a.curtains[0])
        for text in a.points:
            x = _point(text)
            print(_csv_line(h.describe(), x.theta, x.rad, member(h, x).name))
        return 0
    h1, h2 = (parse_curtain(c) for c in a.curtains[:2])
    if a.action == "disjoint":
        res = disjoint(h1, h2, a.budget, a.seed)
        w = res.witness
        print(_csv_line(res.status.value, "" if w is None else w.theta, "" if w is None else w.rad))
    else:
        w = meets(h1, h2, a.budget, a.seed)
        print("not-found" if w is None else _csv_line("witness", w.theta, w.rad))
    return 0


def cmd_chain(a):
    if a.action == "pack":
        g = parse_geodesic(a.geodesic)
        c = ch.max_same_dual_chain(g, _point(a.args[0]), _point(a.args[1]), a.spacing)
        print(f"# cardinality={len(c)} certification={c.certification.value}")
        for h in c.curtains:
            print(h.describe())
    elif a.action == "verify":
        c = ch.verify_chain([parse_curtain(s) for s in a.args], a.budget, a.seed)
        w = c.witness
        print(_csv_line(c.certification.value, "" if w is None else w.theta,
                        "" if w is None else w.rad))
    elif a.action == "refute":
        h1, h2 = parse_curtain(a.args[0]), parse_curtain(a.args[1])
        if a.family == "default":
            fam = ch.default_family(h1, h2)
        else:
            kind, theta0, count = a.family.split(":")
            fam = ch.perpendicular_strips(float(theta0), int(count))
        rep = ch.separation_refuter(h1, h2, fam, a.budget, seed=a.seed)
        print(json.dumps(rep.as_record(), sort_keys=True))
    else:
        x, y = _point(a.args[0]), _point(a.args[1])
        low = ch.dl_lower(x, y, a.L, a.assumed, a.spacing)
        up = ch.dl_upper(x, y, a.L)
        tag = "certified" if low.unconditional else f"conditional-L0={low.assumed_separation}"
        print(_csv_line(a.L, low.value, up, tag))
    return 0


def cmd_dhat(a):
    w = WeightSeq(rho=a.rho, lmax=a.lmax)
    x, y = _point(a.x), _point(a.y)
    est = dhat_bounds(x, y, w, FanChainProvider(a.spacing, a.assumed))
    print("pair,lower,upper,tail,L0")
    print(_csv_line(f"{a.x};{a.y}", est.lower, est.upper, est.tail,
                    est.assumed_separation or ""))


def cmd_map(a):
    if a.action == "phi":
        for text in a.args:
            y = phi(_point(text))
            print(_csv_line(y.theta, y.rad))
    elif a.action == "phibar":
        for text in a.args:
            print(format_glued(phibar(parse_glued(text))))
    else:
        name = a.args[0] if a.args else "phi"
        if name == "phibar":
            fit = qi_fit(phibar, glued_sampler(), a.pairs, a.seed, W, Z)
        else:
            maps = {"phi": phi_arrays, "identity": identity_arrays,
                    "square": lambda t, r: (t, r * r)}
            fit = qi_fit_x(maps[name], window_sampler(), a.pairs, a.seed)
        print("map,lambda,eps,pairs,max_violation")
        print(_csv_line(name, fit.lam, fit.eps, fit.sample_pairs, fit.max_violation))
    return 0


def cmd_run(a):
    cfg = ExperimentConfig()
    if a.config:
        cfg = ExperimentConfig.from_text(Path(a.config).read_text())
    out = a.out or cfg.out_dir
    names = sorted(EXPERIMENTS) if a.experiment == "all" else [a.experiment]
    ok = True
    for name in names:
        res = run(name, cfg)
        write_result(res, out)
        for check, passed, detail in res.checks:
            print(f"[{'PASS' if passed else 'FAIL'}] {name}: {check}" + (f" ({detail})" if detail else ""))
        for line in res.lines:
            print(f"  {line}")
        if a.plot:
            from .plots import plot_experiment
            plot_experiment(res, cfg, out)
        ok &= res.passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="explab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="geodesic distance")
    _coords(p)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("oracle", help="grid Dijkstra distance")
    _coords(p)
    p.add_argument("--resolution", type=float, default=0.01)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("geodesic", help="sample the geodesic between two points")
    _coords(p)
    p.add_argument("--samples", type=int, default=10)
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("project", help="closest-point projection")
    p.add_argument("theta", type=float)
    p.add_argument("r", type=float)
    p.add_argument("--geodesic", default="spiral")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("angle", help="Alexandrov angle between two geodesics")
    p.add_argument("g1")
    p.add_argument("g2")
    p.set_defaults(func=cmd_angle)

    p = sub.add_parser("curtain", help="curtain queries")
    p.add_argument("action", choices=["member", "disjoint", "meets"])
    p.add_argument("curtains", nargs="+", help="fan:s | strip:theta0:s | seg:t1,r1:t2,r2:s")
    p.add_argument("--point", dest="points", action="append", default=[], help="theta,r")
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_curtain)

    p = sub.add_parser("chain", help="chains and d_L bounds")
    p.add_argument("action", choices=["pack", "verify", "refute", "dl-bounds"])
    p.add_argument("args", nargs="*")
    p.add_argument("--geodesic", default="spiral")
    p.add_argument("--spacing", type=float, default=1.0)
    p.add_argument("--family", default="default", help="default | perp:theta0:count")
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--L", type=int, default=1)
    p.add_argument("--assumed", type=int, default=1)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("dhat", help="curtain-model distance bounds")
    p.add_argument("x", help="theta,r")
    p.add_argument("y", help="theta,r")
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--lmax", type=int, default=30)
    p.add_argument("--spacing", type=float, default=1.0)
    p.add_argument("--assumed", type=int, default=1)
    p.set_defaults(func=cmd_dhat)

    p = sub.add_parser("map", help="phi, phibar and QI fitting")
    p.add_argument("action", choices=["phi", "phibar", "qi-fit"])
    p.add_argument("args", nargs="*")
    p.add_argument("--pairs", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("run", help="run an experiment")
    p.add_argument("experiment", choices=sorted(EXPERIMENTS) + ["all"])
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--plot", action="store_true", help="also write SVG figures")
    p.set_defaults(func=cmd_run)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
