#!/usr/bin/env python3
"""Run experiments and write CSV tables (plus SVG figures with --plot).

    python scripts/run_experiments.py --config scripts/default.cfg fig2 quasiline
"""

import argparse
import sys
import time
from pathlib import Path

from parkinglot.experiments import EXPERIMENTS, ExperimentConfig, run, write_result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", default=sorted(EXPERIMENTS), choices=sorted(EXPERIMENTS))
    ap.add_argument("--config", type=Path)
    ap.add_argument("--out", type=Path)
    ap.add_argument("--plot", action="store_true")
    a = ap.parse_args(argv)
    cfg = ExperimentConfig.from_text(a.config.read_text()) if a.config else ExperimentConfig()
    out = a.out or Path(cfg.out_dir)
    failed = []
    for name in a.names:
        t0 = time.perf_counter()
        res = run(name, cfg)
        paths = write_result(res, out)
        if a.plot:
            from parkinglot.plots import plot_experiment
            plot_experiment(res, cfg, out)
        status = "ok" if res.passed else "FAILED"
        print(f"{name:12s} {status:6s} {time.perf_counter() - t0:6.1f}s  "
              + " ".join(p.name for p in paths))
        for line in res.lines:
            print(f"    {line}")
        if not res.passed:
            failed.append(name)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
