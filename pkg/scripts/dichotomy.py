"""Support inference on a line of points for the Chebyshev measure: growth
slope of log Lambda~_n^{-1} in n and the resulting verdict."""

import argparse
from dataclasses import dataclass

import numpy as np

from regchristoffel import Chebyshev1D, classify_support
from regchristoffel.regularized import fixed, one_over_n
from regchristoffel.tables import write_table


@dataclass
class DichotomyConfig:
    lo: float = -2.0
    hi: float = 2.0
    count: int = 21
    eps: float = 0.1
    rule: str = "fixed"
    degrees: tuple = tuple(range(4, 17))


def run(cfg: DichotomyConfig):
    mu = Chebyshev1D()
    rule = fixed(cfg.eps) if cfg.rule == "fixed" else one_over_n(1.0)
    rows = []
    for xi in np.linspace(cfg.lo, cfg.hi, cfg.count):
        v = classify_support(mu, [xi], rule, cfg.degrees)
        rows.append([float(xi), v.decay_slope, v.detrended_slope, v.verdict])
    return ["xi", "decay_slope", "detrended_slope", "verdict"], rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=float, default=-2.0)
    ap.add_argument("--hi", type=float, default=2.0)
    ap.add_argument("--count", type=int, default=21)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--rule", choices=["fixed", "1/n"], default="fixed")
    ap.add_argument("--out", default="-")
    args = ap.parse_args()
    out = args.out
    del args.out
    write_table(out, *run(DichotomyConfig(**vars(args))))


if __name__ == "__main__":
    main()
