"""Density estimates for the uniform law on [0, 1]^2, from exact moments and
from a seeded sample cloud, over a grid of points and several degrees."""

import argparse
from dataclasses import dataclass

import numpy as np

from regchristoffel import BoxQuery, EmpiricalMeasure, LebesgueBox, SampleCloud, fit
from regchristoffel.regularized import density_estimate, density_estimate_boundary_corrected
from regchristoffel.measures import sample
from regchristoffel.tables import write_table

SQUARE = [(0.0, 1.0), (0.0, 1.0)]


@dataclass
class GridConfig:
    eps: float = 0.2
    degrees: tuple = (4, 8, 12, 16)
    points_per_axis: int = 5
    samples: int = 50_000
    seed: int = 42


def run(cfg: GridConfig):
    exact = LebesgueBox(SQUARE, mass=1.0)
    pts = sample(exact, cfg.samples, np.random.default_rng(cfg.seed))
    empirical = EmpiricalMeasure(SampleCloud.from_points(pts))
    axis = np.linspace(0.0, 1.0, cfg.points_per_axis)
    rows = []
    for source, mu in (("exact", exact), ("samples", empirical)):
        for n in cfg.degrees:
            model = fit(mu, n)
            for x in axis:
                for y in axis:
                    q = BoxQuery([x, y], cfg.eps)
                    rows.append([source, n, x, y, density_estimate(model, q),
                                 density_estimate_boundary_corrected(model, q, SQUARE)])
    return ["source", "n", "x1", "x2", "density_estimate", "boundary_corrected"], rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=0.2)
    ap.add_argument("--samples", type=int, default=50_000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--points-per-axis", type=int, default=5)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()
    cfg = GridConfig(eps=args.eps, samples=args.samples, seed=args.seed, points_per_axis=args.points_per_axis)
    write_table(args.out, *run(cfg))


if __name__ == "__main__":
    main()
