"""Convergence of eps * Lambda~_n^{-1} towards its L2 limit for the uniform
measure on [-1, 1], plus the two 1/n^r width regimes."""

import argparse
from dataclasses import dataclass

from regchristoffel import BoxQuery, LebesgueBox, fit, lambda_tilde_inv
from regchristoffel.oracle import l2_norm_box_functional
from regchristoffel.regularized import one_over_n, sweep
from regchristoffel.tables import write_table


@dataclass
class SweepConfig:
    xi: float = 0.0
    eps: float = 0.2
    max_degree: int = 20
    out: str = "-"


def fixed_width_table(cfg: SweepConfig):
    mu = LebesgueBox([(-1.0, 1.0)], mass=2.0)
    limit = l2_norm_box_functional(lambda x: 1.0, [cfg.xi], cfg.eps)
    rows = []
    for n in range(1, cfg.max_degree + 1):
        inv = lambda_tilde_inv(fit(mu, n), BoxQuery([cfg.xi], cfg.eps))
        rows.append([n, cfg.eps * inv, inv / limit, 1.0 - inv / limit])
    return ["n", "eps_lambda_tilde_inv", "fraction_of_limit", "gap"], rows


def shrinking_width_table(cfg: SweepConfig):
    mu = LebesgueBox([(-1.0, 1.0)], mass=1.0)
    rows = []
    for r in (1.0, 0.5):
        for row in sweep(mu, [cfg.xi], range(4, cfg.max_degree + 1, 2), one_over_n(r)):
            rows.append([r, row.n, row.eps, row.n_scaled, row.density])
    return ["r", "n", "eps", "n_lambda_tilde", "density_estimate"], rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--xi", type=float, default=0.0)
    ap.add_argument("--eps", type=float, default=0.2)
    ap.add_argument("--max-degree", type=int, default=20)
    ap.add_argument("--out", default="-")
    cfg = SweepConfig(**vars(ap.parse_args()))
    write_table(cfg.out, *fixed_width_table(cfg))
    if cfg.out == "-":
        print()
        write_table("-", *shrinking_width_table(cfg))


if __name__ == "__main__":
    main()
