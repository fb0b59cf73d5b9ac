"""Command-line interface.

Subcommands: ``eval``, ``support``, ``sweep``, ``gen-samples``, ``selfcheck``.
Exit codes: 0 ok, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import regularized as reg
from .christoffel import NotPositiveDefinite, fit, lambda_inv
from .measures import MeasureConfigError, MomentProvider, load_measure, provider_from_config, sample, write_samples_csv
from .tables import write_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

NPD_HINT = "moment matrix is not positive definite: increase samples or reduce n"


class ConfigError(ValueError):
    pass


@dataclass
class EpsSpec:
    """Either explicit widths or the rule ``eps = 1/n^r``."""

    values: list[float] = field(default_factory=list)
    power: float | None = None

    def widths(self, n: int) -> list[float]:
        if self.power is not None:
            return [float(n) ** (-self.power)]
        return sorted(self.values)

    def rule(self) -> reg.EpsilonRule:
        if self.power is not None:
            return reg.one_over_n(self.power)
        if len(self.values) != 1:
            raise ConfigError("--eps: exactly one width (or a rule) is required here")
        return reg.fixed(self.values[0])


@dataclass
class RunConfig:
    measure: str
    degree: int | None = None
    points: np.ndarray | None = None
    eps: EpsSpec = field(default_factory=lambda: EpsSpec([0.0]))
    mode: str = "lambda"
    out: str | None = None
    fmt: str = "csv"
    boundary_box: list[tuple[float, float]] | None = None
    rescale: bool = True


# --- parsing helpers ----------------------------------------------------------


def _floats(text: str, what: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if not vals or not all(np.isfinite(vals)):
        raise ConfigError(f"{what}: expected finite numbers, got {text!r}")
    return vals


def parse_eps(text: str) -> EpsSpec:
    """``0.1`` | ``0,0.1,0.5`` | ``rule:1/n^r`` (also ``rule:1/n``)."""
    t = text.strip()
    if t.startswith("rule:"):
        return parse_rule(t[len("rule:"):])
    vals = _floats(t, "--eps")
    if any(v < 0 for v in vals):
        raise ConfigError(f"--eps: widths must be >= 0, got {text!r}")
    return EpsSpec(vals)


def parse_rule(text: str, r: float | None = None) -> EpsSpec:
    t = text.replace(" ", "")
    if t == "1/n":
        power = 1.0 if r is None else r
    elif t == "1/n^r":
        if r is None:
            raise ConfigError("--eps-rule 1/n^r needs --r")
        power = r
    elif t.startswith("1/n^"):
        try:
            power = float(t[4:])
        except ValueError:
            raise ConfigError(f"bad width rule {text!r}") from None
    else:
        raise ConfigError(f"bad width rule {text!r}; expected 1/n or 1/n^r")
    if not power > 0:
        raise ConfigError(f"width rule exponent must be positive, got {power}")
    return EpsSpec(power=power)


def parse_points(points: Sequence[str] | None, grid: str | None) -> np.ndarray:
    if points and grid:
        raise ConfigError("give either --point or --grid, not both")
    if grid:
        axes = []
        for k, part in enumerate(grid.split(","), start=1):
            bits = part.split(":")
            if len(bits) != 3:
                raise ConfigError(f"--grid axis {k}: expected min:max:count, got {part!r}")
            try:
                lo, hi, cnt = float(bits[0]), float(bits[1]), int(bits[2])
            except ValueError:
                raise ConfigError(f"--grid axis {k}: bad number in {part!r}") from None
            if cnt < 1:
                raise ConfigError(f"--grid axis {k}: count must be >= 1")
            axes.append(np.linspace(lo, hi, cnt) if cnt > 1 else np.array([lo]))
        # row-major: first axis varies slowest
        return np.array(list(itertools.product(*axes)), dtype=float)
    if not points:
        raise ConfigError("a query point is required (--point or --grid)")
    rows = []
    for p in points:
        for chunk in p.split(";"):
            if chunk.strip():
                rows.append(_floats(chunk, "--point"))
    if len({len(r) for r in rows}) != 1:
        raise ConfigError("--point: all points must have the same dimension")
    return np.array(rows, dtype=float)


def parse_degrees(text: str) -> list[int]:
    """``4,6,8`` or ``4:16`` or ``4:16:2`` (inclusive)."""
    try:
        if ":" in text:
            bits = [int(b) for b in text.split(":")]
            if len(bits) not in (2, 3):
                raise ValueError
            step = bits[2] if len(bits) == 3 else 1
            degs = list(range(bits[0], bits[1] + 1, step))
        else:
            degs = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"--degrees: expected a list like 4,6,8 or a range 4:16[:step], got {text!r}") from None
    if any(d < 0 for d in degs):
        raise ConfigError("--degrees: degrees must be >= 0")
    return degs


def parse_box(text: str) -> list[tuple[float, float]]:
    vals = _floats(text, "--boundary-box")
    if len(vals) % 2:
        raise ConfigError("--boundary-box: expected pairs a1,b1,a2,b2,...")
    box = list(zip(vals[::2], vals[1::2]))
    if any(a >= b for a, b in box):
        raise ConfigError("--boundary-box: each axis needs a < b")
    return box


def _load(source: str) -> MomentProvider:
    try:
        return load_measure(source)
    except MeasureConfigError as exc:
        raise ConfigError(f"--measure: {exc}") from None


def _check_dim(provider: MomentProvider, pts: np.ndarray) -> None:
    if pts.shape[1] != provider.dim:
        raise ConfigError(f"query points have dimension {pts.shape[1]}, measure has {provider.dim}")


# --- commands -----------------------------------------------------------------


def cmd_eval(cfg: RunConfig) -> tuple[list[str], list[list]]:
    """One row per (point, eps): coordinates, epsilon, n, lambda, lambda_inv[, density]."""
    provider = _load(cfg.measure)
    pts = cfg.points
    _check_dim(provider, pts)
    n = cfg.degree
    if n is None or n < 0:
        raise ConfigError("--n must be a non-negative integer")
    if cfg.boundary_box is not None and len(cfg.boundary_box) != provider.dim:
        raise ConfigError("--boundary-box dimension differs from the measure")
    model = fit(provider, n, rescale=cfg.rescale)
    d = provider.dim
    cols = [f"x{i + 1}" for i in range(d)] + ["epsilon", "n", "lambda", "lambda_inv"]
    if cfg.mode == "density":
        cols.append("density_estimate")
        if cfg.boundary_box is not None:
            cols.append("density_estimate_corrected")
    widths = [0.0] if cfg.mode == "lambda" else cfg.eps.widths(n)
    if cfg.mode == "density" and any(w <= 0 for w in widths):
        raise ConfigError("--eps: density mode needs widths > 0")
    rows = []
    for x in pts:
        for eps in widths:
            q = reg.BoxQuery(x, eps)
            if cfg.mode == "lambda":
                inv = lambda_inv(model, x)
            elif cfg.boundary_box is not None and cfg.mode == "density":
                inv = reg.lambda_tilde_inv_clipped(model, q, cfg.boundary_box)
            else:
                inv = reg.lambda_tilde_inv(model, q)
            row = [*map(float, x), eps, n, 1.0 / inv, inv]
            if cfg.mode == "density":
                row.append(1.0 / (inv * q.volume))
                if cfg.boundary_box is not None:
                    row.append(reg.density_estimate_boundary_corrected(model, q, cfg.boundary_box))
            rows.append(row)
    return cols, rows


def cmd_support(cfg: RunConfig, degrees: Sequence[int], slope_hi: float, slope_lo: float):
    provider = _load(cfg.measure)
    _check_dim(provider, cfg.points)
    if len(degrees) < 4:
        raise ConfigError("--degrees: at least 4 degrees are required")
    if any(b <= a for a, b in zip(degrees, degrees[1:])) or degrees[0] < 1:
        raise ConfigError("--degrees: must be strictly increasing and >= 1")
    rule = cfg.eps.rule()
    d = provider.dim

    def factory(p, n):
        return fit(p, n, rescale=cfg.rescale)

    cols = [f"x{i + 1}" for i in range(d)] + ["verdict", "decay_slope", "detrended_slope"]
    cols += [f"log_inv_n{n}" for n in degrees]
    rows = []
    for x in cfg.points:
        v = reg.classify_support(provider, x, rule, degrees, slope_hi, slope_lo, factory)
        rows.append([*map(float, x), v.verdict, v.decay_slope, v.detrended_slope, *v.log_inv])
    return cols, rows


def cmd_sweep(cfg: RunConfig, degrees: Sequence[int]):
    provider = _load(cfg.measure)
    _check_dim(provider, cfg.points)
    if not degrees:
        raise ConfigError("--degrees: at least one degree is required")
    rule = cfg.eps.rule()
    d = provider.dim

    def factory(p, n):
        return fit(p, n, rescale=cfg.rescale)

    cols = [f"x{i + 1}" for i in range(d)]
    cols += ["n", "epsilon", "eps_d_lambda_tilde_inv", "density_estimate", "n_d_lambda_tilde", "lambda_tilde_inv"]
    rows = []
    for x in cfg.points:
        for r in reg.sweep(provider, x, degrees, rule, factory):
            rows.append([*map(float, x), r.n, r.eps, r.scaled_inv, r.density, r.n_scaled, r.lambda_tilde_inv])
    return cols, rows


def cmd_gen_samples(measure: str, m: int, seed: int, out: str) -> int:
    text = measure.strip()
    try:
        cfg = json.loads(text) if text.startswith("{") else json.loads(Path(text).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"--measure: {exc}") from None
    try:
        provider = provider_from_config(cfg)
    except MeasureConfigError as exc:
        raise ConfigError(f"--measure: {exc}") from None
    if m < 1:
        raise ConfigError("--m must be >= 1")
    rng = np.random.default_rng(seed)
    try:
        pts = sample(provider, m, rng)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    write_samples_csv(out, pts)
    return m


def cmd_selfcheck(seed: int) -> list[tuple[str, bool, str]]:
    """Oracle agreement checks; returns ``(name, passed, detail)`` triples."""
    from fractions import Fraction

    from . import oracle
    from .index import enumerate_indices
    from .measures import Chebyshev1D, LebesgueBox, moment_matrix

    rng = np.random.default_rng(seed)
    results = []

    worst = 0.0
    for _ in range(200):
        d = int(rng.integers(1, 4))
        beta = tuple(int(b) for b in rng.multinomial(int(rng.integers(0, 9)), [1 / d] * d))
        xi = rng.uniform(-1, 1, d)
        eps = float(rng.uniform(1e-3, 1))
        exact = oracle.symbolic_box_average(beta, xi, eps)
        fast = reg.box_avg_monomial(beta, reg.BoxQuery(xi, eps))
        worst = max(worst, abs(fast - float(exact)) / max(1.0, abs(float(exact))))
    results.append(("box average vs exact rational", worst <= 1e-12, f"max err {worst:.2e}"))

    worst = 0.0
    for _ in range(50):
        prov = [Chebyshev1D(), LebesgueBox([(-1, 1)]), LebesgueBox([(0, 1), (-1, 2)])][int(rng.integers(0, 3))]
        n = int(rng.integers(1, 4))
        model = fit(prov, n, rescale=False)
        xi = rng.uniform(-1, 1, prov.dim)
        eps = float(rng.uniform(0, 0.5))
        c = reg.box_avg_vector(model.index_set, reg.BoxQuery(xi, eps))
        val, _ = oracle.solve_min_quadratic(oracle.QPInstance(model.matrix.values, c))
        fast = 1.0 / reg.lambda_tilde_inv(model, reg.BoxQuery(xi, eps))
        worst = max(worst, abs(val - fast) / abs(val))
    results.append(("QP oracle vs Cholesky path", worst <= 1e-8, f"max rel err {worst:.2e}"))

    worst = 0.0
    cheb = Chebyshev1D()
    for k in range(13):
        q = oracle.quadrature_moment(oracle.chebyshev_weight, [(-1, 1)], (k,), tol=1e-9)
        worst = max(worst, abs(q - cheb.moment((k,))))
    box = LebesgueBox([(0, 1), (-1, 2)])
    for a in enumerate_indices(2, 6):
        q = oracle.quadrature_moment(lambda x, y: 1.0, box.bounds, a, tol=1e-9)
        worst = max(worst, abs(q - box.moment(a)) / max(1.0, abs(q)))
    results.append(("quadrature vs closed-form moments", worst <= 1e-8, f"max err {worst:.2e}"))

    exact = oracle.symbolic_box_average((2,), (Fraction(0),), Fraction(1))
    results.append(("exact box average of y^2 on [-1/2,1/2]", exact == Fraction(1, 12), str(exact)))
    m = moment_matrix(cheb, enumerate_indices(1, 1)).values
    ok = np.allclose(m, [[np.pi, 0], [0, np.pi / 2]], rtol=1e-15, atol=0)
    results.append(("Chebyshev moment matrix n=1", bool(ok), np.array2string(m)))
    return results


# --- argument parsing -----------------------------------------------------------


def _add_query_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--measure", required=True, help="JSON file, CSV sample file or inline JSON")
    p.add_argument("--point", action="append", help="x1,..,xd (repeat or separate with ';')")
    p.add_argument("--grid", help="per-axis min:max:count, comma separated")
    p.add_argument("--no-rescale", action="store_true", help="do not map the support into [-1,1]^d")
    p.add_argument("--out", default="-", help="output path (default stdout)")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regchristoffel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate Lambda, Lambda~ or the density estimate")
    _add_query_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", default="0", help="width, list of widths, or rule:1/n^r")
    p.add_argument("--mode", choices=["lambda", "lambda-tilde", "density"], default="lambda")
    p.add_argument("--boundary-box", help="domain box a1,b1,... for the boundary-corrected estimate")

    p = sub.add_parser("support", help="classify points as inside/outside the support")
    _add_query_args(p)
    p.add_argument("--eps", required=True, help="fixed width or rule:1/n^r")
    p.add_argument("--degrees", required=True)
    p.add_argument("--slope-hi", type=float, default=reg.SLOPE_HI)
    p.add_argument("--slope-lo", type=float, default=reg.SLOPE_LO)

    p = sub.add_parser("sweep", help="convergence table over degrees")
    _add_query_args(p)
    p.add_argument("--eps-rule", help="1/n, 1/n^r (with --r) or 1/n^<value>")
    p.add_argument("--r", type=float)
    p.add_argument("--eps", help="fixed width instead of a rule")
    p.add_argument("--degrees", required=True)

    p = sub.add_parser("gen-samples", help="draw seeded samples from an analytic measure")
    p.add_argument("--measure", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)

    p = sub.add_parser("selfcheck", help="run the oracle agreement checks")
    p.add_argument("--seed", type=int, default=42)
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        measure=args.measure,
        points=parse_points(args.point, args.grid),
        out=args.out,
        fmt=args.format,
        rescale=not args.no_rescale,
    )


def run(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen-samples":
            cmd_gen_samples(args.measure, args.m, args.seed, args.out)
            return EXIT_OK
        if args.command == "selfcheck":
            results = cmd_selfcheck(args.seed)
            for name, ok, detail in results:
                print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
            return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_NUMERIC
        cfg = _config(args)
        if args.command == "eval":
            cfg.degree = args.n
            cfg.mode = args.mode
            cfg.eps = parse_eps(args.eps)
            if args.boundary_box:
                cfg.boundary_box = parse_box(args.boundary_box)
            cols, rows = cmd_eval(cfg)
        elif args.command == "support":
            cfg.eps = parse_eps(args.eps)
            cols, rows = cmd_support(cfg, parse_degrees(args.degrees), args.slope_hi, args.slope_lo)
        else:
            if args.eps_rule and args.eps:
                raise ConfigError("give either --eps-rule or --eps")
            if args.eps_rule:
                cfg.eps = parse_rule(args.eps_rule, args.r)
            elif args.eps:
                cfg.eps = parse_eps(args.eps)
            else:
                raise ConfigError("sweep needs --eps-rule or --eps")
            cols, rows = cmd_sweep(cfg, parse_degrees(args.degrees))
        write_table(cfg.out, cols, rows, cfg.fmt)
    except (ConfigError, reg.ZeroWidth, reg.EmptyIntersection) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotPositiveDefinite as exc:
        print(f"error: {exc}\n{NPD_HINT}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
