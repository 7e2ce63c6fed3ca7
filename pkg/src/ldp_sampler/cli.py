"""Command-line entry point.

Subcommands mirror the experiment modes:
  ldp-sampler finite --k 10 --out results/finite_k10
  ldp-sampler gaussmix --eps 0.5 --seed 2 --out results/gm
  ldp-sampler ring --modes 3 --variance 0.5 --eps 0.5 --out results/ring

Exit codes: 0 success, 1 contract/mechanism/argument error, 2 I/O error.
The master seed defaults to the LDP_SAMPLER_SEED environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import ContractError, MechanismError, NonConvergenceError, NumericError
from .harness import (
    DEFAULT_DIVERGENCES,
    DEFAULT_EPS_GRID,
    ExperimentConfig,
    run_finite,
    run_gaussmix,
    run_ring,
)
from .numerics import QuadratureConfig, ToleranceBand

# ValueError covers InvalidArgumentError plus argument-parsing failures
_CONTRACT_ERRORS = (ValueError, ContractError, MechanismError, NonConvergenceError, NumericError)


def _default_seed() -> int:
    return int(os.environ.get("LDP_SAMPLER_SEED", "1"))


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--eps", type=float, action="append", default=None,
                     help="privacy budget; repeatable (default grid 0.1 0.5 1 2 5)")
    sub.add_argument("--eps-grid", type=float, nargs="+", default=None,
                     help="explicit grid of privacy budgets")
    sub.add_argument("--seed", type=int, default=None, help="master seed")
    sub.add_argument("--out", type=str, default="results", help="output path prefix")
    sub.add_argument("--band-delta1", type=float, default=None)
    sub.add_argument("--band-delta2", type=float, default=None)
    sub.add_argument("--trials", type=int, default=100,
                     help="instances (gaussmix) or random pmfs (finite)")
    sub.add_argument("--divergences", type=str, nargs="+", default=list(DEFAULT_DIVERGENCES))
    sub.add_argument("--fast", action="store_true", help="halve grid resolutions")
    sub.add_argument("--svg", type=str, default=None,
                     help="also render a line chart to this path (needs matplotlib)")


def _build_config(args, mode: str) -> ExperimentConfig:
    eps_grid = args.eps_grid or args.eps or list(DEFAULT_EPS_GRID)
    band = None
    if args.band_delta1 is not None or args.band_delta2 is not None:
        band = ToleranceBand(args.band_delta1 or 0.0, args.band_delta2 or 0.0)
    # halved panels roughly quadruple the kink-panel residual; scale abs_tol with it
    quad = QuadratureConfig(panels=256, abs_tol=1e-5) if args.fast else QuadratureConfig()
    return ExperimentConfig(
        mode=mode,
        k=getattr(args, "k", 10),
        eps_grid=tuple(eps_grid),
        divergences=tuple(args.divergences),
        N=args.trials,
        K=getattr(args, "cap", 10),
        k0=getattr(args, "k0", 2.0),
        seed=args.seed if args.seed is not None else _default_seed(),
        band=band,
        quad=quad,
        out_path=args.out,
        ring_modes=getattr(args, "modes", 3),
        ring_variance=getattr(args, "variance", 0.5),
        ring_grid=(128 if args.fast else 256),
    )


def _render_svg(rows, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    divs = sorted({r.divergence for r in rows})
    fig, axes = plt.subplots(1, len(divs), figsize=(4 * len(divs), 3), squeeze=False)
    for ax, div in zip(axes[0], divs):
        series = {}
        for r in rows:
            if r.divergence != div or r.value.infinite:
                continue
            series.setdefault(r.mechanism, []).append((r.eps, r.value.value))
        for mech, pts in sorted(series.items()):
            pts.sort()
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=mech)
        ax.set_xlabel("eps")
        ax.set_title(div)
        ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ldp-sampler",
                                     description="Minimax-optimal private sampling under LDP")
    subs = parser.add_subparsers(dest="command", required=True)

    p_fin = subs.add_parser("finite", help="finite-alphabet trade-off table")
    p_fin.add_argument("--k", type=int, default=10, help="alphabet size")
    _add_common(p_fin)

    p_gm = subs.add_parser("gaussmix", help="1D Gaussian-mixture experiment")
    p_gm.add_argument("--cap", type=int, default=10, help="max mixture components K")
    p_gm.add_argument("--k0", type=float, default=2.0, help="Poisson mean for component count")
    _add_common(p_gm)

    p_ring = subs.add_parser("ring", help="2D Gaussian ring grid demo")
    p_ring.add_argument("--modes", type=int, default=3)
    p_ring.add_argument("--variance", type=float, default=0.5)
    _add_common(p_ring)

    args = parser.parse_args(argv)
    try:
        cfg = _build_config(args, args.command)
        if args.command == "finite":
            rows = run_finite(cfg)
        elif args.command == "gaussmix":
            rows = run_gaussmix(cfg)
        else:
            run_ring(cfg)
            rows = []
        if args.svg and rows:
            _render_svg(rows, args.svg)
    except _CONTRACT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
