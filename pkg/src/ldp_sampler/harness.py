"""Experiment orchestration: finite-space trade-off tables, the 1D
Gaussian-mixture empirical worst-case run, the optional 2D ring demo, and
byte-stable CSV/JSON emission.

Mechanism labels in the output:
  proposed             exact worst-case value of the optimal mechanism
  baseline_closed_form closed-form worst case of the mollifier-projection baseline
  proposed_empirical   seeded empirical worst case of the optimal mechanism
  mixture_Qdagger      empirical worst case of the mixture mechanism
  theoretical_cap      exact worst-case value over the whole envelope class
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

import numpy as np

from . import continuous, distributions, finite
from .divergence import ExtReal, builtin_generator
from .errors import InvalidArgumentError, MechanismError
from .numerics import (
    DEFAULT_QUAD,
    Interval,
    QuadratureConfig,
    ToleranceBand,
    bisect_normalizer,
)

CSV_HEADER = "mode,k,eps,eps_effective,divergence,mechanism,value,N,K,k0,seed,runtime_ms"

DEFAULT_EPS_GRID = (0.1, 0.5, 1.0, 2.0, 5.0)
DEFAULT_DIVERGENCES = ("KL", "TV", "SqHellinger")


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "finite"
    k: int = 10
    eps_grid: tuple = DEFAULT_EPS_GRID
    divergences: tuple = DEFAULT_DIVERGENCES
    N: int = 100
    K: int = 10
    k0: float = 2.0
    seed: int = 1
    band: ToleranceBand | None = None
    quad: QuadratureConfig = DEFAULT_QUAD
    out_path: str = "results"
    ring_modes: int = 3
    ring_variance: float = 0.5
    ring_grid: int = 256
    timing: bool = True

    def __post_init__(self):
        if self.mode not in ("finite", "gaussmix", "ring"):
            raise InvalidArgumentError(f"unknown mode {self.mode!r}")
        if self.N < 1:
            raise InvalidArgumentError("N must be >= 1")
        band = self.resolved_band()
        for eps in self.eps_grid:
            if not eps > band.log_penalty():
                raise InvalidArgumentError(
                    f"eps={eps} does not exceed the band penalty {band.log_penalty():.3e}"
                )

    def resolved_band(self) -> ToleranceBand:
        if self.band is not None:
            return self.band
        return finite.DEFAULT_BAND if self.mode == "finite" else continuous.DEFAULT_BAND


@dataclass(frozen=True)
class ResultRow:
    mode: str
    k: int | None
    eps: float
    eps_effective: float
    divergence: str
    mechanism: str
    value: ExtReal
    N: int | None = None
    K: int | None = None
    k0: float | None = None
    seed: int | None = None
    runtime_ms: float = 0.0


class _Timer:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self._t0 = time.perf_counter()

    def lap_ms(self) -> float:
        now = time.perf_counter()
        ms = (now - self._t0) * 1000.0
        self._t0 = now
        return round(ms, 3) if self.enabled else 0.0


def run_finite(cfg: ExperimentConfig) -> list[ResultRow]:
    """Exact proposed and baseline worst cases plus a seeded empirical row,
    for every (eps, divergence) pair; emits CSV and JSON."""
    if cfg.mode != "finite":
        raise InvalidArgumentError("run_finite requires mode='finite'")
    band = cfg.resolved_band()
    rows = []
    for eps in cfg.eps_grid:
        params = finite.FiniteParams(cfg.k, eps)
        eps_eff = band.effective_eps(eps)
        for name in cfg.divergences:
            g = builtin_generator(name)
            timer = _Timer(cfg.timing)
            proposed = finite.optimal_put(params, g)
            rows.append(ResultRow("finite", cfg.k, eps, eps, name, "proposed",
                                  proposed, N=cfg.N, seed=cfg.seed,
                                  runtime_ms=timer.lap_ms()))
            baseline = finite.baseline_put_uniform(params, g)
            rows.append(ResultRow("finite", cfg.k, eps, eps, name, "baseline_closed_form",
                                  baseline, N=cfg.N, seed=cfg.seed,
                                  runtime_ms=timer.lap_ms()))
            empirical = finite.empirical_worst_case(params, g, cfg.N, cfg.seed, band)
            rows.append(ResultRow("finite", cfg.k, eps, eps_eff, name, "proposed_empirical",
                                  ExtReal.of(empirical), N=cfg.N, seed=cfg.seed,
                                  runtime_ms=timer.lap_ms()))
    rows = _sorted_rows(rows)
    _emit_all(rows, cfg.out_path)
    return rows


def run_gaussmix(cfg: ExperimentConfig) -> list[ResultRow]:
    """Empirical worst cases of the optimal and mixture mechanisms over N
    seeded truncated Gaussian mixtures, against the envelope-class cap.

    The mixture corpus depends only on (seed, index), so a multi-eps grid is
    evaluated on a fixed corpus. Per-instance losses and the generating
    mixtures are dumped alongside the result rows for reproducibility.
    """
    if cfg.mode != "gaussmix":
        raise InvalidArgumentError("run_gaussmix requires mode='gaussmix'")
    band = cfg.resolved_band()
    env = distributions.envelope_class()
    gens = [builtin_generator(n) for n in cfg.divergences]
    mixcfg = distributions.MixGenConfig(K=cfg.K, k0=cfg.k0, seed=cfg.seed)
    mixtures = [distributions.random_mixture(mixcfg, i) for i in range(cfg.N)]
    densities = [m.density() for m in mixtures]

    rows = []
    instance_dump = {
        "config": {"N": cfg.N, "K": cfg.K, "k0": cfg.k0, "seed": cfg.seed,
                   "delta1": band.delta1, "delta2": band.delta2},
        "mixtures": [m.to_record() for m in mixtures],
        "losses": [],
    }
    for eps in cfg.eps_grid:
        cls = continuous.ContinuousClass(c1=0.0, c2=env.c2, h=env.h, eps=eps, quad=cfg.quad)
        eps_eff = band.effective_eps(eps)
        timer = _Timer(cfg.timing)
        worst = {(g.name, mech): -math.inf for g in gens for mech in ("proposed", "mixture_Qdagger")}
        for j, p in enumerate(densities):
            try:
                q_star = continuous.optimal_density(cls, p, band, cfg.quad)
                q_dag = continuous.mixture_density(cls, p)
                for g in gens:
                    loss_star = continuous.utility_loss(cls, p, q_star, g, cfg.quad).as_float()
                    loss_dag = continuous.utility_loss(cls, p, q_dag, g, cfg.quad).as_float()
                    worst[(g.name, "proposed")] = max(worst[(g.name, "proposed")], loss_star)
                    worst[(g.name, "mixture_Qdagger")] = max(worst[(g.name, "mixture_Qdagger")], loss_dag)
                    instance_dump["losses"].append({
                        "eps": eps, "index": j, "divergence": g.name,
                        "proposed": loss_star, "mixture_Qdagger": loss_dag,
                    })
            except Exception as exc:
                raise MechanismError(
                    f"gaussmix instance failed at seed={cfg.seed}, index={j}, eps={eps}"
                ) from exc
        elapsed = timer.lap_ms()
        for g in gens:
            cap = continuous.optimal_put_continuous(cls, g)
            for mech in ("proposed", "mixture_Qdagger"):
                rows.append(ResultRow("gaussmix", None, eps, eps_eff, g.name, mech,
                                      ExtReal.of(worst[(g.name, mech)]),
                                      N=cfg.N, K=cfg.K, k0=cfg.k0, seed=cfg.seed,
                                      runtime_ms=elapsed))
            rows.append(ResultRow("gaussmix", None, eps, eps, g.name, "theoretical_cap",
                                  cap, N=cfg.N, K=cfg.K, k0=cfg.k0, seed=cfg.seed,
                                  runtime_ms=0.0))
    rows = _sorted_rows(rows)
    _emit_all(rows, cfg.out_path)
    _write_text(cfg.out_path + "_instances.json", _json_text(instance_dump))
    return rows


def run_ring(cfg: ExperimentConfig) -> dict:
    """2D grid specialization of the clipping mechanism on the Gaussian ring.

    Tabulates the ring density and the mechanism output on a square grid and
    writes them as JSON matrices for external plotting. The envelope is the
    pointwise supremum of admissible components, normalized on the grid.
    """
    if cfg.mode != "ring":
        raise InvalidArgumentError("run_ring requires mode='ring'")
    band = cfg.resolved_band()
    eps = cfg.eps_grid[0]
    centers, z = distributions.gaussian_ring_2d(cfg.ring_modes, cfg.ring_variance, cfg.ring_grid)
    step = centers[1] - centers[0] if len(centers) > 1 else 8.0
    cell_area = step * step
    p_grid = z / (z.sum() * cell_area)

    gx, gy = np.meshgrid(centers, centers, indexing="ij")
    radius = np.sqrt(gx * gx + gy * gy)
    excess = np.maximum(radius - 1.0, 0.0)
    env_raw = np.exp(-0.5 * excess * excess / cfg.ring_variance) / (2.0 * math.pi * cfg.ring_variance)
    h_grid = env_raw / (env_raw.sum() * cell_area)

    c2 = float(np.max(p_grid / h_grid)) * (1.0 + 1e-12)
    consts = continuous.constants_for(0.0, c2, eps)
    env_lo = consts.b * h_grid
    env_hi = env_lo * math.exp(eps)

    def mass(r: float) -> float:
        if r == 0.0:
            return float(np.where(p_grid > 0, env_hi, env_lo).sum() * cell_area)
        return float(np.clip(p_grid / r, env_lo, env_hi).sum() * cell_area)

    stop = ToleranceBand(min(band.delta1, 1e-12), min(band.delta2, 1e-12))
    r = bisect_normalizer(mass, Interval(consts.r1, consts.r2), stop, lo_open=True)
    raw_mass = mass(r)
    q_grid = np.clip(p_grid / r, env_lo, env_hi) / raw_mass

    out = {
        "mode": "ring",
        "modes": cfg.ring_modes,
        "variance": cfg.ring_variance,
        "eps": eps,
        "eps_effective": band.effective_eps(eps),
        "c2": c2,
        "b": consts.b,
        "r": r,
        "raw_mass": raw_mass,
        "centers": centers.tolist(),
        "original": p_grid.tolist(),
        "proposed": q_grid.tolist(),
        "envelope": h_grid.tolist(),
    }
    _write_text(cfg.out_path + "_ring.json", _json_text(out))
    return out


def _sorted_rows(rows: list[ResultRow]) -> list[ResultRow]:
    return sorted(rows, key=lambda r: (r.eps, r.divergence, r.mechanism))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, ExtReal):
        return "inf" if v.infinite else repr(v.value)
    if isinstance(v, float):
        return "inf" if math.isinf(v) else repr(v)
    return str(v)


def rows_to_csv(rows: list[ResultRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join(_fmt(v) for v in (
            r.mode, r.k, r.eps, r.eps_effective, r.divergence, r.mechanism,
            r.value, r.N, r.K, r.k0, r.seed, r.runtime_ms,
        )))
    return "\n".join(lines) + "\n"


def rows_to_json(rows: list[ResultRow]) -> str:
    payload = []
    for r in rows:
        payload.append({
            "mode": r.mode, "k": r.k, "eps": r.eps, "eps_effective": r.eps_effective,
            "divergence": r.divergence, "mechanism": r.mechanism,
            "value": "inf" if r.value.infinite else r.value.value,
            "N": r.N, "K": r.K, "k0": r.k0, "seed": r.seed, "runtime_ms": r.runtime_ms,
        })
    return _json_text(payload)


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path!r}: {exc}") from exc


def emit_rows(rows: list[ResultRow], fmt: str, path: str) -> None:
    """Write rows as CSV or JSON; byte-stable for identical inputs, with
    infinite values serialized as the literal `inf`."""
    if not rows:
        raise InvalidArgumentError("refusing to emit an empty row set")
    if fmt == "csv":
        _write_text(path, rows_to_csv(rows))
    elif fmt == "json":
        _write_text(path, rows_to_json(rows))
    else:
        raise InvalidArgumentError(f"unknown format {fmt!r}")


def _emit_all(rows: list[ResultRow], base: str) -> None:
    emit_rows(rows, "csv", base + ".csv")
    emit_rows(rows, "json", base + ".json")
