"""Optimal private sampling over density-bounded continuous classes.

A class (c1, c2, h) consists of densities p with c1 h <= p <= c2 h pointwise.
The optimal mechanism clips p/r into the envelope window [b h, b e^eps h] and
normalizes; the mixture mechanism gamma p + (1 - gamma) h lands in the same
window without any normalizer search and serves as the certified baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .divergence import ExtReal, Generator, ZERO_MASS, density_divergence, ratio_bound
from .errors import InvalidArgumentError, MechanismError
from .numerics import (
    DEFAULT_QUAD,
    Interval,
    QuadratureConfig,
    ToleranceBand,
    bisect_normalizer,
    integrate,
    quadrature_nodes,
)

DEFAULT_BAND = ToleranceBand(1e-5, 1e-5)

# Relative slack for float noise when checking class membership on the grid;
# larger violations are rejected, smaller ones are clipped into the class.
_CLASS_SLACK = 1e-9

_INTERNAL_DELTA = 1e-12


@dataclass(frozen=True)
class Density1D:
    """A probability density on a bounded interval, evaluated vectorized."""

    support: Interval
    pdf: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x):
        return self.pdf(np.asarray(x, dtype=float))

    @staticmethod
    def uniform(support: Interval) -> "Density1D":
        height = 1.0 / support.width
        lo, hi = support.lo, support.hi
        return Density1D(support, lambda x: np.where((x >= lo) & (x <= hi), height, 0.0))


@dataclass(frozen=True)
class ContinuousClass:
    """The density class (c1, c2, h) together with the privacy budget.

    Construction enforces the normalization condition: h integrates to 1
    within 1e-6, c1 < 1 < c2, and c2 > c1 e^eps; violating the last
    inequality means any input can be released unchanged (identity mechanism,
    zero loss), so the clipping machinery is refused.
    """

    c1: float
    c2: float
    h: Density1D
    eps: float
    quad: QuadratureConfig = field(default=DEFAULT_QUAD, compare=False)

    def __post_init__(self):
        if not (self.c1 >= 0.0 and math.isfinite(self.c2) and self.c2 > self.c1):
            raise InvalidArgumentError(f"require 0 <= c1 < c2, got c1={self.c1!r}, c2={self.c2!r}")
        if not (math.isfinite(self.eps) and self.eps > 0):
            raise InvalidArgumentError(f"eps must be positive and finite, got {self.eps!r}")
        if not self.c1 < 1.0:
            raise InvalidArgumentError(f"normalization requires c1 < 1, got c1={self.c1!r}")
        if not self.c2 > 1.0:
            raise InvalidArgumentError(f"normalization requires c2 > 1, got c2={self.c2!r}")
        if not self.c2 > self.c1 * math.exp(self.eps):
            raise InvalidArgumentError(
                f"c2={self.c2!r} <= c1*e^eps={self.c1 * math.exp(self.eps)!r}: every pair of "
                "class densities is already within an e^eps ratio, so the identity mechanism "
                "is optimal with zero loss and no clipping mechanism is needed"
            )
        h_mass = integrate(self.h, self.h.support, self.quad)
        if abs(h_mass - 1.0) > 1e-6:
            raise InvalidArgumentError(f"reference density integrates to {h_mass!r}, expected 1 within 1e-6")


@dataclass(frozen=True)
class MechanismConstants:
    """Constants determined by (c1, c2, eps).

    alpha is the reference mass of the high region in the extreme densities;
    b and b e^eps bound the mechanism outputs relative to h; (r1, r2] brackets
    the normalizer; gamma is the mixing weight of the baseline mixture.
    """

    alpha: float
    b: float
    r1: float
    r2: float
    gamma: float


def constants_for(c1: float, c2: float, eps: float) -> MechanismConstants:
    """Mechanism constants from the scalars alone (shared with grid demos)."""
    ee = math.exp(eps)
    denom = (ee - 1.0) * (1.0 - c1) + c2 - c1
    alpha = (1.0 - c1) / (c2 - c1)
    b = (c2 - c1) / denom
    r1 = c1 / b
    r2 = c2 / (b * ee)
    gamma = (ee - 1.0) / denom
    return MechanismConstants(alpha=alpha, b=b, r1=r1, r2=r2, gamma=gamma)


def mechanism_constants(cls: ContinuousClass) -> MechanismConstants:
    return constants_for(cls.c1, cls.c2, cls.eps)


class ClippedDensity:
    """Output of the optimal mechanism: clip(p/r; b h, b e^eps h) normalized
    by its achieved mass. Immutable after construction; the achieved mass and
    the effective budget eps - log((1+delta2)/(1-delta1)) are recorded."""

    def __init__(self, cls: ContinuousClass, source: Density1D, r: float,
                 raw_mass: float, eps_effective: float, consts: MechanismConstants):
        self.cls = cls
        self.source = source
        self.r = r
        self.raw_mass = raw_mass
        self.eps_effective = eps_effective
        self.consts = consts
        self.support = source.support

    def raw(self, x) -> np.ndarray:
        """Clipped but unnormalized density values."""
        x = np.asarray(x, dtype=float)
        hv = np.asarray(self.cls.h(x), dtype=float)
        pv = np.clip(np.asarray(self.source(x), dtype=float), self.cls.c1 * hv, self.cls.c2 * hv)
        lo = self.consts.b * hv
        hi = lo * math.exp(self.cls.eps)
        return np.clip(pv / self.r, lo, hi)

    def pdf(self, x) -> np.ndarray:
        return self.raw(x) / self.raw_mass

    def __call__(self, x):
        return self.pdf(x)


def _grid_class_check(cls: ContinuousClass, pv: np.ndarray, hv: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Verify c1 h <= p <= c2 h on the grid up to relative float slack and
    return p clipped into the class."""
    lo = cls.c1 * hv
    hi = cls.c2 * hv
    slack = _CLASS_SLACK * np.maximum(hi, 1e-30)
    viol = np.maximum(pv - hi, lo - pv) - slack
    worst = int(np.argmax(viol))
    if viol[worst] > 0:
        raise InvalidArgumentError(
            f"density outside the class at x={float(x[worst])!r}: "
            f"p={float(pv[worst])!r} not in [{float(lo[worst])!r}, {float(hi[worst])!r}]"
        )
    return np.clip(pv, lo, hi)


def optimal_density(cls: ContinuousClass, p: Density1D, band: ToleranceBand = DEFAULT_BAND,
                    quad: QuadratureConfig = DEFAULT_QUAD) -> ClippedDensity:
    """Sampling density of the optimal mechanism for input `p`.

    The normalizer is found by bisection on (r1, r2]; at the r1 = 0 endpoint
    the clip is evaluated by convention as b e^eps h where p > 0 and b h
    where p = 0. The returned density divides by the achieved quadrature
    mass, which is certified to lie in [1-delta1, 1+delta2].
    """
    eps_eff = band.effective_eps(cls.eps)
    consts = mechanism_constants(cls)
    x, w = quadrature_nodes(p.support, quad)
    hv = np.asarray(cls.h(x), dtype=float)
    pv = _grid_class_check(cls, np.asarray(p(x), dtype=float), hv, x)
    p_mass = float(w @ pv)
    if abs(p_mass - 1.0) > 1e-6:
        raise InvalidArgumentError(f"input density integrates to {p_mass!r}, expected 1 within 1e-6")
    env_lo = consts.b * hv
    env_hi = env_lo * math.exp(cls.eps)
    p_pos = pv > ZERO_MASS

    def mass(r: float) -> float:
        if r == consts.r1 and consts.r1 == 0.0:
            return float(w @ np.where(p_pos, env_hi, env_lo))
        return float(w @ np.clip(pv / r, env_lo, env_hi))

    stop = ToleranceBand(min(band.delta1, _INTERNAL_DELTA), min(band.delta2, _INTERNAL_DELTA))
    try:
        r = bisect_normalizer(mass, Interval(consts.r1, consts.r2), stop, lo_open=True)
    except Exception as exc:
        raise MechanismError(
            f"normalizer search failed for class (c1={cls.c1}, c2={cls.c2}, eps={cls.eps})"
        ) from exc
    raw_mass = mass(r)
    if not band.contains(raw_mass):
        raise MechanismError(f"achieved mass {raw_mass!r} escaped the band {band}")
    return ClippedDensity(cls, p, r, raw_mass, eps_eff, consts)


def mixture_density(cls: ContinuousClass, p: Density1D) -> Density1D:
    """Density of the mixture mechanism gamma p + (1 - gamma) h.

    Already inside [b h, b e^eps h] pointwise (b = gamma c1 + 1 - gamma and
    b e^eps = gamma c2 + 1 - gamma), so it needs no normalizer search.
    """
    consts = mechanism_constants(cls)
    gamma = consts.gamma
    h = cls.h

    def pdf(x):
        return gamma * np.asarray(p(x), dtype=float) + (1.0 - gamma) * np.asarray(h(x), dtype=float)

    return Density1D(p.support, pdf)


def optimal_put_continuous(cls: ContinuousClass, g: Generator) -> ExtReal:
    """Exact worst-case divergence over the class: the chord of f at 1
    between r1 and r2 (with the f(0) limit when c1 = 0)."""
    consts = mechanism_constants(cls)
    return ratio_bound(g, consts.r1, consts.r2)


def utility_loss(cls: ContinuousClass, p: Density1D, q, g: Generator,
                 quad: QuadratureConfig = DEFAULT_QUAD) -> ExtReal:
    """Divergence between an input density and a mechanism output."""
    if abs(p.support.lo - cls.h.support.lo) > 1e-12 or abs(p.support.hi - cls.h.support.hi) > 1e-12:
        raise InvalidArgumentError("input density must live on the class support")
    return density_divergence(g, p, q, quad)
