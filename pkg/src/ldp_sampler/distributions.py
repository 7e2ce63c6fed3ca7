"""Concrete distribution families for the experiments: truncated 1D Gaussian
mixtures with their shared envelope class, and a 2D Gaussian ring for the
optional grid demo.

Every mixture has unit-variance components with means in [-1, 1], truncated to
[-4, 4]. The pointwise supremum of such component densities is proportional to
exp(-(max(|x|-1, 0))^2 / 2), which yields the envelope (c1=0, c2, h) used by
the continuous mechanism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .continuous import Density1D
from .errors import InvalidArgumentError
from .numerics import Interval, derived_rng, poisson_by_inversion, random_simplex

_SQRT2PI = math.sqrt(2.0 * math.pi)

TRUNCATION = Interval(-4.0, 4.0)


def _phi_cdf(t: float) -> float:
    return 0.5 * (1.0 + math.erf(t / math.sqrt(2.0)))


# Mass retained on [-4, 4] by a unit Gaussian at the worst admissible mean.
MIN_TRUNC_MASS = _phi_cdf(3.0) - _phi_cdf(-5.0)
MAX_TRUNC_MASS = _phi_cdf(4.0) - _phi_cdf(-4.0)


@dataclass(frozen=True)
class MixGenConfig:
    """Mixture generation rule: component count min(Poisson(k0) + 1, K)."""

    K: int
    k0: float
    seed: int

    def __post_init__(self):
        if self.K < 1:
            raise InvalidArgumentError("K must be >= 1")
        if not self.k0 > 0:
            raise InvalidArgumentError("k0 must be positive")


@dataclass(frozen=True)
class GaussMix1D:
    """Truncated unit-variance Gaussian mixture on [-4, 4]."""

    means: np.ndarray
    weights: np.ndarray
    truncation: Interval = TRUNCATION
    normalizer: float = field(init=False)

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if means.ndim != 1 or means.shape != weights.shape or means.size < 1:
            raise InvalidArgumentError("means and weights must be matching nonempty vectors")
        if (np.abs(means) > 1.0).any():
            raise InvalidArgumentError("component means must lie in [-1, 1]")
        if (weights < 0).any() or abs(float(weights.sum()) - 1.0) > 1e-12:
            raise InvalidArgumentError("weights must be a probability vector")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "weights", weights)
        lo, hi = self.truncation.lo, self.truncation.hi
        norm = sum(
            w * (_phi_cdf(hi - m) - _phi_cdf(lo - m))
            for m, w in zip(means, weights)
        )
        object.__setattr__(self, "normalizer", float(norm))

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        z = x[..., None] - self.means
        vals = np.exp(-0.5 * z * z) / _SQRT2PI @ self.weights
        inside = (x >= self.truncation.lo) & (x <= self.truncation.hi)
        return np.where(inside, vals / self.normalizer, 0.0)

    def density(self) -> Density1D:
        return Density1D(self.truncation, self.pdf)

    def to_record(self) -> dict:
        return {"means": self.means.tolist(), "weights": self.weights.tolist()}


def mixture_pdf(m: GaussMix1D, x):
    """Density of the truncated mixture at x (0 outside [-4, 4])."""
    return m.pdf(x)


def random_mixture(cfg: MixGenConfig, index: int) -> GaussMix1D:
    """Deterministic mixture for (cfg.seed, index).

    Draw order is fixed: one uniform for the Poisson inversion, then k means
    uniform on [-1, 1], then k exponentials for the simplex weights.
    """
    rng = derived_rng(cfg.seed, index)
    k = min(poisson_by_inversion(rng, cfg.k0) + 1, cfg.K)
    means = rng.uniform(-1.0, 1.0, size=k)
    weights = random_simplex(rng, k)
    return GaussMix1D(means=means, weights=weights)


@dataclass(frozen=True)
class EnvelopeClass:
    """The pair (c2, h) dominating every admissible mixture: pdf <= c2 h."""

    c2: float
    h: Density1D


def envelope_class() -> EnvelopeClass:
    """Envelope of all truncated mixtures with means in [-1, 1].

    The unnormalized envelope is exp(-(max(|x|-1, 0))^2 / 2) divided by the
    worst-case truncation mass; c2 is its total mass on [-4, 4], computed in
    closed form from the Gaussian cdf, and h is the normalized version.
    """
    denom = _SQRT2PI * MIN_TRUNC_MASS
    raw_integral = 2.0 + 2.0 * _SQRT2PI * (_phi_cdf(3.0) - 0.5)
    c2 = raw_integral / denom
    scale = 1.0 / raw_integral
    lo, hi = TRUNCATION.lo, TRUNCATION.hi

    def pdf(x):
        x = np.asarray(x, dtype=float)
        t = np.maximum(np.abs(x) - 1.0, 0.0)
        inside = (x >= lo) & (x <= hi)
        return np.where(inside, np.exp(-0.5 * t * t) * scale, 0.0)

    return EnvelopeClass(c2=c2, h=Density1D(TRUNCATION, pdf))


def gaussian_ring_2d(modes: int, variance: float, grid_size: int = 256):
    """Grid-tabulated pdf of the equal-weight Gaussian ring on [-4, 4]^2.

    Means are equally spaced on the unit circle with one at (1, 0); each
    component has covariance variance * I. Returns (centers, Z) where Z[i, j]
    is the density at (centers[i], centers[j]).
    """
    if modes < 1:
        raise InvalidArgumentError("modes must be >= 1")
    if not variance > 0:
        raise InvalidArgumentError("variance must be positive")
    step = 8.0 / grid_size
    centers = -4.0 + step * (np.arange(grid_size) + 0.5)
    gx, gy = np.meshgrid(centers, centers, indexing="ij")
    z = np.zeros_like(gx)
    angles = 2.0 * math.pi * (np.arange(1, modes + 1)) / modes
    for ang in angles:
        mx, my = math.cos(ang), math.sin(ang)
        d2 = (gx - mx) ** 2 + (gy - my) ** 2
        z += np.exp(-0.5 * d2 / variance)
    z /= modes * 2.0 * math.pi * variance
    return centers, z
