"""Optimal private sampling over a finite alphabet [k].

The mechanism rescales the input pmf by a normalizer r and lifts every entry
to at least 1/(e^eps + k - 1); r is found by bisection inside the bracket
[1, (e^eps + k - 1)/e^eps], whose endpoints are guaranteed to straddle unit
mass. The same clipping window caps entries at e^eps/(e^eps + k - 1), so the
output ratio across any two inputs is at most e^eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .divergence import ExtReal, Generator, pmf_divergence, ratio_bound
from .errors import InvalidArgumentError, MechanismError
from .numerics import Interval, ToleranceBand, bisect_normalizer, derived_rng, random_simplex

# Sums of pmf entries are exact to machine precision, so the bisection may
# stop far inside any user band at negligible cost; this keeps the
# renormalization residue out of privacy and projection margins.
_INTERNAL_DELTA = 1e-12

DEFAULT_BAND = ToleranceBand(1e-9, 1e-9)


@dataclass(frozen=True)
class FiniteParams:
    """Alphabet size and privacy budget, with the induced clipping window."""

    k: int
    eps: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 2:
            raise InvalidArgumentError(f"k must be an integer >= 2, got {self.k!r} (k=1 is vacuous)")
        if not (math.isfinite(self.eps) and self.eps > 0):
            raise InvalidArgumentError(f"eps must be positive and finite, got {self.eps!r}")

    @property
    def lower(self) -> float:
        return 1.0 / (math.exp(self.eps) + self.k - 1)

    @property
    def upper(self) -> float:
        return math.exp(self.eps) / (math.exp(self.eps) + self.k - 1)

    @property
    def bracket_hi(self) -> float:
        return (math.exp(self.eps) + self.k - 1) / math.exp(self.eps)


def validate_pmf(p, k: int | None = None) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise InvalidArgumentError(f"pmf must be a nonempty vector, got shape {p.shape}")
    if k is not None and p.size != k:
        raise InvalidArgumentError(f"pmf length {p.size} does not match k={k}")
    if (p < 0).any():
        raise InvalidArgumentError("pmf entries must be nonnegative")
    s = float(p.sum())
    if abs(s - 1.0) > 1e-12:
        raise InvalidArgumentError(f"pmf sums to {s!r}, expected 1 within 1e-12")
    return p


def _stop_band(band: ToleranceBand) -> ToleranceBand:
    return ToleranceBand(min(band.delta1, _INTERNAL_DELTA), min(band.delta2, _INTERNAL_DELTA))


def optimal_pmf(params: FiniteParams, p, band: ToleranceBand = DEFAULT_BAND):
    """Sampling pmf of the optimal mechanism for input `p`.

    Returns (q, r): q(x) = max(p(x)/r, lower) renormalized by its achieved
    sum, and the normalizer r itself. Every entry of q lies in
    [lower/(1+delta2), upper/(1-delta1)].
    """
    p = validate_pmf(p, params.k)
    lower = params.lower

    def mass(r: float) -> float:
        return float(np.maximum(p / r, lower).sum())

    try:
        r = bisect_normalizer(mass, Interval(1.0, params.bracket_hi), _stop_band(band))
    except Exception as exc:
        raise MechanismError(f"normalizer search failed for k={params.k}, eps={params.eps}") from exc
    raw = np.maximum(p / r, lower)
    achieved = float(raw.sum())
    if not band.contains(achieved):
        raise MechanismError(f"achieved mass {achieved!r} escaped the band {band}")
    return raw / achieved, r


def optimal_put(params: FiniteParams, g: Generator) -> ExtReal:
    """Exact worst-case divergence of the optimal finite mechanism.

    (e^eps/(e^eps+k-1)) f((e^eps+k-1)/e^eps) + ((k-1)/(e^eps+k-1)) f(0),
    with extended-real arithmetic for generators with f(0) = inf.
    """
    ee = math.exp(params.eps)
    denom = ee + params.k - 1
    hit = ExtReal.of(float(g(denom / ee))).scaled(ee / denom)
    miss = g.f_at_zero.scaled((params.k - 1) / denom)
    return hit + miss


def baseline_put_uniform(params: FiniteParams, g: Generator) -> ExtReal:
    """Worst-case divergence of the mollifier-projection baseline with the
    uniform reference, via its closed form.

    The point mass is the worst input; its best mollifier response places
    B(1/k) = min(e^(eps/2)/k, e^(-eps/2)/k + 1 - e^(-eps/2)) on the atom, so
    the value is the ratio bound with r2 = 1/B(1/k).
    """
    half = math.exp(params.eps / 2.0)
    t = 1.0 / params.k
    b_val = min(half * t, t / half + (1.0 - 1.0 / half))
    return ratio_bound(g, 0.0, 1.0 / b_val)


def mixture_pmf(params: FiniteParams, p) -> np.ndarray:
    """Sampling pmf of the randomized-response mixture: keep a draw from p
    with probability gamma, else emit uniform. Lands in the same clipping
    window as the optimal mechanism, hence eps-LDP, but is dominated by it."""
    p = validate_pmf(p, params.k)
    ee = math.exp(params.eps)
    gamma = (ee - 1.0) / (ee + params.k - 1)
    return gamma * p + (1.0 - gamma) / params.k


def mollifier_sample(params: FiniteParams, rng: np.random.Generator) -> np.ndarray:
    """Random pmf with every entry in [lower, upper]: the affine image of a
    uniform simplex draw, q = lower + (upper - lower) * s."""
    s = random_simplex(rng, params.k)
    return params.lower + (params.upper - params.lower) * s


def empirical_worst_case(params: FiniteParams, g: Generator, trials: int, seed: int,
                         band: ToleranceBand = DEFAULT_BAND) -> float:
    """Max divergence of the optimal mechanism over all k point masses plus
    (trials - k) seeded uniform-simplex pmfs."""
    if trials < params.k:
        raise InvalidArgumentError(f"trials={trials} must cover the {params.k} point masses")
    worst = -math.inf
    for i in range(trials):
        if i < params.k:
            p = np.zeros(params.k)
            p[i] = 1.0
        else:
            p = random_simplex(derived_rng(seed, i), params.k)
        q, _ = optimal_pmf(params, p, band)
        worst = max(worst, pmf_divergence(g, p, q).as_float())
    return worst
