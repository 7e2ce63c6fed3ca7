"""f-divergence generators and divergence evaluation for pmfs and densities.

A generator is a convex f on (0, inf) with f(1) = 0, carried together with its
boundary limits f(0) and f*(0) = lim_{x->0+} x f(1/x). Divergence values are
extended reals: infinity arises only from the explicit boundary conventions
    0 * f(0/0) = 0,    q * f(0/q) = q * f(0),    0 * f(p/0) = p * f*(0),
never from floating-point overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError, NumericError
from .numerics import DEFAULT_QUAD, QuadratureConfig, quadrature_nodes

# Values below this threshold are treated as exactly zero by the boundary
# conventions, so denormal noise from density evaluation cannot trigger the
# f*(0) branch.
ZERO_MASS = 1e-300


@dataclass(frozen=True)
class ExtReal:
    """A real number or the positive-infinity marker.

    Addition and scaling by positive finite reals absorb infinity; scaling by
    zero follows the measure-theoretic convention 0 * inf = 0.
    """

    value: float = 0.0
    infinite: bool = False

    @staticmethod
    def of(x: float) -> "ExtReal":
        if not math.isfinite(x):
            raise NumericError(f"non-finite value {x!r} where a finite real was expected")
        return ExtReal(float(x))

    @staticmethod
    def inf() -> "ExtReal":
        return ExtReal(0.0, True)

    @property
    def is_finite(self) -> bool:
        return not self.infinite

    def as_float(self) -> float:
        return math.inf if self.infinite else self.value

    def __float__(self) -> float:
        return self.as_float()

    def __add__(self, other: "ExtReal") -> "ExtReal":
        if self.infinite or other.infinite:
            return ExtReal.inf()
        return ExtReal(self.value + other.value)

    def scaled(self, c: float) -> "ExtReal":
        if not (math.isfinite(c) and c >= 0.0):
            raise InvalidArgumentError(f"scale factor must be finite and >= 0, got {c!r}")
        if c == 0.0:
            return ExtReal(0.0)
        if self.infinite:
            return ExtReal.inf()
        return ExtReal(c * self.value)

    def __repr__(self) -> str:
        return "ExtReal(inf)" if self.infinite else f"ExtReal({self.value!r})"


@dataclass(frozen=True)
class Generator:
    """An f-divergence generator with its boundary limits.

    `fn` must accept numpy arrays of points in (0, inf); `f_at_zero` and
    `fstar_at_zero` are the continuous extensions at the boundary.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    f_at_zero: ExtReal
    fstar_at_zero: ExtReal

    def __call__(self, x):
        return self.fn(x)


def _kl_fn(x):
    return x * np.log(x)


def _tv_fn(x):
    return 0.5 * np.abs(x - 1.0)


def _sqhellinger_fn(x):
    return np.square(1.0 - np.sqrt(x))


def _chisq_fn(x):
    return np.square(x) - 1.0


_BUILTINS = {
    "KL": Generator("KL", _kl_fn, ExtReal(0.0), ExtReal.inf()),
    "TV": Generator("TV", _tv_fn, ExtReal(0.5), ExtReal(0.5)),
    "SqHellinger": Generator("SqHellinger", _sqhellinger_fn, ExtReal(1.0), ExtReal(1.0)),
    "ChiSq": Generator("ChiSq", _chisq_fn, ExtReal(-1.0), ExtReal.inf()),
}


def builtin_generator(name: str) -> Generator:
    """One of the four canonical generators: KL, TV, SqHellinger, ChiSq."""
    try:
        return _BUILTINS[name]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown generator {name!r}; expected one of {sorted(_BUILTINS)}"
        ) from None


# Power-of-two probe grid over ~[1e-6, 1e6]: on it, midpoint arithmetic for
# piecewise-linear generators is exact in floating point, so the 1e-10
# convexity slack is never consumed by rounding.
_CONVEXITY_GRID = 2.0 ** np.arange(-20, 21)
_LIMIT_PROBE = 1e-18


def custom_generator(name: str, fn, f_at_zero: ExtReal, fstar_at_zero: ExtReal) -> Generator:
    """Validate and wrap a user-supplied generator.

    Rejects fn with fn(1) != 0, fn violating midpoint convexity on a sampled
    log grid, or declared-finite boundary limits inconsistent with the
    numerical limit of fn. Convexity is required by every optimality result
    in this package, so it is checked rather than assumed.
    """
    g1 = float(np.asarray(fn(np.asarray([1.0])), dtype=float).ravel()[0])
    if abs(g1) > 1e-12:
        raise InvalidArgumentError(f"generator {name!r} has fn(1)={g1!r}, expected 0")
    vals = np.asarray(fn(_CONVEXITY_GRID), dtype=float)
    if not np.isfinite(vals).all():
        raise InvalidArgumentError(f"generator {name!r} is non-finite on (0, inf)")
    x = _CONVEXITY_GRID
    mid = 0.5 * (x[:, None] + x[None, :])
    mid_vals = np.asarray(fn(mid.ravel()), dtype=float).reshape(mid.shape)
    if not np.isfinite(mid_vals).all():
        raise InvalidArgumentError(f"generator {name!r} is non-finite on (0, inf)")
    chord = 0.5 * (vals[:, None] + vals[None, :])
    if (mid_vals > chord + 1e-10).any():
        i, j = np.unravel_index(np.argmax(mid_vals - chord), mid.shape)
        raise InvalidArgumentError(
            f"generator {name!r} violates midpoint convexity at x={x[i]!r}, y={x[j]!r}"
        )
    if f_at_zero.is_finite:
        probe = float(fn(np.asarray([_LIMIT_PROBE]))[0])
        if abs(probe - f_at_zero.value) > 1e-8:
            raise InvalidArgumentError(
                f"declared f(0)={f_at_zero.value!r} but fn({_LIMIT_PROBE})={probe!r}"
            )
    if fstar_at_zero.is_finite:
        probe = float(_LIMIT_PROBE * fn(np.asarray([1.0 / _LIMIT_PROBE]))[0])
        if abs(probe - fstar_at_zero.value) > 1e-8:
            raise InvalidArgumentError(
                f"declared f*(0)={fstar_at_zero.value!r} but x*fn(1/x) at {_LIMIT_PROBE} is {probe!r}"
            )
    return Generator(name, fn, f_at_zero, fstar_at_zero)


def max_divergence(g: Generator) -> ExtReal:
    """M_f = f(0) + f*(0), the divergence between mutually singular pairs."""
    return g.f_at_zero + g.fstar_at_zero


def _term(g: Generator, p: float, q: float) -> ExtReal:
    """q * f(p/q) under the boundary conventions."""
    if q <= ZERO_MASS:
        if p <= ZERO_MASS:
            return ExtReal(0.0)
        return g.fstar_at_zero.scaled(p)
    if p <= ZERO_MASS:
        return g.f_at_zero.scaled(q)
    return ExtReal.of(q * float(g(p / q)))


def binary_divergence(g: Generator, lam1: float, lam2: float) -> ExtReal:
    """Divergence between Bernoulli(lam1) and Bernoulli(lam2)."""
    if not (0.0 <= lam1 <= 1.0 and 0.0 <= lam2 <= 1.0):
        raise InvalidArgumentError("Bernoulli parameters must lie in [0, 1]")
    return _term(g, lam1, lam2) + _term(g, 1.0 - lam1, 1.0 - lam2)


def pmf_divergence(g: Generator, p, q) -> ExtReal:
    """sum_x q(x) f(p(x)/q(x)) for equal-length probability vectors."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1 or p.size < 1:
        raise InvalidArgumentError(f"pmf shapes differ: {p.shape} vs {q.shape}")
    both = (p > ZERO_MASS) & (q > ZERO_MASS)
    p_only = (p > ZERO_MASS) & ~(q > ZERO_MASS)
    q_only = ~(p > ZERO_MASS) & (q > ZERO_MASS)
    total = ExtReal(0.0)
    if both.any():
        vals = q[both] * np.asarray(g(p[both] / q[both]), dtype=float)
        if not np.isfinite(vals).all():
            raise NumericError("generator returned non-finite value on positive ratios")
        total = total + ExtReal(float(vals.sum()))
    if q_only.any():
        total = total + g.f_at_zero.scaled(float(q[q_only].sum()))
    if p_only.any():
        total = total + g.fstar_at_zero.scaled(float(p[p_only].sum()))
    return total


def density_divergence(g: Generator, p, q, quad: QuadratureConfig = DEFAULT_QUAD) -> ExtReal:
    """Quadrature estimate of the divergence between two 1D densities.

    `p` and `q` must share a support interval. Returns infinity when the grid
    detects mass of p where q vanishes and f*(0) is infinite (or q-mass where
    p vanishes and f(0) is infinite). Raises NumericError when the
    half-resolution residual exceeds quad.abs_tol.
    """
    sup_p, sup_q = p.support, q.support
    if abs(sup_p.lo - sup_q.lo) > 1e-12 or abs(sup_p.hi - sup_q.hi) > 1e-12:
        raise InvalidArgumentError(
            f"densities must share a support interval, got {sup_p} vs {sup_q}"
        )

    def estimate(cfg: QuadratureConfig):
        x, w = quadrature_nodes(sup_p, cfg)
        pv = np.clip(np.asarray(p(x), dtype=float), 0.0, None)
        qv = np.clip(np.asarray(q(x), dtype=float), 0.0, None)
        p_pos = pv > ZERO_MASS
        q_pos = qv > ZERO_MASS
        if g.fstar_at_zero.infinite and (p_pos & ~q_pos).any():
            return None
        if g.f_at_zero.infinite and (q_pos & ~p_pos).any():
            return None
        y = np.zeros_like(pv)
        both = p_pos & q_pos
        if both.any():
            y[both] = qv[both] * np.asarray(g(pv[both] / qv[both]), dtype=float)
        q_only = q_pos & ~p_pos
        if q_only.any():
            y[q_only] = qv[q_only] * g.f_at_zero.value
        p_only = p_pos & ~q_pos
        if p_only.any():
            y[p_only] = pv[p_only] * g.fstar_at_zero.value
        bad = ~np.isfinite(y)
        if bad.any():
            where = float(x[bad][0])
            raise NumericError(f"divergence integrand non-finite at x={where!r}", abscissa=where)
        return float(w @ y)

    full = estimate(quad)
    if full is None:
        return ExtReal.inf()
    if quad.panels >= 2:
        coarse_cfg = QuadratureConfig(quad.panels // 2, quad.nodes_per_panel, quad.abs_tol)
        coarse = estimate(coarse_cfg)
        residual = abs(full - coarse) if coarse is not None else math.inf
        if residual > quad.abs_tol:
            raise NumericError(
                f"quadrature residual {residual!r} exceeds abs_tol {quad.abs_tol!r}",
                estimate=full, residual=residual,
            )
    return ExtReal(full)


def ratio_bound(g: Generator, r1: float, r2: float) -> ExtReal:
    """Divergence bound for pairs with density ratio pinned to [r1, r2].

    Evaluates the chord of f through (r1, f(r1)) and (r2, f(r2)) at 1, using
    the f(0) limit when r1 = 0. Requires 0 <= r1 < 1 < r2. This is both the
    tight bound under a pointwise ratio constraint and the worst-case value of
    the clipping mechanisms.
    """
    if not (0.0 <= r1 < 1.0 < r2) or not math.isfinite(r2):
        raise InvalidArgumentError(f"require 0 <= r1 < 1 < r2 finite, got r1={r1!r}, r2={r2!r}")
    c_hi = (1.0 - r1) / (r2 - r1)
    c_lo = (r2 - 1.0) / (r2 - r1)
    f_r2 = ExtReal.of(float(g(r2)))
    f_r1 = g.f_at_zero if r1 <= ZERO_MASS else ExtReal.of(float(g(r1)))
    return f_r2.scaled(c_hi) + f_r1.scaled(c_lo)
