"""Minimax-optimal private sampling mechanisms under local differential
privacy, for finite alphabets and density-bounded continuous classes."""

from .divergence import (
    ExtReal,
    Generator,
    binary_divergence,
    builtin_generator,
    custom_generator,
    density_divergence,
    max_divergence,
    pmf_divergence,
    ratio_bound,
)
from .numerics import (
    Interval,
    QuadratureConfig,
    ToleranceBand,
    bisect_normalizer,
    derived_rng,
    integrate,
    inverse_cdf_sampler,
    quadrature_nodes,
)
from .finite import (
    FiniteParams,
    baseline_put_uniform,
    empirical_worst_case,
    mixture_pmf,
    mollifier_sample,
    optimal_pmf,
    optimal_put,
)
from .continuous import (
    ClippedDensity,
    ContinuousClass,
    Density1D,
    MechanismConstants,
    mechanism_constants,
    mixture_density,
    optimal_density,
    optimal_put_continuous,
    utility_loss,
)
from .distributions import (
    EnvelopeClass,
    GaussMix1D,
    MixGenConfig,
    envelope_class,
    gaussian_ring_2d,
    mixture_pdf,
    random_mixture,
)
from .harness import ExperimentConfig, ResultRow, emit_rows, run_finite, run_gaussmix, run_ring

__version__ = "0.1.0"

__all__ = [
    "ExtReal", "Generator", "binary_divergence", "builtin_generator",
    "custom_generator", "density_divergence", "max_divergence",
    "pmf_divergence", "ratio_bound",
    "Interval", "QuadratureConfig", "ToleranceBand", "bisect_normalizer",
    "derived_rng", "integrate", "inverse_cdf_sampler", "quadrature_nodes",
    "FiniteParams", "baseline_put_uniform", "empirical_worst_case",
    "mixture_pmf", "mollifier_sample", "optimal_pmf", "optimal_put",
    "ClippedDensity", "ContinuousClass", "Density1D", "MechanismConstants",
    "mechanism_constants", "mixture_density", "optimal_density",
    "optimal_put_continuous", "utility_loss",
    "EnvelopeClass", "GaussMix1D", "MixGenConfig", "envelope_class",
    "gaussian_ring_2d", "mixture_pdf", "random_mixture",
    "ExperimentConfig", "ResultRow", "emit_rows", "run_finite",
    "run_gaussmix", "run_ring",
    "__version__",
]
