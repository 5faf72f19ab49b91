"""heapsq: type-token curves, their quadratic log-log correction, and exact
urn-model curvature analytics."""

from .corpus import (
    RawText,
    TokenStream,
    TypeCensus,
    census,
    read_raw_text,
    strip_gutenberg,
    tokenize,
)
from .curves import (
    CurvePoint,
    SlopeBand,
    TypeTokenCurve,
    aggregate,
    default_ladder,
    local_slopes,
    logsample_curve,
    partition_curve,
    prefix_curve,
)
from .regress import (
    LogLogFit,
    effective_exponent,
    elasticity_at,
    fit,
    fit_points,
    turning_point,
)
from .urn import (
    MomentVector,
    PseudoSpectrum,
    SweepRow,
    TypeDistribution,
    beta_coeffs,
    closed_form_T3,
    expected_types_with_replacement,
    expected_types_without_replacement,
    mc_expected_types,
    model_curve_fit,
    moments,
    poisson_approx,
    pseudo_mean,
    pseudo_spectrum,
    pseudo_variance,
    pseudo_weights,
    stirling_first,
    zipf_curvature_sweep,
    zipf_distribution,
)

__version__ = "0.1.0"
