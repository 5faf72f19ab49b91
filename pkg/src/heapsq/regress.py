"""Linear and quadratic ordinary least squares in log-log space.

The quadratic model is

    log(V) = c0 + alpha*log(T) + beta*(log(T))**2

with natural log as the default (the turning-point arithmetic is cleanest in
base e); base 10 is available for plot-oriented output.  Model quality is
reported as R^2, adjusted R^2 and AIC = n*ln(RSS/n) + 2p, where p counts the
non-intercept regressors (1 for linear, 2 for quadratic).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .curves import TypeTokenCurve

MODELS = ("linear", "quadratic")
LOG_BASES = ("e", "10")


@dataclass(frozen=True)
class LogLogFit:
    """Fitted coefficients and goodness metrics of one log-log regression."""

    source_id: str
    scheme: str
    model: str
    log_base: str
    n: int
    p: int
    c0: float
    alpha: float
    beta: float
    rss: float
    tss: float
    r2: float
    r2_adj: float
    aic: float

    def as_record(self) -> dict:
        """Flat report record (the exact external field set)."""
        return {
            "source_id": self.source_id,
            "scheme": self.scheme,
            "model": self.model,
            "log_base": self.log_base,
            "n": self.n,
            "c0": self.c0,
            "alpha": self.alpha,
            "beta": self.beta,
            "r2": self.r2,
            "r2_adj": self.r2_adj,
            "aic": self.aic,
        }


def _log(values, log_base: str):
    arr = np.asarray(values, dtype=float)
    return np.log(arr) if log_base == "e" else np.log10(arr)


def _scalar_log(value: float, log_base: str) -> float:
    return math.log(value) if log_base == "e" else math.log10(value)


def fit_points(
    tokens: Sequence[float],
    types: Sequence[float],
    model: str = "quadratic",
    log_base: str = "e",
    *,
    source_id: str = "",
    scheme: str = "",
) -> LogLogFit:
    """OLS fit of log(types) on log(tokens) for raw point arrays."""
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    if log_base not in LOG_BASES:
        raise ValueError(f"unknown log base {log_base!r}")
    tokens = np.asarray(tokens, dtype=float)
    types = np.asarray(types, dtype=float)
    if tokens.shape != types.shape or tokens.ndim != 1:
        raise ValueError("tokens and types must be 1-d arrays of equal length")
    if np.any(tokens < 1) or np.any(types < 1):
        raise ValueError("tokens and types must be >= 1")
    p = 1 if model == "linear" else 2
    n = tokens.size
    if n < p + 2:
        raise ValueError("insufficient points")
    x = _log(tokens, log_base)
    y = _log(types, log_base)
    if np.ptp(x) == 0:
        raise ValueError("degenerate abscissa")

    design = np.vander(x, p + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    rss = float(resid @ resid)
    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    r2_adj = 1.0 - (1.0 - r2) * (n - 1) / (n - p - 1)
    aic = n * math.log(rss / n) + 2 * p if rss > 0 else float("-inf")
    return LogLogFit(
        source_id=source_id,
        scheme=scheme,
        model=model,
        log_base=log_base,
        n=int(n),
        p=p,
        c0=float(coef[0]),
        alpha=float(coef[1]),
        beta=float(coef[2]) if p == 2 else 0.0,
        rss=rss,
        tss=tss,
        r2=float(r2),
        r2_adj=float(r2_adj),
        aic=float(aic),
    )


def fit(curve: TypeTokenCurve, model: str = "quadratic", log_base: str = "e") -> LogLogFit:
    """OLS fit of a type-token curve in log-log space."""
    return fit_points(
        curve.tokens_array(),
        curve.types_array(),
        model=model,
        log_base=log_base,
        source_id=curve.source_id,
        scheme=curve.scheme,
    )


def effective_exponent(fit: LogLogFit, T: float) -> float:
    """alpha + beta*log(T): the exponent of the equivalent local power law."""
    if T < 1:
        raise ValueError("T must be >= 1")
    return fit.alpha + fit.beta * _scalar_log(T, fit.log_base)


def elasticity_at(fit: LogLogFit, T: float) -> float:
    """alpha + 2*beta*log(T): d log(V) / d log(T) of the fitted curve.

    Differs from :func:`effective_exponent` by the factor 2 on beta.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    return fit.alpha + 2 * fit.beta * _scalar_log(T, fit.log_base)


def turning_point(fit: LogLogFit) -> float:
    """Token count where the fitted slope reaches zero: base**(alpha/(2|beta|)).

    Only defined for concave fits (beta < 0).
    """
    if fit.beta >= 0:
        raise ValueError("no turning point")
    exponent = fit.alpha / (2 * abs(fit.beta))
    return math.exp(exponent) if fit.log_base == "e" else 10.0**exponent
