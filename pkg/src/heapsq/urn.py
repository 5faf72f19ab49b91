"""Random-drawing (urn) model of type accumulation.

Drawing T tokens with replacement from a dictionary where type i has constant
probability p_i, the expected number of distinct types is

    E[V(T)] = K - sum_i (1 - p_i)**T.

Expanding each (1 - p_i)**T binomially and regrouping by powers of T with
signed Stirling numbers of the first kind turns this into a polynomial
sum_k beta_k(T) * T**k whose normalized terms pi_k = beta_k*T**k / E[V(T)]
behave like weights that sum to one but may be negative ("pseudo-weights").
The first and second log-log derivatives of E[V] are then the pseudo-mean
sum_k k*pi_k and the pseudo-variance sum_k k^2*pi_k - (sum_k k*pi_k)^2; the
pseudo-variance is the curvature of the expected type-token curve in log-log
scale, i.e. twice the quadratic coefficient of a local quadratic fit.

The alternating series cancels violently as T grows (pseudo-weights reach
~1e6 at T=80 and ~1e13 by T=140 for a 50-type Zipf dictionary), so the
pipeline runs on exact big rationals whenever the distribution is rational
and T is moderate, and on high-precision floats (mpmath, default 256-bit)
with a cancellation monitor otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath
import numpy as np

from . import regress
from .regress import LogLogFit

#: largest T for which the exact-rational pseudo-spectrum is attempted
EXACT_T_LIMIT = 200
#: mantissa bits for the high-precision float path and Zipf rationalization
DEFAULT_PRECISION_BITS = 256
#: cancellation ratio (max |pi_k|) above which float-mode results are flagged
INSTABILITY_THRESHOLD = 1e12

#: auto switch to log-gamma evaluation above this bag size
_EXACT_WO_LIMIT = 2000


def _safe_float(x) -> float:
    try:
        return float(x)
    except (OverflowError, ValueError):
        return math.inf


def _mpf_to_fraction(x: mpmath.mpf) -> Fraction:
    sign, man, exp, _ = x._mpf_
    if man == 0:
        return Fraction(0)
    f = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -f if sign else f


@dataclass(frozen=True)
class TypeDistribution:
    """Probability vector over a fixed dictionary of K types.

    ``probs`` holds exact Fractions when ``exact`` is true (always summing to
    1 exactly), plain floats otherwise.  ``rationalization_error`` is the
    relative rounding bound incurred when an irrational law (Zipf with
    non-integer exponent) was approximated by rationals.
    """

    probs: tuple
    exact: bool
    rationalization_error: float = 0.0

    def __post_init__(self):
        if not self.probs:
            raise ValueError("empty distribution")
        if any(p <= 0 for p in self.probs):
            raise ValueError("probabilities must be positive")
        total = sum(self.probs)
        if self.exact:
            if total != 1:
                raise ValueError("exact probabilities must sum to 1")
        elif abs(total - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1 within 1e-12")

    @property
    def K(self) -> int:
        return len(self.probs)

    def float_probs(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs], dtype=float)

    @classmethod
    def from_counts(cls, counts: Iterable[int]) -> "TypeDistribution":
        counts = list(counts)
        total = sum(counts)
        if total <= 0 or any(c < 1 for c in counts):
            raise ValueError("counts must be positive integers")
        return cls(probs=tuple(Fraction(c, total) for c in counts), exact=True)


@dataclass(frozen=True)
class MomentVector:
    """M_k = sum_i p_i**k for k = 1..k_max (1-based access via ``m``)."""

    values: tuple

    def __len__(self) -> int:
        return len(self.values)

    def m(self, k: int):
        if not 1 <= k <= len(self.values):
            raise ValueError(f"moment {k} not computed")
        return self.values[k - 1]


@dataclass(frozen=True)
class PseudoSpectrum:
    """Stirling-expansion coefficients and curvature summary at one T.

    ``beta_coeffs``/``pi_weights`` (and the scalar summaries) are Fractions
    in exact mode and mpmath floats in float mode.  ``cancellation_ratio`` is
    max |pi_k|, the magnitude the alternating series must cancel down from;
    float-mode results with ratio above :data:`INSTABILITY_THRESHOLD` carry
    ``unstable=True``.
    """

    T: int
    beta_coeffs: tuple
    pi_weights: tuple
    pseudo_mean: object
    pseudo_variance: object
    cancellation_ratio: float
    unstable: bool
    mode: str


def zipf_distribution(
    K: int,
    a: float,
    *,
    exact: bool = True,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> TypeDistribution:
    """Rank-frequency law p_(r) = c / r**a, r = 1..K, c the normalizer.

    Integer exponents produce exact rationals directly.  Non-integer
    exponents are irrational; in exact mode each weight r**-a is rounded to
    a rational at ``precision_bits`` bits and the (tiny) relative rounding
    bound is recorded, so everything downstream stays exact arithmetic on a
    distribution that still sums to 1 exactly.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if a <= 0:
        raise ValueError("a must be positive")
    if not exact:
        weights = np.arange(1, K + 1, dtype=float) ** (-float(a))
        probs = weights / weights.sum()
        return TypeDistribution(probs=tuple(float(p) for p in probs), exact=False)
    if float(a).is_integer():
        weights = [Fraction(1, r ** int(a)) for r in range(1, K + 1)]
        err = 0.0
    else:
        if precision_bits < 128:
            raise ValueError("precision_bits must be >= 128")
        with mpmath.workprec(precision_bits):
            weights = [
                _mpf_to_fraction(mpmath.power(mpmath.mpf(r), -mpmath.mpf(a)))
                for r in range(1, K + 1)
            ]
        err = 2.0 ** (1 - precision_bits)
    total = sum(weights)
    return TypeDistribution(
        probs=tuple(w / total for w in weights), exact=True, rationalization_error=err
    )


def moments(dist: TypeDistribution, k_max: int) -> MomentVector:
    """Power sums M_k of the distribution for k = 1..k_max."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    values = []
    powers = list(dist.probs)
    for k in range(1, k_max + 1):
        values.append(sum(powers))
        if k < k_max:
            powers = [q * p for q, p in zip(powers, dist.probs)]
    return MomentVector(values=tuple(values))


def expected_types_with_replacement(dist: TypeDistribution, T: int, *, exact: bool | None = None):
    """E[V(T)] = K - sum_i (1 - p_i)**T for sampling with replacement.

    Returns an exact Fraction when evaluated exactly (rational distribution,
    T <= :data:`EXACT_T_LIMIT` by default), a float otherwise.
    """
    if T < 0:
        raise ValueError("T must be >= 0")
    if exact is None:
        exact = dist.exact and T <= EXACT_T_LIMIT
    if exact:
        if not dist.exact:
            raise ValueError("exact evaluation requires a rational distribution")
        return Fraction(dist.K) - sum((1 - p) ** T for p in dist.probs)
    p = dist.float_probs()
    return float(dist.K - np.power(1.0 - p, T).sum())


def _count_values(census) -> list[int]:
    if hasattr(census, "counts"):
        values = list(census.counts.values())
    elif isinstance(census, Mapping):
        values = list(census.values())
    else:
        values = [int(c) for c in census]
    if not values or any(c < 1 for c in values):
        raise ValueError("counts must be positive integers")
    return values


def expected_types_without_replacement(census, T: int, *, exact: bool | None = None):
    """Expected distinct types when drawing T tokens without replacement.

    ``census`` may be a :class:`~heapsq.corpus.TypeCensus`, a mapping of type
    to count, or a bare iterable of counts.  The exact path uses big-integer
    binomials; the float path uses log-gamma differences.  Types whose
    absence is impossible (total - count < T) contribute nothing to the
    missing-type sum.
    """
    counts = _count_values(census)
    total = sum(counts)
    V = len(counts)
    if not 0 <= T <= total:
        raise ValueError("T must be in [0, total tokens]")
    if exact is None:
        exact = total <= _EXACT_WO_LIMIT
    if exact:
        denom = math.comb(total, T)
        missing = sum(Fraction(math.comb(total - c, T), denom) for c in counts)
        return Fraction(V) - missing
    log_denom = math.lgamma(total + 1) - math.lgamma(T + 1) - math.lgamma(total - T + 1)
    missing_f = 0.0
    for c in counts:
        n = total - c
        if n < T:
            continue
        log_num = math.lgamma(n + 1) - math.lgamma(T + 1) - math.lgamma(n - T + 1)
        missing_f += math.exp(log_num - log_denom)
    return V - missing_f


def poisson_approx(dist: TypeDistribution, T: int) -> float:
    """sum_i (1 - exp(-T*p_i)): the small-p approximation of E[V(T)]."""
    if T < 0:
        raise ValueError("T must be >= 0")
    p = dist.float_probs()
    return float((1.0 - np.exp(-T * p)).sum())


_STIRLING_ROWS: list[list[int]] = [[1]]


def stirling_first(j: int) -> list[int]:
    """Signed Stirling numbers of the first kind as polynomial coefficients.

    Row j satisfies T*(T-1)*...*(T-j+1) = sum_k c(j,k) * T**k, built by the
    recurrence c(j+1, k) = c(j, k-1) - j*c(j, k).  Exact integers.
    """
    if j < 0:
        raise ValueError("j must be >= 0")
    while len(_STIRLING_ROWS) <= j:
        jj = len(_STIRLING_ROWS) - 1
        prev = _STIRLING_ROWS[-1]
        row = [0] * (jj + 2)
        for k in range(jj + 2):
            left = prev[k - 1] if 1 <= k <= jj + 1 else 0
            right = prev[k] if k <= jj else 0
            row[k] = left - jj * right
        _STIRLING_ROWS.append(row)
    return list(_STIRLING_ROWS[j])


def beta_coeffs(M: MomentVector, T: int) -> list:
    """Polynomial coefficients beta_k(T) with sum_k beta_k(T)*T**k = E[V(T)].

    beta_k(T) = sum_{j=k..T} (-1)**(j+1) * c(j,k) * M_j / j!, where c(j,k)
    are the signed Stirling numbers of the first kind.  The sign convention
    is pinned by the identity above (checked exactly in the test suite) and
    by the k=1 specialization beta_1 = sum_j M_j / j.

    Arithmetic follows the moment values: exact for Fractions, high-precision
    for mpmath floats.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    if len(M) < T:
        raise ValueError(f"need moments up to {T}, have {len(M)}")
    stirling_first(T)  # populate cache
    scaled = []
    fact = 1
    for j in range(1, T + 1):
        fact *= j
        term = M.m(j) / fact
        scaled.append(term if j % 2 == 1 else -term)
    betas = []
    for k in range(1, T + 1):
        acc = 0
        for j in range(k, T + 1):
            acc += scaled[j - 1] * _STIRLING_ROWS[j][k]
        betas.append(acc)
    return betas


def pseudo_weights(beta: Sequence, T: int) -> list:
    """pi_k = beta_k*T**k / sum_j beta_j*T**j; sums to 1, signs unrestricted."""
    terms = [b * T**k for k, b in enumerate(beta, start=1)]
    denom = sum(terms)
    if denom == 0:
        raise ValueError("zero expectation denominator")
    return [t / denom for t in terms]


def pseudo_mean(pi: Sequence):
    """sum_k k*pi_k: the log-log slope d log E[V] / d log T at this T."""
    return sum(k * p for k, p in enumerate(pi, start=1))


def pseudo_variance(pi: Sequence):
    """sum_k k^2*pi_k - (sum_k k*pi_k)^2: the log-log curvature at this T.

    Equals twice the quadratic coefficient of a local quadratic fit of
    log E[V] against log T.
    """
    mean = pseudo_mean(pi)
    second = sum(k * k * p for k, p in enumerate(pi, start=1))
    return second - mean * mean


def cancellation_ratio(pi: Sequence) -> float:
    """max |pi_k|: how large the alternating terms are relative to their sum."""
    return max(abs(_safe_float(p)) for p in pi)


def pseudo_spectrum(
    dist: TypeDistribution,
    T: int,
    *,
    mode: str = "auto",
    precision_bits: int = DEFAULT_PRECISION_BITS,
    moments_vec: MomentVector | None = None,
) -> PseudoSpectrum:
    """Full beta/pi expansion with pseudo-mean and pseudo-variance at T.

    ``mode`` is "exact" (big rationals; requires a rational distribution),
    "float" (mpmath at ``precision_bits``), or "auto" (exact whenever the
    distribution is rational and T <= :data:`EXACT_T_LIMIT`).
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    if mode == "auto":
        mode = "exact" if dist.exact and T <= EXACT_T_LIMIT else "float"
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown mode {mode!r}")

    if mode == "exact":
        if not dist.exact:
            raise ValueError("exact mode requires a rational distribution")
        M = moments_vec if moments_vec is not None else moments(dist, T)
        betas = beta_coeffs(M, T)
        pis = pseudo_weights(betas, T)
        mean = pseudo_mean(pis)
        var = pseudo_variance(pis)
        ratio = cancellation_ratio(pis)
        unstable = False
    else:
        with mpmath.workprec(precision_bits):
            if dist.exact:
                probs = [
                    mpmath.mpf(p.numerator) / mpmath.mpf(p.denominator) for p in dist.probs
                ]
            else:
                probs = [mpmath.mpf(p) for p in dist.probs]
            values = []
            powers = list(probs)
            for k in range(1, T + 1):
                values.append(mpmath.fsum(powers))
                if k < T:
                    powers = [q * p for q, p in zip(powers, probs)]
            M = MomentVector(values=tuple(values))
            betas = beta_coeffs(M, T)
            pis = pseudo_weights(betas, T)
            mean = pseudo_mean(pis)
            var = pseudo_variance(pis)
        ratio = cancellation_ratio(pis)
        unstable = ratio > INSTABILITY_THRESHOLD
    return PseudoSpectrum(
        T=T,
        beta_coeffs=tuple(betas),
        pi_weights=tuple(pis),
        pseudo_mean=mean,
        pseudo_variance=var,
        cancellation_ratio=ratio,
        unstable=unstable,
        mode=mode,
    )


def closed_form_T3(M: MomentVector):
    """Three-token pseudo-weights and pseudo-variance in closed form.

    With d = 1 - M2 + M3/3:

        pi_1 = (1 + M2/2 + M3/3) / d
        pi_2 = -(3*M2/2 + 3*M3/2) / d
        pi_3 = (3*M3/2) / d

    and the pseudo-variance is (pi_1 + 4*pi_2 + 9*pi_3) -
    (pi_1 + 2*pi_2 + 3*pi_3)**2.  Returns (pi_1, pi_2, pi_3, variance);
    exact when the moments are Fractions.  Must agree exactly with the
    general pipeline at T=3.
    """
    M2, M3 = M.m(2), M.m(3)
    d = 1 - M2 + M3 / 3
    pi1 = (1 + M2 / 2 + M3 / 3) / d
    pi2 = -(3 * M2 / 2 + 3 * M3 / 2) / d
    pi3 = (3 * M3 / 2) / d
    second = pi1 + 4 * pi2 + 9 * pi3
    first = pi1 + 2 * pi2 + 3 * pi3
    return pi1, pi2, pi3, second - first * first


def mc_expected_types(
    dist: TypeDistribution, T: int, trials: int, seed: int
) -> tuple[float, float]:
    """Monte Carlo estimate of E[V(T)]: (mean, standard error).

    Each trial draws T i.i.d. types (as one multinomial vector) and counts
    the distinct ones.  Fully reproducible for a given seed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if T < 0:
        raise ValueError("T must be >= 0")
    rng = np.random.default_rng(seed)
    p = dist.float_probs()
    p = p / p.sum()
    counts = rng.multinomial(T, p, size=trials)
    distinct = (counts > 0).sum(axis=1)
    mean = float(distinct.mean())
    se = float(distinct.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, se


def geometric_tokens(T_min: int, T_max: int, ratio: float = 1.01) -> list[int]:
    """Token counts round(ratio**k) clipped to [T_min, T_max], duplicates kept.

    Repeated values at the low end (where the geometric step is below one
    token) act as weights, giving every decade of T equal influence in a
    least-squares fit.
    """
    if ratio <= 1:
        raise ValueError("ratio must be > 1")
    out = []
    k = 1
    while True:
        t = round(ratio**k)
        if t > T_max:
            break
        if t >= T_min:
            out.append(t)
        k += 1
    return out


def model_curve_fit(
    dist: TypeDistribution,
    T_min: int = 20,
    T_max: int = 402,
    *,
    grid: str = "geometric",
    ratio: float = 1.01,
    model: str = "quadratic",
    log_base: str = "e",
    source_id: str = "urn-model",
) -> LogLogFit:
    """Fit the log-log model to the expected type-token curve E[V(T)].

    ``grid`` chooses the sample points: "geometric" evaluates at
    round(ratio**k) within [T_min, T_max] keeping duplicates (even coverage
    of the log axis), "integer" at every integer T in the range (which
    overweights the large-T end).
    """
    if not 1 <= T_min < T_max:
        raise ValueError("need 1 <= T_min < T_max")
    if grid == "geometric":
        ts = geometric_tokens(T_min, T_max, ratio)
    elif grid == "integer":
        ts = list(range(T_min, T_max + 1))
    else:
        raise ValueError(f"unknown grid {grid!r}")
    if len(ts) < 4:
        raise ValueError("insufficient points")
    p = dist.float_probs()
    t_arr = np.asarray(ts, dtype=float)
    ev = dist.K - np.power(1.0 - p[None, :], t_arr[:, None]).sum(axis=1)
    return regress.fit_points(
        t_arr, ev, model=model, log_base=log_base, source_id=source_id, scheme="urn-model"
    )


@dataclass(frozen=True)
class SweepRow:
    """One Zipf exponent's curvature summary."""

    a: float
    dict_size: int
    m2: float
    half_pseudo_variance: dict[int, float]
    unstable: dict[int, bool]
    beta_fit: float


def zipf_curvature_sweep(
    a_values: Sequence[float] = (1.01, 1.05, 1.1, 1.15, 1.2),
    dict_size: int = 50,
    *,
    pv_tokens: Sequence[int] = (50, 80),
    fit_min: int = 20,
    fit_max: int = 402,
    ratio: float = 1.01,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> list[SweepRow]:
    """Curvature of the expected type-token curve across Zipf exponents.

    For each exponent: the second moment M2, half the pseudo-variance at each
    requested token count (half, so it is directly comparable to the fitted
    quadratic coefficient), and the quadratic coefficient from fitting the
    exact expectation curve over [fit_min, fit_max].
    """
    rows = []
    k_max = max(pv_tokens)
    for a in a_values:
        dist = zipf_distribution(dict_size, a, precision_bits=precision_bits)
        M = moments(dist, k_max)
        half_pv: dict[int, float] = {}
        unstable: dict[int, bool] = {}
        for t in pv_tokens:
            spec = pseudo_spectrum(dist, t, precision_bits=precision_bits, moments_vec=M)
            half_pv[t] = _safe_float(spec.pseudo_variance) / 2.0
            unstable[t] = spec.unstable
        fit = model_curve_fit(dist, fit_min, fit_max, ratio=ratio)
        rows.append(
            SweepRow(
                a=float(a),
                dict_size=dict_size,
                m2=float(M.m(2)),
                half_pseudo_variance=half_pv,
                unstable=unstable,
                beta_fit=fit.beta,
            )
        )
    return rows
