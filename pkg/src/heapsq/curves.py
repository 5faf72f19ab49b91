"""Type-token curve construction and local slope (elasticity) estimation.

Three windowing schemes are supported:

* ``prefix``    -- one point per prefix length T = 1..length (windows anchored
  at the first token);
* ``partition`` -- the text tiled by non-overlapping windows of equal size,
  one point per window, several window sizes;
* ``logsample`` -- the prefix curve thinned to token counts round(ratio**k),
  which spaces points evenly on the log axis.
"""

from __future__ import annotations

import logging
import statistics
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .corpus import TokenStream

logger = logging.getLogger(__name__)

SCHEMES = ("prefix", "partition", "logsample")

#: ladder rungs are {1, 2, 5} * 10**k
_LADDER_MANTISSAS = (1, 2, 5)


class CurvePoint(NamedTuple):
    """One (token count, type count) observation.

    ``types`` is an integer for raw curves and may be fractional after
    aggregation (a median of an even replicate group).  ``window_index``
    distinguishes replicate windows of the same size; prefix points use 0.
    """

    tokens: int
    types: float
    window_index: int = 0


class SlopeBand(NamedTuple):
    """Local log-log slope over a band of fixed width in log10(tokens)."""

    x_center: float
    slope: float


@dataclass(frozen=True)
class TypeTokenCurve:
    points: tuple[CurvePoint, ...]
    scheme: str
    source_id: str = ""

    def __len__(self) -> int:
        return len(self.points)

    def tokens_array(self) -> np.ndarray:
        return np.fromiter((p.tokens for p in self.points), dtype=float, count=len(self.points))

    def types_array(self) -> np.ndarray:
        return np.fromiter((p.types for p in self.points), dtype=float, count=len(self.points))

    @property
    def max_tokens(self) -> int:
        return max(p.tokens for p in self.points)


def prefix_curve(stream: TokenStream) -> TypeTokenCurve:
    """Emit (T, distinct types among the first T tokens) for every T."""
    if stream.length == 0:
        raise ValueError("no tokens")
    seen: set[str] = set()
    points = []
    for i, tok in enumerate(stream.tokens):
        seen.add(tok)
        points.append(CurvePoint(i + 1, len(seen), 0))
    return TypeTokenCurve(points=tuple(points), scheme="prefix", source_id=stream.source_id)


def default_ladder(length: int) -> list[int]:
    """Window-size ladder: {1,2,5}*10**k rungs that tile the text at least
    twice, plus the full length itself.

    The "at least two windows" cutoff (rung <= length // 2) keeps every rung a
    genuine partition; the full text enters as its own single window.  For a
    ~566k-token text this gives 12 sizes: 100 .. 200000 and the length.
    """
    if length < 1:
        raise ValueError("empty stream")
    rungs = []
    scale = 100
    while scale <= length // 2:
        for m in _LADDER_MANTISSAS:
            size = m * scale
            if 100 <= size <= length // 2:
                rungs.append(size)
        scale *= 10
    rungs.append(length)
    return sorted(set(rungs))


def partition_curve(stream: TokenStream, sizes: Sequence[int] | None = None) -> TypeTokenCurve:
    """Tile the stream with non-overlapping windows of each given size.

    One point per window; the trailing partial window is discarded so all
    replicates at a given size have exactly that many tokens.  ``sizes``
    defaults to :func:`default_ladder`.
    """
    if stream.length == 0:
        raise ValueError("no tokens")
    if sizes is None:
        sizes = default_ladder(stream.length)
    sizes = list(sizes)
    if not sizes:
        raise ValueError("empty sizes")
    for w in sizes:
        if not 1 <= w <= stream.length:
            raise ValueError(f"window size {w} outside [1, {stream.length}]")
    points = []
    for w in sorted(set(sizes)):
        for i in range(stream.length // w):
            window = stream.tokens[i * w : (i + 1) * w]
            points.append(CurvePoint(w, len(set(window)), i))
    return TypeTokenCurve(points=tuple(points), scheme="partition", source_id=stream.source_id)


def logsample_tokens(length: int, ratio: float = 1.01) -> list[int]:
    """Distinct values of round(ratio**k), k = 1, 2, ..., up to ``length``."""
    if ratio <= 1:
        raise ValueError("ratio must be > 1")
    values: set[int] = set()
    k = 1
    while True:
        t = round(ratio**k)
        if t > length:
            break
        if t >= 1:
            values.add(t)
        k += 1
    return sorted(values)


def logsample_curve(prefix: TypeTokenCurve, ratio: float = 1.01) -> TypeTokenCurve:
    """Thin a prefix curve to the token counts round(ratio**k), de-duplicated
    and capped at the stream length."""
    if prefix.scheme != "prefix":
        raise ValueError("logsample requires a prefix curve")
    by_tokens = {p.tokens: p for p in prefix.points}
    length = prefix.max_tokens
    points = tuple(by_tokens[t] for t in logsample_tokens(length, ratio) if t in by_tokens)
    return TypeTokenCurve(points=points, scheme="logsample", source_id=prefix.source_id)


def aggregate(curve: TypeTokenCurve, statistic: str = "median") -> TypeTokenCurve:
    """Collapse replicate points to one point per distinct token count."""
    if statistic not in ("median", "mean"):
        raise ValueError(f"unknown statistic {statistic!r}")
    groups: dict[int, list[float]] = {}
    for p in curve.points:
        groups.setdefault(p.tokens, []).append(p.types)
    agg = statistics.median if statistic == "median" else statistics.fmean
    points = tuple(CurvePoint(t, agg(vals), 0) for t, vals in sorted(groups.items()))
    return replace(curve, points=points)


def local_slopes(
    curve: TypeTokenCurve, band_width: float = 0.5, step: float = 0.1
) -> list[SlopeBand]:
    """OLS slope of log10(types) on log10(tokens) inside sliding bands.

    Bands span ``band_width`` units of log10(tokens) and advance by ``step``;
    bands holding fewer than 3 points are skipped (and counted in a log
    message).
    """
    if band_width <= 0 or step <= 0:
        raise ValueError("band_width and step must be positive")
    x = np.log10(curve.tokens_array())
    y = np.log10(curve.types_array())
    span = x.max() - x.min()
    if span <= band_width:
        raise ValueError("curve spans less than one band width")
    bands = []
    skipped = 0
    n_starts = int(np.floor((span - band_width) / step + 1e-9)) + 1
    x_min = x.min()
    for i in range(n_starts):
        lo = x_min + i * step
        hi = lo + band_width
        mask = (x >= lo - 1e-12) & (x <= hi + 1e-12)
        if mask.sum() < 3:
            skipped += 1
            continue
        slope = np.polyfit(x[mask], y[mask], 1)[0]
        bands.append(SlopeBand(x_center=lo + band_width / 2, slope=float(slope)))
    if skipped:
        logger.info("skipped %d bands with fewer than 3 points", skipped)
    return bands
