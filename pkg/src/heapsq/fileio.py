"""Readers and writers for every file format the toolkit emits.

All writers are atomic (temp file + rename), newline-normalized, and format
floats with 6 significant digits independent of locale, so identical inputs
always produce byte-identical artifacts.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
from pathlib import Path
from typing import Sequence

from .corpus import TokenStream, TypeCensus
from .curves import CurvePoint, SlopeBand, TypeTokenCurve
from .regress import LogLogFit
from .urn import SweepRow

CURVE_FIELDS = ("scheme", "source_id", "tokens", "types", "window_index")
FIT_FIELDS = (
    "source_id", "scheme", "model", "log_base", "n",
    "c0", "alpha", "beta", "r2", "r2_adj", "aic",
)


def atomic_write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.parent / f"{path.name}.tmp{os.getpid()}"
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
    return path


def fmt_num(x) -> str:
    """Locale-independent numeric formatting: ints verbatim, floats %.6g."""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if x == 0.0:
        x = 0.0  # normalize -0.0
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.6g}"


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([cell if isinstance(cell, str) else fmt_num(cell) for cell in row])
    return buf.getvalue()


# -- token files --------------------------------------------------------

def write_tokens(stream: TokenStream, path: str | Path) -> Path:
    """One token per line."""
    return atomic_write_text(path, "\n".join(stream.tokens) + "\n")


def read_tokens(path: str | Path, source_id: str | None = None) -> TokenStream:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    tokens = tuple(line for line in text.splitlines() if line)
    if not tokens:
        raise ValueError("no tokens")
    if source_id is None:
        source_id = path.stem.removesuffix(".tokens")
    return TokenStream(tokens=tokens, source_id=source_id)


# -- census -------------------------------------------------------------

def write_census_csv(census: TypeCensus, path: str | Path) -> Path:
    """`type,count` sorted by descending count, then lexicographically."""
    rows = sorted(census.counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return atomic_write_text(path, _csv_text(("type", "count"), rows))


def read_census_csv(path: str | Path) -> TypeCensus:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        counts = {row["type"]: int(row["count"]) for row in reader}
    if not counts:
        raise ValueError("empty census")
    return TypeCensus(counts=counts)


# -- curves -------------------------------------------------------------

def write_curve_csv(curve: TypeTokenCurve, path: str | Path) -> Path:
    rows = (
        (curve.scheme, curve.source_id, p.tokens, p.types, p.window_index)
        for p in curve.points
    )
    return atomic_write_text(path, _csv_text(CURVE_FIELDS, rows))


def read_curve_csv(path: str | Path) -> TypeTokenCurve:
    points = []
    scheme = source_id = None
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if scheme is None:
                scheme, source_id = row["scheme"], row["source_id"]
            types = float(row["types"])
            points.append(
                CurvePoint(int(row["tokens"]), types, int(row["window_index"]))
            )
    if not points:
        raise ValueError("empty curve file")
    return TypeTokenCurve(points=tuple(points), scheme=scheme, source_id=source_id)


# -- slopes -------------------------------------------------------------

def write_slopes_csv(source_id: str, bands: Sequence[SlopeBand], path: str | Path) -> Path:
    rows = ((source_id, b.x_center, b.slope) for b in bands)
    return atomic_write_text(path, _csv_text(("source_id", "x_center", "slope"), rows))


# -- fit reports --------------------------------------------------------

def _round_sig(x: float) -> float:
    if isinstance(x, int) or not math.isfinite(x):
        return x
    return float(f"{x:.6g}")


def fit_record(fit: LogLogFit) -> dict:
    """Report record with floats rounded to the CSV precision."""
    rec = fit.as_record()
    return {k: _round_sig(v) if isinstance(v, float) else v for k, v in rec.items()}


def write_fit_json(fit: LogLogFit, path: str | Path) -> Path:
    return atomic_write_text(path, json.dumps(fit_record(fit), indent=2) + "\n")


def write_fit_table_csv(fits: Sequence[LogLogFit], path: str | Path) -> Path:
    """One row per fit plus a final row of column medians."""
    records = [fit_record(f) for f in fits]
    rows = [[rec[k] for k in FIT_FIELDS] for rec in records]
    if records:
        median_rec = {"source_id": "median"}
        for key in ("scheme", "model", "log_base"):
            vals = {rec[key] for rec in records}
            median_rec[key] = vals.pop() if len(vals) == 1 else ""
        for key in ("n", "c0", "alpha", "beta", "r2", "r2_adj", "aic"):
            median_rec[key] = _round_sig(statistics.median(rec[key] for rec in records))
        rows.append([median_rec[k] for k in FIT_FIELDS])
    return atomic_write_text(path, _csv_text(FIT_FIELDS, rows))


# -- urn outputs --------------------------------------------------------

def write_expectation_csv(pairs: Sequence[tuple[int, float]], path: str | Path) -> Path:
    return atomic_write_text(path, _csv_text(("T", "expected_types"), pairs))


def write_sweep_csv(rows: Sequence[SweepRow], path: str | Path) -> Path:
    """Curvature sweep table, one row per Zipf exponent."""
    pv_tokens = sorted(rows[0].half_pseudo_variance) if rows else ()
    header = (
        ["a", "K", "M2"]
        + [f"halfpv_T{t}" for t in pv_tokens]
        + ["beta_fit"]
        + [f"unstable_T{t}" for t in pv_tokens]
    )
    table = []
    for row in rows:
        table.append(
            [row.a, row.dict_size, row.m2]
            + [row.half_pseudo_variance[t] for t in pv_tokens]
            + [row.beta_fit]
            + [row.unstable[t] for t in pv_tokens]
        )
    return atomic_write_text(path, _csv_text(header, table))


def write_mc_csv(rows: Sequence[tuple], path: str | Path) -> Path:
    header = ("T", "mc_mean", "mc_se", "exact_types", "z_score")
    return atomic_write_text(path, _csv_text(header, rows))
