"""Command-line front door.

Subcommands: ``ingest``, ``curve``, ``fit``, ``slopes``, ``urn expect``,
``urn sweep``, ``urn mc``.  Each invocation produces deterministic artifact
files in the output directory (flag ``--out``, or the ``HEAPSQ_OUT``
environment variable, or the working directory); identical configuration and
inputs yield byte-identical outputs.  Every error exits nonzero after a
single ``error: <reason>`` line on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import corpus, curves, fileio, regress, urn

OUT_ENV = "HEAPSQ_OUT"

_SWEEP_DEFAULT_A = (1.01, 1.05, 1.1, 1.15, 1.2)


@dataclass
class RunConfig:
    """Validated bag of everything one command run needs."""

    command: str
    inputs: list[Path] = field(default_factory=list)
    out_dir: Path = Path(".")
    scheme: str = "prefix"
    model: str = "quadratic"
    log_base: str = "e"
    statistic: str = "median"
    aggregate: bool = False
    sizes: list[int] | None = None
    ratio: float = 1.01
    band: float = 0.5
    step: float = 0.1
    zipf_a: tuple[float, ...] = (1.01,)
    dict_size: int = 50
    census_path: Path | None = None
    sampling: str = "with"
    t_min: int = 20
    t_max: int = 402
    t_step: int = 1
    trials: int = 100000
    seed: int = 0
    precision_bits: int = urn.DEFAULT_PRECISION_BITS

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        command = ns.command
        if command == "urn":
            command = f"urn-{ns.urn_command}"
        out_dir = Path(ns.out if ns.out else os.environ.get(OUT_ENV, "."))
        cfg = cls(command=command, out_dir=out_dir)
        for name in (
            "scheme", "model", "log_base", "statistic", "aggregate", "sizes",
            "ratio", "band", "step", "dict_size", "sampling",
            "t_min", "t_max", "t_step", "trials", "seed", "precision_bits",
        ):
            if hasattr(ns, name) and getattr(ns, name) is not None:
                setattr(cfg, name, getattr(ns, name))
        if getattr(ns, "inputs", None):
            cfg.inputs = [Path(p) for p in ns.inputs]
        elif getattr(ns, "input", None):
            cfg.inputs = [Path(ns.input)]
        if getattr(ns, "census", None):
            cfg.census_path = Path(ns.census)
        a = getattr(ns, "zipf_a", None)
        if a is not None:
            cfg.zipf_a = tuple(a) if isinstance(a, (list, tuple)) else (a,)
        return cfg

    def validate(self) -> None:
        if self.scheme not in curves.SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.model not in regress.MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.log_base not in regress.LOG_BASES:
            raise ValueError(f"unknown log base {self.log_base!r}")
        if self.statistic not in ("median", "mean"):
            raise ValueError(f"unknown statistic {self.statistic!r}")
        if self.sampling not in ("with", "without"):
            raise ValueError(f"unknown sampling {self.sampling!r}")
        if self.ratio <= 1:
            raise ValueError("ratio must be > 1")
        if self.band <= 0 or self.step <= 0:
            raise ValueError("band and step must be positive")
        if any(a <= 0 for a in self.zipf_a):
            raise ValueError("zipf-a must be positive")
        if self.dict_size < 1:
            raise ValueError("dict-size must be >= 1")
        if self.t_min < 0 or self.t_max < self.t_min:
            raise ValueError("need 0 <= t-min <= t-max")
        if self.t_step < 1:
            raise ValueError("t-step must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.precision_bits < 128:
            raise ValueError("precision-bits must be >= 128")
        if self.sampling == "without" and self.census_path is None:
            raise ValueError("sampling without replacement requires --census")
        for p in self.inputs:
            if not p.exists():
                raise ValueError(f"input not found: {p}")


def cmd_ingest(cfg: RunConfig) -> list[Path]:
    outputs = []
    for path in cfg.inputs:
        raw = corpus.strip_gutenberg(corpus.read_raw_text(path))
        stream = corpus.tokenize(raw)
        cens = corpus.census(stream)
        outputs.append(
            fileio.write_tokens(stream, cfg.out_dir / f"{raw.source_id}.tokens.txt")
        )
        outputs.append(
            fileio.write_census_csv(cens, cfg.out_dir / f"{raw.source_id}.census.csv")
        )
    return outputs


def _build_curve(cfg: RunConfig, stream: corpus.TokenStream) -> curves.TypeTokenCurve:
    if cfg.scheme == "prefix":
        curve = curves.prefix_curve(stream)
    elif cfg.scheme == "partition":
        curve = curves.partition_curve(stream, cfg.sizes)
    else:
        curve = curves.logsample_curve(curves.prefix_curve(stream), cfg.ratio)
    if cfg.aggregate:
        curve = curves.aggregate(curve, cfg.statistic)
    return curve


def cmd_curve(cfg: RunConfig) -> list[Path]:
    stream = fileio.read_tokens(cfg.inputs[0])
    curve = _build_curve(cfg, stream)
    suffix = ".agg.curve.csv" if cfg.aggregate else ".curve.csv"
    out = cfg.out_dir / f"{stream.source_id}.{cfg.scheme}{suffix}"
    return [fileio.write_curve_csv(curve, out)]


def cmd_fit(cfg: RunConfig) -> list[Path]:
    target = cfg.inputs[0]
    if target.is_dir():
        files = sorted(target.glob("*.curve.csv"))
        if not files:
            raise ValueError(f"no curve files found in {target}")
        fitted = []
        for f in files:
            curve = fileio.read_curve_csv(f)
            fitted.append((curve.max_tokens, regress.fit(curve, cfg.model, cfg.log_base)))
        fitted.sort(key=lambda pair: (pair[0], pair[1].source_id))
        out = cfg.out_dir / f"fits.{cfg.model}.csv"
        return [fileio.write_fit_table_csv([f for _, f in fitted], out)]
    curve = fileio.read_curve_csv(target)
    fit = regress.fit(curve, cfg.model, cfg.log_base)
    base = target.name.removesuffix(".csv").removesuffix(".curve")
    out = cfg.out_dir / f"{base}.{cfg.model}.fit.json"
    return [fileio.write_fit_json(fit, out)]


def cmd_slopes(cfg: RunConfig) -> list[Path]:
    curve = fileio.read_curve_csv(cfg.inputs[0])
    bands = curves.local_slopes(curve, cfg.band, cfg.step)
    base = cfg.inputs[0].name.removesuffix(".csv").removesuffix(".curve")
    out = cfg.out_dir / f"{base}.slopes.csv"
    return [fileio.write_slopes_csv(curve.source_id, bands, out)]


def _token_grid(cfg: RunConfig) -> range:
    return range(cfg.t_min, cfg.t_max + 1, cfg.t_step)


def cmd_urn_expect(cfg: RunConfig) -> list[Path]:
    ts = _token_grid(cfg)
    if cfg.sampling == "without":
        census = fileio.read_census_csv(cfg.census_path)
        pairs = [
            (t, float(urn.expected_types_without_replacement(census, t))) for t in ts
        ]
    else:
        if cfg.census_path is not None:
            census = fileio.read_census_csv(cfg.census_path)
            dist = urn.TypeDistribution.from_counts(census.counts.values())
        else:
            dist = urn.zipf_distribution(cfg.dict_size, cfg.zipf_a[0], exact=False)
        p = dist.float_probs()
        t_arr = np.asarray(ts, dtype=float)
        ev = dist.K - np.power(1.0 - p[None, :], t_arr[:, None]).sum(axis=1)
        pairs = list(zip(ts, (float(v) for v in ev)))
    out = cfg.out_dir / "urn_expect.csv"
    return [fileio.write_expectation_csv(pairs, out)]


def cmd_urn_sweep(cfg: RunConfig) -> list[Path]:
    rows = urn.zipf_curvature_sweep(
        cfg.zipf_a,
        cfg.dict_size,
        fit_min=cfg.t_min,
        fit_max=cfg.t_max,
        ratio=cfg.ratio,
        precision_bits=cfg.precision_bits,
    )
    out = cfg.out_dir / "urn_sweep.csv"
    return [fileio.write_sweep_csv(rows, out)]


def cmd_urn_mc(cfg: RunConfig) -> list[Path]:
    dist = urn.zipf_distribution(cfg.dict_size, cfg.zipf_a[0], exact=False)
    rows = []
    for i, t in enumerate(_token_grid(cfg)):
        mean, se = urn.mc_expected_types(dist, t, cfg.trials, cfg.seed + i)
        exact = urn.expected_types_with_replacement(dist, t, exact=False)
        z = (mean - exact) / se if se > 0 else 0.0
        rows.append((t, mean, se, exact, z))
    out = cfg.out_dir / "urn_mc.csv"
    return [fileio.write_mc_csv(rows, out)]


_DISPATCH = {
    "ingest": cmd_ingest,
    "curve": cmd_curve,
    "fit": cmd_fit,
    "slopes": cmd_slopes,
    "urn-expect": cmd_urn_expect,
    "urn-sweep": cmd_urn_sweep,
    "urn-mc": cmd_urn_mc,
}


def _add_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or '.')")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heapsq",
        description="Type-token curves, quadratic log-log fits, and urn-model curvature.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="strip boilerplate, tokenize, and count types")
    p.add_argument("inputs", nargs="+", help="UTF-8 text file(s)")
    _add_out(p)

    p = sub.add_parser("curve", help="build a type-token curve from a token file")
    p.add_argument("input", help="token file (one token per line)")
    p.add_argument("--scheme", choices=curves.SCHEMES, default="prefix")
    p.add_argument("--ratio", type=float, default=1.01, help="logsample growth factor")
    p.add_argument("--sizes", type=int, nargs="+", help="explicit partition window sizes")
    p.add_argument("--aggregate", action="store_true", help="one point per window size")
    p.add_argument("--statistic", choices=("median", "mean"), default="median")
    _add_out(p)

    p = sub.add_parser("fit", help="fit the log-log model to curve CSV(s)")
    p.add_argument("input", help="curve CSV, or a directory of *.curve.csv")
    p.add_argument("--model", choices=regress.MODELS, default="quadratic")
    p.add_argument("--log-base", dest="log_base", choices=regress.LOG_BASES, default="e")
    _add_out(p)

    p = sub.add_parser("slopes", help="local log-log slopes in sliding bands")
    p.add_argument("input", help="curve CSV")
    p.add_argument("--band", type=float, default=0.5, help="band width in log10 tokens")
    p.add_argument("--step", type=float, default=0.1, help="band stride in log10 tokens")
    _add_out(p)

    p = sub.add_parser("urn", help="random-drawing model analytics")
    urn_sub = p.add_subparsers(dest="urn_command", required=True)

    q = urn_sub.add_parser("expect", help="expected-types curve")
    q.add_argument("--zipf-a", dest="zipf_a", type=float, default=1.01)
    q.add_argument("--dict-size", dest="dict_size", type=int, default=50)
    q.add_argument("--census", help="census CSV; use its counts instead of a Zipf law")
    q.add_argument("--sampling", choices=("with", "without"), default="with")
    q.add_argument("--t-min", dest="t_min", type=int, default=1)
    q.add_argument("--t-max", dest="t_max", type=int, default=402)
    q.add_argument("--t-step", dest="t_step", type=int, default=1)
    _add_out(q)

    q = urn_sub.add_parser("sweep", help="curvature sweep over Zipf exponents")
    q.add_argument("--zipf-a", dest="zipf_a", type=float, nargs="+", default=list(_SWEEP_DEFAULT_A))
    q.add_argument("--dict-size", dest="dict_size", type=int, default=50)
    q.add_argument("--t-min", dest="t_min", type=int, default=20)
    q.add_argument("--t-max", dest="t_max", type=int, default=402)
    q.add_argument("--ratio", type=float, default=1.01, help="fit-grid growth factor")
    q.add_argument("--precision-bits", dest="precision_bits", type=int, default=urn.DEFAULT_PRECISION_BITS)
    _add_out(q)

    q = urn_sub.add_parser("mc", help="seeded Monte Carlo cross-check of the expectation")
    q.add_argument("--zipf-a", dest="zipf_a", type=float, default=1.01)
    q.add_argument("--dict-size", dest="dict_size", type=int, default=50)
    q.add_argument("--t-min", dest="t_min", type=int, default=50)
    q.add_argument("--t-max", dest="t_max", type=int, default=50)
    q.add_argument("--t-step", dest="t_step", type=int, default=1)
    q.add_argument("--trials", type=int, default=100000)
    q.add_argument("--seed", type=int, default=0)
    _add_out(q)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(levelname)s: %(message)s")
    ns = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(ns)
    try:
        cfg.validate()
        outputs = _DISPATCH[cfg.command](cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in outputs:
        print(path)
    return 0


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
