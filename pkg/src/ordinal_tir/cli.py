"""Command-line front end.

Subcommands:

* ``analyze``  -- run the metric battery over labeled epochs of one or more
  signal files, sweeping an (m, tau) grid; emits a plot-ready table.
* ``compare``  -- rank-test one metric between stage groups of an analyze
  table (pairwise Mann-Whitney U plus omnibus Kruskal-Wallis).
* ``synth``    -- generate a synthetic signal file plus a JSON manifest.
* ``patterns`` -- dump the pattern distribution of a signal.

Output is deterministic for fixed inputs and flags regardless of ``--jobs``:
epochs are processed by a worker pool and merged by a stable sort key, and
every float is serialized with 12 significant digits in both the CSV and
JSONL formats.  Exit codes: 0 success, 2 usage error, 3 data error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ingest import EpochSpec, read_signal_csv, read_stage_labels, segment_epochs
from .metrics import DIP_MODES, compute_metrics
from .patterns import (
    EmbeddingConfig,
    SampleSeries,
    extract_all_patterns,
    is_self_symmetric,
    reverse_pattern,
)
from .stats import GroupSample, kruskal_wallis, mann_whitney_u
from .synth import GENERATOR_KINDS, GeneratorSpec, add_noise_snr, generate, quantize

__all__ = ["RunConfig", "main", "entry"]

JOBS_ENV_VAR = "ORDINAL_TIR_JOBS"
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3

ANALYZE_COLUMNS = (
    "epoch_id",
    "source",
    "start_sample",
    "stage",
    "m",
    "tau",
    "n_windows",
    "pTIR",
    "pTAS",
    "noeTIR",
    "noeTAS",
    "PEn",
    "DES",
    "DIP",
)

_ORDER_NAMES = {"asc": "ascending", "desc": "descending"}
_RULE_NAMES = {
    "occurrence": "occurrence",
    "group-smallest": "group_smallest",
    "group-largest": "group_largest",
}


@dataclass
class RunConfig:
    """Grid and options for one analyze run."""

    m_list: tuple[int, ...] = (2, 3, 4)
    tau_list: tuple[int, ...] = (1, 2, 3, 4)
    order: str = "ascending"
    equal_rule: str = "group_smallest"
    dip_mode: str = "occurrences"
    des_threshold: float = 0.0
    output_format: str = "csv"
    seed: int | None = None
    parallelism: int = 1

    def __post_init__(self) -> None:
        if not self.m_list or not self.tau_list:
            raise ValueError("m and tau lists must be non-empty")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        self.m_list = tuple(sorted(set(self.m_list)))
        self.tau_list = tuple(sorted(set(self.tau_list)))

    def configs(self) -> list[EmbeddingConfig]:
        return [
            EmbeddingConfig(m=m, tau=tau, order=self.order, equal_rule=self.equal_rule)
            for m in self.m_list
            for tau in self.tau_list
        ]


def _fmt(value) -> str:
    """Stable serialization: 12 significant digits for floats."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return "" if value is None else str(value)


def _json_value(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return float(f"{value:.12g}")
    return "" if value is None else value


def _write_rows(rows: list[dict], columns: tuple[str, ...], fmt: str, output: str | None) -> None:
    if output:
        fh = open(output, "w", encoding="utf-8", newline="")
    else:
        fh = sys.stdout
    try:
        if fmt == "jsonl":
            for row in rows:
                fh.write(json.dumps({k: _json_value(row.get(k)) for k in columns}))
                fh.write("\n")
        else:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(row.get(k)) for k in columns])
    finally:
        if output:
            fh.close()


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _epoch_rows(payload: tuple) -> list[dict]:
    """Worker: all (m, tau) rows for one epoch.  Must stay picklable."""
    samples, source, start_sample, stage, cfg_fields, des_threshold, dip_mode = payload
    series = SampleSeries(samples)
    rows = []
    for fields in cfg_fields:
        config = EmbeddingConfig(**fields)
        rec = compute_metrics(
            series,
            config,
            des_threshold=des_threshold,
            dip_mode=dip_mode,
            epoch_id=f"{source}:{start_sample}",
        )
        rows.append(
            {
                "epoch_id": rec.epoch_id,
                "source": source,
                "start_sample": start_sample,
                "stage": stage,
                "m": config.m,
                "tau": config.tau,
                "n_windows": rec.n_windows,
                "pTIR": rec.p_tir,
                "pTAS": rec.p_tas,
                "noeTIR": rec.noe_tir,
                "noeTAS": rec.noe_tas,
                "PEn": rec.pen,
                "DES": rec.des,
                "DIP": rec.dip,
            }
        )
    return rows


def _resolve_jobs(requested: int) -> int:
    env = os.environ.get(JOBS_ENV_VAR)
    if env is not None:
        try:
            requested = int(env)
        except ValueError:
            raise ValueError(f"{JOBS_ENV_VAR} must be an integer, got {env!r}") from None
    if requested < 1:
        raise ValueError(f"jobs must be >= 1, got {requested}")
    return requested


def cmd_analyze(args: argparse.Namespace) -> int:
    run = RunConfig(
        m_list=_parse_int_list(args.m),
        tau_list=_parse_int_list(args.tau),
        order=_ORDER_NAMES[args.order],
        equal_rule=_RULE_NAMES[args.equal_rule],
        dip_mode=args.dip_mode,
        des_threshold=args.des_threshold,
        output_format=args.format,
        seed=args.seed,
        parallelism=_resolve_jobs(args.jobs),
    )
    spec = EpochSpec(
        epoch_seconds=args.epoch_seconds,
        sample_rate_hz=args.sample_rate,
        min_length_seconds=args.min_length_seconds,
    )
    label_paths = args.labels or []
    if label_paths and len(label_paths) != len(args.inputs):
        raise ValueError(
            f"got {len(label_paths)} label files for {len(args.inputs)} inputs "
            "(give none, or one per input)"
        )

    epochs = []
    for i, path in enumerate(args.inputs):
        series = read_signal_csv(path, args.column)
        labels = (
            read_stage_labels(label_paths[i], allow_unknown=args.allow_unknown)
            if label_paths
            else []
        )
        got = segment_epochs(
            series, labels, spec, source=str(path), amplitude_ceiling=args.amplitude_ceiling
        )
        if not got:
            raise ValueError(f"{path}: no usable epochs")
        epochs.extend(got)

    max_span = max((m - 1) * tau for m in run.m_list for tau in run.tau_list) + 1
    if max_span > spec.samples_per_epoch:
        raise ValueError(
            f"(m, tau) grid needs windows of {max_span} samples but epochs have "
            f"{spec.samples_per_epoch}"
        )

    cfg_fields = [
        {"m": c.m, "tau": c.tau, "order": c.order, "equal_rule": c.equal_rule, "kind": "amp"}
        for c in run.configs()
    ]
    payloads = [
        (e.series.samples, e.source, e.start_sample, e.stage, cfg_fields, run.des_threshold, run.dip_mode)
        for e in epochs
    ]

    rows: list[dict] = []
    if run.parallelism == 1 or len(payloads) == 1:
        for payload in payloads:
            rows.extend(_epoch_rows(payload))
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=run.parallelism) as pool:
            for chunk in pool.map(_epoch_rows, payloads):
                rows.extend(chunk)

    rows.sort(key=lambda r: (r["source"], r["start_sample"], r["m"], r["tau"]))
    _write_rows(rows, ANALYZE_COLUMNS, run.output_format, args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

COMPARE_COLUMNS = (
    "record",
    "name",
    "a",
    "b",
    "n",
    "mean",
    "stderr",
    "statistic",
    "dof",
    "p_value",
    "method",
)


def _read_table(path: str) -> list[dict]:
    """Read an analyze table back, from CSV (header) or JSONL."""
    with open(path, encoding="utf-8") as fh:
        first = fh.read(1)
        fh.seek(0)
        if first == "{":
            return [json.loads(line) for line in fh if line.strip()]
        return list(csv.DictReader(fh))


def cmd_compare(args: argparse.Namespace) -> int:
    rows = _read_table(args.table)
    if not rows:
        raise ValueError(f"{args.table}: empty metrics table")
    if args.metric not in rows[0]:
        raise ValueError(f"unknown metric column {args.metric!r}")
    if args.group_by not in rows[0]:
        raise ValueError(f"unknown group column {args.group_by!r}")

    groups: dict[str, list[float]] = {}
    order: list[str] = []
    for row in rows:
        if int(row["m"]) != args.m or int(row["tau"]) != args.tau:
            continue
        name = row[args.group_by]
        name = "" if name is None else str(name)
        if not name:
            continue
        if name not in groups:
            groups[name] = []
            order.append(name)
        groups[name].append(float(row[args.metric]))
    if len(groups) < 2:
        raise ValueError(
            f"need at least 2 groups to compare, found {len(groups)} "
            f"(filter m={args.m}, tau={args.tau})"
        )

    samples = [GroupSample(name, groups[name]) for name in order]
    out: list[dict] = []
    for g in samples:
        n = len(g)
        mean = float(np.mean(g.values))
        stderr = float(np.std(g.values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        out.append({"record": "group", "name": g.name, "n": n, "mean": mean, "stderr": stderr})
    for i in range(len(samples)):
        for j in range(i + 1, len(samples)):
            r = mann_whitney_u(samples[i], samples[j])
            out.append(
                {
                    "record": "pair",
                    "a": samples[i].name,
                    "b": samples[j].name,
                    "statistic": r.statistic,
                    "p_value": r.p_value,
                    "method": r.method,
                }
            )
    omni = kruskal_wallis(samples)
    out.append(
        {
            "record": "omnibus",
            "statistic": omni.statistic,
            "dof": len(samples) - 1,
            "p_value": omni.p_value,
            "method": omni.method,
        }
    )
    _write_rows(out, COMPARE_COLUMNS, args.format, args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------


def cmd_synth(args: argparse.Namespace) -> int:
    params: dict[str, float] = {}
    for key in ("phi", "r", "x0", "value", "low", "high"):
        val = getattr(args, key)
        if val is not None:
            params[key] = val
    spec = GeneratorSpec(kind=args.kind, length=args.length, params=params, seed=args.seed or 0)
    series = generate(spec)
    clean = series.samples

    manifest: dict = {
        "kind": spec.kind,
        "length": spec.length,
        "seed": spec.seed,
        "params": params,
    }
    if args.quantize is not None:
        series = quantize(series, args.quantize)
        manifest["quantize_levels"] = args.quantize
        clean = series.samples
    if args.snr_db is not None and not math.isinf(args.snr_db):
        noise_seed = args.noise_seed if args.noise_seed is not None else (spec.seed + 1)
        series = add_noise_snr(series, args.snr_db, seed=noise_seed)
        realized = float(np.mean((series.samples - clean) ** 2))
        signal_power = float(np.mean((clean - clean.mean()) ** 2))
        manifest["snr_db"] = args.snr_db
        manifest["noise_seed"] = noise_seed
        manifest["realized_noise_power"] = _json_value(realized)
        manifest["realized_snr_db"] = _json_value(10.0 * math.log10(signal_power / realized))

    output = Path(args.output)
    with open(output, "w", encoding="utf-8") as fh:
        for v in series.samples:
            fh.write(f"{v:.12g}\n")
    with open(output.with_suffix(output.suffix + ".manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# patterns
# ---------------------------------------------------------------------------

PATTERNS_COLUMNS = ("pattern", "count", "probability", "self_symmetric", "individual")


def cmd_patterns(args: argparse.Namespace) -> int:
    series = read_signal_csv(args.input, args.column)
    config = EmbeddingConfig(
        m=args.m,
        tau=args.tau,
        order=_ORDER_NAMES[args.order],
        equal_rule=_RULE_NAMES[args.equal_rule],
        kind="amp",
    )
    dist = extract_all_patterns(series, config)
    rows = []
    for pattern in sorted(dist.counts):
        count = dist.counts[pattern]
        rev = reverse_pattern(pattern)
        rows.append(
            {
                "pattern": ",".join(str(v) for v in pattern),
                "count": count,
                "probability": count / dist.total,
                "self_symmetric": is_self_symmetric(pattern),
                "individual": rev != pattern and dist.counts.get(rev, 0) == 0,
            }
        )
    _write_rows(rows, PATTERNS_COLUMNS, args.format, args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in str(text).split(","))
    except ValueError:
        raise ValueError(f"expected an integer or comma-separated integers, got {text!r}") from None


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--order", choices=("asc", "desc"), default="asc", help="sort direction")
    parser.add_argument(
        "--equal-rule",
        choices=tuple(_RULE_NAMES),
        default="group-smallest",
        help="tie policy for equal values",
    )
    parser.add_argument("--format", choices=("csv", "jsonl"), default="csv", help="output format")
    parser.add_argument("--seed", type=int, default=None, help="seed for seeded operations")
    parser.add_argument("--output", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordinal-tir",
        description="Time irreversibility and permutation statistics of sampled series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the metric battery over labeled epochs")
    p.add_argument("inputs", nargs="+", help="signal CSV files")
    p.add_argument("--labels", action="append", help="stage label CSV, one per input")
    p.add_argument("--column", default="0", help="signal column (index or header name)")
    p.add_argument("--m", default="2,3,4", help="embedding dimensions, comma-separated")
    p.add_argument("--tau", default="1,2,3,4", help="delays, comma-separated")
    p.add_argument("--dip-mode", choices=DIP_MODES, default="occurrences")
    p.add_argument("--des-threshold", type=float, default=0.0)
    p.add_argument("--epoch-seconds", type=float, default=60.0)
    p.add_argument("--sample-rate", type=float, default=250.0)
    p.add_argument("--min-length-seconds", type=float, default=30.0)
    p.add_argument("--allow-unknown", action="store_true", help="accept stages outside the default set")
    p.add_argument(
        "--amplitude-ceiling",
        type=float,
        default=None,
        help="reject epochs with any |sample| above this (artifact screen, off by default)",
    )
    p.add_argument("--jobs", type=int, default=1, help=f"worker processes ({JOBS_ENV_VAR} overrides)")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="rank-test a metric between groups of an analyze table")
    p.add_argument("table", help="metrics table from analyze (csv or jsonl)")
    p.add_argument("--metric", required=True, help="metric column, e.g. pTIR")
    p.add_argument("--group-by", default="stage", help="grouping column")
    p.add_argument("--m", type=int, default=3, help="dimension to select")
    p.add_argument("--tau", type=int, default=1, help="delay to select")
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("synth", help="generate a synthetic signal file")
    p.add_argument("--kind", choices=GENERATOR_KINDS, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--phi", type=float, default=None, help="ar1 coefficient")
    p.add_argument("--r", type=float, default=None, help="logistic map parameter")
    p.add_argument("--x0", type=float, default=None, help="logistic map start point")
    p.add_argument("--value", type=float, default=None, help="constant value")
    p.add_argument("--low", type=float, default=None, help="alternating low value")
    p.add_argument("--high", type=float, default=None, help="alternating high value")
    p.add_argument("--quantize", type=int, default=None, help="uniform quantization levels")
    p.add_argument("--snr-db", type=float, default=None, help="add Gaussian noise at this SNR")
    p.add_argument("--noise-seed", type=int, default=None, help="seed for the noise stream")
    _add_common(p)
    p.set_defaults(func=cmd_synth)
    # synth writes a file, not stdout
    p.set_defaults(output_required=True)

    p = sub.add_parser("patterns", help="dump the pattern distribution of a signal")
    p.add_argument("input", help="signal CSV file")
    p.add_argument("--column", default="0", help="signal column (index or header name)")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--tau", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_patterns)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "output_required", False) and not args.output:
        parser.error("synth requires --output")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"ordinal-tir: error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
