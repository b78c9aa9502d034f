"""Signal-file ingestion and epoch segmentation.

Reads plain-text or CSV signal exports (one channel per analysis), reads
stage-label files, and cuts the signal into consecutive fixed-duration
epochs that can be fed to the metric battery.  The label format is a CSV
with columns ``start_sample,stage``; each row opens an interval that runs
to the next row's start (the last runs to the end of the record).

An epoch receives a stage only when it lies entirely inside one label
interval; epochs straddling a boundary are dropped.  A record with no
labels at all yields unlabeled epochs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .patterns import SampleSeries

__all__ = [
    "DEFAULT_STAGES",
    "EpochSpec",
    "LabeledEpoch",
    "read_signal_csv",
    "read_stage_labels",
    "segment_epochs",
]

DEFAULT_STAGES = ("wake", "S1", "S2", "S3", "REM")


@dataclass(frozen=True)
class EpochSpec:
    """Epoching parameters.

    ``min_length_seconds`` is the floor below which an epoch is too short
    for reliable permutation statistics; configurations with
    ``epoch_seconds`` under it are rejected outright.
    """

    epoch_seconds: float = 60.0
    sample_rate_hz: float = 250.0
    min_length_seconds: float = 30.0

    def __post_init__(self) -> None:
        if self.epoch_seconds <= 0 or self.sample_rate_hz <= 0 or self.min_length_seconds <= 0:
            raise ValueError("epoch_seconds, sample_rate_hz and min_length_seconds must be positive")
        if self.epoch_seconds < self.min_length_seconds:
            raise ValueError(
                f"epoch_seconds={self.epoch_seconds} is below min_length_seconds="
                f"{self.min_length_seconds}"
            )
        if self.samples_per_epoch < 2:
            raise ValueError("an epoch must span at least 2 samples")

    @property
    def samples_per_epoch(self) -> int:
        return int(round(self.epoch_seconds * self.sample_rate_hz))


@dataclass
class LabeledEpoch:
    """One fixed-duration segment of a record, with provenance."""

    series: SampleSeries
    stage: str | None
    source: str
    start_sample: int


def _parse_value(field: str, path: str, lineno: int) -> float:
    try:
        value = float(field)
    except ValueError:
        raise ValueError(f"{path}: unparseable value {field!r} at line {lineno}") from None
    if not math.isfinite(value):
        raise ValueError(f"{path}: non-finite value {field!r} at line {lineno}")
    return value


def read_signal_csv(path: str | Path, column: int | str = 0) -> SampleSeries:
    """Read one signal column from a CSV or single-column text file.

    ``column`` selects by 0-based index (int, or a digit string) or by
    header name.  A header row is detected by the selected field failing to
    parse as a number; selecting by name requires one.  Values must be
    finite decimals; blank lines are skipped.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: On an unresolvable column, an unparseable or non-finite
            value (reported with its 1-based line number), or an empty
            result.
    """
    path = Path(path)
    name = str(path)
    by_name = isinstance(column, str) and not column.lstrip("-").isdigit()
    col_idx = None if by_name else int(column)

    values: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not f.strip() for f in row):
                continue
            row = [f.strip() for f in row]
            if by_name and col_idx is None:
                if column not in row:
                    raise ValueError(f"{name}: column {column!r} not found in header {row}")
                col_idx = row.index(column)
                continue
            if col_idx >= len(row):
                raise ValueError(f"{name}: row at line {lineno} has no column {col_idx}")
            field = row[col_idx]
            if lineno == 1 and not by_name:
                # headerless files start with data; otherwise skip the header
                try:
                    float(field)
                except ValueError:
                    continue
            values.append(_parse_value(field, name, lineno))
    if by_name and col_idx is None:
        raise ValueError(f"{name}: empty file, column {column!r} not found")
    if not values:
        raise ValueError(f"{name}: no samples found")
    return SampleSeries(np.asarray(values), label=None)


def read_stage_labels(
    path: str | Path,
    allowed_stages: Sequence[str] = DEFAULT_STAGES,
    allow_unknown: bool = False,
) -> list[tuple[int, str]]:
    """Read ``start_sample,stage`` label rows.

    Rows must be sorted by strictly increasing ``start_sample`` (intervals
    are implicitly non-overlapping).  Stages outside ``allowed_stages``
    are rejected unless ``allow_unknown`` is set.  An empty file means the
    whole record is unlabeled.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: On malformed, unsorted, or unknown-stage rows.
    """
    path = Path(path)
    name = str(path)
    labels: list[tuple[int, str]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not f.strip() for f in row):
                continue
            row = [f.strip() for f in row]
            if lineno == 1 and row[0] == "start_sample":
                continue
            if len(row) < 2:
                raise ValueError(f"{name}: expected 'start_sample,stage' at line {lineno}")
            try:
                start = int(row[0])
            except ValueError:
                raise ValueError(
                    f"{name}: unparseable start_sample {row[0]!r} at line {lineno}"
                ) from None
            if start < 0:
                raise ValueError(f"{name}: negative start_sample at line {lineno}")
            stage = row[1]
            if not allow_unknown and stage not in allowed_stages:
                raise ValueError(
                    f"{name}: unknown stage {stage!r} at line {lineno} "
                    f"(allowed: {', '.join(allowed_stages)})"
                )
            if labels and start <= labels[-1][0]:
                raise ValueError(
                    f"{name}: start_sample not strictly increasing at line {lineno}"
                )
            labels.append((start, stage))
    return labels


def segment_epochs(
    series: SampleSeries,
    labels: Iterable[tuple[int, str]],
    spec: EpochSpec,
    source: str = "",
    amplitude_ceiling: float | None = None,
) -> list[LabeledEpoch]:
    """Cut a record into consecutive non-overlapping labeled epochs.

    Epochs of ``spec.samples_per_epoch`` samples start at sample 0; a
    trailing remainder shorter than one epoch is discarded.  When labels
    are present, an epoch is kept only if it lies entirely within a single
    label interval; with no labels, every full epoch is kept unlabeled.
    ``amplitude_ceiling`` optionally rejects artifact epochs containing any
    sample with ``|value|`` above the ceiling (off by default).

    Raises:
        ValueError: If the series carries a sample rate that contradicts
            ``spec.sample_rate_hz``.
    """
    if series.sample_rate_hz is not None and not math.isclose(
        series.sample_rate_hz, spec.sample_rate_hz
    ):
        raise ValueError(
            f"series sample rate {series.sample_rate_hz} Hz does not match "
            f"spec {spec.sample_rate_hz} Hz"
        )
    labels = sorted(labels)
    n_epoch = spec.samples_per_epoch
    length = len(series)

    def stage_for(a: int, b: int) -> tuple[bool, str | None]:
        """(keep, stage) for the epoch [a, b)."""
        if not labels:
            return True, None
        for i, (start, stage) in enumerate(labels):
            end = labels[i + 1][0] if i + 1 < len(labels) else length
            if start <= a and b <= end:
                return True, stage
        return False, None

    epochs: list[LabeledEpoch] = []
    for a in range(0, length - n_epoch + 1, n_epoch):
        keep, stage = stage_for(a, a + n_epoch)
        if not keep:
            continue
        if amplitude_ceiling is not None and np.any(
            np.abs(series.samples[a : a + n_epoch]) > amplitude_ceiling
        ):
            continue
        epochs.append(
            LabeledEpoch(
                series=SampleSeries(
                    series.samples[a : a + n_epoch].copy(),
                    spec.sample_rate_hz,
                    stage,
                ),
                stage=stage,
                source=source,
                start_sample=a,
            )
        )
    return epochs
