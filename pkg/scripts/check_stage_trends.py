#!/usr/bin/env python3
"""Check stage-group trends on user-supplied EEG exports.

Expects a directory with one signal file per stage group, named
``wake.csv``, ``S1.csv``, ``S2.csv``, ``S3.csv``, ``REM.csv`` -- each a
single-column export sampled at 250 Hz whose rows are concatenated 60 s
epochs (15000 samples each).  For every epoch the script computes DES and
pTIR at m=3, tau=1 and then asserts:

* group medians of DES increase from wake through S1/S2/S3 to REM,
* group medians of pTIR decrease along the same order,
* the omnibus Kruskal-Wallis p is below 1e-4 for both metrics.

Exit codes: 0 all checks pass, 1 a trend check failed, 2 data missing.

Usage:
    python scripts/check_stage_trends.py [DATA_DIR]

DATA_DIR defaults to ``./stage_data`` or the ``ORDINAL_TIR_STAGE_DATA``
environment variable.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import numpy as np

from ordinal_tir import (
    EmbeddingConfig,
    EpochSpec,
    GroupSample,
    compute_metrics,
    kruskal_wallis,
    read_signal_csv,
    segment_epochs,
)

STAGE_ORDER = ("wake", "S1", "S2", "S3", "REM")
CONFIG = EmbeddingConfig(m=3, tau=1)
EPOCHS = EpochSpec(epoch_seconds=60.0, sample_rate_hz=250.0)


def main(argv: list[str]) -> int:
    default = os.environ.get("ORDINAL_TIR_STAGE_DATA", "stage_data")
    data_dir = Path(argv[1]) if len(argv) > 1 else Path(default)
    if not data_dir.is_dir():
        print(f"stage data directory {data_dir} not found", file=sys.stderr)
        return 2

    des_groups: list[GroupSample] = []
    ptir_groups: list[GroupSample] = []
    for stage in STAGE_ORDER:
        path = data_dir / f"{stage}.csv"
        if not path.exists():
            print(f"missing {path}", file=sys.stderr)
            return 2
        series = read_signal_csv(path)
        epochs = segment_epochs(series, [], EPOCHS, source=stage)
        if not epochs:
            print(f"{path}: no full 60 s epochs", file=sys.stderr)
            return 2
        records = [compute_metrics(e.series, CONFIG) for e in epochs]
        des_groups.append(GroupSample(stage, [r.des for r in records]))
        ptir_groups.append(GroupSample(stage, [r.p_tir for r in records]))
        print(
            f"{stage}: {len(records)} epochs, median DES="
            f"{np.median(des_groups[-1].values):.4f}, "
            f"median pTIR={np.median(ptir_groups[-1].values):.5f}"
        )

    ok = True
    des_medians = [float(np.median(g.values)) for g in des_groups]
    if all(a < b for a, b in zip(des_medians, des_medians[1:])):
        print("PASS DES medians increase across stages")
    else:
        print(f"FAIL DES medians not increasing: {des_medians}")
        ok = False

    ptir_medians = [float(np.median(g.values)) for g in ptir_groups]
    if all(a > b for a, b in zip(ptir_medians, ptir_medians[1:])):
        print("PASS pTIR medians decrease across stages")
    else:
        print(f"FAIL pTIR medians not decreasing: {ptir_medians}")
        ok = False

    for name, groups in (("DES", des_groups), ("pTIR", ptir_groups)):
        p = kruskal_wallis(groups).p_value
        if p < 1e-4:
            print(f"PASS Kruskal-Wallis {name}: p={p:.3g} < 1e-4")
        else:
            print(f"FAIL Kruskal-Wallis {name}: p={p:.3g} >= 1e-4")
            ok = False

    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv))
