"""Time irreversibility and permutation statistics via ordinal patterns.

Quantifies the temporal asymmetry of sampled signals with amplitude and
original permutations under rigorous equal-value handling, together with
permutation entropy, equal-state and individual-permutation distributions,
and the nonparametric rank tests used to compare groups of epochs.
"""

from .ingest import (
    DEFAULT_STAGES,
    EpochSpec,
    LabeledEpoch,
    read_signal_csv,
    read_stage_labels,
    segment_epochs,
)
from .metrics import (
    MetricsRecord,
    compute_metrics,
    des,
    dip,
    m2_closed_forms,
    p_tas,
    p_tir,
    permutation_entropy,
    ys_divergence,
)
from .patterns import (
    EmbeddingConfig,
    Pattern,
    PatternDistribution,
    SampleSeries,
    enumerate_patterns,
    extract_all_patterns,
    extract_pattern,
    is_self_symmetric,
    reverse_pattern,
)
from .stats import GroupComparison, GroupSample, chi_square_sf, kruskal_wallis, mann_whitney_u
from .synth import GeneratorSpec, add_noise_snr, generate, quantize

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_STAGES",
    "EmbeddingConfig",
    "EpochSpec",
    "GeneratorSpec",
    "GroupComparison",
    "GroupSample",
    "LabeledEpoch",
    "MetricsRecord",
    "Pattern",
    "PatternDistribution",
    "SampleSeries",
    "add_noise_snr",
    "chi_square_sf",
    "compute_metrics",
    "des",
    "dip",
    "enumerate_patterns",
    "extract_all_patterns",
    "extract_pattern",
    "generate",
    "is_self_symmetric",
    "kruskal_wallis",
    "m2_closed_forms",
    "mann_whitney_u",
    "p_tas",
    "p_tir",
    "permutation_entropy",
    "quantize",
    "read_signal_csv",
    "read_stage_labels",
    "reverse_pattern",
    "segment_epochs",
    "ys_divergence",
]
