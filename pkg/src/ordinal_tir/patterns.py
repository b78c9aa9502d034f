"""Ordinal pattern extraction with rigorous equal-value handling.

Two pattern flavours are supported:

* **OrP** (original permutation): the indexes of the sorted values as they
  are found in the original window -- a 1-based stable argsort.
* **AmP** (amplitude permutation): the rank position of each original sample
  within the sorted window -- the inverse of the OrP when the window is
  tie-free.

Tied samples are first ranked by order of occurrence (stable sort).  Under
the ``group_smallest`` / ``group_largest`` rules, every member of a tied
group then has its index replaced by the smallest / largest occurrence-order
index of that group, so equal values map to equal symbols.  This is what
makes amplitude permutations commute with time reversal in the presence of
equal values; the plain occurrence rule does not (an all-equal pair becomes
a "false up").

All functions are pure and operate on plain numpy arrays internally, so they
are safe to call from any number of threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "Pattern",
    "SampleSeries",
    "EmbeddingConfig",
    "PatternDistribution",
    "extract_pattern",
    "extract_all_patterns",
    "reverse_pattern",
    "is_self_symmetric",
    "enumerate_patterns",
]

# A pattern is the tuple of 1-based rank indexes itself; no encoding scheme
# is imposed on callers.
Pattern = tuple[int, ...]

ORDERS = ("ascending", "descending")
EQUAL_RULES = ("occurrence", "group_smallest", "group_largest")
KINDS = ("amp", "orp")


@dataclass
class SampleSeries:
    """A finite sequence of real-valued samples plus optional metadata.

    Args:
        samples: 1-D sequence of finite real numbers (signal units).
        sample_rate_hz: Optional sampling rate; must be positive when given.
        label: Optional free-text tag (e.g. a sleep stage).

    Raises:
        ValueError: If the series is empty, not 1-D, or contains NaN/Inf.
    """

    samples: np.ndarray
    sample_rate_hz: float | None = None
    label: str | None = None

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("samples must be non-empty")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise ValueError(f"non-finite sample at index {bad}")
        if self.sample_rate_hz is not None and not self.sample_rate_hz > 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        self.samples = arr

    def __len__(self) -> int:
        return int(self.samples.size)

    def reversed(self) -> "SampleSeries":
        """The time-reversed series (same metadata)."""
        return SampleSeries(self.samples[::-1].copy(), self.sample_rate_hz, self.label)


@dataclass(frozen=True)
class EmbeddingConfig:
    """Embedding and symbolisation parameters for pattern extraction.

    Args:
        m: Embedding dimension (pattern length), at least 2.
        tau: Embedding delay in samples, at least 1.
        order: ``"ascending"`` or ``"descending"`` sort direction.
        equal_rule: Tie policy -- ``"occurrence"`` (rank ties by position),
            ``"group_smallest"`` or ``"group_largest"`` (collapse each tied
            group onto one shared index).
        kind: ``"amp"`` (amplitude permutation) or ``"orp"`` (original
            permutation).
    """

    m: int = 3
    tau: int = 1
    order: str = "ascending"
    equal_rule: str = "group_smallest"
    kind: str = "amp"

    def __post_init__(self) -> None:
        if not isinstance(self.m, int) or self.m < 2:
            raise ValueError(f"m must be an integer >= 2, got {self.m!r}")
        if not isinstance(self.tau, int) or self.tau < 1:
            raise ValueError(f"tau must be an integer >= 1, got {self.tau!r}")
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}, got {self.order!r}")
        if self.equal_rule not in EQUAL_RULES:
            raise ValueError(f"equal_rule must be one of {EQUAL_RULES}, got {self.equal_rule!r}")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")

    @property
    def span(self) -> int:
        """Window span in samples: ``(m - 1) * tau + 1``."""
        return (self.m - 1) * self.tau + 1


@dataclass
class PatternDistribution:
    """Occurrence counts of patterns over the windows of one series.

    ``counts`` maps each observed pattern to its window count; ``total`` is
    the number of windows, so probabilities are ``count / total``.
    """

    counts: dict[Pattern, int]
    total: int
    config: EmbeddingConfig

    def __post_init__(self) -> None:
        if self.total <= 0:
            raise ValueError("total must be positive")
        if sum(self.counts.values()) != self.total:
            raise ValueError("counts must sum to total")

    def probability(self, pattern: Pattern) -> float:
        """Probability of ``pattern``; 0.0 if it was never observed."""
        return self.counts.get(tuple(pattern), 0) / self.total

    def probabilities(self) -> dict[Pattern, float]:
        """All observed patterns mapped to their probabilities."""
        return {p: c / self.total for p, c in self.counts.items()}


# ---------------------------------------------------------------------------
# Vectorised ranking core
# ---------------------------------------------------------------------------


def _sort_struct(windows: np.ndarray, order: str) -> tuple[np.ndarray, np.ndarray]:
    """Stable argsort of each window row plus the sorted key values.

    Returns ``(orp0, sorted_keys)`` where ``orp0[r, slot]`` is the 0-based
    original position occupying sorted ``slot`` of row ``r``.  Descending
    order sorts by decreasing value; ties keep occurrence order either way.
    """
    key = -windows if order == "descending" else windows
    orp0 = np.argsort(key, axis=1, kind="stable")
    return orp0, np.take_along_axis(key, orp0, axis=1)


def _group_slots(sorted_keys: np.ndarray, which: str) -> np.ndarray:
    """Per sorted slot, the first (``smallest``) or last (``largest``) slot
    of the run of equal sorted values it belongs to."""
    n, m = sorted_keys.shape
    slots = np.broadcast_to(np.arange(m), (n, m))
    boundary = sorted_keys[:, 1:] != sorted_keys[:, :-1]
    if which == "smallest":
        starts = np.zeros((n, m), dtype=np.intp)
        starts[:, 1:] = np.where(boundary, slots[:, 1:], 0)
        return np.maximum.accumulate(starts, axis=1)
    ends = np.full((n, m), m - 1, dtype=np.intp)
    ends[:, :-1] = np.where(boundary, slots[:, :-1], m - 1)
    return np.minimum.accumulate(ends[:, ::-1], axis=1)[:, ::-1]


def _rank_windows(windows: np.ndarray, config: EmbeddingConfig) -> np.ndarray:
    """1-based pattern rows for a ``(n_windows, m)`` matrix of samples."""
    orp0, sorted_keys = _sort_struct(windows, config.order)
    n, m = windows.shape
    if config.equal_rule == "occurrence":
        rep = np.broadcast_to(np.arange(m), (n, m))
    else:
        which = "smallest" if config.equal_rule == "group_smallest" else "largest"
        rep = _group_slots(sorted_keys, which)
    if config.kind == "orp":
        # symbol at sorted slot s is the original position of its group's
        # representative element
        return np.take_along_axis(orp0, rep, axis=1) + 1
    # amp: symbol at original position orp0[s] is the representative slot
    amp = np.empty((n, m), dtype=np.intp)
    np.put_along_axis(amp, orp0, rep + 1, axis=1)
    return amp


def _window_view(x: np.ndarray, m: int, tau: int) -> np.ndarray:
    span = (m - 1) * tau + 1
    if x.size < span:
        raise ValueError(
            f"series of length {x.size} too short for m={m}, tau={tau} (needs {span})"
        )
    return sliding_window_view(x, span)[:, ::tau]


def _as_array(series: "SampleSeries | Sequence[float] | np.ndarray") -> np.ndarray:
    if isinstance(series, SampleSeries):
        return series.samples
    arr = np.asarray(series, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("series must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError("series contains non-finite values")
    return arr


def _distribution_from_ranks(ranks: np.ndarray, config: EmbeddingConfig) -> PatternDistribution:
    """Collapse a ``(n, m)`` rank matrix into a PatternDistribution."""
    n, m = ranks.shape
    weights = (m + 1) ** np.arange(m, dtype=np.int64)
    codes = ranks @ weights
    uniq, first, counts = np.unique(codes, return_index=True, return_counts=True)
    count_map = {
        tuple(int(v) for v in ranks[i]): int(c) for i, c in zip(first, counts)
    }
    return PatternDistribution(count_map, int(n), config)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def extract_pattern(window: Sequence[float], config: EmbeddingConfig) -> Pattern:
    """Ordinal pattern of a single window of ``config.m`` samples.

    The window is stably sorted in the configured direction, ranking ties by
    order of occurrence; under a group rule every tied sample then shares
    its group's smallest (or largest) index.  Example, ascending: window
    ``(5, 1, 9, 1, 7)`` gives OrP ``(2, 4, 1, 5, 3)`` and AmP
    ``(3, 1, 5, 2, 4)`` under the occurrence rule, and ``(2, 2, 1, 5, 3)``
    / ``(3, 1, 5, 1, 4)`` under ``group_smallest``.

    Raises:
        ValueError: On a window length different from ``config.m`` or on
            non-finite values.
    """
    arr = np.asarray(window, dtype=np.float64)
    if arr.shape != (config.m,):
        raise ValueError(f"window length {arr.size} does not match m={config.m}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("window contains non-finite values")
    row = _rank_windows(arr.reshape(1, -1), config)[0]
    return tuple(int(v) for v in row)


def extract_all_patterns(
    series: "SampleSeries | Sequence[float] | np.ndarray", config: EmbeddingConfig
) -> PatternDistribution:
    """Pattern counts over all sliding windows of a series.

    A window of span ``(m - 1) * tau + 1`` slides with stride 1; the m
    samples at offsets ``0, tau, ..., (m - 1) * tau`` form each window, so
    the distribution totals ``L - (m - 1) * tau`` windows.

    Raises:
        ValueError: If the series is shorter than one window span.
    """
    x = _as_array(series)
    windows = _window_view(x, config.m, config.tau)
    return _distribution_from_ranks(_rank_windows(windows, config), config)


def _amp_distributions_both_rules(
    x: np.ndarray, config: EmbeddingConfig
) -> tuple[PatternDistribution, PatternDistribution]:
    """Occurrence-rule and group-rule AmP distributions from one sort pass.

    Internal fast path for the metric battery, which always needs both tie
    treatments of the same windows.
    """
    windows = _window_view(x, config.m, config.tau)
    orp0, sorted_keys = _sort_struct(windows, config.order)
    n, m = windows.shape
    occ = np.empty((n, m), dtype=np.intp)
    np.put_along_axis(occ, orp0, np.broadcast_to(np.arange(1, m + 1), (n, m)), axis=1)
    which = "largest" if config.equal_rule == "group_largest" else "smallest"
    grp = np.empty((n, m), dtype=np.intp)
    np.put_along_axis(grp, orp0, _group_slots(sorted_keys, which) + 1, axis=1)
    occ_cfg = EmbeddingConfig(config.m, config.tau, config.order, "occurrence", "amp")
    grp_rule = "group_largest" if which == "largest" else "group_smallest"
    grp_cfg = EmbeddingConfig(config.m, config.tau, config.order, grp_rule, "amp")
    return (
        _distribution_from_ranks(occ, occ_cfg),
        _distribution_from_ranks(grp, grp_cfg),
    )


def reverse_pattern(p: Pattern) -> Pattern:
    """The pattern read back-to-front.

    For equal-value amplitude permutations this realises time reversal:
    the AmP of a reversed window equals the reversed AmP of the window.
    """
    return tuple(p[::-1])


def is_self_symmetric(p: Pattern) -> bool:
    """True iff the pattern equals its own reversal.

    Self-symmetric patterns (e.g. ``(1, 3, 1)`` or the all-equal ``(1, 1)``)
    describe time-reversible window structure and contribute nothing to
    asymmetry statistics.
    """
    return tuple(p) == tuple(p[::-1])


def enumerate_patterns(m: int, equal_rule: str = "group_smallest") -> set[Pattern]:
    """All admissible AmP patterns of dimension ``m`` under a tie rule.

    Under the occurrence rule every window maps to one of the ``m!``
    permutations of ``1..m``.  Under a group rule there are more motifs
    (13 instead of 6 at ``m = 3``); the set is computed by brute force over
    all ``m ** m`` windows on the alphabet ``{1..m}``, which realises every
    tie structure.

    Raises:
        ValueError: For ``m`` outside 2..7 (combinatorial guard) or an
            unknown tie rule.
    """
    if not 2 <= m <= 7:
        raise ValueError(f"m must be in 2..7, got {m}")
    if equal_rule not in EQUAL_RULES:
        raise ValueError(f"equal_rule must be one of {EQUAL_RULES}, got {equal_rule!r}")
    if equal_rule == "occurrence":
        return {tuple(p) for p in itertools.permutations(range(1, m + 1))}
    grids = np.meshgrid(*[np.arange(1, m + 1)] * m, indexing="ij")
    windows = np.stack([g.ravel() for g in grids], axis=1).astype(np.float64)
    config = EmbeddingConfig(m=m, tau=1, equal_rule=equal_rule, kind="amp")
    ranks = _rank_windows(windows, config)
    uniq = np.unique(ranks, axis=0)
    return {tuple(int(v) for v in row) for row in uniq}
