"""Scalar statistics over pattern distributions and raw series.

Implements the estimator family for time irreversibility and temporal
asymmetry of a sampled signal:

* ``p_tir`` / ``p_tas``: divergence between forward/backward pattern
  probabilities, resp. between each pattern and its time-reversed
  counterpart, computed on amplitude permutations.  Under a group tie rule
  the two coincide exactly; under the occurrence rule they become the
  ``noe`` (non-equal) variants, which are mutually inconsistent whenever
  the signal carries equal values.
* ``permutation_entropy``: Shannon entropy of the pattern distribution.
* ``des``: distribution of equal states -- the fraction of sample pairs at
  lag tau that are equal (or within a threshold), a zero-fluctuation
  amplitude statistic.
* ``dip``: share of individual permutations, i.e. observed patterns whose
  reversed counterpart is forbidden.

Probabilistic differences use the subtraction-based divergence
``ys_divergence`` rather than ratio/log measures, which blow up on
forbidden-vs-individual pattern pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .patterns import (
    EmbeddingConfig,
    Pattern,
    PatternDistribution,
    SampleSeries,
    _amp_distributions_both_rules,
    _as_array,
    extract_all_patterns,
    reverse_pattern,
)

__all__ = [
    "MetricsRecord",
    "ys_divergence",
    "p_tir",
    "p_tas",
    "m2_closed_forms",
    "permutation_entropy",
    "des",
    "dip",
    "compute_metrics",
]

DIP_MODES = ("occurrences", "distinct")


@dataclass
class MetricsRecord:
    """The per-epoch metric vector produced by :func:`compute_metrics`."""

    p_tir: float
    p_tas: float
    noe_tir: float
    noe_tas: float
    pen: float
    des: float
    dip: float
    config: EmbeddingConfig
    epoch_id: str = ""
    n_windows: int = 0


def ys_divergence(a: float, b: float) -> float:
    """Subtraction-based divergence of two probabilities.

    ``max(a, b) * |a - b| / (a + b)``, and 0 when both are 0.  Placing the
    larger probability first keeps the measure symmetric and finite even
    when one side is a forbidden pattern (``ys_divergence(p, 0) == p``).

    Raises:
        ValueError: If either input is outside [0, 1].
    """
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        raise ValueError(f"probabilities must lie in [0, 1], got ({a}, {b})")
    lo, hi = (a, b) if a <= b else (b, a)
    if lo == 0.0:
        # covers the forbidden-vs-individual pair exactly (and 0/0 -> 0)
        return hi
    return hi * (hi - lo) / (hi + lo)


def _forward_backward_divergence(
    fwd: Mapping[Pattern, float], bwd: Mapping[Pattern, float]
) -> float:
    """0.5 * sum of ys_divergence over the union of observed patterns."""
    total = 0.0
    for p in fwd.keys() | bwd.keys():
        total += ys_divergence(fwd.get(p, 0.0), bwd.get(p, 0.0))
    return 0.5 * total


def _symmetric_pair_divergence(probs: Mapping[Pattern, float]) -> float:
    """Sum of ys_divergence over unordered {pattern, reversed} pairs.

    Self-symmetric patterns pair with themselves and contribute 0; a
    pattern whose reverse is forbidden contributes its own probability.
    """
    total = 0.0
    seen: set[Pattern] = set()
    for p in probs:
        r = reverse_pattern(p)
        if p == r or p in seen or r in seen:
            continue
        seen.add(p)
        seen.add(r)
        total += ys_divergence(probs[p], probs.get(r, 0.0))
    return total


def _require_amp(config: EmbeddingConfig) -> None:
    if config.kind != "amp":
        raise ValueError(
            "irreversibility estimators are defined on amplitude permutations; "
            f"got kind={config.kind!r}"
        )


def p_tir(series: SampleSeries | Sequence[float], config: EmbeddingConfig) -> float:
    """Permutation time irreversibility of a series.

    Extracts the AmP distribution of the series and of the physically
    reversed series, then returns half the summed ys_divergence over all
    observed patterns.  Under ``equal_rule="occurrence"`` this is the
    ``noeTIR`` estimator.

    Raises:
        ValueError: If ``config.kind`` is not ``"amp"`` or the series is
            shorter than one window span.
    """
    _require_amp(config)
    x = _as_array(series)
    fwd = extract_all_patterns(x, config).probabilities()
    bwd = extract_all_patterns(x[::-1], config).probabilities()
    return _forward_backward_divergence(fwd, bwd)


def p_tas(series: SampleSeries | Sequence[float], config: EmbeddingConfig) -> float:
    """Permutation temporal asymmetry of a series.

    Works on the forward distribution only, pairing every pattern with its
    tuple reversal.  Under a group tie rule this equals :func:`p_tir`
    exactly (amplitude permutations commute with time reversal); under
    ``equal_rule="occurrence"`` it is the ``noeTAS`` estimator, which in
    general disagrees with ``noeTIR`` on tie-bearing signals.

    Raises:
        ValueError: As :func:`p_tir`.
    """
    _require_amp(config)
    fwd = extract_all_patterns(series, config).probabilities()
    return _symmetric_pair_divergence(fwd)


def m2_closed_forms(up_p: float, down_p: float, equal_p: float) -> dict[str, float]:
    """The four dimension-2 estimators from the (up, down, equal) probabilities.

    With D as ys_divergence:

    * ``pTIR  = 0.5 * (D(u, d) + D(d, u))``
    * ``noeTIR = 0.5 * (D(u + e, d + e) + D(d, u))`` -- equal values turn
      into "up" in both forward and backward directions
    * ``pTAS = D(u, d)``
    * ``noeTAS = D(u + e, d)``

    Serves as an independent oracle for the general-dimension estimators at
    ``m = 2``: when ``equal_p == 0`` all four coincide.

    Raises:
        ValueError: If the probabilities are negative or do not sum to 1.
    """
    parts = (up_p, down_p, equal_p)
    if any(p < 0.0 for p in parts):
        raise ValueError(f"probabilities must be non-negative, got {parts}")
    if not math.isclose(sum(parts), 1.0, rel_tol=0.0, abs_tol=1e-9):
        raise ValueError(f"probabilities must sum to 1, got {sum(parts)}")
    u, d, e = parts
    return {
        "pTIR": 0.5 * (ys_divergence(u, d) + ys_divergence(d, u)),
        "noeTIR": 0.5 * (ys_divergence(min(u + e, 1.0), min(d + e, 1.0)) + ys_divergence(d, u)),
        "pTAS": ys_divergence(u, d),
        "noeTAS": ys_divergence(min(u + e, 1.0), d),
    }


def permutation_entropy(dist: PatternDistribution) -> float:
    """Natural-log Shannon entropy of a pattern distribution.

    Zero-probability patterns contribute nothing; no normalisation by the
    log of the pattern-space size is applied.
    """
    total = float(dist.total)
    h = 0.0
    for c in dist.counts.values():
        if c > 0:
            p = c / total
            h -= p * math.log(p)
    return h


def des(
    series: SampleSeries | Sequence[float], tau: int = 1, threshold: float = 0.0
) -> float:
    """Distribution of equal states at lag ``tau``.

    Fraction of pairs ``(s(t), s(t + tau))`` with ``|s(t + tau) - s(t)| <=
    threshold``, over the ``L - tau`` available pairs.  Threshold 0 counts
    exactly-equal neighbouring states; a positive threshold treats
    sub-threshold fluctuations as equal (useful after high-resolution
    acquisition or filtering has destroyed exact ties).

    Raises:
        ValueError: If ``tau < 1``, ``threshold < 0`` or the series has no
            pair at lag ``tau``.
    """
    if tau < 1:
        raise ValueError(f"tau must be >= 1, got {tau}")
    if threshold < 0.0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    x = _as_array(series)
    if x.size <= tau:
        raise ValueError(f"series of length {x.size} too short for lag {tau}")
    diffs = np.abs(x[tau:] - x[:-tau])
    return float(np.count_nonzero(diffs <= threshold)) / (x.size - tau)


def dip(dist: PatternDistribution, mode: str = "occurrences") -> float:
    """Share of individual permutations in a distribution.

    An individual permutation is an observed, non-self-symmetric pattern
    whose reversal was never observed (is forbidden).  ``mode`` selects the
    weighting: ``"occurrences"`` divides their total count by the window
    count; ``"distinct"`` divides the number of such patterns by the number
    of distinct observed patterns.

    Raises:
        ValueError: On an unknown mode.
    """
    if mode not in DIP_MODES:
        raise ValueError(f"mode must be one of {DIP_MODES}, got {mode!r}")
    individuals = [
        (p, c)
        for p, c in dist.counts.items()
        if reverse_pattern(p) != p and dist.counts.get(reverse_pattern(p), 0) == 0
    ]
    if mode == "occurrences":
        return sum(c for _, c in individuals) / dist.total
    return len(individuals) / len(dist.counts)


def compute_metrics(
    series: SampleSeries | Sequence[float],
    config: EmbeddingConfig,
    *,
    des_threshold: float = 0.0,
    dip_mode: str = "occurrences",
    epoch_id: str = "",
) -> MetricsRecord:
    """The full per-epoch metric battery in one pass.

    Computes the forward and backward AmP distributions under both the
    configured group tie rule and the occurrence rule, then assembles
    pTIR/pTAS (group rule), noeTIR/noeTAS (occurrence rule), permutation
    entropy and DIP (group rule, forward), and DES at ``config.tau``.
    Deterministic for a fixed input.

    Raises:
        ValueError: Propagated from the component operations.
    """
    _require_amp(config)
    x = _as_array(series)
    fwd_occ, fwd_grp = _amp_distributions_both_rules(x, config)
    bwd_occ, bwd_grp = _amp_distributions_both_rules(x[::-1], config)
    # primary estimators follow the configured tie rule; the noe variants
    # are always the occurrence-rule reading of the same windows
    fwd_pri, bwd_pri = (fwd_occ, bwd_occ) if config.equal_rule == "occurrence" else (fwd_grp, bwd_grp)
    pf_pri = fwd_pri.probabilities()
    pf_occ = fwd_occ.probabilities()
    return MetricsRecord(
        p_tir=_forward_backward_divergence(pf_pri, bwd_pri.probabilities()),
        p_tas=_symmetric_pair_divergence(pf_pri),
        noe_tir=_forward_backward_divergence(pf_occ, bwd_occ.probabilities()),
        noe_tas=_symmetric_pair_divergence(pf_occ),
        pen=permutation_entropy(fwd_pri),
        des=des(x, config.tau, des_threshold),
        dip=dip(fwd_pri, dip_mode),
        config=config,
        epoch_id=epoch_id,
        n_windows=fwd_pri.total,
    )
