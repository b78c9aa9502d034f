"""Synthetic series with known reversibility, plus signal degradation.

Generators cover the validation corpus: seeded white Gaussian noise and
AR(1) (time-reversible linear Gaussian processes), the fully chaotic
logistic map (strongly irreversible, with a forbidden descending pattern),
and constant / alternating fixtures.  ``quantize`` emulates coarse
analog-to-digital conversion (it creates equal values); ``add_noise_snr``
injects Gaussian noise at a prescribed signal-to-noise ratio (it destroys
them).

All randomness flows through ``numpy.random.default_rng`` (PCG64) from the
spec's 64-bit seed, so identical specs produce identical output on any
platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .patterns import SampleSeries

__all__ = ["GeneratorSpec", "generate", "quantize", "add_noise_snr", "GENERATOR_KINDS"]

GENERATOR_KINDS = ("white_gaussian", "ar1", "logistic_map", "constant", "alternating")

_LOGISTIC_TRANSIENT = 1000


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for one synthetic series.

    ``params`` is kind-specific: ``ar1`` takes ``phi`` in (-1, 1) (default
    0.5); ``logistic_map`` takes ``r`` in (0, 4] (default 4.0) and
    optionally ``x0`` in (0, 1) (default: drawn from the seed);
    ``constant`` takes ``value``; ``alternating`` takes ``low``/``high``.
    """

    kind: str
    length: int
    params: Mapping[str, float] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"kind must be one of {GENERATOR_KINDS}, got {self.kind!r}")
        if not isinstance(self.length, int) or self.length < 2:
            raise ValueError(f"length must be an integer >= 2, got {self.length!r}")


def generate(spec: GeneratorSpec) -> SampleSeries:
    """Generate the series described by ``spec``; deterministic per seed.

    Raises:
        ValueError: On parameters outside their stated domains.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.length
    p = spec.params

    if spec.kind == "white_gaussian":
        return SampleSeries(rng.standard_normal(n))

    if spec.kind == "ar1":
        phi = float(p.get("phi", 0.5))
        if not -1.0 < phi < 1.0:
            raise ValueError(f"ar1 coefficient phi must be in (-1, 1), got {phi}")
        eps = rng.standard_normal(n)
        x = np.empty(n)
        # start at the stationary distribution so every sample is in regime
        x[0] = eps[0] / math.sqrt(1.0 - phi * phi)
        for t in range(1, n):
            x[t] = phi * x[t - 1] + eps[t]
        return SampleSeries(x)

    if spec.kind == "logistic_map":
        r = float(p.get("r", 4.0))
        if not 0.0 < r <= 4.0:
            raise ValueError(f"logistic parameter r must be in (0, 4], got {r}")
        if "x0" in p:
            x0 = float(p["x0"])
            if not 0.0 < x0 < 1.0:
                raise ValueError(f"logistic x0 must be in (0, 1), got {x0}")
        else:
            x0 = float(rng.uniform(0.05, 0.95))
        x = x0
        for _ in range(_LOGISTIC_TRANSIENT):
            x = r * x * (1.0 - x)
        out = np.empty(n)
        for t in range(n):
            out[t] = x
            x = r * x * (1.0 - x)
        return SampleSeries(out)

    if spec.kind == "constant":
        return SampleSeries(np.full(n, float(p.get("value", 0.0))))

    # alternating
    low = float(p.get("low", 0.0))
    high = float(p.get("high", 1.0))
    out = np.empty(n)
    out[0::2] = low
    out[1::2] = high
    return SampleSeries(out)


def quantize(series: SampleSeries, levels: int) -> SampleSeries:
    """Uniform quantization over [min, max] into ``levels`` bins.

    Each sample is replaced by the midpoint of its bin, which emulates an
    ADC of ``log2(levels)`` bits over the signal range.  A constant series
    is returned unchanged.  Quantization never splits ties and never
    reorders samples that land in different bins.

    Raises:
        ValueError: If ``levels < 2``.
    """
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    x = series.samples
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        return SampleSeries(x.copy(), series.sample_rate_hz, series.label)
    width = (hi - lo) / levels
    idx = np.minimum((x - lo) // width, levels - 1).astype(np.int64)
    return SampleSeries(lo + (idx + 0.5) * width, series.sample_rate_hz, series.label)


def add_noise_snr(series: SampleSeries, snr_db: float, seed: int = 0) -> SampleSeries:
    """Add zero-mean Gaussian noise at a prescribed SNR in decibels.

    Signal power is the variance of the mean-removed samples; the noise is
    scaled so ``10 * log10(P_signal / P_noise) == snr_db``.  ``snr_db =
    math.inf`` is the no-noise sentinel and returns the series unchanged.
    Deterministic per seed.

    Raises:
        ValueError: On a zero-power (constant) series.
    """
    if math.isinf(snr_db) and snr_db > 0:
        return SampleSeries(series.samples.copy(), series.sample_rate_hz, series.label)
    x = series.samples
    power = float(np.mean((x - x.mean()) ** 2))
    if power <= 0.0:
        raise ValueError("cannot scale noise against a zero-power series")
    noise_power = power / (10.0 ** (snr_db / 10.0))
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(x.size) * math.sqrt(noise_power)
    return SampleSeries(x + noise, series.sample_rate_hz, series.label)
