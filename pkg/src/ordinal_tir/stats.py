"""Nonparametric group comparison: Mann-Whitney U and Kruskal-Wallis.

Both tests rank the pooled values with midranks for ties and apply the
standard tie correction to the variance (U test) or to the H statistic
(Kruskal-Wallis).  P-values are two-sided throughout.

The U test switches between an exact null distribution (enumeration over
group assignments) and the normal approximation with continuity
correction: the approximation is used once both groups have at least 8
values.  The Kruskal-Wallis p-value comes from the chi-square survival
function, implemented via the regularized upper incomplete gamma function.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "GroupSample",
    "GroupComparison",
    "mann_whitney_u",
    "kruskal_wallis",
    "chi_square_sf",
]

# both groups at or above this size use the normal approximation
_EXACT_MAX_GROUP = 8
# enumeration guard: fall back to the approximation when the number of
# group assignments would exceed this
_EXACT_MAX_COMBINATIONS = 2_000_000


@dataclass
class GroupSample:
    """A named sample of scalar values (one metric value per epoch)."""

    name: str
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError(f"group {self.name!r} must hold a non-empty 1-D sample")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"group {self.name!r} contains non-finite values")
        self.values = arr

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass
class GroupComparison:
    """Result of one rank test."""

    test: str
    statistic: float
    p_value: float
    group_names: list[str]
    n_per_group: list[int]
    method: str = ""


def _midranks(pooled: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values sharing the mean of their rank range."""
    order = np.argsort(pooled, kind="stable")
    ranks = np.empty(pooled.size, dtype=np.float64)
    sorted_vals = pooled[order]
    i = 0
    while i < pooled.size:
        j = i
        while j + 1 < pooled.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _tie_term(pooled: np.ndarray) -> float:
    """sum(t^3 - t) over tie groups of the pooled sample."""
    _, counts = np.unique(pooled, return_counts=True)
    return float(np.sum(counts.astype(np.float64) ** 3 - counts))


def _norm_sf(z: float) -> float:
    """Upper-tail probability of the standard normal distribution."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _u_from_ranks(ranks: np.ndarray, na: int) -> float:
    """U statistic of the first group from pooled midranks."""
    r1 = float(np.sum(ranks[:na]))
    return r1 - na * (na + 1) / 2.0


def _exact_two_sided_p(pooled: np.ndarray, na: int, u_obs: float) -> float:
    """Exact two-sided p by enumerating all assignments of group A's slots.

    Counts assignments whose U lies at least as far from the null mean
    ``na * nb / 2`` as the observed one (midranks recomputed once on the
    pooled sample, so ties are handled exactly).
    """
    n = pooled.size
    nb = n - na
    ranks = _midranks(pooled)
    mu = na * nb / 2.0
    d_obs = abs(u_obs - mu)
    # enumerate over the smaller group to halve the work
    k, flip = (na, False) if na <= nb else (nb, True)
    hits = 0
    total = 0
    for combo in itertools.combinations(range(n), k):
        r = sum(ranks[i] for i in combo)
        u = r - k * (k + 1) / 2.0
        if flip:
            u = na * nb - u
        total += 1
        if abs(u - mu) >= d_obs - 1e-12:
            hits += 1
    return hits / total


def mann_whitney_u(a: GroupSample, b: GroupSample) -> GroupComparison:
    """Two-sided Mann-Whitney U test between two samples.

    The statistic is U of group ``a`` computed from midranks.  With both
    groups of size >= 8 the p-value uses the normal approximation with tie
    correction and continuity correction; smaller designs are evaluated
    exactly by enumeration (falling back to the approximation if the
    assignment count would be astronomically large).

    Raises:
        ValueError: On an empty group.
    """
    na, nb = len(a), len(b)
    pooled = np.concatenate([a.values, b.values])
    ranks = _midranks(pooled)
    u = _u_from_ranks(ranks, na)
    mu = na * nb / 2.0

    exact = na < _EXACT_MAX_GROUP or nb < _EXACT_MAX_GROUP
    if exact and math.comb(na + nb, min(na, nb)) > _EXACT_MAX_COMBINATIONS:
        exact = False
    if exact:
        p = _exact_two_sided_p(pooled, na, u)
        method = "exact"
    else:
        n = na + nb
        tie = _tie_term(pooled)
        var = na * nb / 12.0 * ((n + 1) - tie / (n * (n - 1)))
        if var <= 0.0:
            p = 1.0
        else:
            z = (abs(u - mu) - 0.5) / math.sqrt(var)
            p = min(1.0, 2.0 * _norm_sf(max(z, 0.0)))
        method = "normal_approx"
    return GroupComparison(
        test="mann_whitney_u",
        statistic=float(u),
        p_value=float(p),
        group_names=[a.name, b.name],
        n_per_group=[na, nb],
        method=method,
    )


def kruskal_wallis(groups: Sequence[GroupSample]) -> GroupComparison:
    """Kruskal-Wallis H test across two or more samples.

    H is computed from midranks and divided by the tie correction factor
    ``1 - sum(t^3 - t) / (n^3 - n)``; the p-value is the chi-square upper
    tail with ``k - 1`` degrees of freedom.  A fully tied pooled sample
    (correction factor 0) yields H = 0, p = 1.

    Raises:
        ValueError: With fewer than two groups.
    """
    if len(groups) < 2:
        raise ValueError("kruskal_wallis needs at least 2 groups")
    sizes = [len(g) for g in groups]
    pooled = np.concatenate([g.values for g in groups])
    n = pooled.size
    ranks = _midranks(pooled)
    h = 0.0
    start = 0
    for sz in sizes:
        r = float(np.sum(ranks[start : start + sz]))
        h += r * r / sz
        start += sz
    h = 12.0 / (n * (n + 1)) * h - 3.0 * (n + 1)
    correction = 1.0 - _tie_term(pooled) / (n**3 - n)
    if correction <= 0.0:
        h, p = 0.0, 1.0
    else:
        h /= correction
        h = max(h, 0.0)
        p = chi_square_sf(h, len(groups) - 1)
    return GroupComparison(
        test="kruskal_wallis",
        statistic=float(h),
        p_value=float(p),
        group_names=[g.name for g in groups],
        n_per_group=sizes,
        method="chi_square",
    )


# ---------------------------------------------------------------------------
# Chi-square survival function via the regularized incomplete gamma function
# ---------------------------------------------------------------------------

_GAMMA_EPS = 1e-15
_GAMMA_ITMAX = 500
_TINY = 1e-300


def _gamma_p_series(s: float, x: float) -> float:
    """Regularized lower incomplete gamma P(s, x) by power series; x < s + 1."""
    term = 1.0 / s
    total = term
    a = s
    for _ in range(_GAMMA_ITMAX):
        a += 1.0
        term *= x / a
        total += term
        if abs(term) < abs(total) * _GAMMA_EPS:
            break
    return total * math.exp(-x + s * math.log(x) - math.lgamma(s))


def _gamma_q_contfrac(s: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(s, x) by Lentz continued
    fraction; x >= s + 1."""
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    f = d
    for i in range(1, _GAMMA_ITMAX + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        f *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            break
    return f * math.exp(-x + s * math.log(x) - math.lgamma(s))


def chi_square_sf(x: float, dof: int) -> float:
    """Upper-tail probability of the chi-square distribution.

    ``P(X >= x)`` with ``dof`` degrees of freedom, i.e. the regularized
    upper incomplete gamma function Q(dof / 2, x / 2).  Accurate to well
    below 1e-10 absolute error over dof <= 20, x <= 200.

    Raises:
        ValueError: If ``x < 0`` or ``dof < 1``.
    """
    if x < 0.0:
        raise ValueError(f"x must be >= 0, got {x}")
    if dof < 1:
        raise ValueError(f"dof must be >= 1, got {dof}")
    if x == 0.0:
        return 1.0
    s = dof / 2.0
    half_x = x / 2.0
    if half_x < s + 1.0:
        return min(1.0, max(0.0, 1.0 - _gamma_p_series(s, half_x)))
    return min(1.0, max(0.0, _gamma_q_contfrac(s, half_x)))
