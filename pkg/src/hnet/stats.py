"""Pair statistics: hypergeometric enrichment and rank comparison.

All p-values live in log10 space end to end; nothing here ever forms a
linear probability that could underflow.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr
from scipy.stats import rankdata

from . import kernels
from .errors import DegenerateSplit, InvalidCounts, SameFeaturePair

LN10 = math.log(10.0)

HIGHER = "higher"
LOWER = "lower"


@dataclass(frozen=True)
class PairCounts:
    """Contingency counts for one response/candidate pair.

    N: rows where both sides are observed; K: candidate positives among
    them; n: response positives among them; x: joint positives.
    """

    N: int
    K: int
    n: int
    x: int

    def __post_init__(self):
        if not (0 <= self.K <= self.N and 0 <= self.n <= self.N):
            raise InvalidCounts(
                f"K={self.K}, n={self.n} must lie in [0, N={self.N}]")
        lo = max(0, self.K + self.n - self.N)
        hi = min(self.K, self.n)
        if not (lo <= self.x <= hi):
            raise InvalidCounts(
                f"x={self.x} outside its support [{lo}, {hi}] "
                f"for N={self.N}, K={self.K}, n={self.n}")


def hypergeom_sf(counts):
    """log10 P(X >= x): the enrichment tail for one pair of counts."""
    return kernels.hyp_logsf(counts.N, counts.K, counts.n, counts.x)


def pair_counts(response, candidate):
    """Contingency counts over pairwise-complete rows for two categories.

    Raises SameFeaturePair when the two categories share a parent feature;
    such pairs are structurally dependent and never tested.
    """
    if set(response.parent_features) & set(candidate.parent_features):
        raise SameFeaturePair(
            f"{response.name} and {candidate.name} share a parent feature")
    both = response.present & candidate.present
    return PairCounts(
        N=int(both.sum()),
        K=int((candidate.bits & both).sum()),
        n=int((response.bits & both).sum()),
        x=int((response.bits & candidate.bits & both).sum()),
    )


def mann_whitney(values, split):
    """Two-sided rank test of a numeric vector split by a category.

    values: float array with NaN marking missing rows.  split: the
    CategoryColumn that divides rows into members and non-members.
    Returns (log10 p, direction) where direction says whether members sit
    higher or lower than non-members (ties go to 'higher').

    The normal approximation is used with tie correction and a 0.5
    continuity correction toward the mean; a split with all values equal
    has no evidence either way and returns p = 1.
    """
    values = np.asarray(values, dtype=np.float64)
    mask = np.isfinite(values) & split.present
    member = mask & split.bits
    other = mask & ~split.bits
    g1 = values[member]
    g0 = values[other]
    n1 = g1.shape[0]
    n0 = g0.shape[0]
    if n1 < 2 or n0 < 2:
        raise DegenerateSplit(
            f"split {split.name} leaves groups of {n1} and {n0}")
    direction = HIGHER if np.median(g1) >= np.median(g0) else LOWER

    combined = np.concatenate([g1, g0])
    ranks = rankdata(combined)
    u1 = n1 * n0 + n1 * (n1 + 1) / 2.0 - ranks[:n1].sum()
    mu = n1 * n0 / 2.0
    nt = n1 + n0
    _, tie_counts = np.unique(combined, return_counts=True)
    tie_term = float((tie_counts.astype(np.float64) ** 3 - tie_counts).sum())
    var = (n1 * n0 / 12.0) * ((nt + 1) - tie_term / (nt * (nt - 1.0)))
    if var <= 0.0:
        return 0.0, direction
    sigma = math.sqrt(var)
    diff = u1 - mu
    if diff > 0:
        diff -= 0.5
    elif diff < 0:
        diff += 0.5
    z = diff / sigma
    log10_p = (math.log(2.0) + log_ndtr(-abs(z))) / LN10
    return min(0.0, float(log10_p)), direction
