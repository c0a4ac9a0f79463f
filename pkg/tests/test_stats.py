"""Pair statistics against hand counts, exact enumeration and scipy."""

import itertools
import math

import numpy as np
import pytest
from scipy.stats import mannwhitneyu

from hnet.errors import DegenerateSplit, InvalidCounts, SameFeaturePair
from hnet.ingest import CategoryColumn
from hnet.stats import PairCounts, hypergeom_sf, mann_whitney, pair_counts


def cat(feature, label, bits, present=None):
    bits = np.asarray(bits, dtype=bool)
    present = (np.ones_like(bits) if present is None
               else np.asarray(present, dtype=bool))
    return CategoryColumn((feature,), (label,), bits, present,
                          int(bits.sum()))


# --- PairCounts -----------------------------------------------------------

def test_counts_validation():
    PairCounts(N=10, K=4, n=5, x=2)
    with pytest.raises(InvalidCounts):
        PairCounts(N=10, K=11, n=5, x=2)
    with pytest.raises(InvalidCounts):
        PairCounts(N=10, K=4, n=5, x=5)  # x > min(K, n)
    with pytest.raises(InvalidCounts):
        PairCounts(N=10, K=8, n=7, x=4)  # x < K + n - N
    with pytest.raises(InvalidCounts):
        PairCounts(N=5, K=2, n=-1, x=0)


def test_hypergeom_sf_matches_kernel_value():
    # P(X >= 10) for N=50, K=20, n=15; frozen from exact integer arithmetic.
    assert hypergeom_sf(PairCounts(50, 20, 15, 10)) == pytest.approx(
        -1.8543338257990367, abs=1e-10)


# --- pair_counts ----------------------------------------------------------

def test_pair_counts_hand_example():
    a = cat("f", "x", [1, 1, 1, 0, 0, 0, 1, 0])
    b = cat("g", "y", [1, 0, 1, 1, 0, 0, 0, 0])
    c = pair_counts(a, b)
    assert (c.N, c.K, c.n, c.x) == (8, 3, 4, 2)


def test_pair_counts_pairwise_complete():
    a = cat("f", "x", [1, 1, 0, 0, 1, 0], present=[1, 1, 1, 1, 0, 1])
    b = cat("g", "y", [1, 0, 1, 0, 1, 1], present=[1, 1, 1, 0, 1, 1])
    c = pair_counts(a, b)
    # rows 0..2 and 5 are complete for both
    assert (c.N, c.K, c.n, c.x) == (4, 3, 2, 1)


def test_pair_counts_same_feature_raises():
    a = cat("f", "x", [1, 0, 0])
    b = cat("f", "y", [0, 1, 0])
    with pytest.raises(SameFeaturePair):
        pair_counts(a, b)


def test_pair_counts_shared_combination_parent_raises():
    a = CategoryColumn(("f", "g"), ("x", "y"),
                       np.array([True, False]), np.array([True, True]), 1)
    b = cat("g", "z", [0, 1])
    with pytest.raises(SameFeaturePair):
        pair_counts(a, b)


def test_pair_counts_symmetry():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(4, 40))
        a = cat("f", "x", rng.random(n) < 0.4, rng.random(n) < 0.9)
        b = cat("g", "y", rng.random(n) < 0.5, rng.random(n) < 0.9)
        ab = pair_counts(a, b)
        ba = pair_counts(b, a)
        assert ab.N == ba.N and ab.x == ba.x
        assert (ab.K, ab.n) == (ba.n, ba.K)


# --- mann_whitney ---------------------------------------------------------

def split_of(bits, present=None):
    return cat("s", "m", bits, present)


def exact_two_sided_p(g1, g0):
    """Permutation distribution of U, small inputs only."""
    pooled = np.concatenate([g1, g0])
    n1 = len(g1)
    ranks = np.argsort(np.argsort(pooled))  # distinct values only
    obs = u_of(g1, g0)
    mu = n1 * len(g0) / 2.0
    hits = 0
    total = 0
    for idx in itertools.combinations(range(len(pooled)), n1):
        sel = np.zeros(len(pooled), dtype=bool)
        sel[list(idx)] = True
        u = u_of(pooled[sel], pooled[~sel])
        if abs(u - mu) >= abs(obs - mu) - 1e-12:
            hits += 1
        total += 1
    return hits / total


def u_of(g1, g0):
    u = 0.0
    for a in g1:
        for b in g0:
            u += 1.0 if a > b else (0.5 if a == b else 0.0)
    return u


def test_tiny_case_against_exact_enumeration():
    vals = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    sp = split_of([0, 0, 0, 1, 1, 1])
    logp, direction = mann_whitney(vals, sp)
    assert direction == "higher"
    exact = exact_two_sided_p(vals[3:], vals[:3])
    assert exact == pytest.approx(0.1)
    # frozen approximation value; must sit within 0.03 of the exact p
    assert 10 ** logp == pytest.approx(0.08085559837005224, abs=1e-12)
    assert abs(10 ** logp - exact) < 0.03


def test_exact_enumeration_battery():
    rng = np.random.default_rng(23)
    for _ in range(20):
        n = int(rng.integers(6, 10))
        k = int(rng.integers(2, n - 2 + 1))
        vals = rng.permutation(np.arange(n, dtype=float) * 1.7)
        bits = np.zeros(n, dtype=bool)
        bits[rng.choice(n, k, replace=False)] = True
        logp, _ = mann_whitney(vals, split_of(bits))
        exact = exact_two_sided_p(vals[bits], vals[~bits])
        assert abs(10 ** logp - exact) < 0.05


def test_against_scipy_asymptotic():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(5, 60))
        k = int(rng.integers(2, n - 1))
        if rng.random() < 0.5:
            vals = rng.normal(size=n)
        else:
            vals = rng.integers(0, 6, size=n).astype(float)
        if np.unique(vals).size == 1:
            continue
        bits = np.zeros(n, dtype=bool)
        bits[rng.choice(n, k, replace=False)] = True
        got, _ = mann_whitney(vals, split_of(bits))
        ref = mannwhitneyu(vals[bits], vals[~bits],
                           alternative="two-sided", method="asymptotic",
                           use_continuity=True)
        want = math.log10(ref.pvalue)
        assert got == pytest.approx(want, abs=1e-10)


def test_direction_tags():
    vals = np.array([1.0, 2.0, 3.0, 10.0, 11.0, 12.0])
    hi, d_hi = mann_whitney(vals, split_of([0, 0, 0, 1, 1, 1]))
    lo, d_lo = mann_whitney(vals, split_of([1, 1, 1, 0, 0, 0]))
    assert d_hi == "higher" and d_lo == "lower"
    assert hi == pytest.approx(lo)  # two-sided p ignores orientation


def test_missing_values_are_dropped():
    vals = np.array([1.0, np.nan, 2.0, 3.0, 10.0, 11.0, np.nan, 12.0])
    bits = [0, 1, 0, 0, 1, 1, 0, 1]
    logp, _ = mann_whitney(vals, split_of(bits))
    ref, _ = mann_whitney(np.array([1.0, 2.0, 3.0, 10.0, 11.0, 12.0]),
                          split_of([0, 0, 0, 1, 1, 1]))
    assert logp == pytest.approx(ref)


def test_rows_outside_split_presence_are_dropped():
    vals = np.arange(8, dtype=float)
    present = [1, 1, 1, 1, 1, 1, 0, 0]
    a = mann_whitney(vals, split_of([0, 0, 0, 1, 1, 1, 1, 1], present))
    b = mann_whitney(vals[:6], split_of([0, 0, 0, 1, 1, 1]))
    assert a[0] == pytest.approx(b[0])


def test_degenerate_split_raises():
    vals = np.arange(6, dtype=float)
    with pytest.raises(DegenerateSplit):
        mann_whitney(vals, split_of([1, 0, 0, 0, 0, 0]))
    with pytest.raises(DegenerateSplit):
        mann_whitney(vals, split_of([1, 1, 1, 1, 1, 0]))


def test_constant_values_give_p_one():
    vals = np.full(10, 3.25)
    logp, direction = mann_whitney(vals, split_of([1] * 5 + [0] * 5))
    assert logp == 0.0
    assert direction == "higher"
