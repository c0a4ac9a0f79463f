"""Kernel tests against exact big-integer arithmetic."""

import math

import numpy as np
import pytest

from hnet import kernels
from hnet.kernels import _fallback

try:
    from hnet.kernels import _speedups
except ImportError:
    _speedups = None


def exact_log10_sf(N, K, n, x):
    """Exact upper tail via integer binomials; the independent reference."""
    lo = max(0, K + n - N)
    hi = min(K, n)
    if x <= lo:
        return 0.0
    if x > hi:
        return float("-inf")
    num = sum(math.comb(K, i) * math.comb(N - K, n - i) for i in range(x, hi + 1))
    den = math.comb(N, n)
    return math.log10(num) - math.log10(den)


# Exact values computed once with exact_log10_sf and frozen.
FROZEN = [
    (50, 20, 15, 10, -1.8543338257990367),
    (50, 25, 25, 20, -4.6263738496101645),
    (40, 10, 30, 9, -0.6898834595996153),
    (30, 15, 15, 1, -2.7997781870681138e-09),
    (25, 5, 20, 5, -0.5348960562030474),
    (50, 50, 50, 50, 0.0),
    (50, 1, 1, 1, -1.6989700043360187),
    (33, 17, 12, 6, -0.1618118631249139),
]


@pytest.mark.parametrize("N,K,n,x,expect", FROZEN)
def test_frozen_exact_values(N, K, n, x, expect):
    assert kernels.hyp_logsf(N, K, n, x) == pytest.approx(expect, abs=1e-10)


def test_extreme_tail_against_big_integers():
    # Far tail around 1e-251; the log-space recurrence must not underflow.
    N, K, n, x = 2000, 1000, 1000, 860
    expect = -251.4322517129031  # frozen from exact_log10_sf
    assert exact_log10_sf(N, K, n, x) == pytest.approx(expect, abs=1e-9)
    assert kernels.hyp_logsf(N, K, n, x) == pytest.approx(expect, abs=1e-6)


def test_support_boundaries():
    # At or below the support minimum the tail is all the mass.
    assert kernels.hyp_logsf(20, 15, 10, 5) == 0.0  # lo = 15+10-20 = 5
    assert kernels.hyp_logsf(20, 15, 10, 0) == 0.0
    # Above the support maximum there is no mass at all.
    assert kernels.hyp_logsf(20, 15, 10, 11) == -np.inf
    # Single top term.
    want = exact_log10_sf(20, 15, 10, 10)
    assert kernels.hyp_logsf(20, 15, 10, 10) == pytest.approx(want, abs=1e-12)


def test_random_battery_vs_exact():
    rng = np.random.default_rng(20240811)
    for _ in range(400):
        N = int(rng.integers(1, 400))
        K = int(rng.integers(0, N + 1))
        n = int(rng.integers(0, N + 1))
        lo = max(0, K + n - N)
        hi = min(K, n)
        x = int(rng.integers(lo, hi + 1)) if hi >= lo else 0
        want = exact_log10_sf(N, K, n, x)
        got = kernels.hyp_logsf(N, K, n, x)
        assert got == pytest.approx(want, abs=1e-10), (N, K, n, x)


def test_monotone_in_x():
    # P(X >= x) can only shrink as the threshold rises.
    N, K, n = 120, 55, 40
    vals = [kernels.hyp_logsf(N, K, n, x) for x in range(0, min(K, n) + 1)]
    for a, b in zip(vals, vals[1:]):
        assert b <= a + 1e-12


def test_batch_matches_scalar():
    rng = np.random.default_rng(7)
    N = rng.integers(2, 500, size=300)
    K = rng.integers(0, N + 1)
    n = rng.integers(0, N + 1)
    lo = np.maximum(0, K + n - N)
    hi = np.minimum(K, n)
    x = lo + ((hi - lo) * rng.random(300)).astype(np.int64)
    out = kernels.hyp_logsf_batch(N, K, n, x)
    for j in range(300):
        assert out[j] == kernels.hyp_logsf(N[j], K[j], n[j], x[j])


@pytest.mark.skipif(_speedups is None, reason="compiled extension not built")
def test_compiled_and_fallback_agree():
    rng = np.random.default_rng(99)
    size = 500
    N = rng.integers(2, 5000, size=size)
    K = rng.integers(0, N + 1)
    n = rng.integers(0, N + 1)
    lo = np.maximum(0, K + n - N)
    hi = np.minimum(K, n)
    x = lo + ((hi - lo + 1) * rng.random(size)).astype(np.int64)
    x = np.minimum(x, hi)
    a = np.empty(size)
    b = np.empty(size)
    first = kernels._first_term(N, K, n, x)
    _speedups.tail_batch(
        np.ascontiguousarray(N, dtype=np.int64),
        np.ascontiguousarray(K, dtype=np.int64),
        np.ascontiguousarray(n, dtype=np.int64),
        np.ascontiguousarray(x, dtype=np.int64),
        np.ascontiguousarray(first), a,
    )
    _fallback.tail_batch(
        N.astype(np.int64), K.astype(np.int64),
        n.astype(np.int64), x.astype(np.int64), first, b,
    )
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)


def test_fallback_handles_empty_batch():
    out = np.empty(0)
    _fallback.tail_batch(
        np.empty(0, np.int64), np.empty(0, np.int64),
        np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0), out,
    )
    assert out.shape == (0,)
