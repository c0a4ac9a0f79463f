"""Pure numpy implementation of the batch tail kernel.

Mirrors the compiled extension: the caller supplies the natural-log first
term and the tail is accumulated with the exact term ratio, in log space
with periodic renormalisation.  The loop below is vectorised over the
batch, and elements drop out as soon as their remaining tail mass is
negligible.
"""

import numpy as np

LN10 = 2.302585092994045684


def tail_batch(N, K, n, x, first, out):
    """Fill ``out`` with log10 P(X >= x) element-wise.

    ``N, K, n, x`` are int64 arrays of one shared length, ``first`` holds
    the natural-log first tail term for each element, ``out`` is float64.
    """
    m = N.shape[0]
    if not (K.shape[0] == n.shape[0] == x.shape[0] == first.shape[0]
            == out.shape[0] == m):
        raise ValueError("batch arrays must share one length")
    if m == 0:
        return
    lo = np.maximum(0, K + n - N)
    hi = np.minimum(K, n)
    out[:] = 0.0
    out[x > hi] = -np.inf
    active = (x > lo) & (x <= hi)
    if not active.any():
        return

    idx = np.flatnonzero(active)
    Nf = N[idx].astype(np.float64)
    Kf = K[idx].astype(np.float64)
    nf = n[idx].astype(np.float64)

    ln_sum = np.zeros(idx.shape[0])
    acc = np.ones(idx.shape[0])
    cur = np.ones(idx.shape[0])
    shift = np.zeros(idx.shape[0])
    pos = np.arange(idx.shape[0])
    i = x[idx].astype(np.float64)
    hi_f = hi[idx].astype(np.float64)
    while pos.shape[0]:
        live = i[pos] < hi_f[pos]
        if not live.all():
            fin = pos[~live]
            ln_sum[fin] = shift[fin] + np.log(acc[fin])
            pos = pos[live]
            if pos.shape[0] == 0:
                break
        p = pos
        r = ((Kf[p] - i[p]) * (nf[p] - i[p])) / \
            ((i[p] + 1.0) * (Nf[p] - Kf[p] - nf[p] + i[p] + 1.0))
        cur[p] = cur[p] * r
        acc[p] = acc[p] + cur[p]
        i[p] += 1.0
        with np.errstate(divide="ignore", over="ignore"):
            conv = (r < 1.0) & (cur[p] * r / (1.0 - r) < acc[p] * 1e-16)
        if conv.any():
            fin = p[conv]
            ln_sum[fin] = shift[fin] + np.log(acc[fin])
            pos = p[~conv]
        big = acc[pos] > 1e280
        if big.any():
            b = pos[big]
            shift[b] += np.log(acc[b])
            cur[b] /= acc[b]
            acc[b] = 1.0

    ln_p = np.minimum(first[idx] + ln_sum, 0.0)
    out[idx] = ln_p / LN10
