# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernel for the upper-tail hypergeometric probability.

The tail P(X >= x) is summed directly: the caller supplies the natural-log
first term (built from log-gamma binomials) and successive terms follow
from the exact ratio

    t(i+1) / t(i) = (K - i)(n - i) / ((i + 1)(N - K - n + i + 1))

so no term is ever formed in linear space.  Summation stops once the
geometric bound on the remaining mass drops below 1e-16 of the partial sum.
"""

from libc.math cimport log, INFINITY

cdef double LN10 = 2.302585092994045684


cdef double _tail(long long N, long long K, long long n, long long x,
                  double first) nogil:
    """Natural-log upper tail P(X >= x) given the log first term."""
    cdef long long lo = K + n - N
    cdef long long hi = K if K < n else n
    cdef long long i
    cdef double acc, cur, shift, r, rem
    if lo < 0:
        lo = 0
    if x <= lo:
        return 0.0
    if x > hi:
        return -INFINITY
    acc = 1.0
    cur = 1.0
    shift = 0.0
    for i in range(x, hi):
        r = ((<double> (K - i)) * (<double> (n - i))) / \
            ((<double> (i + 1)) * (<double> (N - K - n + i + 1)))
        cur *= r
        acc += cur
        if r < 1.0:
            rem = cur * r / (1.0 - r)
            if rem < acc * 1e-16:
                break
        if acc > 1e280:
            shift += log(acc)
            cur /= acc
            acc = 1.0
    first = first + shift + log(acc)
    if first > 0.0:
        first = 0.0
    return first


def tail_batch(long long[::1] N, long long[::1] K, long long[::1] n,
               long long[::1] x, double[::1] first, double[::1] out):
    """Fill ``out`` with log10 P(X >= x) element-wise; arrays share length."""
    cdef Py_ssize_t m = N.shape[0]
    cdef Py_ssize_t j
    if (K.shape[0] != m or n.shape[0] != m or x.shape[0] != m
            or first.shape[0] != m or out.shape[0] != m):
        raise ValueError("batch arrays must share one length")
    with nogil:
        for j in range(m):
            out[j] = _tail(N[j], K[j], n[j], x[j], first[j]) / LN10
