# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Mirrors ``_pykernels`` loop for loop."""

from libc.math cimport lgamma, exp, log, cos, sin, sqrt, atan2, M_PI


def displacement_elements(double re, double im, double complex[:, ::1] out):
    """Fill ``out`` with <m|D(alpha)|n> from associated Laguerre polynomials."""
    cdef Py_ssize_t dim = out.shape[0]
    cdef Py_ssize_t m, n, k, lo, hi, d
    cdef double x = re * re + im * im
    cdef double r = sqrt(x)
    cdef double theta = atan2(im, re)
    cdef double lag0, lag1, lag2, lag, mag, phase
    if x == 0.0:
        for m in range(dim):
            for n in range(dim):
                out[m, n] = 1.0 if m == n else 0.0
        return
    cdef double logr = log(r)
    for m in range(dim):
        for n in range(dim):
            if m >= n:
                lo = n
                hi = m
            else:
                lo = m
                hi = n
            d = hi - lo
            lag0 = 1.0
            lag1 = 1.0 + d - x
            if lo == 0:
                lag = lag0
            else:
                for k in range(1, lo):
                    lag2 = ((2 * k + 1 + d - x) * lag1 - (k + d) * lag0) / (k + 1)
                    lag0 = lag1
                    lag1 = lag2
                lag = lag1
            mag = exp(0.5 * (lgamma(lo + 1.0) - lgamma(hi + 1.0)) + d * logr - 0.5 * x) * lag
            if m >= n:
                phase = d * theta
            else:
                phase = d * (M_PI - theta)
            out[m, n] = mag * cos(phase) + 1j * mag * sin(phase)


def parity_tally(const double[::1] cdf, const double[::1] uniforms):
    """Count odd photon numbers drawn by inverse-CDF search of ``uniforms``."""
    cdef Py_ssize_t dim = cdf.shape[0]
    cdef Py_ssize_t shots = uniforms.shape[0]
    cdef Py_ssize_t i, lo, hi, mid
    cdef long odd = 0
    cdef double u
    for i in range(shots):
        u = uniforms[i]
        # first index with cdf[idx] > u (searchsorted side='right')
        lo = 0
        hi = dim
        while lo < hi:
            mid = (lo + hi) >> 1
            if cdf[mid] <= u:
                lo = mid + 1
            else:
                hi = mid
        if lo >= dim:
            lo = dim - 1
        odd += lo & 1
    return odd
