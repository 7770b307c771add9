"""Pure-Python fallback for the compiled kernels in ``_ext.pyx``."""

import math

import numpy as np


def displacement_elements(re, im, out):
    dim = out.shape[0]
    x = re * re + im * im
    if x == 0.0:
        out[...] = np.eye(dim)
        return
    logr = 0.5 * math.log(x)
    theta = math.atan2(im, re)
    for m in range(dim):
        for n in range(dim):
            lo, hi = (n, m) if m >= n else (m, n)
            d = hi - lo
            lag0, lag1 = 1.0, 1.0 + d - x
            if lo == 0:
                lag = lag0
            else:
                for k in range(1, lo):
                    lag0, lag1 = lag1, ((2 * k + 1 + d - x) * lag1 - (k + d) * lag0) / (k + 1)
                lag = lag1
            mag = math.exp(0.5 * (math.lgamma(lo + 1.0) - math.lgamma(hi + 1.0)) + d * logr - 0.5 * x) * lag
            phase = d * theta if m >= n else d * (math.pi - theta)
            out[m, n] = complex(mag * math.cos(phase), mag * math.sin(phase))


def parity_tally(cdf, uniforms):
    idx = np.searchsorted(cdf, uniforms, side="right")
    np.minimum(idx, cdf.shape[0] - 1, out=idx)
    return int(np.count_nonzero(idx & 1))
