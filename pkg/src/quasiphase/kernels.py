"""Hot-loop kernels with a compiled backend and a pure-Python fallback.

The compiled module ``quasiphase._ext`` is used when it imports; otherwise the
functions from ``quasiphase._pykernels`` are used. Setting the environment
variable ``QUASIPHASE_PURE_PYTHON=1`` forces the fallback.
"""

import os

import numpy as np

from . import _pykernels

_ext = None
if os.environ.get("QUASIPHASE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ext
    except ImportError:  # extension not built
        _ext = None

BACKEND = "cython" if _ext is not None else "python"
_impl = _ext if _ext is not None else _pykernels


def displacement_elements(alpha, dim, backend=None):
    """Return the dim x dim matrix <m|D(alpha)|n> from Laguerre polynomials.

    ``backend`` may be ``"cython"`` or ``"python"`` to pick an implementation
    explicitly (used by the tests and the benchmark).
    """
    out = np.empty((dim, dim), dtype=np.complex128)
    alpha = complex(alpha)
    _select(backend).displacement_elements(alpha.real, alpha.imag, out)
    return out


def parity_tally(cdf, uniforms, backend=None):
    """Number of odd Fock indices sampled by inverse-CDF lookup of ``uniforms``."""
    cdf = np.ascontiguousarray(cdf, dtype=np.float64)
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    return int(_select(backend).parity_tally(cdf, uniforms))


def _select(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _pykernels
    if backend == "cython":
        if _ext is None:
            raise ImportError("compiled extension quasiphase._ext is not available")
        return _ext
    raise ValueError(f"unknown backend {backend!r}")
