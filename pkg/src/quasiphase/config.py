"""Numerical tolerances.

All defaults live in :class:`Tolerances`. Override them for a block of code
with :func:`override`::

    with override(imag_residue=1e-7):
        ...
"""

from __future__ import annotations

import contextlib
import contextvars
import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-10
    hermitian: float = 1e-12
    trace: float = 1e-10
    psd: float = 1e-10
    unitary: float = 1e-9
    imag_residue: float = 1e-9
    # tail mass allowed in the top two Fock levels
    edge_tail: float = 1e-10
    shot_tail: float = 1e-6
    # tail mass allowed at the far end of a driven orbit
    orbit_tail: float = 1e-6
    husimi_floor: float = 1e-12


_current: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "quasiphase_tolerances", default=Tolerances()
)


def tolerances() -> Tolerances:
    """Return the tolerances active in the current context."""
    return _current.get()


@contextlib.contextmanager
def override(**changes):
    token = _current.set(dataclasses.replace(_current.get(), **changes))
    try:
        yield _current.get()
    finally:
        _current.reset(token)
