"""s-parametrized quasiprobability distributions F(alpha, s).

Three algebraically identical evaluation routes are provided: a truncated
series over displaced number states (:func:`f_series`), a trace against the
diagonal operator ((s+1)/(s-1))**n (:func:`f_trace`) and a pure-state
expectation (:func:`f_pure`). Husimi Q (s = -1) and Wigner (s = 0) have their
own direct routes, :func:`husimi_q` and :func:`wigner_parity`.

All routes share the displacement convention D(alpha) = exp(alpha a^H -
conj(alpha) a) and evaluate at the same phase-space point alpha.
"""

from __future__ import annotations

import contextvars
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import tolerances
from .errors import ToleranceError, TruncationError, ValidationError
from .fock_core import (
    DensityMatrix,
    StateVector,
    check_adequate,
    coherent_state,
    displacement_matrix,
    required_dim,
)

__all__ = [
    "UncontrolledRegimeWarning",
    "GridSpec",
    "QuasiDistributionMap",
    "check_s",
    "f_series",
    "f_trace",
    "f_pure",
    "husimi_q",
    "wigner_parity",
    "evaluate_point",
    "evaluate_grid",
]

WIGNER_BOUND = 2.0 / math.pi


class UncontrolledRegimeWarning(UserWarning):
    """Raised for 0 < s < 1, where the truncated series is not a controlled approximation."""


def check_s(s):
    """Validate s and return True when it lies in the controlled range [-1, 0]."""
    s = float(s)
    if not math.isfinite(s):
        raise ValidationError(f"s must be finite, got {s!r}")
    if s >= 1.0:
        raise ValidationError(
            f"s={s} rejected: the s=1 (Glauber-Sudarshan) distribution is singular "
            "because of the 1/(1-s) prefactor; only s < 1 is supported"
        )
    if s > 0.0:
        warnings.warn(
            f"s={s} lies in (0, 1): |(s+1)/(s-1)| > 1, the truncated sum is finite but uncontrolled",
            UncontrolledRegimeWarning,
            stacklevel=3,
        )
        return False
    return True


def _ratio(s):
    return (s + 1.0) / (s - 1.0)


def _prefactor(s):
    return 2.0 / (math.pi * (1.0 - s))


def _as_density(state):
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, StateVector):
        return DensityMatrix.from_state(state)
    raise ValidationError(f"expected DensityMatrix or StateVector, got {type(state).__name__}")


def _real(value, what):
    value = complex(value)
    limit = tolerances().imag_residue
    if abs(value.imag) > limit:
        raise ToleranceError(f"{what} has imaginary residue {value.imag:.3e} > {limit:.1e}")
    return value.real


def _displaced_diagonal(rho, alpha):
    """Diagonal of D^H(alpha) rho D(alpha), complex, before any reality check."""
    d = displacement_matrix(rho.space, alpha).elements
    # diag(D^H rho D)_k = sum_ij conj(D_ik) rho_ij D_jk
    return np.einsum("ik,ij,jk->k", d.conj(), rho.elements, d)


def _weights(s, count):
    # numpy evaluates 0.0**0 as 1.0, which is the convention needed at s = -1
    return _ratio(s) ** np.arange(count, dtype=float)


def f_series(rho, alpha, s, k_max=None):
    """Series over displaced number states, truncated after ``k_max`` terms.

    Args:
        rho: density matrix (or a pure state, converted to its projector).
        alpha: complex phase-space point.
        s: distribution parameter, s < 1.
        k_max: number of terms kept; defaults to the full dimension.

    Returns:
        float: F(alpha, s).
    """
    rho = _as_density(rho)
    check_s(s)
    s = float(s)
    k_max = rho.dim if k_max is None else int(k_max)
    if not 1 <= k_max <= rho.dim:
        raise ValidationError(f"k_max={k_max} must lie in [1, {rho.dim}]")
    diag = _displaced_diagonal(rho, alpha)[:k_max]
    total = complex(np.sum(_weights(s, k_max) * diag))
    return _prefactor(s) * _real(total, "F(alpha, s) series")


def f_trace(rho, alpha, s):
    """Trace of ((s+1)/(s-1))**n against the displaced density matrix."""
    rho = _as_density(rho)
    check_s(s)
    s = float(s)
    check_adequate(rho.space, alpha)
    d = displacement_matrix(rho.space, alpha).elements
    weight_op = np.diag(_weights(s, rho.dim))
    displaced = d.conj().T @ rho.elements @ d
    return _prefactor(s) * _real(np.trace(weight_op @ displaced), "F(alpha, s) trace")


def f_pure(psi, alpha, s):
    """<psi| D(alpha) ((s+1)/(s-1))**n D^H(alpha) |psi> with the usual prefactor.

    Equal to ``f_trace(psi.projector(), alpha, s)`` at the same alpha, by
    cyclicity of the trace.
    """
    if not isinstance(psi, StateVector):
        raise ValidationError("f_pure needs a StateVector")
    check_s(s)
    s = float(s)
    d = displacement_matrix(psi.space, alpha).elements
    phi = d.conj().T @ psi.amplitudes
    value = np.vdot(phi, _weights(s, psi.dim) * phi)
    return _prefactor(s) * _real(value, "F(alpha, s) pure")


def husimi_q(rho, alpha):
    """(1/pi) <alpha|rho|alpha> from the closed-form coherent state."""
    rho = _as_density(rho)
    c = coherent_state(rho.space, alpha).amplitudes
    value = _real(np.vdot(c, rho.elements @ c), "Husimi Q") / math.pi
    floor = tolerances().husimi_floor
    if value < -floor:
        raise ValidationError(f"Husimi value {value:.3e} is negative: rho is not positive semidefinite")
    return value


def wigner_parity(state, alpha):
    """(2/pi) Tr[D(alpha) P D^H(alpha) rho], P the photon-number parity."""
    if isinstance(state, StateVector):
        d = displacement_matrix(state.space, alpha).elements
        phi = d.conj().T @ state.amplitudes
        signs = np.where(np.arange(state.dim) % 2 == 0, 1.0, -1.0)
        return WIGNER_BOUND * float(np.sum(signs * (phi.real**2 + phi.imag**2)))
    rho = _as_density(state)
    diag = _displaced_diagonal(rho, alpha)
    signs = np.where(np.arange(rho.dim) % 2 == 0, 1.0, -1.0)
    return WIGNER_BOUND * _real(np.sum(signs * diag), "Wigner parity value")


def evaluate_point(state, alpha, s):
    """F(alpha, s), routed through the fast path at s = -1 and s = 0."""
    s = float(s)
    if s == -1.0:
        return husimi_q(state, alpha)
    if s == 0.0:
        return wigner_parity(state, alpha)
    return f_trace(_as_density(state), alpha, s)


@dataclass(frozen=True)
class GridSpec:
    """Rectangular lattice of alpha values; counts include both endpoints."""

    re_min: float
    re_max: float
    re_count: int
    im_min: float
    im_max: float
    im_count: int

    def __post_init__(self):
        for name in ("re", "im"):
            lo, hi, n = getattr(self, f"{name}_min"), getattr(self, f"{name}_max"), getattr(self, f"{name}_count")
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValidationError(f"{name} grid bounds must be finite")
            if int(n) != n or n < 1:
                raise ValidationError(f"{name} grid count must be a positive integer, got {n!r}")
            if hi < lo:
                raise ValidationError(f"{name} grid max {hi} is below min {lo}")
            object.__setattr__(self, f"{name}_count", int(n))
            object.__setattr__(self, f"{name}_min", float(lo))
            object.__setattr__(self, f"{name}_max", float(hi))

    @classmethod
    def parse(cls, text):
        """Parse ``re_min:re_max:n,im_min:im_max:n``."""
        try:
            re_part, im_part = text.split(",")
            r = [x.strip() for x in re_part.split(":")]
            i = [x.strip() for x in im_part.split(":")]
            if len(r) != 3 or len(i) != 3:
                raise ValueError
            return cls(float(r[0]), float(r[1]), int(r[2]), float(i[0]), float(i[1]), int(i[2]))
        except ValueError as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"grid must look like min:max:n,min:max:n, got {text!r}") from None

    @classmethod
    def square(cls, half_width, count):
        return cls(-half_width, half_width, count, -half_width, half_width, count)

    @property
    def shape(self):
        return (self.im_count, self.re_count)

    @property
    def size(self):
        return self.re_count * self.im_count

    @property
    def re_axis(self):
        return np.linspace(self.re_min, self.re_max, self.re_count)

    @property
    def im_axis(self):
        return np.linspace(self.im_min, self.im_max, self.im_count)

    @property
    def cell_area(self):
        dx = (self.re_max - self.re_min) / (self.re_count - 1) if self.re_count > 1 else 1.0
        dy = (self.im_max - self.im_min) / (self.im_count - 1) if self.im_count > 1 else 1.0
        return dx * dy

    def points(self):
        """Flat row-major array of alpha values (Re fastest, Im increasing by row)."""
        re, im = np.meshgrid(self.re_axis, self.im_axis)
        return (re + 1j * im).ravel()

    def corners(self):
        return [complex(x, y) for y in (self.im_min, self.im_max) for x in (self.re_min, self.re_max)]

    def farthest_corner(self):
        return max(self.corners(), key=abs)

    def required_dim(self):
        return required_dim(abs(self.farthest_corner()))

    def to_dict(self):
        return {
            "re_min": self.re_min,
            "re_max": self.re_max,
            "re_count": self.re_count,
            "im_min": self.im_min,
            "im_max": self.im_max,
            "im_count": self.im_count,
        }

    def flag(self):
        return f"{self.re_min:g}:{self.re_max:g}:{self.re_count},{self.im_min:g}:{self.im_max:g}:{self.im_count}"


@dataclass(frozen=True, eq=False)
class QuasiDistributionMap:
    s: float
    grid: GridSpec
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            vals = vals.reshape(self.grid.shape)
        if not np.all(np.isfinite(vals)):
            raise ToleranceError("quasiprobability map contains non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "s", float(self.s))

    def riemann_sum(self):
        """Sum of values times cell area: the plain grid quadrature."""
        return float(np.sum(self.values) * self.grid.cell_area)


def _check_grid_adequate(space, grid):
    corner = grid.farthest_corner()
    need = required_dim(abs(corner))
    if space.dim < need:
        raise TruncationError(
            f"grid corner alpha={corner} needs dim >= {need}, got dim={space.dim}",
            required_dim=need,
        )


def evaluate_grid(state, s, grid, workers=None, descriptor=None):
    """Fill a :class:`QuasiDistributionMap` point by point.

    Args:
        state: StateVector or DensityMatrix.
        s: distribution parameter.
        grid: GridSpec.
        workers: thread count for data-parallel evaluation; output is
            identical to the sequential run.
        descriptor: free-form state label stored in the metadata.
    """
    controlled = check_s(s)
    s = float(s)
    _check_grid_adequate(state.space, grid)
    if isinstance(state, DensityMatrix) or s not in (0.0, -1.0):
        target = _as_density(state)
    else:
        target = state
    points = grid.points()

    def one(alpha):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UncontrolledRegimeWarning)
            return evaluate_point(target, alpha, s)

    if workers and workers > 1:
        ctx = contextvars.copy_context()
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda a: ctx.copy().run(one, a), points))
    else:
        values = [one(alpha) for alpha in points]
    metadata = {
        "dim": state.dim,
        "state": descriptor,
        "controlled": controlled,
        "tail_mass": state.tail_mass,
    }
    return QuasiDistributionMap(s, grid, np.reshape(values, grid.shape), metadata)
