"""Truncated Fock-space states and operators.

Everything lives on the span of |0>, ..., |dim-1>. Operators are dense complex
matrices; states are unit vectors of amplitudes. Values are immutable once
built (their arrays are flagged read-only).

The cutoff is an implementation choice: a displacement of amplitude ``alpha``
is only accepted when ``dim >= |alpha|**2 + 8*|alpha| + 16``, which keeps the
Poisson tail of a coherent state far below 1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import kernels
from .config import tolerances
from .errors import ToleranceError, TruncationError, ValidationError

__all__ = [
    "TruncatedFockSpace",
    "StateVector",
    "DensityMatrix",
    "Operator",
    "required_dim",
    "check_adequate",
    "annihilation_matrix",
    "creation_matrix",
    "number_matrix",
    "parity_matrix",
    "number_state",
    "coherent_state",
    "displacement_matrix",
    "displacement_matrix_laguerre",
    "displaced_number_state",
    "matrix_exponential",
]


def _frozen(array, dtype=np.complex128):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TruncatedFockSpace:
    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValidationError(f"Fock dimension must be an integer >= 2, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state on a truncated Fock space.

    The constructor expects unit-norm amplitudes; :meth:`normalized` rescales
    arbitrary ones and keeps the removed norm in ``norm_correction`` (1.0
    means nothing was rescaled).
    """

    space: TruncatedFockSpace
    amplitudes: np.ndarray
    norm_correction: float = 1.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.space.dim,):
            raise ValidationError(
                f"amplitude vector has shape {amps.shape}, expected ({self.space.dim},)"
            )
        if not np.all(np.isfinite(amps)):
            raise ValidationError("state amplitudes must be finite")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > tolerances().norm:
            raise ValidationError(f"state norm is {norm!r}; use StateVector.normalized")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def normalized(cls, space, amplitudes):
        amps = np.asarray(amplitudes, dtype=np.complex128)
        norm = float(np.linalg.norm(amps))
        if norm == 0.0 or not math.isfinite(norm):
            raise ValidationError("cannot normalize a zero or non-finite vector")
        return cls(space, amps / norm, norm_correction=norm)

    @property
    def dim(self):
        return self.space.dim

    @property
    def tail_mass(self):
        """Probability held by the top two Fock levels."""
        return float(np.sum(np.abs(self.amplitudes[-2:]) ** 2))

    def require_headroom(self, limit=None):
        limit = tolerances().edge_tail if limit is None else limit
        if self.tail_mass >= limit:
            raise TruncationError(
                f"state has tail mass {self.tail_mass:.3e} in the top two Fock levels "
                f"(limit {limit:.1e}); increase dim beyond {self.dim}"
            )

    def inner(self, other):
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self):
        return DensityMatrix.from_state(self)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    space: TruncatedFockSpace
    elements: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.elements, dtype=np.complex128)
        dim = self.space.dim
        if rho.shape != (dim, dim):
            raise ValidationError(f"density matrix has shape {rho.shape}, expected ({dim}, {dim})")
        if not np.all(np.isfinite(rho)):
            raise ValidationError("density matrix entries must be finite")
        tol = tolerances()
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        if herm > tol.hermitian:
            raise ValidationError(f"density matrix is not Hermitian (max |rho - rho^H| = {herm:.3e})")
        tr = complex(np.trace(rho))
        if abs(tr - 1.0) > tol.trace:
            raise ValidationError(f"density matrix trace is {tr}, expected 1")
        lowest = float(np.linalg.eigvalsh(rho)[0])
        if lowest < -tol.psd:
            raise ValidationError(f"density matrix is not positive semidefinite (eigenvalue {lowest:.3e})")
        object.__setattr__(self, "elements", _frozen(rho))

    @classmethod
    def from_state(cls, psi):
        c = psi.amplitudes
        return cls(psi.space, np.outer(c, c.conj()))

    @classmethod
    def mixture(cls, states, weights):
        weights = np.asarray(weights, dtype=float)
        if np.any(weights < 0) or weights.sum() <= 0:
            raise ValidationError("mixture weights must be nonnegative and not all zero")
        weights = weights / weights.sum()
        space = states[0].space
        rho = sum(w * np.outer(s.amplitudes, s.amplitudes.conj()) for w, s in zip(weights, states))
        # symmetrize away rounding so the Hermiticity check stays exact
        return cls(space, 0.5 * (rho + rho.conj().T))

    @property
    def dim(self):
        return self.space.dim

    @property
    def tail_mass(self):
        return float(np.real(self.elements[-1, -1] + self.elements[-2, -2]))


@dataclass(frozen=True, eq=False)
class Operator:
    space: TruncatedFockSpace
    elements: np.ndarray
    unitary: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        mat = np.asarray(self.elements, dtype=np.complex128)
        if mat.shape != (self.space.dim, self.space.dim):
            raise ValidationError(f"operator has shape {mat.shape}, expected square of size {self.space.dim}")
        if self.unitary:
            defect = unitarity_defect(mat)
            if defect > tolerances().unitary:
                raise ToleranceError(f"operator flagged unitary has max |U^H U - I| = {defect:.3e}")
        object.__setattr__(self, "elements", _frozen(mat))

    @property
    def H(self):
        return Operator(self.space, self.elements.conj().T, unitary=self.unitary)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            _same_space(self.space, other.space)
            return Operator(self.space, self.elements @ other.elements)
        if isinstance(other, StateVector):
            _same_space(self.space, other.space)
            return StateVector.normalized(self.space, self.elements @ other.amplitudes)
        return NotImplemented

    def apply(self, psi):
        """Raw product with a state's amplitudes (no renormalization)."""
        _same_space(self.space, psi.space)
        return self.elements @ psi.amplitudes


def _same_space(a, b):
    if a.dim != b.dim:
        raise ValidationError(f"dimension mismatch: {a.dim} vs {b.dim}")


def unitarity_defect(mat):
    mat = np.asarray(mat)
    return float(np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0]))))


def required_dim(alpha_abs):
    """Smallest cutoff accepted for displacements of magnitude ``alpha_abs``."""
    r = float(alpha_abs)
    return int(math.ceil(r * r + 8.0 * r + 16.0))


def check_adequate(space, alpha, what="displacement"):
    r = abs(complex(alpha))
    if not math.isfinite(r):
        raise ValidationError(f"{what} amplitude must be finite, got {alpha!r}")
    if r == 0.0:
        # D(0) is the identity at any cutoff
        return
    need = required_dim(r)
    if space.dim < need:
        raise TruncationError(
            f"{what} amplitude {complex(alpha)} needs dim >= {need}, got dim={space.dim}",
            required_dim=need,
        )


def annihilation_matrix(space):
    a = np.diag(np.sqrt(np.arange(1, space.dim, dtype=float)), k=1).astype(np.complex128)
    return Operator(space, a)


def creation_matrix(space):
    return annihilation_matrix(space).H


def number_matrix(space):
    return Operator(space, np.diag(np.arange(space.dim, dtype=float)))


def parity_matrix(space):
    """(-1)^n on the diagonal."""
    signs = np.where(np.arange(space.dim) % 2 == 0, 1.0, -1.0)
    return Operator(space, np.diag(signs), unitary=True)


def number_state(space, n):
    if int(n) != n or not 0 <= n < space.dim:
        raise ValidationError(f"Fock index n={n!r} out of range for dim={space.dim}")
    amps = np.zeros(space.dim, dtype=np.complex128)
    amps[int(n)] = 1.0
    return StateVector(space, amps)


def coherent_state(space, alpha):
    """Coherent state from its closed-form Fock amplitudes.

    The truncated vector is renormalized; the removed norm is reported in
    ``norm_correction``.
    """
    alpha = complex(alpha)
    check_adequate(space, alpha, "coherent")
    n = np.arange(space.dim)
    if alpha == 0:
        return number_state(space, 0)
    # log-space keeps alpha**n / sqrt(n!) finite for large n
    log_mag = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * np.array(
        [math.lgamma(k + 1.0) for k in n]
    )
    amps = np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))
    return StateVector.normalized(space, amps)


def matrix_exponential(op, scalar=1.0):
    """exp(scalar * op) by scaling and squaring with a Pade core.

    Accepts an :class:`Operator` or a square array. Non-finite input or
    output is rejected with the 1-norm of the scaled matrix.
    """
    if isinstance(op, Operator):
        space, mat = op.space, op.elements
    else:
        mat = np.asarray(op, dtype=np.complex128)
        space = TruncatedFockSpace(mat.shape[0])
    scaled = complex(scalar) * mat
    if not np.all(np.isfinite(scaled)):
        raise ValidationError("matrix exponential argument has non-finite entries")
    norm1 = float(np.linalg.norm(scaled, 1))
    with np.errstate(over="raise", invalid="raise"):
        try:
            result = scipy.linalg.expm(scaled)
        except FloatingPointError as exc:
            raise ToleranceError(f"matrix exponential overflowed (1-norm {norm1:.3e})") from exc
    if not np.all(np.isfinite(result)):
        raise ToleranceError(f"matrix exponential overflowed (1-norm {norm1:.3e})")
    return Operator(space, result, meta={"norm1": norm1})


def displacement_matrix(space, alpha):
    """D(alpha) = exp(alpha a^H - conj(alpha) a), via the matrix exponential."""
    alpha = complex(alpha)
    check_adequate(space, alpha)
    if alpha == 0:
        return Operator(space, np.eye(space.dim), unitary=True)
    a = annihilation_matrix(space).elements
    generator = alpha * a.conj().T - alpha.conjugate() * a
    d = matrix_exponential(generator).elements
    return Operator(space, d, unitary=True)


def displacement_matrix_laguerre(space, alpha, backend=None):
    """D(alpha) from closed-form associated-Laguerre matrix elements.

    Independent of :func:`displacement_matrix`; used to cross-check it. Only
    the low-index block (rows and columns below dim/2) is meaningful for
    comparison, since the exponential path is distorted at the cutoff.
    """
    alpha = complex(alpha)
    check_adequate(space, alpha)
    return Operator(space, kernels.displacement_elements(alpha, space.dim, backend=backend))


def displaced_number_state(space, alpha, k):
    base = number_state(space, k)
    amps = displacement_matrix(space, alpha).apply(base)
    return StateVector.normalized(space, amps)
