"""Displaced-oscillator dynamics and autocorrelation-based Wigner sampling.

The oscillator H = omega n + beta a^H + conj(beta) a is a shifted number
operator: completing the square gives

    H = omega D^H(b) n D(b) - |beta|**2 / omega,    b = beta / omega,

so exp(-iHt) = exp(+i|beta|**2 t/omega) D^H(b) exp(-i omega t n) D(b). The
global phase in front is needed for the factored form to reproduce the
exact propagator; :func:`evolve_factored` includes it by default.

At t = pi/omega the middle factor becomes the parity P, so the
phase-corrected autocorrelation is <psi|D^H(b) P D(b)|psi>, which is
(pi/2) W(-b). The reflection b -> -b is the calibrated sign
:data:`CALIBRATED_SIGN`; :func:`calibrate_sign` re-derives it numerically.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .config import tolerances
from .errors import ToleranceError, TruncationError, ValidationError
from .fock_core import (
    StateVector,
    annihilation_matrix,
    check_adequate,
    coherent_state,
    displacement_matrix,
    matrix_exponential,
    number_state,
    Operator,
)
from .quasiprob import wigner_parity
from . import kernels

__all__ = [
    "CALIBRATED_SIGN",
    "OscillatorParams",
    "AutocorrelationSample",
    "ShotEstimate",
    "build_hamiltonian",
    "evolve_exact",
    "evolve_factored",
    "autocorrelation",
    "wigner_point_via_autocorr",
    "parity_shot_estimator",
    "calibrate_sign",
]

#: Measured point is CALIBRATED_SIGN * beta / omega. Frozen from calibrate_sign().
CALIBRATED_SIGN = -1


@dataclass(frozen=True)
class OscillatorParams:
    omega: float
    beta: complex = 0j

    def __post_init__(self):
        omega = float(self.omega)
        beta = complex(self.beta)
        if not math.isfinite(omega) or omega <= 0:
            raise ValidationError(f"omega must be a finite positive number, got {self.omega!r}")
        if not cmath.isfinite(beta):
            raise ValidationError(f"beta must be finite, got {self.beta!r}")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "beta", beta)

    @property
    def shift(self):
        """beta / omega, the dimensionless displacement."""
        return self.beta / self.omega

    @property
    def dynamical_rate(self):
        """|beta|**2 / omega: the energy offset of the shifted oscillator."""
        return abs(self.beta) ** 2 / self.omega


@dataclass(frozen=True)
class AutocorrelationSample:
    t: float
    value: complex
    phase_corrected: complex


@dataclass(frozen=True)
class ShotEstimate:
    mean: float
    stderr: float
    shots: int
    seed: int


def build_hamiltonian(space, params):
    check_adequate(space, params.shift, "drive beta/omega")
    a = annihilation_matrix(space).elements
    n = np.diag(np.arange(space.dim, dtype=float))
    h = params.omega * n + params.beta * a.conj().T + params.beta.conjugate() * a
    return Operator(space, h)


def _check_start(psi0, params, t):
    if not isinstance(psi0, StateVector):
        raise ValidationError("initial state must be a StateVector")
    if not math.isfinite(t):
        raise ValidationError(f"time must be finite, got {t!r}")
    psi0.require_headroom()
    check_adequate(psi0.space, params.shift, "drive beta/omega")


def _check_end(psi, params):
    # the state orbits -beta/omega, reaching 2|beta/omega| from its start at t = pi/omega
    if psi.tail_mass > tolerances().orbit_tail:
        raise TruncationError(
            f"evolved state has tail mass {psi.tail_mass:.3e} at the cutoff dim={psi.dim}; the orbit "
            f"reaches |alpha| ~ {2 * abs(params.shift):.3g} plus the state's extent, increase dim"
        )
    return psi


def evolve_exact(psi0, params, t):
    """exp(-iHt) psi0 by direct exponentiation of the Hamiltonian.

    Raises:
        TruncationError: the evolved state has more tail mass than the
            orbit-tail tolerance (the orbit swings out to about 2|beta/omega|).
    """
    t = float(t)
    _check_start(psi0, params, t)
    if t == 0.0:
        return psi0
    u = matrix_exponential(build_hamiltonian(psi0.space, params), -1j * t)
    return _check_end(StateVector.normalized(psi0.space, u.apply(psi0)), params)


def evolve_factored(psi0, params, t, phase_correction=True):
    """D^H(b) exp(-i omega t n) D(b) psi0, times the dynamical phase by default.

    With ``phase_correction=False`` the bare factored product is returned; it
    differs from :func:`evolve_exact` by the global factor
    exp(i |beta|**2 t / omega).
    """
    t = float(t)
    _check_start(psi0, params, t)
    space = psi0.space
    d = displacement_matrix(space, params.shift).elements
    free = np.exp(-1j * params.omega * t * np.arange(space.dim))
    amps = d.conj().T @ (free * (d @ psi0.amplitudes))
    if phase_correction:
        amps = amps * cmath.exp(1j * params.dynamical_rate * t)
    return _check_end(StateVector.normalized(space, amps), params)


def autocorrelation(psi0, params, t):
    """A(t) = <psi0|psi(t)> with and without the dynamical phase."""
    t = float(t)
    value = psi0.inner(evolve_exact(psi0, params, t))
    corrected = cmath.exp(-1j * params.dynamical_rate * t) * value
    return AutocorrelationSample(t, value, corrected)


def wigner_point_via_autocorr(psi0, params):
    """One Wigner value from the autocorrelation at half a period.

    Returns:
        tuple: ``(alpha_measured, w)`` with alpha_measured =
        CALIBRATED_SIGN * beta / omega and w = (2/pi) Re A_corrected(pi/omega).

    Raises:
        ToleranceError: the corrected autocorrelation is not real to within
            the imaginary-residue tolerance.
    """
    sample = autocorrelation(psi0, params, math.pi / params.omega)
    residue = sample.phase_corrected.imag
    limit = tolerances().imag_residue
    if abs(residue) > limit:
        raise ToleranceError(
            f"corrected autocorrelation at t=pi/omega has imaginary part {residue:.3e} > {limit:.1e}; "
            "check the truncation or the phase convention"
        )
    w = 2.0 / math.pi * sample.phase_corrected.real
    return CALIBRATED_SIGN * params.shift, w


def parity_shot_estimator(psi0, params, shots, seed):
    """Monte Carlo estimate of the parity of the displaced state D(b) psi0.

    Photon numbers are drawn from |<n|D(b)|psi0>|**2 with
    ``numpy.random.default_rng(seed)`` and (-1)**n is averaged. The same seed
    gives a bit-identical estimate on either kernel backend.
    """
    if int(shots) != shots or shots < 1:
        raise ValidationError(f"shots must be a positive integer, got {shots!r}")
    shots = int(shots)
    if not isinstance(psi0, StateVector):
        raise ValidationError("initial state must be a StateVector")
    space = psi0.space
    check_adequate(space, params.shift, "drive beta/omega")
    displaced = displacement_matrix(space, params.shift).apply(psi0)
    probs = displaced.real**2 + displaced.imag**2
    tail = float(probs[-2:].sum())
    if tail > tolerances().shot_tail:
        raise TruncationError(
            f"displaced state has tail mass {tail:.3e} > {tolerances().shot_tail:.1e}; increase dim"
        )
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    uniforms = np.random.default_rng(seed).random(shots)
    odd = kernels.parity_tally(cdf, uniforms)
    mean = (shots - 2 * odd) / shots
    if shots > 1:
        # sample variance of +-1 outcomes, ddof=1
        var = max(0.0, (1.0 - mean * mean) * shots / (shots - 1))
        stderr = math.sqrt(var / shots)
    else:
        stderr = 0.0
    return ShotEstimate(mean, stderr, shots, int(seed))


def _calibration_states(space):
    return [
        ("coherent(0.5)", coherent_state(space, 0.5)),
        ("coherent(0.3+0.4j)", coherent_state(space, 0.3 + 0.4j)),
        ("coherent(-0.6j)", coherent_state(space, -0.6j)),
        ("fock(1)", number_state(space, 1)),
    ]


def calibrate_sign(dim=64, omega=1.0, betas=(0.5, 0.2 - 0.4j, -0.3 + 0.1j, 0.7j), tol=1e-8):
    """Determine which of +-beta/omega the autocorrelation measures.

    For each calibration state and drive, the autocorrelation value is
    compared with the direct Wigner value at +beta/omega and -beta/omega.
    Asymmetric states make exactly one sign match.

    Returns:
        tuple: ``(sigma, rows)`` where rows hold (state, beta, w,
        W(+b), W(-b), matching sign).

    Raises:
        ToleranceError: a probe matches neither sign, both signs on an
            asymmetric probe, or the probes disagree on sigma.
    """
    from .fock_core import TruncatedFockSpace

    space = TruncatedFockSpace(dim)
    rows = []
    found = set()
    for label, psi in _calibration_states(space):
        for beta in betas:
            params = OscillatorParams(omega, beta * omega)
            sample = autocorrelation(psi, params, math.pi / omega)
            w = 2.0 / math.pi * sample.phase_corrected.real
            plus = wigner_parity(psi, params.shift)
            minus = wigner_parity(psi, -params.shift)
            match_plus = abs(w - plus) <= tol
            match_minus = abs(w - minus) <= tol
            if match_plus and match_minus:
                if abs(plus - minus) > tol:
                    raise ToleranceError("sign calibration ambiguous")
                sign = 0
            elif match_plus:
                sign = 1
            elif match_minus:
                sign = -1
            else:
                raise ToleranceError(f"{label}, beta={beta}: autocorrelation matches neither sign")
            if sign:
                found.add(sign)
            rows.append((label, complex(beta), w, plus, minus, sign))
    if len(found) != 1:
        raise ToleranceError(f"sign calibration not unique: {sorted(found)}")
    return found.pop(), rows
