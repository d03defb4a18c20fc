"""Exact resonant, lossless solution via the displacement transformation.

On resonance the driven Hamiltonian is ``g D^+(gamma) H_JC D(gamma)`` with
``gamma = drive / 2g``, so the state is a standard Jaynes-Cummings evolution
of ``|e>|gamma_tilde>`` (``gamma_tilde = gamma + alpha``) displaced back by
``D(-gamma)``.  Every function here accepts a scalar or an array of times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import ConfigError, TruncationOverflowError, UndefinedRevivalError
from .hilbert import DEFAULT_CUTOFF, TAIL_TOLERANCE, ModelParams, displacement_op

SERIES_TOLERANCE = 1e-12
COMPENSATION_TOLERANCE = 1e-12
_LOG_SPACE_FROM = 30
_PAD_LEVELS = 16


def series_cutoff(gamma_tilde: complex) -> int:
    """Smallest ``N`` whose Poisson tail beyond ``N`` is below 1e-12."""
    lam = abs(gamma_tilde) ** 2
    N = max(1, int(lam))
    while poisson.sf(N, lam) >= SERIES_TOLERANCE:
        N += 1
    return N


@dataclass(frozen=True)
class ClosedFormContext:
    gamma: complex
    gamma_tilde: complex
    g: float
    series_cutoff: int
    fock_cutoff: int = DEFAULT_CUTOFF

    @classmethod
    def create(cls, gamma: complex, gamma_tilde: complex, g: float, fock_cutoff: int = DEFAULT_CUTOFF):
        return cls(complex(gamma), complex(gamma_tilde), float(g), series_cutoff(gamma_tilde), int(fock_cutoff))

    @classmethod
    def from_params(cls, params: ModelParams) -> "ClosedFormContext":
        """Context for ``params``; losses are ignored, detunings are rejected."""
        if params.delta != 0.0:
            raise ConfigError("delta", "the closed form exists only for delta = 0")
        if params.big_delta != 0.0:
            raise ConfigError("big_delta", "the closed form exists only for big_delta = 0")
        return cls.create(params.gamma, params.gamma_tilde, params.g, params.fock_cutoff)

    def weights(self) -> np.ndarray:
        """``|C_n|^2`` for ``n = 0..N``."""
        return np.abs(cn_coeffs(self.gamma_tilde, self.series_cutoff)) ** 2


def cn_coeff(gamma_tilde: complex, n: int) -> complex:
    """Coherent-state amplitude ``exp(-|z|^2/2) z^n / sqrt(n!)``."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    z = complex(gamma_tilde)
    if z == 0:
        return 1.0 + 0j if n == 0 else 0j
    if n <= _LOG_SPACE_FROM:
        return complex(np.exp(-0.5 * abs(z) ** 2) * z**n / math.sqrt(math.factorial(n)))
    log_mod = -0.5 * abs(z) ** 2 + n * math.log(abs(z)) - 0.5 * float(gammaln(n + 1))
    return complex(math.exp(log_mod) * np.exp(1j * n * np.angle(z)))


def cn_coeffs(gamma_tilde: complex, N: int) -> np.ndarray:
    return np.array([cn_coeff(gamma_tilde, n) for n in range(N + 1)], dtype=complex)


def _grid(ctx: ClosedFormContext, tau):
    # photon-ladder index k = 1..N+1 carries weight |C_{k-1}|^2
    tau = np.asarray(tau, dtype=float)
    k = np.arange(1, ctx.series_cutoff + 2, dtype=float)
    xi = ctx.g * tau[..., None]
    return tau, k, xi, ctx.weights()


def _out(tau, value):
    value = np.asarray(value)
    return value if np.ndim(tau) else value[()]


def excited_prob(ctx: ClosedFormContext, tau):
    """``P+ = sum_k |C_{k-1}|^2 cos^2(g tau sqrt(k))``."""
    tau, k, xi, w = _grid(ctx, tau)
    return _out(tau, np.sum(w * np.cos(xi * np.sqrt(k)) ** 2, axis=-1))


def coherence_eg(ctx: ClosedFormContext, tau):
    """Atomic coherence ``<e|rho_atom|g>``.

    ``i gamma_tilde sum_k |C_{k-1}|^2 cos(xi sqrt(k+1)) sin(xi sqrt(k)) / sqrt(k)``
    with ``xi = g tau``.  The ``1/sqrt(k)`` comes from
    ``C_k C_{k-1}^* = gamma_tilde |C_{k-1}|^2 / sqrt(k)``.
    """
    tau, k, xi, w = _grid(ctx, tau)
    terms = w * np.cos(xi * np.sqrt(k + 1)) * np.sin(xi * np.sqrt(k)) / np.sqrt(k)
    return _out(tau, 1j * ctx.gamma_tilde * np.sum(terms, axis=-1))


def mean_photon(ctx: ClosedFormContext, tau):
    """Lab-frame ``<a^+ a>`` as ``A - B - B^*``."""
    tau, k, xi, w = _grid(ctx, tau)
    q_plus = np.sqrt(k + 1) + np.sqrt(k)
    q_minus = np.sqrt(k + 1) - np.sqrt(k)
    A = (
        abs(ctx.gamma_tilde) ** 2
        + abs(ctx.gamma) ** 2
        + np.sum(w * np.sin(xi * np.sqrt(k)) ** 2, axis=-1)
    )
    series = np.sum(w / np.sqrt(k) * (q_plus * np.cos(q_minus * xi) - q_minus * np.cos(q_plus * xi)), axis=-1)
    B = 0.5 * ctx.gamma * np.conj(ctx.gamma_tilde) * series
    return _out(tau, np.maximum(A - 2.0 * B.real, 0.0))


def state_vector_resonant(ctx: ClosedFormContext, tau: float) -> np.ndarray:
    """Joint pure state at time ``tau`` on the ``2(M+1)`` product space.

    Built in a padded space and cut back to ``M``; the discarded mass must
    stay below 1e-10.
    """
    M = ctx.fock_cutoff
    Mp = M + _PAD_LEVELS
    xi = ctx.g * float(tau)
    c = cn_coeffs(ctx.gamma_tilde, Mp)
    n = np.arange(Mp + 1, dtype=float)
    shifted = np.zeros((Mp + 1, 2), dtype=complex)
    shifted[:, 0] = c * np.cos(xi * np.sqrt(n + 1))
    shifted[1:, 1] = -1j * c[:-1] * np.sin(xi * np.sqrt(n[1:]))
    lab = displacement_op(-ctx.gamma, Mp) @ shifted
    lost = float(np.sum(np.abs(lab[M + 1 :]) ** 2))
    if lost > TAIL_TOLERANCE:
        raise TruncationOverflowError(
            f"closed-form state puts {lost:.3e} of its norm above n={M} at tau={tau}",
            hint="increase fock_cutoff",
        )
    return lab[: M + 1].reshape(-1)


def revival_time(ctx: ClosedFormContext) -> float:
    """``2 pi |gamma_tilde| / g``."""
    # drive and alpha given to a few digits rarely cancel to an exact zero
    if abs(ctx.gamma_tilde) < COMPENSATION_TOLERANCE:
        raise UndefinedRevivalError("no revivals when gamma_tilde = 0 (compensative case)")
    return 2.0 * math.pi * abs(ctx.gamma_tilde) / ctx.g


def attractor_time(ctx: ClosedFormContext) -> float:
    return 0.5 * revival_time(ctx)


def dominant_peak_index(gamma_tilde: complex) -> int:
    """Label of the strongest Rabi line, ``floor(|gamma_tilde|^2 - 1)``.

    Returns 0 when ``|gamma_tilde|^2 < 1``.  Note that for a lossless signal
    the line weights are Poisson with mean ``|gamma_tilde|^2``, whose mode is
    ``floor(|gamma_tilde|^2)``, so for non-integer ``|gamma_tilde|^2`` the
    two rules disagree by one.
    """
    z = complex(gamma_tilde)
    lam = z.real * z.real + z.imag * z.imag
    if lam < 1.0:
        return 0
    return int(math.floor(lam - 1.0))
