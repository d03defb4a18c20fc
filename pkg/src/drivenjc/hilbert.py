"""Truncated two-level-atom x Fock-space model.

Product basis index is ``k = 2*n + s`` with ``n`` the photon number and
``s = 0`` for the excited atom state ``|e>``, ``s = 1`` for ``|g>``.  A
product operator is therefore ``np.kron(field_op, atom_op)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import expm
from scipy.stats import poisson

from .errors import ConfigError, InvalidCutoffError, TruncationOverflowError

EXCITED = 0
GROUND = 1

DEFAULT_CUTOFF = 32
TAIL_TOLERANCE = 1e-10
DISPLACEMENT_TOLERANCE = 1e-8


def tail_rule(amplitude: float) -> int:
    """Smallest cutoff ``M >= a**2 + 6a + 9`` for a coherent amplitude ``a``."""
    a = abs(amplitude)
    return int(math.ceil(a * a + 6.0 * a + 9.0 - 1e-12))


def required_cutoff(alpha: complex, drive: complex, g: float) -> int:
    """Fock cutoff needed by the resonant dynamics started from ``|e, alpha>``.

    The lab-frame field is ``D(-gamma)`` applied to a state whose amplitude
    has modulus ``|gamma_tilde|`` and arbitrary phase, so the largest amplitude
    the evolution can visit is ``|gamma| + |gamma_tilde|``.
    """
    gamma = drive / (2.0 * g)
    gamma_tilde = gamma + alpha
    reach = max(abs(alpha), abs(gamma), abs(gamma_tilde), abs(gamma) + abs(gamma_tilde))
    return tail_rule(reach)


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of one driven Jaynes-Cummings scenario.

    All quantities are dimensionless (frequencies in units of the atomic
    transition frequency).  ``fock_cutoff=None`` resolves to
    ``max(32, required_cutoff(alpha, drive, g))`` at construction.
    """

    g: float = 0.2
    drive: complex = 0.0
    delta: float = 0.0
    big_delta: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    alpha: complex = 0.0
    fock_cutoff: int | None = None

    def __post_init__(self):
        for name in ("g", "delta", "big_delta", "gamma1", "gamma2"):
            value = getattr(self, name)
            if isinstance(value, complex) or not np.isfinite(value):
                raise ConfigError(name, f"expected a finite real number, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in ("drive", "alpha"):
            value = complex(getattr(self, name))
            if not np.isfinite(value):
                raise ConfigError(name, f"expected a finite complex number, got {value!r}")
            object.__setattr__(self, name, value)
        if self.g <= 0:
            raise ConfigError("g", f"coupling must be positive, got {self.g}")
        if self.gamma1 < 0:
            raise ConfigError("gamma1", f"loss rate must be >= 0, got {self.gamma1}")
        if self.gamma2 < 0:
            raise ConfigError("gamma2", f"loss rate must be >= 0, got {self.gamma2}")
        if not (np.isfinite(self.gamma) and np.isfinite(self.gamma_tilde)):
            raise ConfigError("drive", "drive/(2g) is not finite")
        if self.fock_cutoff is None:
            cutoff = max(DEFAULT_CUTOFF, required_cutoff(self.alpha, self.drive, self.g))
            object.__setattr__(self, "fock_cutoff", cutoff)
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 1:
            raise InvalidCutoffError("fock_cutoff", f"must be an integer >= 1, got {self.fock_cutoff!r}")
        object.__setattr__(self, "fock_cutoff", int(self.fock_cutoff))

    @property
    def gamma(self) -> complex:
        return self.drive / (2.0 * self.g)

    @property
    def gamma_tilde(self) -> complex:
        return self.gamma + self.alpha

    @property
    def dim(self) -> int:
        return 2 * (self.fock_cutoff + 1)

    @property
    def resonant(self) -> bool:
        return self.delta == 0.0 and self.big_delta == 0.0

    @property
    def lossless(self) -> bool:
        return self.gamma1 == 0.0 and self.gamma2 == 0.0

    def without_losses(self) -> "ModelParams":
        return replace(self, gamma1=0.0, gamma2=0.0)


def _check_cutoff(M) -> int:
    if int(M) != M or M < 1:
        raise InvalidCutoffError("fock_cutoff", f"must be an integer >= 1, got {M!r}")
    return int(M)


def annihilation_op(M: int) -> np.ndarray:
    """``(M+1) x (M+1)`` matrix with ``<n-1|a|n> = sqrt(n)``."""
    M = _check_cutoff(M)
    return np.diag(np.sqrt(np.arange(1, M + 1, dtype=float)), 1).astype(complex)


def creation_op(M: int) -> np.ndarray:
    return annihilation_op(M).conj().T


def number_op(M: int) -> np.ndarray:
    M = _check_cutoff(M)
    return np.diag(np.arange(M + 1, dtype=float)).astype(complex)


def atom_ops() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Raising, lowering and inversion operators in the ``(e, g)`` basis."""
    sigma_plus = np.array([[0, 1], [0, 0]], dtype=complex)
    sigma_minus = sigma_plus.T.copy()
    sigma_3 = np.diag([1.0, -1.0]).astype(complex)
    return sigma_plus, sigma_minus, sigma_3


def on_field(op: np.ndarray) -> np.ndarray:
    """Embed a field operator into the product space."""
    return np.kron(op, np.eye(2))


def on_atom(op: np.ndarray, M: int) -> np.ndarray:
    """Embed a 2x2 atom operator into the product space with cutoff ``M``."""
    return np.kron(np.eye(M + 1), op)


def product_state(field: np.ndarray, atom: np.ndarray) -> np.ndarray:
    return np.kron(field, atom)


def _coherent_amplitudes(alpha: complex, M: int) -> np.ndarray:
    # c_n = c_{n-1} * alpha / sqrt(n); no factorials needed
    c = np.empty(M + 1, dtype=complex)
    c[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, M + 1):
        c[n] = c[n - 1] * alpha / np.sqrt(n)
    return c


def coherent_state(alpha: complex, M: int) -> np.ndarray:
    """Coherent state ``|alpha>`` on levels ``0..M``, renormalized.

    Raises
    ------
    TruncationOverflowError
        If the Poisson mass beyond level ``M`` exceeds 1e-10.
    """
    M = _check_cutoff(M)
    alpha = complex(alpha)
    tail = float(poisson.sf(M, abs(alpha) ** 2))
    if tail > TAIL_TOLERANCE:
        raise TruncationOverflowError(
            f"coherent state |{alpha}> loses {tail:.3e} of its norm above n={M}",
            hint=f"use fock_cutoff >= {tail_rule(abs(alpha))}",
        )
    c = _coherent_amplitudes(alpha, M)
    return c / np.linalg.norm(c)


def displacement_op(gamma: complex, M: int) -> np.ndarray:
    """``D(gamma) = exp(gamma a^+ - gamma^* a)`` on the truncated space.

    The truncated generator is anti-Hermitian, so the result is unitary to
    machine precision; truncation error instead shows up as a mismatch between
    ``D(gamma)|0>`` and the exact coherent amplitudes, which is what the guard
    checks.
    """
    M = _check_cutoff(M)
    gamma = complex(gamma)
    a = annihilation_op(M)
    D = expm(gamma * a.conj().T - np.conj(gamma) * a)
    defect = np.linalg.norm(D[:, 0] - _coherent_amplitudes(gamma, M))
    # norm of the exact |gamma> inside the truncated space is sqrt(1 - tail)
    norm_loss = 1.0 - np.sqrt(1.0 - float(poisson.sf(M, abs(gamma) ** 2)))
    if norm_loss > DISPLACEMENT_TOLERANCE:
        raise TruncationOverflowError(
            f"|{gamma}> loses {norm_loss:.3e} of its norm above n={M}",
            hint=f"use fock_cutoff >= {tail_rule(abs(gamma))}",
        )
    if defect > DISPLACEMENT_TOLERANCE:
        raise TruncationOverflowError(
            f"D({gamma})|0> deviates from the coherent state by {defect:.3e} at M={M}",
            hint=f"use fock_cutoff >= {tail_rule(abs(gamma)) + 8}",
        )
    return D


def initial_state(params: ModelParams) -> np.ndarray:
    atom = np.zeros(2, dtype=complex)
    atom[EXCITED] = 1.0
    return product_state(coherent_state(params.alpha, params.fock_cutoff), atom)


def initial_density(params: ModelParams) -> np.ndarray:
    """``|e><e| (x) |alpha><alpha|`` as a dense product-space matrix."""
    psi = initial_state(params)
    return np.outer(psi, psi.conj())
