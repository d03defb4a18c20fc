"""Reduced states and the scalar observables recorded along a trajectory."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, PositivityViolationError
from .hilbert import EXCITED, GROUND

EIGEN_FLOOR = 1e-14
NEGATIVE_CLAMP = -1e-7

COLUMNS = (
    "tau",
    "p_plus",
    "re_rho_ge",
    "im_rho_ge",
    "purity_atom",
    "purity_field",
    "mean_n",
    "entropy_atom",
    "entropy_field",
)


def _split(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] % 2 or rho.shape[0] < 4:
        raise DimensionMismatchError(f"expected a 2(M+1) x 2(M+1) matrix, got shape {rho.shape}")
    levels = rho.shape[0] // 2
    return rho.reshape(levels, 2, levels, 2)


def reduce(rho: np.ndarray, subsystem: str) -> np.ndarray:
    """Partial trace keeping ``"atom"`` (2x2) or ``"field"`` ((M+1)x(M+1))."""
    blocks = _split(rho)
    if subsystem == "atom":
        return np.einsum("nsnt->st", blocks)
    if subsystem == "field":
        return np.einsum("nsms->nm", blocks)
    raise ValueError(f"subsystem must be 'atom' or 'field', got {subsystem!r}")


def purity(rho_red: np.ndarray) -> float:
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(rho_red) ** 2))


def _eigenvalues(rho_red: np.ndarray) -> np.ndarray:
    lam = np.linalg.eigvalsh(0.5 * (rho_red + rho_red.conj().T))
    if lam.min() < NEGATIVE_CLAMP:
        raise PositivityViolationError(
            f"reduced state has eigenvalue {lam.min():.3e} < {NEGATIVE_CLAMP:g}",
            hint="reduce dt",
        )
    return np.clip(lam, 0.0, None)


def entropy(rho_red: np.ndarray) -> float:
    """Von Neumann entropy ``-Tr rho ln rho`` (natural log).

    Eigenvalues at or below 1e-14 contribute nothing; small negative ones
    from integrator noise (down to -1e-7) are clamped to zero.
    """
    lam = _eigenvalues(rho_red)
    lam = lam[lam > EIGEN_FLOOR]
    # an eigenvalue a hair above 1 (trace drift) would give a tiny negative value
    return max(float(-np.sum(lam * np.log(lam))), 0.0)


def min_eigenvalue(rho: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())


def mean_photon_from_rho(rho: np.ndarray) -> float:
    rho_f = reduce(rho, "field")
    n = np.arange(rho_f.shape[0], dtype=float)
    value = float(np.dot(n, np.diag(rho_f).real))
    if value < -1e-9:
        raise PositivityViolationError(f"negative mean photon number {value:.3e}")
    return max(value, 0.0)


def excited_prob_from_rho(rho: np.ndarray) -> float:
    return float(reduce(rho, "atom")[EXCITED, EXCITED].real)


def coherence_from_rho(rho: np.ndarray) -> complex:
    """Atomic coherence ``rho_ge = <g|rho_atom|e>``."""
    return complex(reduce(rho, "atom")[GROUND, EXCITED])


def trajectory_row(tau: float, rho: np.ndarray) -> tuple[float, ...]:
    """All recorded observables of ``rho``, ordered as ``COLUMNS``."""
    rho_a = reduce(rho, "atom")
    rho_f = reduce(rho, "field")
    rho_ge = complex(rho_a[GROUND, EXCITED])
    n = np.arange(rho_f.shape[0], dtype=float)
    return (
        float(tau),
        float(rho_a[EXCITED, EXCITED].real),
        rho_ge.real,
        rho_ge.imag,
        purity(rho_a),
        purity(rho_f),
        max(float(np.dot(n, np.diag(rho_f).real)), 0.0),
        entropy(rho_a),
        entropy(rho_f),
    )


@dataclass
class Diagnostics:
    """Worst values of the conservation checks seen at sample points."""

    trace_drift: float = 0.0
    hermiticity_defect: float = 0.0
    min_eigenvalue: float = np.inf
    guard_population: float = 0.0

    def update(self, trace_drift, hermiticity_defect, min_eig, guard):
        self.trace_drift = max(self.trace_drift, trace_drift)
        self.hermiticity_defect = max(self.hermiticity_defect, hermiticity_defect)
        self.min_eigenvalue = min(self.min_eigenvalue, min_eig)
        self.guard_population = max(self.guard_population, guard)


@dataclass
class TrajectoryRecord:
    """Time series of observables; one row per sample, columns as ``COLUMNS``."""

    data: np.ndarray
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float).reshape(-1, len(COLUMNS))
        if len(self.data) > 1 and np.any(np.diff(self.data[:, 0]) <= 0):
            raise ValueError("tau must be strictly increasing")

    @classmethod
    def from_rows(cls, rows, diagnostics: Diagnostics | None = None) -> "TrajectoryRecord":
        return cls(np.array(rows, dtype=float), diagnostics or Diagnostics())

    def __len__(self):
        return len(self.data)

    def __getattr__(self, name):
        if name in COLUMNS:
            return self.data[:, COLUMNS.index(name)]
        raise AttributeError(name)

    def window(self, start: float, stop: float) -> "TrajectoryRecord":
        """Rows with ``start <= tau <= stop`` (same diagnostics object)."""
        tau = self.data[:, 0]
        keep = (tau >= start - 1e-9) & (tau <= stop + 1e-9)
        return TrajectoryRecord(self.data[keep], self.diagnostics)


def oscillation_amplitude(tau: np.ndarray, series: np.ndarray, width: float) -> np.ndarray:
    """Half peak-to-peak excursion of ``series`` in a centred window of ``width``.

    Used as the envelope of Rabi oscillations when locating collapses and
    revivals; ``width`` should cover at least one oscillation period.
    """
    tau = np.asarray(tau, dtype=float)
    series = np.asarray(series, dtype=float)
    lo = np.searchsorted(tau, tau - 0.5 * width, side="left")
    hi = np.searchsorted(tau, tau + 0.5 * width, side="right")
    return np.array([0.5 * (series[a:b].max() - series[a:b].min()) for a, b in zip(lo, hi)])
