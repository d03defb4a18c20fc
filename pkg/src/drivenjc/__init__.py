"""Driven Jaynes-Cummings model: closed-form dynamics, master-equation
integration and Rabi-spectrum analysis."""

from .closedform import ClosedFormContext
from .errors import (
    ConfigError,
    DrivenJCError,
    NumericalGuardError,
    PositivityViolationError,
    TruncationOverflowError,
)
from .hilbert import ModelParams, initial_density
from .lindblad import EvolutionConfig, evolve
from .observables import TrajectoryRecord
from .spectrum import SpectrumResult, detect_peaks, fourier_spectrum

__version__ = "0.1.0"

__all__ = [
    "ClosedFormContext",
    "ConfigError",
    "DrivenJCError",
    "EvolutionConfig",
    "ModelParams",
    "NumericalGuardError",
    "PositivityViolationError",
    "SpectrumResult",
    "TrajectoryRecord",
    "TruncationOverflowError",
    "detect_peaks",
    "evolve",
    "fourier_spectrum",
    "initial_density",
]
