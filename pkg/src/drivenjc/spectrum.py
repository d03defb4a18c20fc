"""Fourier analysis of the excited-state probability and Rabi-line labelling.

The n-th line of ``P+`` oscillates as ``cos(2 g tau sqrt(n+1))``, so the
frequency axis is reported as ``nu = omega / 2g`` where that line sits at
``sqrt(n+1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .errors import NonuniformSamplingError


@dataclass(frozen=True)
class Peak:
    n_label: int | None
    freq_norm: float
    amplitude: float


@dataclass(frozen=True)
class SpectrumResult:
    freq_norm: np.ndarray
    amplitude: np.ndarray
    peaks: tuple[Peak, ...] = field(default=())
    n_samples: int = 0
    windowed: bool = True

    def total_power(self) -> float:
        """Two-sided ``sum |X_k|^2`` reconstructed from the one-sided amplitudes."""
        p = self.amplitude**2
        n_fft = 2 * (len(p) - 1)
        interior = p[1:-1].sum() if n_fft % 2 == 0 else p[1:].sum()
        return float(p[0] + 2.0 * interior + (p[-1] if n_fft % 2 == 0 else 0.0))

    def labels(self) -> list[int]:
        return [p.n_label for p in self.peaks if p.n_label is not None]


def _next_pow2(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


def fourier_spectrum(
    series,
    dt_sample: float,
    g: float,
    *,
    times=None,
    window: bool = True,
) -> SpectrumResult:
    """Magnitude spectrum of a uniformly sampled ``P+`` series.

    The mean is subtracted, a Hann window applied (unless ``window=False``)
    and the result zero-padded to a power of two.  The transform is
    orthonormal, so without a window ``total_power()`` equals the sum of
    squared deviations from the mean.
    """
    x = np.asarray(series, dtype=float)
    if times is not None:
        t = np.asarray(times, dtype=float)
        steps = np.diff(t)
        if len(t) != len(x) or np.any(np.abs(steps - dt_sample) > 1e-9 * max(1.0, dt_sample)):
            raise NonuniformSamplingError(f"samples are not uniformly spaced by {dt_sample}")
    if len(x) < 4:
        raise ValueError("need at least 4 samples")
    x = x - x.mean()
    if window:
        x = x * np.hanning(len(x))
    n_fft = _next_pow2(len(x))
    amplitude = np.abs(np.fft.rfft(x, n=n_fft, norm="ortho"))
    freq = np.fft.rfftfreq(n_fft, d=dt_sample)
    freq_norm = np.pi * freq / g  # omega / 2g with omega = 2 pi f
    return SpectrumResult(freq_norm, amplitude, (), len(x), window)


def label_for(freq_norm: float, n_max: int) -> int | None:
    """Rabi-line label whose ``sqrt(n+1)`` is nearest, or None if out of tolerance.

    Line ``n`` accepts frequencies within ``(sqrt(n+2) - sqrt(n+1)) / 2``.
    """
    lines = np.sqrt(np.arange(1, n_max + 2, dtype=float))
    n = int(np.argmin(np.abs(lines - freq_norm)))
    tol = 0.5 * (np.sqrt(n + 2.0) - np.sqrt(n + 1.0))
    return n if abs(freq_norm - lines[n]) <= tol else None


def detect_peaks(spec: SpectrumResult, n_max: int = 40, min_rel_height: float = 0.05) -> list[Peak]:
    """Local maxima above ``min_rel_height`` times the global maximum.

    Each maximum is labelled with the nearest Rabi line up to ``n_max``;
    maxima outside every line's tolerance (detuning satellites, slow drifts)
    are kept with ``n_label=None``.  The zero-frequency bin is ignored (the
    mean was removed).  Peaks are returned in frequency order.
    """
    amp = spec.amplitude
    top = float(amp[1:].max())
    if top == 0.0:
        return []
    # pad so a maximum in the first or last non-DC bin is still found
    idx, _ = find_peaks(np.concatenate(([-1.0], amp[1:], [-1.0])), height=min_rel_height * top)
    return [
        Peak(label_for(float(spec.freq_norm[i]), n_max), float(spec.freq_norm[i]), float(amp[i]))
        for i in idx
    ]


def strongest(peaks: list[Peak]) -> Peak:
    return max(peaks, key=lambda p: p.amplitude)
