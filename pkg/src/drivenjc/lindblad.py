"""Master-equation integration for the joint atom-field density operator.

    d rho / d tau = -i [H(tau), rho]
                    + gamma1 (2 a rho a^+ - a^+ a rho - rho a^+ a)
                    + gamma2/2 (2 s rho s^+ - s^+ s rho - rho s^+ s)

with ``s`` the atomic lowering operator and ``H(tau)`` the rotating-frame
driven Jaynes-Cummings Hamiltonian.  Integration is fixed-step classical RK4.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, PositivityViolationError, TruncationOverflowError
from .hilbert import ModelParams, annihilation_op, atom_ops, on_atom, on_field
from .observables import Diagnostics, TrajectoryRecord, min_eigenvalue, trajectory_row

log = logging.getLogger(__name__)

Observer = Callable[[float, np.ndarray], None]


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float = 0.005
    t_end: float = 200.0
    sample_every: int = 10
    truncation_guard_levels: int = 4
    truncation_threshold: float = 1e-6
    positivity_floor: float = -1e-5

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError("dt", f"must be > 0, got {self.dt}")
        if not self.t_end > 0:
            raise ConfigError("t_end", f"must be > 0, got {self.t_end}")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ConfigError("sample_every", f"must be an integer >= 1, got {self.sample_every}")
        if int(self.truncation_guard_levels) != self.truncation_guard_levels or self.truncation_guard_levels < 1:
            raise ConfigError("truncation_guard_levels", f"must be an integer >= 1, got {self.truncation_guard_levels}")
        if not self.truncation_threshold > 0:
            raise ConfigError("truncation_threshold", f"must be > 0, got {self.truncation_threshold}")
        n = round(self.t_end / self.dt)
        if abs(n * self.dt - self.t_end) > 1e-9 * max(1.0, self.t_end):
            raise ConfigError("t_end", f"must be an integer multiple of dt={self.dt}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def dt_sample(self) -> float:
        return self.dt * self.sample_every


def hamiltonian(params: ModelParams, tau: float) -> np.ndarray:
    """Rotating-frame Hamiltonian at time ``tau``.

    ``H = (Delta/2) s3 + g (s- a+ e^{-i delta tau} + s+ a e^{i delta tau})
    + (E s+ + E^* s-)/2``.
    """
    M = params.fock_cutoff
    sp, sm, s3 = atom_ops()
    a = on_field(annihilation_op(M))
    Sp, Sm = on_atom(sp, M), on_atom(sm, M)
    phase = np.exp(-1j * params.delta * tau)
    return (
        0.5 * params.big_delta * on_atom(s3, M)
        + params.g * (phase * Sm @ a.conj().T + np.conj(phase) * Sp @ a)
        + 0.5 * (params.drive * Sp + np.conj(params.drive) * Sm)
    )


class _Generator:
    """Precomputed right-hand side of the master equation.

    The anti-Hermitian part of the dissipators is folded into an effective
    Hamiltonian ``H - iK`` so one matrix product per evaluation suffices; the
    jump terms ``a rho a^+`` and ``s rho s^+`` are index shifts in the
    ``k = 2n + s`` basis.
    """

    def __init__(self, params: ModelParams):
        M = params.fock_cutoff
        sp, sm, s3 = atom_ops()
        a = on_field(annihilation_op(M))
        Sp, Sm = on_atom(sp, M), on_atom(sm, M)
        K = params.gamma1 * a.conj().T @ a + 0.5 * params.gamma2 * Sp @ Sm
        self.delta = params.delta
        self.static = (
            0.5 * params.big_delta * on_atom(s3, M)
            + 0.5 * (params.drive * Sp + np.conj(params.drive) * Sm)
            - 1j * K
        )
        self.down = params.g * Sm @ a.conj().T
        self.up = self.down.conj().T
        self.h_eff = self.static + self.down + self.up
        # <2n+s| a rho a^+ |2m+t> = sqrt(n+1) sqrt(m+1) rho[2n+2+s, 2m+2+t]
        w = np.sqrt(np.arange(params.dim) // 2 + 1.0)
        self.photon_jump = 2.0 * params.gamma1 * np.outer(w, w)[:-2, :-2]
        self.atom_jump = params.gamma2

    def h_effective(self, tau: float) -> np.ndarray:
        if self.delta == 0.0:
            return self.h_eff
        phase = np.exp(-1j * self.delta * tau)
        return self.static + phase * self.down + np.conj(phase) * self.up

    def __call__(self, rho: np.ndarray, tau: float) -> np.ndarray:
        x = -1j * (self.h_effective(tau) @ rho)
        out = x + x.conj().T
        out[:-2, :-2] += self.photon_jump * rho[2:, 2:]
        out[1::2, 1::2] += self.atom_jump * rho[0::2, 0::2]
        return out


def liouvillian_rhs(rho: np.ndarray, tau: float, params: ModelParams) -> np.ndarray:
    """``d rho / d tau`` at ``(rho, tau)``."""
    return _Generator(params)(np.asarray(rho, dtype=complex), tau)


def rk4_step(rhs, rho: np.ndarray, tau: float, dt: float) -> np.ndarray:
    k1 = rhs(rho, tau)
    k2 = rhs(rho + 0.5 * dt * k1, tau + 0.5 * dt)
    k3 = rhs(rho + 0.5 * dt * k2, tau + 0.5 * dt)
    k4 = rhs(rho + dt * k3, tau + dt)
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def truncation_check(rho: np.ndarray, guard_levels: int) -> float:
    """Population of the top ``guard_levels`` Fock levels, summed over the atom."""
    levels = rho.shape[0] // 2
    if not 1 <= guard_levels <= levels - 1:
        raise ConfigError("truncation_guard_levels", f"must lie in [1, {levels - 1}], got {guard_levels}")
    pops = np.diag(rho).real.reshape(levels, 2).sum(axis=1)
    return float(pops[-guard_levels:].sum())


def evolve(
    rho0: np.ndarray,
    params: ModelParams,
    cfg: EvolutionConfig,
    observer: Observer | None = None,
) -> TrajectoryRecord:
    """Integrate from ``tau = 0`` to ``cfg.t_end`` and sample observables.

    Every ``cfg.sample_every`` steps the observables of ``rho`` are recorded,
    the conservation diagnostics are updated, and ``observer(tau, rho)`` is
    called.  After each step ``rho`` is replaced by its Hermitian part; the
    trace is never renormalized.

    Raises
    ------
    TruncationOverflowError
        Guard-level population above ``cfg.truncation_threshold``.
    PositivityViolationError
        Smallest eigenvalue of ``rho`` below ``cfg.positivity_floor``.
    """
    rho = np.array(rho0, dtype=complex)
    if rho.shape != (params.dim, params.dim):
        raise ConfigError("fock_cutoff", f"rho0 has shape {rho.shape}, params expect dim {params.dim}")
    rhs = _Generator(params)
    dt, every = cfg.dt, cfg.sample_every
    diag = Diagnostics()
    rows = []
    defect = float(np.abs(rho - rho.conj().T).max())
    for i in range(cfg.n_steps + 1):
        tau = i * dt
        if i % every == 0:
            guard = truncation_check(rho, cfg.truncation_guard_levels)
            if guard > cfg.truncation_threshold:
                raise TruncationOverflowError(
                    f"top {cfg.truncation_guard_levels} Fock levels hold {guard:.3e} at tau={tau:g}",
                    hint=f"increase fock_cutoff above {params.fock_cutoff}",
                )
            lam = min_eigenvalue(rho)
            if lam < cfg.positivity_floor:
                raise PositivityViolationError(
                    f"density matrix eigenvalue {lam:.3e} at tau={tau:g}",
                    hint=f"decrease dt below {dt:g}",
                )
            drift = abs(np.trace(rho).real - 1.0)
            diag.update(drift, defect, lam, guard)
            rows.append(trajectory_row(tau, rho))
            if observer is not None:
                observer(tau, rho)
        if i == cfg.n_steps:
            break
        new = rk4_step(rhs, rho, tau, dt)
        if (i + 1) % every == 0:
            defect = float(np.abs(new - new.conj().T).max())
        rho = 0.5 * (new + new.conj().T)
    log.debug("evolve finished: %s", diag)
    return TrajectoryRecord.from_rows(rows, diag)
