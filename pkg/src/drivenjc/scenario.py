"""Scenario configuration, presets and the run / compare pipelines."""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import closedform
from .errors import ConfigError
from .hilbert import ModelParams, initial_density
from .lindblad import EvolutionConfig, evolve
from .observables import COLUMNS, Diagnostics, TrajectoryRecord, trajectory_row
from .spectrum import Peak, SpectrumResult, detect_peaks, fourier_spectrum

DEFAULT_DT_SAMPLE = 0.05
OUTPUTS = ("trajectory", "spectrum", "peaks")
ORACLE_WINDOW_LOSSY = 10.0

PHYSICS_KEYS = ("g", "drive", "delta", "big_delta", "gamma1", "gamma2", "alpha")
PARAM_KEYS = PHYSICS_KEYS + ("fock_cutoff",)
EVOLUTION_KEYS = tuple(f.name for f in dataclasses.fields(EvolutionConfig))
OTHER_KEYS = ("outputs", "output_dir", "preset", "window", "method", "lossless", "min_rel_height")

_FIG1 = dict(g=0.2, drive=0.7, delta=0.0, big_delta=0.0, gamma1=5e-3, gamma2=1e-3, alpha=0.0)
_FIG2 = dict(_FIG1, alpha=-1.75)
_FIG3 = dict(_FIG2, delta=0.1)
_FIG4C = dict(_FIG3, gamma1=5e-5, gamma2=1e-5)

PRESETS: dict[str, tuple[dict, float]] = {
    "fig1": (_FIG1, 200.0),
    "fig2": (_FIG2, 200.0),
    "fig3": (_FIG3, 200.0),
    "fig4a": (_FIG1, 400.0),
    "fig4b": (_FIG2, 400.0),
    "fig4c": (_FIG4C, 400.0),
    "fig4d": (_FIG3, 400.0),
}


@dataclass(frozen=True)
class ScenarioConfig:
    params: ModelParams
    evolution: EvolutionConfig
    outputs: tuple[str, ...] = OUTPUTS
    output_dir: Path = Path("out")
    preset: str | None = None
    window: bool = True
    method: str = "lindblad"
    min_rel_height: float = 0.05


@dataclass
class RunResult:
    config: ScenarioConfig
    record: TrajectoryRecord
    spectrum: SpectrumResult | None
    files: list[Path] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def peaks(self) -> tuple[Peak, ...]:
        return self.spectrum.peaks if self.spectrum is not None else ()

    def summary(self) -> str:
        d = self.record.diagnostics
        labels = ",".join("-" if p.n_label is None else str(p.n_label) for p in self.peaks)
        return (
            f"tau_final={self.record.tau[-1]:g} trace_drift={d.trace_drift:.3e} "
            f"guard_max={d.guard_population:.3e} peaks=[{labels}]"
        )


# -- parsing ---------------------------------------------------------------


def parse_complex(text: str) -> complex:
    """Accept ``re,im``, ``(re, im)``, a Python complex literal or a real."""
    s = str(text).strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if "," in s:
        re_part, im_part = (p.strip() for p in s.split(","))
        return complex(float(re_part), float(im_part))
    return complex(s.replace(" ", ""))


def _parse_bool(text: str) -> bool:
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _convert(key: str, value):
    if not isinstance(value, str):
        return value
    try:
        if key in ("drive", "alpha"):
            return parse_complex(value)
        if key in ("fock_cutoff", "sample_every", "truncation_guard_levels"):
            return int(value)
        if key in ("window", "lossless"):
            return _parse_bool(value)
        if key == "outputs":
            return tuple(s.strip() for s in value.split(",") if s.strip())
        if key in ("output_dir", "preset", "method"):
            return value.strip()
        return float(value)
    except ValueError as exc:
        raise ConfigError(key, f"cannot parse {value!r}: {exc}") from None


def read_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}", f"expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key] = value
    return values


def _same(key, a, b) -> bool:
    if key in ("drive", "alpha"):
        return abs(complex(a) - complex(b)) <= 1e-12
    return math.isclose(float(a), float(b), rel_tol=1e-12, abs_tol=1e-15)


def build_config(values: dict | None = None, **overrides) -> ScenarioConfig:
    """Assemble a validated ScenarioConfig from raw values.

    ``overrides`` win over ``values``.  With ``preset`` set, physics keys
    must either be absent or equal the preset's value; ``lossless=True`` then
    zeroes both loss rates.
    """
    raw = dict(values or {})
    raw.update({k: v for k, v in overrides.items() if v is not None})
    known = set(PARAM_KEYS + EVOLUTION_KEYS + OTHER_KEYS)
    for key in raw:
        if key not in known:
            raise ConfigError(key, "unknown configuration key")
    cfg = {k: _convert(k, v) for k, v in raw.items()}

    preset = cfg.pop("preset", None)
    lossless = cfg.pop("lossless", False)
    physics = {}
    t_end_default = 200.0
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError("preset", f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        physics, t_end_default = PRESETS[preset]
        physics = dict(physics)
        for key in PHYSICS_KEYS:
            if key in cfg and not _same(key, cfg[key], physics[key]):
                raise ConfigError(key, f"conflicts with preset {preset} ({key}={physics[key]})")
    for key in PARAM_KEYS:
        if key in cfg:
            physics[key] = cfg.pop(key)
    if lossless:
        physics["gamma1"] = physics["gamma2"] = 0.0
    params = ModelParams(**physics)

    evo = {k: cfg.pop(k) for k in EVOLUTION_KEYS if k in cfg}
    evo.setdefault("t_end", t_end_default)
    evo.setdefault("dt", EvolutionConfig.dt)
    if "sample_every" not in evo:
        evo["sample_every"] = max(1, int(round(DEFAULT_DT_SAMPLE / evo["dt"])))
    evolution = EvolutionConfig(**evo)

    outputs = tuple(cfg.pop("outputs", OUTPUTS))
    for name in outputs:
        if name not in OUTPUTS:
            raise ConfigError("outputs", f"unknown output {name!r}; choose from {OUTPUTS}")
    method = cfg.pop("method", "lindblad")
    if method not in ("lindblad", "closedform"):
        raise ConfigError("method", f"must be 'lindblad' or 'closedform', got {method!r}")
    if method == "closedform" and not (params.resonant and params.lossless):
        raise ConfigError("method", "closedform requires delta = big_delta = 0 and no losses")
    return ScenarioConfig(
        params=params,
        evolution=evolution,
        outputs=outputs,
        output_dir=Path(cfg.pop("output_dir", "out")),
        preset=preset,
        window=cfg.pop("window", True),
        method=method,
        min_rel_height=float(cfg.pop("min_rel_height", 0.05)),
    )


# -- output ----------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def write_trajectory_csv(path: Path, record: TrajectoryRecord) -> None:
    lines = [",".join(COLUMNS)]
    lines += [",".join(_fmt(v) for v in row) for row in record.data]
    path.write_text("\n".join(lines) + "\n")


def write_spectrum_csv(path: Path, spec: SpectrumResult) -> None:
    lines = ["freq_norm,amplitude"]
    lines += [f"{_fmt(f)},{_fmt(a)}" for f, a in zip(spec.freq_norm, spec.amplitude)]
    path.write_text("\n".join(lines) + "\n")


def write_peaks_csv(path: Path, peaks) -> None:
    lines = ["n_label,freq_norm,amplitude"]
    for p in peaks:
        label = "" if p.n_label is None else str(p.n_label)
        lines.append(f"{label},{_fmt(p.freq_norm)},{_fmt(p.amplitude)}")
    path.write_text("\n".join(lines) + "\n")


# -- pipelines -------------------------------------------------------------


def closed_form_trajectory(params: ModelParams, cfg: EvolutionConfig) -> TrajectoryRecord:
    """Trajectory built from the exact resonant state on the integrator's grid."""
    ctx = closedform.ClosedFormContext.from_params(params)
    n_samples = cfg.n_steps // cfg.sample_every + 1
    rows = []
    for i in range(n_samples):
        tau = i * cfg.sample_every * cfg.dt
        psi = closedform.state_vector_resonant(ctx, tau)
        rows.append(trajectory_row(tau, np.outer(psi, psi.conj())))
    return TrajectoryRecord.from_rows(rows, Diagnostics(min_eigenvalue=0.0))


def simulate(config: ScenarioConfig) -> TrajectoryRecord:
    if config.method == "closedform":
        return closed_form_trajectory(config.params, config.evolution)
    return evolve(initial_density(config.params), config.params, config.evolution)


def analyse(config: ScenarioConfig, record: TrajectoryRecord) -> SpectrumResult:
    spec = fourier_spectrum(
        record.p_plus,
        config.evolution.dt_sample,
        config.params.g,
        times=record.tau,
        window=config.window,
    )
    return dataclasses.replace(spec, peaks=tuple(detect_peaks(spec, min_rel_height=config.min_rel_height)))


def run(config: ScenarioConfig, write: bool = True) -> RunResult:
    """Simulate, analyse and (optionally) write the selected CSV files."""
    start = time.perf_counter()
    record = simulate(config)
    spec = analyse(config, record) if {"spectrum", "peaks"} & set(config.outputs) else None
    result = RunResult(config, record, spec, elapsed=time.perf_counter() - start)
    if write:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        if "trajectory" in config.outputs:
            result.files.append(out / "trajectory.csv")
            write_trajectory_csv(result.files[-1], record)
        if "spectrum" in config.outputs:
            result.files.append(out / "spectrum.csv")
            write_spectrum_csv(result.files[-1], spec)
        if "peaks" in config.outputs:
            result.files.append(out / "peaks.csv")
            write_peaks_csv(result.files[-1], spec.peaks)
    return result


@dataclass
class OracleReport:
    deviations: dict[str, float]
    window_end: float
    lossless: bool

    def lines(self) -> list[str]:
        head = f"oracle comparison on tau in [0, {self.window_end:g}] ({'lossless' if self.lossless else 'lossy'})"
        return [head] + [f"  {k}: max|dev| = {v:.3e}" for k, v in self.deviations.items()]


def compare_oracle(config: ScenarioConfig, record: TrajectoryRecord | None = None) -> OracleReport:
    """Max deviation between the integrator and the closed form per observable.

    With losses the comparison is restricted to ``tau < 10``, where the
    lossless formula is still expected to describe the lossy run.
    """
    ctx = closedform.ClosedFormContext.from_params(config.params)
    if record is None:
        record = evolve(initial_density(config.params), config.params, config.evolution)
    lossless = config.params.lossless
    end = float(record.tau[-1]) if lossless else ORACLE_WINDOW_LOSSY
    keep = record.tau <= end if lossless else record.tau < end
    tau = record.tau[keep]
    rho_ge = np.conj(closedform.coherence_eg(ctx, tau))
    deviations = {
        "p_plus": float(np.max(np.abs(record.p_plus[keep] - closedform.excited_prob(ctx, tau)))),
        "mean_n": float(np.max(np.abs(record.mean_n[keep] - closedform.mean_photon(ctx, tau)))),
        "re_rho_ge": float(np.max(np.abs(record.re_rho_ge[keep] - rho_ge.real))),
        "im_rho_ge": float(np.max(np.abs(record.im_rho_ge[keep] - rho_ge.imag))),
    }
    return OracleReport(deviations, float(tau[-1]), lossless)
