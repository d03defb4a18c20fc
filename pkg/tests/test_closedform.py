import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drivenjc.closedform import (
    ClosedFormContext,
    attractor_time,
    cn_coeff,
    cn_coeffs,
    coherence_eg,
    dominant_peak_index,
    excited_prob,
    mean_photon,
    revival_time,
    series_cutoff,
    state_vector_resonant,
)
from drivenjc.errors import ConfigError, UndefinedRevivalError
from drivenjc.hilbert import (
    EXCITED,
    GROUND,
    ModelParams,
    coherent_state,
    initial_state,
    number_op,
    required_cutoff,
)
from drivenjc.observables import oscillation_amplitude

G = 0.2

amplitudes = st.builds(
    lambda r, phi: r * np.exp(1j * phi),
    st.floats(0.0, 2.0),
    st.floats(0.0, 2 * np.pi),
)


def context(gamma, alpha, g=G):
    """Context with a Fock cutoff large enough for the displaced state."""
    M = max(32, required_cutoff(alpha, 2 * g * gamma, g))
    return ClosedFormContext.create(gamma, gamma + alpha, g, M)


def reduced_from_vector(psi):
    # rows: photon number, columns: atom (e, g)
    amps = psi.reshape(-1, 2)
    rho_atom = amps.T @ amps.conj()
    n = np.arange(amps.shape[0])
    mean_n = float(np.sum(n * np.sum(np.abs(amps) ** 2, axis=1)))
    return rho_atom, mean_n


def test_cn_vacuum_is_kronecker_delta():
    assert cn_coeff(0.0, 0) == 1
    assert all(cn_coeff(0.0, n) == 0 for n in range(1, 6))


def test_cn_poisson_weight():
    assert abs(cn_coeff(1.75, 3)) ** 2 == pytest.approx(math.exp(-3.0625) * 3.0625**3 / 6, rel=1e-12)


def test_cn_negative_index():
    with pytest.raises(ValueError):
        cn_coeff(1.0, -1)


@pytest.mark.parametrize("z", [1.75, 3.5 * np.exp(0.7j), 4.0, 0.3j])
@pytest.mark.parametrize("n", [0, 5, 29, 30, 31, 32, 50, 80])
def test_cn_matches_arbitrary_precision(z, n):
    mpmath.mp.dps = 40
    zz = mpmath.mpc(complex(z))
    exact = mpmath.exp(-abs(zz) ** 2 / 2) * zz**n / mpmath.sqrt(mpmath.factorial(n))
    got = cn_coeff(z, n)
    assert abs(got - complex(exact)) <= 1e-13 * max(abs(complex(exact)), 1e-300)


@settings(max_examples=40, deadline=None)
@given(amplitudes)
def test_series_cutoff_normalization(z):
    N = series_cutoff(z)
    total = np.sum(np.abs(cn_coeffs(z, N)) ** 2)
    assert total >= 1 - 1e-12
    assert total == pytest.approx(1.0, abs=1e-12)


def test_from_params():
    ctx = ClosedFormContext.from_params(ModelParams(drive=0.7, alpha=-1.75, gamma1=5e-3))
    assert ctx.gamma == pytest.approx(1.75)
    assert abs(ctx.gamma_tilde) < 1e-15
    with pytest.raises(UndefinedRevivalError):
        revival_time(ctx)
    with pytest.raises(ConfigError) as info:
        ClosedFormContext.from_params(ModelParams(drive=0.7, delta=0.1))
    assert info.value.field == "delta"
    with pytest.raises(ConfigError):
        ClosedFormContext.from_params(ModelParams(drive=0.7, big_delta=0.1))


def test_excited_prob_examples():
    ctx = context(1.75, 0.0)
    assert excited_prob(ctx, 0.0) == pytest.approx(1.0, abs=1e-12)
    tau = np.linspace(0, 200, 2001)
    comp = context(1.75, -1.75)
    assert np.max(np.abs(excited_prob(comp, tau) - np.cos(G * tau) ** 2)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(amplitudes, st.floats(0.0, 400.0))
def test_excited_prob_is_probability(z, tau):
    p = excited_prob(ClosedFormContext.create(0.0, z, G), tau)
    assert -1e-12 <= p <= 1 + 1e-12


def test_coherence_examples():
    tau = np.linspace(0, 200, 401)
    assert np.all(coherence_eg(context(1.75, -1.75), tau) == 0)
    assert coherence_eg(context(1.75, 0.0), 0.0) == 0
    c = coherence_eg(context(1.75, 0.0), tau)
    assert np.all(c.real == 0)
    assert np.max(np.abs(c.imag)) > 0.1


def test_mean_photon_compensative():
    tau = np.linspace(0, 200, 2001)
    ctx = context(1.75, -1.75)
    assert np.max(np.abs(mean_photon(ctx, tau) - 1.75**2 - np.sin(G * tau) ** 2)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(amplitudes, amplitudes)
def test_mean_photon_at_start_is_initial_intensity(gamma, alpha):
    # direct expectation in the initial coherent state
    M = 40
    c = coherent_state(alpha, M)
    expected = float(np.real(c.conj() @ number_op(M) @ c))
    got = mean_photon(ClosedFormContext.create(gamma, gamma + alpha, G), 0.0)
    assert got == pytest.approx(expected, abs=1e-9)
    assert got == pytest.approx(abs(alpha) ** 2, abs=1e-9)


def test_state_vector_start_is_initial_state():
    for alpha in (0.0, -1.75, 1.0j):
        params = ModelParams(drive=0.7, alpha=alpha)
        psi = state_vector_resonant(ClosedFormContext.from_params(params), 0.0)
        psi0 = initial_state(params)
        # equal up to the dropped global phase
        assert np.max(np.abs(np.outer(psi, psi.conj()) - np.outer(psi0, psi0.conj()))) < 1e-8


def test_state_vector_compensative_quarter_period():
    ctx = context(1.75, -1.75)
    amps = state_vector_resonant(ctx, math.pi / (2 * G)).reshape(-1, 2)
    assert np.sum(np.abs(amps[:, EXCITED]) ** 2) < 1e-20
    assert np.sum(np.abs(amps[:, GROUND]) ** 2) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("gt", [0.0, 0.5, 1.75])
def test_two_routes_agree(gt):
    # the state vector goes through the displacement matrix; the series do not
    ctx = context(1.75, gt - 1.75)
    taus = np.linspace(0, 200, 41)
    p = excited_prob(ctx, taus)
    coh = coherence_eg(ctx, taus)
    n = mean_photon(ctx, taus)
    for i, tau in enumerate(taus):
        psi = state_vector_resonant(ctx, tau)
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-10)
        rho_atom, mean_n = reduced_from_vector(psi)
        assert abs(rho_atom[EXCITED, EXCITED] - p[i]) < 1e-8
        assert abs(rho_atom[EXCITED, GROUND] - coh[i]) < 1e-8
        assert abs(mean_n - n[i]) < 1e-6


@settings(max_examples=20, deadline=None)
@given(amplitudes, amplitudes, st.floats(0.0, 200.0))
def test_two_routes_agree_complex(gamma, alpha, tau):
    ctx = context(gamma, alpha)
    rho_atom, mean_n = reduced_from_vector(state_vector_resonant(ctx, tau))
    assert abs(rho_atom[EXCITED, EXCITED] - excited_prob(ctx, tau)) < 1e-8
    assert abs(rho_atom[EXCITED, GROUND] - coherence_eg(ctx, tau)) < 1e-8
    assert abs(mean_n - mean_photon(ctx, tau)) < 1e-6


def test_vacuum_start_uses_drive_amplitude():
    # with alpha = 0 the initial photon number vanishes and gamma_tilde = gamma
    ctx = ClosedFormContext.from_params(ModelParams(drive=0.7))
    assert ctx.gamma_tilde == ctx.gamma
    assert mean_photon(ctx, 0.0) == pytest.approx(0.0, abs=1e-10)
    tau = np.linspace(100, 200, 1001)
    n = mean_photon(ctx, tau)
    # oscillates about a level set by |gamma|^2 plus the atomic share
    assert 1.75**2 < n.mean() < 1.75**2 + 3.5**2


def test_revival_and_attractor_times():
    ctx = context(1.75, 0.0)
    assert revival_time(ctx) == pytest.approx(54.98, abs=0.01)
    assert attractor_time(ctx) == pytest.approx(27.49, abs=0.01)
    assert revival_time(context(3.5, 0.0)) == pytest.approx(109.96, abs=0.01)
    assert revival_time(ClosedFormContext.create(0.0, 1.75j, G)) == pytest.approx(revival_time(ctx))
    with pytest.raises(UndefinedRevivalError):
        revival_time(context(1.75, -1.75))


@pytest.mark.parametrize("gt, expected", [(1.75, 2), (1.0, 0), (2.0, 3), (0.5, 0), (1.75j, 2)])
def test_dominant_peak_index(gt, expected):
    assert dominant_peak_index(gt) == expected


def test_lossless_collapse_and_revival():
    ctx = context(1.75, 0.0)
    tau = np.arange(0, 120, 0.05)
    amp = oscillation_amplitude(tau, excited_prob(ctx, tau), 10.0)
    collapse = (tau > 15) & (tau < 35)
    assert amp[collapse].min() < 0.02
    revival = (tau > 40) & (tau < 75)
    peak_at = tau[revival][np.argmax(amp[revival])]
    assert abs(peak_at - revival_time(ctx)) < 6
    assert amp[revival].max() > 10 * amp[collapse].min()
