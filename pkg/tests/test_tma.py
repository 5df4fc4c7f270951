import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xfreq_noise.noisecore import CONST
from xfreq_noise.sphere import build_product_rule
from xfreq_noise.tma import (
    TMAConfig,
    directional_aperture,
    filtered_noise_temperature,
    gate_coefficients,
    mean_aperture,
    reference_array,
    switch_spectrum,
    time_domain_aperture,
)

from conftest import W0


def naive_mean(cfg, omega, p):
    # scalar double loop, coefficients from the gate integral itself
    def U(t, tau):
        if p == 0:
            return tau
        a, b = 2 * math.pi * t, 2 * math.pi * (t + tau)
        return (cmath.exp(-1j * p * a) - cmath.exp(-1j * p * b)) / (2j * math.pi * p)

    k = (omega + p * cfg.mod_freq) / CONST.c0
    tot = 0j
    for i in range(cfg.K):
        for j in range(cfg.K):
            d = math.dist(cfg.positions[i], cfg.positions[j])
            s = 1.0 if d == 0 else math.sin(k * d) / (k * d)
            ai = cfg.weights[i] * U(cfg.t_hat[i], cfg.tau_hat[i])
            aj = cfg.weights[j] * U(cfg.t_hat[j], cfg.tau_hat[j])
            tot += ai * aj.conjugate() * s
    return tot.real


def test_gate_coefficients_match_fft():
    n = 4096
    t = (np.arange(n) + 0.5) / n
    gate = ((t >= 0.375) & (t < 0.625)).astype(float)
    for p in range(-3, 4):
        c = np.mean(gate * np.exp(-2j * math.pi * p * t))
        assert abs(gate_coefficients(0.375, 0.25, p) - c) < 1e-3


@pytest.mark.parametrize("t_hat, tau", [(0.0, 0.25), (0.3, 0.5), (0.75, 0.25), (0.1, 1.0)])
def test_parseval(t_hat, tau):
    ps = np.arange(-4000, 4001)
    energy = np.sum(np.abs(gate_coefficients(t_hat, tau, ps)) ** 2)
    assert energy == pytest.approx(tau, rel=2e-4)


def test_switch_spectrum_indexing():
    cfg = reference_array(M=10)
    s = switch_spectrum(cfg, 2, P=3)
    assert s[0] == pytest.approx(0.25)
    with pytest.raises(IndexError):
        s[4]


@pytest.mark.parametrize("M", [10.0, 1000.0])
@pytest.mark.parametrize("p", [-2, -1, 0, 1, 2])
def test_closed_form_matches_naive(M, p):
    cfg = reference_array(M=M)
    assert mean_aperture(cfg, W0, p) == pytest.approx(naive_mean(cfg, W0, p), rel=1e-12)


@pytest.mark.parametrize("p", [-2, 0, 1])
def test_closed_form_matches_quadrature(p):
    cfg = reference_array(M=100)
    q = mean_aperture(cfg, W0, p, method="quadrature", quad=build_product_rule())
    assert q == pytest.approx(mean_aperture(cfg, W0, p), rel=1e-10)


def test_single_element_is_switch_power():
    cfg = TMAConfig(positions=[[0, 0, 0]], weights=[1.0], t_hat=[0.2], tau_hat=[0.3], period=1e-6)
    for p in range(-3, 4):
        assert mean_aperture(cfg, W0, p) == pytest.approx(abs(gate_coefficients(0.2, 0.3, p)) ** 2, rel=1e-14)


def test_prefactor():
    cfg = reference_array(M=100)
    abs_cfg = TMAConfig(cfg.positions, cfg.weights, cfg.t_hat, cfg.tau_hat, cfg.period, ell=0.5, Z0=73.0)
    ratio = mean_aperture(abs_cfg, W0, 1) / mean_aperture(cfg, W0, 1)
    assert ratio == pytest.approx(CONST.eta0 * 0.25 / 73.0, rel=1e-14)


def test_filtered_db_values():
    cfg = reference_array(M=1000)
    db = [filtered_noise_temperature(cfg, W0, P).ratio_db for P in range(4)]
    assert db[0] == 0.0
    assert db[1] == pytest.approx(4.18, abs=0.05)
    assert db[2] == pytest.approx(5.35, abs=0.05)
    assert np.all(np.diff(db) > 0)


def test_large_M_converges():
    a = [filtered_noise_temperature(reference_array(M=M), W0, 2).ratio_db for M in (1e3, 1e4, 1e5)]
    assert abs(a[2] - a[1]) < abs(a[1] - a[0]) + 1e-9
    assert abs(a[2] - a[1]) < 1e-3


@settings(max_examples=30, deadline=None)
@given(
    z=st.floats(-1.0, 1.0),
    phi=st.floats(0.0, 2 * math.pi),
    p=st.integers(-3, 3),
    M=st.sampled_from([10.0, 100.0, 1000.0]),
)
def test_directional_aperture_nonnegative(z, phi, p, M):
    s = math.sqrt(1 - z * z)
    k = np.array([s * math.cos(phi), s * math.sin(phi), z])
    assert directional_aperture(reference_array(M=M), W0, p, k) >= -1e-15


@pytest.mark.parametrize("p, k", [(0, (1.0, 0, 0)), (1, (0.6, 0.8, 0)), (-2, (0, 0.6, 0.8))])
def test_time_domain_matches_frequency_domain(p, k):
    cfg = reference_array(M=10)
    a = directional_aperture(cfg, W0, p, np.array(k))
    b = time_domain_aperture(cfg, W0, p, np.array(k))
    assert b == pytest.approx(a, rel=1e-3)


def test_real_tone_matches_analytic():
    cfg = reference_array(M=10)
    k = np.array([0.6, 0.0, 0.8])
    a = time_domain_aperture(cfg, W0, 1, k)
    b = time_domain_aperture(cfg, W0, 1, k, analytic=False)
    assert b == pytest.approx(a, rel=1e-2)


def test_real_tone_needs_integer_ratio():
    with pytest.raises(ValueError):
        time_domain_aperture(reference_array(M=10.5), W0, 0, np.array([1.0, 0, 0]), analytic=False)


@pytest.mark.parametrize("kw", [dict(tau_hat=0.0), dict(tau_hat=1.5), dict(t_hat=-0.1), dict(period=0.0)])
def test_config_validation(kw):
    base = dict(positions=[[0, 0, 0]], weights=[1.0], t_hat=[0.0], tau_hat=[0.5], period=1.0)
    base.update(kw)
    with pytest.raises(ValueError):
        TMAConfig(**base)


def test_harmonic_at_negative_frequency_rejected():
    cfg = reference_array(M=1.0)
    with pytest.raises(ValueError):
        mean_aperture(cfg, W0, -1)


# frozen from the scalar double-loop oracle above
FROZEN_M1000 = {-3: 0.04516712254570431, -2: 0.199799913223514, -1: 0.4056904196558106, 0: 0.5,
                1: 0.4048798600425051, 2: 0.20547347422383624, 3: 0.04489696228382608}


@pytest.mark.parametrize("p", sorted(FROZEN_M1000))
def test_frozen_mean_apertures(p):
    assert mean_aperture(reference_array(M=1000, order=3), W0, p) == pytest.approx(FROZEN_M1000[p], rel=1e-12)
