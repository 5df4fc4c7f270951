"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line."""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from xfreq_noise.noisecore import HarmonicApertureSet, SpectralEnvironment, flat, tv_noise_temperature_iso, wavelength
from xfreq_noise.pamp import (
    TVCircuitModel,
    aperture_envelope,
    aperture_spectrum,
    aperture_sum_temperature,
    covariance_noise_temperature,
    cross_aperture,
)
from xfreq_noise.sphere import build_product_rule, sphere_average
from xfreq_noise.tma import directional_aperture, filtered_noise_temperature, mean_aperture, reference_array, time_domain_aperture
from xfreq_noise.toymodel import ToyConfig, default_axis, snr_ratio_grid
from xfreq_noise.transient import phase_envelope, transient_aperture

from conftest import W0, mhz

NONDEGENERATE_MHZ = (299.0, 299.5, 300.25, 300.5, 301.0)
HARMONICS = (-2, -1, 0, 1)


def rel(a, b):
    s = max(abs(a), abs(b))
    return 0.0 if s == 0 else abs(a - b) / s


def test_c01_lti_reduction(record_criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for eta_tau, T in zip(rng.uniform(1e-3, 1.0, 100), rng.uniform(1.0, 1e4, 100)):
        lam = wavelength(W0)
        aps = HarmonicApertureSet(W0, W0 / 2, 3, peak={0: 1.5 * eta_tau * lam**2 / (4 * math.pi)},
                                  mean={0: eta_tau * lam**2 / (4 * math.pi)})
        worst = max(worst, rel(tv_noise_temperature_iso(aps, SpectralEnvironment(flat(T))), eta_tau * T))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and dt < 1.0
    record_criterion(1, ok, f"LTI reduction, worst rel err {worst:.2e} (tol 1e-12)", dt)
    assert ok


def test_c02_toy_closed_form(record_criterion):
    t0 = time.perf_counter()
    a = default_axis()
    b = default_axis()
    got = 10 ** (snr_ratio_grid(a, b, ToyConfig()) / 10)
    expect = a[:, None] / (1 + 2.5 * b[None, :])
    worst = float(np.max(np.abs(got - expect) / expect))
    amp = 10 ** (snr_ratio_grid(a, b, ToyConfig(mode="amplifying")) / 10)
    spread = float(np.max(np.abs(amp - amp[0:1, :]) / amp[0:1, :]))
    dt = time.perf_counter() - t0
    ok = got.shape == (41, 41) and worst <= 1e-12 and spread <= 1e-12 and dt < 1.0
    record_criterion(2, ok, f"toy 41x41 grid, rel err {worst:.2e}, amplifying alpha spread {spread:.2e} (tol 1e-12)", dt)
    assert ok


def test_c03_conjugate_match(record_criterion):
    t0 = time.perf_counter()
    A = cross_aperture(TVCircuitModel().lti_reference(), W0, 0).mean
    err = rel(A, 1.5 * wavelength(W0) ** 2 / (4 * math.pi))
    dt = time.perf_counter() - t0
    ok = err <= 1e-9 and dt < 1.0
    record_criterion(3, ok, f"conjugate-match aperture {A:.9f} m^2, rel err {err:.2e} (tol 1e-9)", dt)
    assert ok


@pytest.mark.slow
def test_c04_cross_solver(record_criterion, model):
    t0 = time.perf_counter()
    worst = 0.0
    for f in NONDEGENERATE_MHZ:
        for p in HARMONICS:
            cm = cross_aperture(model, mhz(f), p).mean
            tr = transient_aperture(model, mhz(f), p).mean
            worst = max(worst, rel(cm, tr))
    phases = 2 * math.pi * np.arange(8) / 8
    worst_env = 0.0
    for p in (0, -1):
        lo, hi = aperture_envelope(model, W0, p)
        r = transient_aperture(model, W0, p, phases=phases)
        tlo, thi = phase_envelope(r.phases, r.values)
        worst_env = max(worst_env, rel(lo, tlo), rel(hi, thi))
    dt = time.perf_counter() - t0
    ok = worst <= 0.02 and worst_env <= 0.05 and dt < 600
    record_criterion(4, ok, f"CM vs transient, worst {worst:.2e} (tol 2e-2), degenerate envelope {worst_env:.2e} (tol 5e-2)", dt)
    assert ok


def test_c05_degeneracy_doubling(record_criterion, model):
    t0 = time.perf_counter()
    sp = aperture_spectrum(model, [W0])[0]
    ratio_A = sp.apertures.mean[-1] / sp.apertures.mean[0]
    env = SpectralEnvironment(flat(290.0))
    ratio_T = aperture_sum_temperature(sp.apertures, env) / aperture_sum_temperature(sp.apertures, env, p_set=[0])
    dt = time.perf_counter() - t0
    ok = abs(ratio_A - 1) <= 0.02 and abs(ratio_T - 2) <= 0.05 * 2 and dt < 60
    record_criterion(5, ok, f"Abar^-1/Abar^0 = {ratio_A:.6f} (tol 2%), T ratio = {ratio_T:.6f} (tol 5%)", dt)
    assert ok


def test_c06_harmonic_ordering(record_criterion, model):
    t0 = time.perf_counter()
    m = aperture_spectrum(model, [W0])[0].apertures.mean
    sep = min(m[0] / m[1], m[0] / m[-2])
    dt = time.perf_counter() - t0
    ok = sep >= 100 and dt < 60
    record_criterion(6, ok, f"Abar^0 over max(Abar^1, Abar^-2) = {sep:.3e} (need >= 100)", dt)
    assert ok


def test_c07_tma_filtered_increase(record_criterion):
    t0 = time.perf_counter()
    cfg = reference_array(M=1000)
    d1 = filtered_noise_temperature(cfg, W0, 1).ratio_db
    d2 = filtered_noise_temperature(cfg, W0, 2).ratio_db
    dt = time.perf_counter() - t0
    ok = abs(d1 - 4.18) <= 0.05 and abs(d2 - 5.35) <= 0.05 and dt < 10
    record_criterion(7, ok, f"TMA filtered increase {d1:.4f} dB (4.18), {d2:.4f} dB (5.35), tol 0.05 dB", dt)
    assert ok


def test_c08_tma_path_equivalence(record_criterion):
    t0 = time.perf_counter()
    quad = build_product_rule()
    worst_q = 0.0
    for M in (10.0, 100.0, 1000.0):
        cfg = reference_array(M=M)
        for p in range(-2, 3):
            worst_q = max(worst_q, rel(mean_aperture(cfg, W0, p), mean_aperture(cfg, W0, p, "quadrature", quad)))
    rng = np.random.default_rng(8)
    worst_t = 0.0
    for _ in range(20):
        p = int(rng.integers(-2, 3))
        M = float(rng.choice([10.0, 100.0, 1000.0]))
        k = rng.normal(size=3)
        k /= np.linalg.norm(k)
        cfg = reference_array(M=M)
        worst_t = max(worst_t, rel(directional_aperture(cfg, W0, p, k), time_domain_aperture(cfg, W0, p, k)))
    dt = time.perf_counter() - t0
    ok = worst_q <= 1e-6 and worst_t <= 0.01 and dt < 120
    record_criterion(8, ok, f"closed form vs quadrature {worst_q:.2e} (tol 1e-6), time vs frequency domain {worst_t:.2e} (tol 1e-2)", dt)
    assert ok


def test_c09_covariance_equivalence(record_criterion, model):
    t0 = time.perf_counter()
    env = SpectralEnvironment(flat(290.0))
    worst = 0.0
    for f in NONDEGENERATE_MHZ:
        w = mhz(f)
        Ts = aperture_sum_temperature(aperture_spectrum(model, [w])[0].apertures, env)
        worst = max(worst, rel(Ts, covariance_noise_temperature(model, w, env)))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and dt < 60
    record_criterion(9, ok, f"covariance vs aperture sum, worst rel {worst:.2e} (tol 1e-9)", dt)
    assert ok


@pytest.mark.slow
def test_c10_convergence(record_criterion, model):
    t0 = time.perf_counter()
    worst_dt = 0.0
    for f, p in ((299.5, 0), (300.25, -1), (300.5, 0)):
        a = transient_aperture(model, mhz(f), p, samples_per_period=1024).mean
        b = transient_aperture(model, mhz(f), p, samples_per_period=2048).mean
        worst_dt = max(worst_dt, rel(a, b))
    worst_P = 0.0
    for f in NONDEGENERATE_MHZ + (300.0,):
        for p in HARMONICS:
            a = cross_aperture(model, mhz(f), p, P=4).mean
            b = cross_aperture(model, mhz(f), p, P=6).mean
            worst_P = max(worst_P, rel(a, b))
    worst_q = 0.0
    cfg = reference_array(M=1000)
    for p in range(-2, 3):
        f = lambda k, p=p: directional_aperture(cfg, W0, p, k)
        a = sphere_average(f, build_product_rule(64, 128))
        b = sphere_average(f, build_product_rule(128, 256))
        worst_q = max(worst_q, rel(a, b))
    env = SpectralEnvironment(flat(290.0))
    a = covariance_noise_temperature(model, mhz(300.5), env, quad=build_product_rule(16, 8))
    b = covariance_noise_temperature(model, mhz(300.5), env, quad=build_product_rule(32, 16))
    worst_q = max(worst_q, rel(a, b))
    dt = time.perf_counter() - t0
    ok = worst_dt < 2e-3 and worst_P < 5e-3 and worst_q < 1e-8 and dt < 900
    record_criterion(10, ok, f"dt halving {worst_dt:.2e} (<2e-3), P 4->6 {worst_P:.2e} (<5e-3), quadrature doubling {worst_q:.2e} (<1e-8)", dt)
    assert ok
