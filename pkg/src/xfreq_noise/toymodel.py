"""Scalar demonstrative receiver: an LTI short dipole versus a hypothetical
time-varying version whose apertures are scaled by ``alpha`` (signal) and
``beta`` (first-harmonic coupling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .noisecore import (
    HarmonicApertureSet,
    SpectralEnvironment,
    band_elevated,
    flat,
    snr_lti,
    snr_tv,
    wavelength,
)

DIPOLE_DIRECTIVITY = 1.5


def default_axis() -> np.ndarray:
    return np.logspace(-1, 1, 41)


@dataclass(frozen=True)
class ToyConfig:
    alpha: float = 1.0
    beta: float = 0.0
    eta_tau: float = 1.0
    mode: str = "directive"  # or "amplifying"
    environment: SpectralEnvironment = field(default_factory=lambda: SpectralEnvironment(flat(290.0)))
    mod_ratio: float = 0.5

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be nonnegative")
        if not 0 < self.eta_tau <= 1:
            raise ValueError("eta_tau must lie in (0, 1]")
        if self.mode not in ("directive", "amplifying"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.mod_ratio > 0:
            raise ValueError("mod_ratio must be positive")

    @property
    def omega0(self) -> float:
        return self.environment.carrier

    @property
    def mod_freq(self) -> float:
        return self.mod_ratio * self.omega0

    def lti_apertures(self) -> tuple[float, float]:
        """(peak, sphere-mean) realized aperture of the reference dipole."""
        lam2 = wavelength(self.omega0) ** 2
        mean = self.eta_tau * lam2 / (4 * math.pi)
        return DIPOLE_DIRECTIVITY * mean, mean


def noisy_neighbor(T_base: float, kappa: float, omega0: float, mod_ratio: float = 0.5,
                   **env_kwargs) -> SpectralEnvironment:
    """Flat background with a band ``kappa`` times hotter around the p=+1 harmonic only."""
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    w1 = omega0 * (1 + mod_ratio)
    half = 0.5 * mod_ratio * omega0
    return SpectralEnvironment(
        band_elevated(T_base, kappa * T_base, w1 - half * 0.999, w1 + half * 0.999),
        carrier=omega0,
        **env_kwargs,
    )


def build_aperture_set(cfg: ToyConfig) -> HarmonicApertureSet:
    """Signal aperture scaled by alpha; first harmonics at beta times the p=0 mean.

    In amplifying mode alpha is an overall gain, so it scales every mean
    aperture including the first harmonics.
    """
    peak, mean = cfg.lti_apertures()
    mean0 = mean if cfg.mode == "directive" else cfg.alpha * mean
    return HarmonicApertureSet(
        observation_freq=cfg.omega0,
        mod_freq=cfg.mod_freq,
        order=1,
        peak={0: cfg.alpha * peak},
        mean={-1: cfg.beta * mean0, 0: mean0, 1: cfg.beta * mean0},
    )


def snr_ratio(cfg: ToyConfig) -> float:
    """SNR of the time-varying receiver over that of the reference dipole (linear)."""
    peak, _ = cfg.lti_apertures()
    env = cfg.environment
    # bandwidth is irrelevant to the ratio; keep it inside one harmonic slot
    if env.bandwidth > cfg.mod_freq:
        env = replace(env, bandwidth=cfg.mod_freq)
    return snr_tv(env, build_aperture_set(cfg)) / snr_lti(env, peak, cfg.eta_tau)


def snr_ratio_grid(alphas, betas, cfg: ToyConfig) -> np.ndarray:
    """dB ratio matrix, rows indexed by alpha and columns by beta."""
    alphas = list(alphas)
    betas = list(betas)
    if not alphas or not betas:
        raise ValueError("alpha and beta grids must be nonempty")
    out = np.empty((len(alphas), len(betas)))
    for i, a in enumerate(alphas):
        for j, b in enumerate(betas):
            out[i, j] = 10 * math.log10(snr_ratio(replace(cfg, alpha=a, beta=b)))
    return out

