"""Noise-temperature and SNR engines for LTI and periodically time-varying receivers.

Frequencies are angular (rad/s) throughout. Apertures are realized effective
apertures in m^2 and already include any polarization sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .sphere import SphereQuadrature, evaluate_on_nodes


@dataclass(frozen=True)
class Constants:
    k_B: float = 1.38e-23
    c0: float = 299_792_458.0
    # 120*pi keeps the small-antenna v_oc law consistent with A = D*lambda^2/(4*pi)
    eta0: float = 120.0 * math.pi


CONST = Constants()


def wavelength(omega: float, c0: float = CONST.c0) -> float:
    if omega <= 0:
        raise ValueError(f"wavelength needs a positive frequency, got {omega!r} rad/s")
    return 2.0 * math.pi * c0 / omega


# ---------------------------------------------------------------------------
# brightness profiles


def flat(T: float) -> Callable[[float], float]:
    """Brightness temperature that is constant over frequency."""
    if T < 0:
        raise ValueError("brightness temperature must be nonnegative")

    def T_b(omega: float) -> float:
        return float(T)

    return T_b


def band_elevated(T_base: float, T_hot: float, omega_lo: float, omega_hi: float) -> Callable[[float], float]:
    """Flat background ``T_base`` with a hotter band ``[omega_lo, omega_hi]`` at ``T_hot``."""
    if T_base < 0 or T_hot < 0:
        raise ValueError("brightness temperature must be nonnegative")
    if not omega_hi > omega_lo:
        raise ValueError("band edges must satisfy omega_lo < omega_hi")

    def T_b(omega: float) -> float:
        return float(T_hot) if omega_lo <= omega <= omega_hi else float(T_base)

    return T_b


@dataclass(frozen=True)
class SpectralEnvironment:
    """External noise brightness plus the descriptor of the wanted signal.

    ``brightness`` is ``T_b(omega)`` when ``angular`` is False and
    ``T_b(omega, khat)`` otherwise.
    """

    brightness: Callable[..., float]
    signal_psd_total: float = 1.0
    signal_direction: tuple[float, float, float] = (1.0, 0.0, 0.0)
    carrier: float = 2 * math.pi * 300e6
    bandwidth: float = 2 * math.pi * 1e6
    angular: bool = False

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")
        if not self.carrier > 0:
            raise ValueError("carrier must be positive")
        if self.signal_psd_total < 0:
            raise ValueError("signal power must be nonnegative")
        norm = math.sqrt(sum(x * x for x in self.signal_direction))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"signal direction must be a unit vector (|k|={norm})")

    def T_b(self, omega: float, khat=None) -> float:
        T = self.brightness(omega, khat) if self.angular else self.brightness(omega)
        if T is None or not math.isfinite(T):
            raise ValueError(f"brightness undefined at omega={omega}")
        if T < 0:
            raise ValueError(f"negative brightness temperature {T} at omega={omega}")
        return T

    def check_tv_bandwidth(self, mod_freq: float) -> None:
        # signal must fit inside a single harmonic slot
        if self.bandwidth > mod_freq:
            raise ValueError(
                f"bandwidth {self.bandwidth:g} rad/s exceeds modulation frequency {mod_freq:g} rad/s"
            )


@dataclass
class HarmonicApertureSet:
    """Signal-direction and sphere-averaged cross-frequency apertures for ``|p| <= order``.

    ``peak`` is the aperture towards the wanted signal, so it may lie below the mean.
    """

    observation_freq: float
    mod_freq: float
    order: int
    peak: dict[int, float] = field(default_factory=dict)
    mean: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        self.peak = {int(p): float(v) for p, v in self.peak.items()}
        self.mean = {int(p): float(v) for p, v in self.mean.items()}
        for p in range(-self.order, self.order + 1):
            self.mean.setdefault(p, 0.0)
        for name, table in (("peak", self.peak), ("mean", self.mean)):
            for p, v in table.items():
                if not math.isfinite(v) or v < 0:
                    raise ValueError(f"{name}[{p}] = {v} is not a finite nonnegative aperture")

    def harmonic_freq(self, p: int) -> float:
        return self.observation_freq + p * self.mod_freq


# ---------------------------------------------------------------------------
# LTI


def lti_noise_temperature_iso(eta_tau: float, T_b: float) -> float:
    if not 0.0 <= eta_tau <= 1.0:
        raise ValueError(f"eta_tau must lie in [0, 1], got {eta_tau}")
    if T_b < 0:
        raise ValueError("brightness temperature must be nonnegative")
    return eta_tau * T_b


def _check_quad(quad: SphereQuadrature) -> None:
    if quad is None or len(quad.weights) == 0:
        raise ValueError("quadrature rule is empty")
    total = float(np.sum(quad.weights))
    if abs(total - 4 * math.pi) > 1e-12 * 4 * math.pi:
        raise ValueError(f"quadrature weights sum to {total}, expected 4*pi")


def lti_noise_temperature_angular(aperture, brightness, wavelength: float, quad: SphereQuadrature) -> float:
    """``lambda^-2 * integral A(k) T_b(k) dk`` by quadrature."""
    _check_quad(quad)
    A = np.real_if_close(evaluate_on_nodes(aperture, quad.nodes)).astype(float)
    T = np.real_if_close(evaluate_on_nodes(brightness, quad.nodes)).astype(float)
    return float(np.dot(quad.weights, A * T)) / wavelength**2


# ---------------------------------------------------------------------------
# time-varying


def harmonic_sum(freqs: Sequence[float], means: Sequence[float], temps: Sequence[float],
                 c0: float = CONST.c0) -> float:
    """``4*pi * sum T_p * Abar_p / lambda_p^2`` for explicit positive harmonic frequencies."""
    total = 0.0
    for w, A, T in zip(freqs, means, temps):
        if A == 0.0:
            continue
        total += T * A / wavelength(w, c0) ** 2
    return 4.0 * math.pi * total


def tv_noise_temperature_iso(apertures: HarmonicApertureSet, env: SpectralEnvironment) -> float:
    freqs, means, temps = [], [], []
    for p in sorted(apertures.mean):
        A = apertures.mean[p]
        w = apertures.harmonic_freq(p)
        if w <= 0:
            if A != 0.0:
                raise ValueError(
                    f"harmonic p={p} sits at nonpositive frequency {w:g} rad/s with nonzero aperture"
                )
            continue
        T = env.T_b(w)
        freqs.append(w)
        means.append(A)
        temps.append(T)
    return harmonic_sum(freqs, means, temps)


def tv_noise_temperature_angular(apertures, brightness, observation_freq: float, mod_freq: float,
                                 order: int, quad: SphereQuadrature) -> float:
    """Angularly resolved TV temperature.

    ``apertures(p, nodes)`` and ``brightness(p, nodes)`` return per-node values
    for harmonic ``p`` (scalar-per-direction callables are also accepted).
    """
    _check_quad(quad)
    total = 0.0
    for p in range(-order, order + 1):
        A = np.real_if_close(evaluate_on_nodes(lambda k, p=p: apertures(p, k), quad.nodes)).astype(float)
        if not np.any(A):
            continue
        w = observation_freq + p * mod_freq
        if w <= 0:
            raise ValueError(f"harmonic p={p} sits at nonpositive frequency with nonzero aperture")
        T = np.real_if_close(evaluate_on_nodes(lambda k, p=p: brightness(p, k), quad.nodes)).astype(float)
        total += float(np.dot(quad.weights, A * T)) / wavelength(w) ** 2
    return total


# ---------------------------------------------------------------------------
# SNR


def snr_lti(env: SpectralEnvironment, A_eff_signal: float, eta_tau: float) -> float:
    T_A = lti_noise_temperature_iso(eta_tau, env.T_b(env.carrier))
    if T_A == 0:
        raise ZeroDivisionError("noise temperature is zero; SNR undefined")
    return env.signal_psd_total * A_eff_signal / (CONST.k_B * env.bandwidth * T_A)


def snr_tv(env: SpectralEnvironment, apertures: HarmonicApertureSet) -> float:
    if 0 not in apertures.peak:
        raise ValueError("aperture set has no signal (p=0) peak aperture")
    env.check_tv_bandwidth(apertures.mod_freq)
    T_A = tv_noise_temperature_iso(apertures, env)
    if T_A == 0:
        raise ZeroDivisionError("noise temperature is zero; SNR undefined")
    return apertures.peak[0] * env.signal_psd_total / (CONST.k_B * env.bandwidth * T_A)


def to_db(x: float) -> float:
    return 10.0 * math.log10(x)


__all__ = [
    "CONST", "Constants", "HarmonicApertureSet", "SpectralEnvironment", "band_elevated", "flat",
    "harmonic_sum", "lti_noise_temperature_angular", "lti_noise_temperature_iso", "snr_lti",
    "snr_tv", "to_db", "tv_noise_temperature_angular", "tv_noise_temperature_iso", "wavelength",
]

