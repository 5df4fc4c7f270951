"""Ideal time-modulated array: switched isotropic elements summed by a combiner.

Conventions
-----------
``khat`` is the direction of arrival (unit vector pointing from the array
towards the source). The switch of element ``k`` is a unit gate that is on for
``t in [t_k, t_k + tau_k)`` of each period ``T`` and has Fourier coefficients
``U_k^p = tau_k sinc(pi p tau_k) exp(-j pi p (2 t_k + tau_k))``. The combiner
forms ``sum_k conj(A_k) v_k``, the usual beamformer convention, so the
directional aperture reads

    A^p(w, khat) = (eta0 l^2 / Z0) sum_{k,k'} A_k A_k'^* U_k^p U_k'^p* exp(-j phi_kk'),
    phi_kk' = (w + p w_m) khat . (r_k - r_k') / c.

Apertures are reported in units of the prefactor ``eta0 l^2 / Z0`` (1 m^2)
unless an effective length and load are given.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .noisecore import CONST, wavelength
from .sphere import SphereQuadrature, build_product_rule, sphere_average


@dataclass(frozen=True)
class TMAConfig:
    positions: np.ndarray  # (K, 3), m
    weights: np.ndarray  # (K,), complex
    t_hat: np.ndarray  # (K,) normalized switch-on times
    tau_hat: np.ndarray  # (K,) normalized on-durations
    period: float  # s
    order: int = 2
    ell: float | None = None
    Z0: float | None = None

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        K = pos.shape[0]
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "weights", np.broadcast_to(np.asarray(self.weights, dtype=complex), (K,)).copy())
        object.__setattr__(self, "t_hat", np.broadcast_to(np.asarray(self.t_hat, dtype=float), (K,)).copy())
        object.__setattr__(self, "tau_hat", np.broadcast_to(np.asarray(self.tau_hat, dtype=float), (K,)).copy())
        if K < 1 or pos.shape[1] != 3:
            raise ValueError("positions must be a (K, 3) array with K >= 1")
        if np.any(self.t_hat < 0):
            raise ValueError("switch-on times must be nonnegative")
        if np.any(self.tau_hat <= 0) or np.any(self.tau_hat > 1):
            raise ValueError("on-durations must lie in (0, 1]")
        if not self.period > 0:
            raise ValueError("period must be positive")
        if self.order < 0:
            raise ValueError("harmonic order must be nonnegative")
        if (self.ell is None) != (self.Z0 is None):
            raise ValueError("give both ell and Z0 for absolute apertures, or neither")

    @property
    def K(self) -> int:
        return self.positions.shape[0]

    @property
    def mod_freq(self) -> float:
        return 2 * math.pi / self.period

    @property
    def prefactor(self) -> float:
        if self.ell is None:
            return 1.0
        return CONST.eta0 * self.ell**2 / self.Z0


def reference_array(M: float = 1000.0, omega0: float = 2 * math.pi * 300e6, K: int = 8, order: int = 2) -> TMAConfig:
    """Half-wavelength linear array with two-cycle staggered quarter-period gates."""
    k = np.arange(1, K + 1)
    lam0 = wavelength(omega0)
    pos = np.zeros((K, 3))
    pos[:, 0] = k * lam0 / 2
    return TMAConfig(
        positions=pos, weights=np.ones(K), t_hat=np.mod((k - 1) / 4, 1.0), tau_hat=np.full(K, 0.25),
        period=2 * math.pi * M / omega0, order=order,
    )


@dataclass(frozen=True)
class SwitchSpectrum:
    order: int
    coefficients: np.ndarray  # index p + order

    def __getitem__(self, p: int) -> complex:
        if abs(p) > self.order:
            raise IndexError(p)
        return complex(self.coefficients[p + self.order])


def gate_coefficients(t_hat, tau_hat, p) -> np.ndarray:
    """Fourier coefficient of the unit gate at harmonic ``p`` (vectorized over elements)."""
    t_hat = np.asarray(t_hat, dtype=float)
    tau_hat = np.asarray(tau_hat, dtype=float)
    # np.sinc(x) = sin(pi x)/(pi x)
    return tau_hat * np.sinc(p * tau_hat) * np.exp(-1j * math.pi * p * (2 * t_hat + tau_hat))


def switch_spectrum(cfg: TMAConfig, k: int, P: int | None = None) -> SwitchSpectrum:
    P = cfg.order if P is None else P
    ps = np.arange(-P, P + 1)
    return SwitchSpectrum(order=P, coefficients=gate_coefficients(cfg.t_hat[k], cfg.tau_hat[k], ps))


def _harmonic_freq(cfg: TMAConfig, omega: float, p: int) -> float:
    wp = omega + p * cfg.mod_freq
    if wp <= 0:
        raise ValueError(f"harmonic p={p} of omega={omega:g} is at nonpositive frequency {wp:g}")
    return wp


def directional_aperture(cfg: TMAConfig, omega: float, p: int, khat) -> np.ndarray | float:
    """Cross-frequency aperture for arrivals from ``khat`` (shape (3,) or (N, 3))."""
    wp = _harmonic_freq(cfg, omega, p)
    khat = np.asarray(khat, dtype=float)
    single = khat.ndim == 1
    khat = np.atleast_2d(khat)
    a = cfg.weights * gate_coefficients(cfg.t_hat, cfg.tau_hat, p)
    proj = khat @ cfg.positions.T  # (N, K)
    phi = wp * (proj[:, :, None] - proj[:, None, :]) / CONST.c0
    total = np.einsum("k,l,nkl->n", a, a.conj(), np.exp(-1j * phi))
    scale = np.sum(np.abs(a)) ** 2
    resid = np.abs(total.imag)
    if np.any(resid > 1e-12 * max(scale, 1e-300)):
        raise ArithmeticError(f"aperture double sum is not real (max imag {resid.max():.3e})")
    vals = cfg.prefactor * total.real
    return float(vals[0]) if single else vals


def _pair_distances(cfg: TMAConfig) -> np.ndarray:
    d = cfg.positions[:, None, :] - cfg.positions[None, :, :]
    return np.linalg.norm(d, axis=2)


def mean_aperture(cfg: TMAConfig, omega: float, p: int, method: str = "closed_form",
                  quad: SphereQuadrature | None = None) -> float:
    """Sphere average of the directional aperture.

    ``closed_form`` uses <exp(-j k.d)> = sin(k|d|)/(k|d|); ``quadrature``
    integrates the directional aperture numerically.
    """
    if method == "closed_form":
        wp = _harmonic_freq(cfg, omega, p)
        a = cfg.weights * gate_coefficients(cfg.t_hat, cfg.tau_hat, p)
        S = np.sinc(wp * _pair_distances(cfg) / CONST.c0 / math.pi)
        return float(cfg.prefactor * np.real(a @ S @ a.conj()))
    if method == "quadrature":
        if quad is None:
            quad = build_product_rule()
        return float(sphere_average(lambda k: directional_aperture(cfg, omega, p, k), quad))
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class FilteredTemperature:
    P_filter: int
    temperature: float  # K
    ratio_db: float  # relative to P_filter = 0


def filtered_noise_temperature(cfg: TMAConfig, omega0: float, P_filter: int, T_b0: float = 290.0) -> FilteredTemperature:
    """Narrowband-modulation temperature with a brick-wall filter keeping |p| <= P_filter.

    All harmonics share lambda_0 and T_b0, so the dB ratio is just the partial
    sum of the mean apertures over the p = 0 term.
    """
    if P_filter < 0:
        raise ValueError("filter width must be nonnegative")
    means = [mean_aperture(cfg, omega0, p) for p in range(-P_filter, P_filter + 1)]
    T = 4 * math.pi * T_b0 / wavelength(omega0) ** 2 * sum(means)
    ratio = sum(means) / mean_aperture(cfg, omega0, 0)
    return FilteredTemperature(P_filter=P_filter, temperature=T, ratio_db=10 * math.log10(ratio))


def _gate_samples(t_hat: float, tau_hat: float, n_per: int, n_periods: int) -> np.ndarray:
    """Cell-averaged gate on a grid of ``n_per`` samples per period.

    Sample ``n`` holds the fraction of ``[n - 1/2, n + 1/2)`` (in sample units)
    during which the switch is on, which keeps edge timing exact to first order.
    """
    lo = t_hat * n_per
    hi = (t_hat + tau_hat) * n_per
    n = np.arange(n_per, dtype=float)
    cov = np.zeros(n_per)
    # on-interval may wrap past the period end; test shifted copies
    for shift in (-n_per, 0, n_per, 2 * n_per):
        a = np.clip(lo + shift, n - 0.5, n + 0.5)
        b = np.clip(hi + shift, n - 0.5, n + 0.5)
        cov += b - a
    return np.tile(np.minimum(cov, 1.0), n_periods)


def time_domain_aperture(cfg: TMAConfig, omega: float, p: int, khat, n_phase: int = 4,
                         samples_per_period: int = 64, n_periods: int = 8, analytic: bool = True) -> float:
    """Aperture from a sampled time-domain simulation of the switched array.

    Each element sees the incident tone at ``omega + p w_m`` delayed by its
    position, is gated by its switch and weighted by ``conj(A_k)``; the
    combined voltage is read at ``omega`` with a single-bin DFT over
    ``n_periods`` switching periods. With ``analytic=False`` the tone is a real
    cosine, so its negative-frequency image is folded in as well.
    """
    if samples_per_period < 16:
        raise ValueError("sampling must be at least 16 points per shortest retained period (aliasing)")
    wp = _harmonic_freq(cfg, omega, p)
    khat = np.asarray(khat, dtype=float)
    Om = cfg.mod_freq
    P = max(cfg.order, abs(p))
    w_max = max(abs(omega + q * Om) for q in range(-P, P + 1))
    cycles_per_period = w_max / Om
    n_per = samples_per_period * max(1, math.ceil(cycles_per_period))
    n_per += (-n_per) % 4
    if not analytic:
        m = omega / Om
        if abs(m - round(m)) > 1e-9 * max(1.0, m):
            raise ValueError("real-tone simulation needs omega to be a multiple of the modulation frequency")
    N = n_per * n_periods
    t = cfg.period * np.arange(N) / n_per
    delays = cfg.positions @ khat / CONST.c0
    gates = [_gate_samples(cfg.t_hat[k], cfg.tau_hat[k], n_per, n_periods) for k in range(cfg.K)]
    demod = np.exp(-1j * omega * t)
    vals = []
    for phi in 2 * math.pi * np.arange(n_phase) / n_phase:
        v = np.zeros(N, dtype=complex)
        for k in range(cfg.K):
            arg = wp * (t + delays[k]) + phi
            e_k = np.exp(1j * arg) if analytic else np.cos(arg)
            v = v + np.conj(cfg.weights[k]) * gates[k] * e_k
        V = np.dot(v, demod) / N
        if not analytic:
            V *= 2.0
        vals.append(abs(V) ** 2)
    return float(cfg.prefactor * np.mean(vals))
