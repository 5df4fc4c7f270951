"""Conversion-matrix analysis of a small loop loaded by a pumped capacitor.

The loop is a Thevenin source (v_oc, R_a, L_a) in series with the
time-varying capacitor C(t) = C0 [1 + 2 M cos(w_m t + psi)] and a resistive
load R_L = r R_a. The capacitor is written through its elastance S = 1/C so
that v_C = S(t) q is linear in the harmonics of the charge q.

Sideband ``p`` sits at the signed frequency ``w + p w_m``. A physical tone at
a negative sideband frequency is carried by the conjugate phasor, and a tone
that lands on two sidebands at once (``w_q = -w_p``, the degenerate case)
populates both slots coherently.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import SingularSystemError, TruncationWarning
from .noisecore import CONST, HarmonicApertureSet, SpectralEnvironment, harmonic_sum, wavelength
from .sphere import SphereQuadrature, build_product_rule

DESIGN_FREQ = 2 * math.pi * 300e6
DEFAULT_ORDER = 4
DEFAULT_TRUNCATION = 8
DEFAULT_N_PHASE = 16
# sphere mean of the 1.5 sin^2 pattern relative to its broadside peak
MEAN_OVER_PEAK = 2.0 / 3.0
_DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class TVCircuitModel:
    R_a: float = 0.0523
    L_a: float = 104.9e-9
    load_ratio: float = 1.1
    M: float = 5e-4
    design_freq: float = DESIGN_FREQ
    C0: float | None = None
    pump_freq: float | None = None
    pump_phase: float = 0.0
    E0: float = 1.0

    def __post_init__(self):
        if self.C0 is None:
            object.__setattr__(self, "C0", 1.0 / (self.design_freq**2 * self.L_a))
        if self.pump_freq is None:
            object.__setattr__(self, "pump_freq", 2.0 * self.design_freq)
        if not (self.R_a > 0 and self.L_a > 0 and self.C0 > 0):
            raise ValueError("R_a, L_a and C0 must be positive")
        if not 0.0 <= self.M < 0.5:
            raise ValueError(f"modulation depth M must lie in [0, 1/2), got {self.M}")
        if self.load_ratio <= 0:
            raise ValueError("load ratio must be positive")
        if not self.pump_freq > 0:
            raise ValueError("pump frequency must be positive")
        resonant = 1.0 / (self.design_freq**2 * self.L_a)
        if abs(self.C0 - resonant) > 1e-9 * resonant:
            raise ValueError("C0 must resonate L_a at the design frequency")

    @property
    def R_L(self) -> float:
        return self.load_ratio * self.R_a

    @property
    def R_total(self) -> float:
        return self.R_a + self.R_L

    @property
    def mod_freq(self) -> float:
        return self.pump_freq

    def capacitance(self, t):
        return self.C0 * (1.0 + 2.0 * self.M * np.cos(self.pump_freq * t + self.pump_phase))

    @property
    def pumped_resistance(self) -> float:
        """Negative resistance M/((w_m/2) C0) the pump presents at half the pump frequency.

        Only meaningful when half the pump frequency lies within a few loop
        bandwidths of resonance; a detuned pump returns 0 here and is left to
        the conditioning check of the conversion matrix.
        """
        detune = abs(0.5 * self.pump_freq - self.design_freq)
        if detune > 10 * self.R_total / (2 * self.L_a):
            return 0.0
        return self.M / (0.5 * self.pump_freq * self.C0)

    @property
    def below_threshold(self) -> bool:
        return self.pumped_resistance < (1 - 1e-9) * self.R_total

    def lti_reference(self) -> "TVCircuitModel":
        """Conjugate-matched, unpumped version of the same loop."""
        return replace(self, load_ratio=1.0, M=0.0)


def directivity(theta):
    return 1.5 * np.sin(theta) ** 2


def voc_amplitude(model: TVCircuitModel, omega: float, theta=math.pi / 2):
    """Open-circuit voltage amplitude of the short loop for a plane wave of amplitude E0."""
    if omega <= 0:
        raise ValueError(f"open-circuit voltage needs omega > 0, got {omega}")
    return model.E0 * (2 * CONST.c0 / omega) * np.sqrt(model.R_a * directivity(theta) / 120.0)


def elastance_coefficients(model: TVCircuitModel, truncation: int = DEFAULT_TRUNCATION,
                           n_fft: int = 2**16) -> np.ndarray:
    """Fourier coefficients S_m of 1/C(t), returned for m = -truncation..truncation."""
    t = 2 * math.pi * np.arange(n_fft) / n_fft
    s = 1.0 / (model.C0 * (1.0 + 2.0 * model.M * np.cos(t + model.pump_phase)))
    c = np.fft.fft(s) / n_fft
    m = np.arange(-truncation, truncation + 1)
    S = c[m % n_fft]
    if truncation > 0 and abs(S[-1]) > 1e-15 * abs(S[truncation]):
        warnings.warn(
            f"elastance series truncated at |m|={truncation} with |S_m/S_0|={abs(S[-1] / S[truncation]):.2e}",
            TruncationWarning,
            stacklevel=2,
        )
    if model.M == 0.0:
        S[np.arange(S.size) != truncation] = 0.0
    return S


@dataclass
class ConversionSystem:
    omega: float
    mod_freq: float
    order: int
    freqs: np.ndarray  # signed sideband frequencies, index p + order
    Z: np.ndarray
    elastance: np.ndarray
    _inv: np.ndarray | None = field(default=None, repr=False)

    def index(self, p: int) -> int:
        if abs(p) > self.order:
            raise IndexError(f"harmonic {p} outside the retained order {self.order}")
        return p + self.order

    @property
    def Y(self) -> np.ndarray:
        if self._inv is None:
            cond = np.linalg.cond(self.Z)
            if not np.isfinite(cond) or cond > 1e13:
                raise SingularSystemError(
                    f"conversion matrix is numerically singular (cond={cond:.3e}); "
                    "pump may exceed the parametric oscillation threshold"
                )
            self._inv = np.linalg.inv(self.Z)
        return self._inv

    def solve(self, V: np.ndarray) -> np.ndarray:
        return self.Y @ V

    def mirror(self, p: int) -> int | None:
        """Slot q != p whose frequency is the negative image of slot p, if retained."""
        wp = self.freqs[self.index(p)]
        for q in range(-self.order, self.order + 1):
            if q != p and abs(self.freqs[q + self.order] + wp) <= _DEGENERATE_RTOL * abs(wp):
                return q
        return None


def assemble_conversion_matrix(model: TVCircuitModel, omega: float, P: int = DEFAULT_ORDER,
                               truncation: int = DEFAULT_TRUNCATION) -> ConversionSystem:
    """KVL over the sidebands ``omega + p*w_m`` for ``|p| <= P``.

    Entry (p, p') is ``delta_pp' (R_a + R_L + j w_p L_a) + S_{p-p'} / (j w_p')``.
    """
    if P < 2:
        raise ValueError("harmonic order P must be at least 2")
    if not model.below_threshold:
        raise SingularSystemError(
            f"pump depth M={model.M:g} reaches the parametric oscillation threshold "
            f"(pumped resistance {model.pumped_resistance:.4g} ohm vs loop {model.R_total:.4g} ohm)"
        )
    ps = np.arange(-P, P + 1)
    w = omega + ps * model.mod_freq
    if np.any(np.abs(w) <= 1e-12 * model.mod_freq):
        raise SingularSystemError(f"a sideband of omega={omega:g} falls on 0 rad/s; capacitor impedance is singular")
    S = elastance_coefficients(model, truncation)
    dp = ps[:, None] - ps[None, :]
    Z = np.zeros((ps.size, ps.size), dtype=complex)
    mask = np.abs(dp) <= truncation
    Z[mask] = S[dp[mask] + truncation]
    Z /= 1j * w[None, :]
    Z[np.diag_indices_from(Z)] += model.R_total + 1j * w * model.L_a
    return ConversionSystem(omega=omega, mod_freq=model.mod_freq, order=P, freqs=w, Z=Z, elastance=S)


@dataclass(frozen=True)
class PhaseAveragedAperture:
    mean: float
    min: float
    max: float
    phases: np.ndarray
    values: np.ndarray
    degenerate: bool

    def __float__(self) -> float:
        return self.mean


def incident_response(system: ConversionSystem, model: TVCircuitModel, p: int, theta=math.pi / 2):
    """Complex slot-0 currents ``(a, b)`` for a unit-phase tone at sideband ``p``.

    The current at the observation frequency for incident phase ``phi`` is
    ``a e^{j phi} + b e^{-j phi}``. ``b`` is nonzero only at degeneracy.
    """
    i0 = system.index(0)
    ip = system.index(p)
    wp = system.freqs[ip]
    v = voc_amplitude(model, abs(wp), theta)
    Y = system.Y
    # positive slot carries v e^{j phi}, negative slot the conjugate tone v e^{-j phi}
    col_pos, col_neg = Y[i0, ip] * v, 0.0
    if wp < 0:
        col_pos, col_neg = 0.0, Y[i0, ip] * v
    q = system.mirror(p)
    if q is not None:
        iq = system.index(q)
        if wp > 0:
            col_neg = col_neg + Y[i0, iq] * v
        else:
            col_pos = col_pos + Y[i0, iq] * v
    return complex(col_pos), complex(col_neg), q is not None


def cross_aperture(model: TVCircuitModel, omega: float, p: int, theta=math.pi / 2, P: int = DEFAULT_ORDER,
                   n_phase: int = DEFAULT_N_PHASE, truncation: int = DEFAULT_TRUNCATION,
                   system: ConversionSystem | None = None) -> PhaseAveragedAperture:
    """Phase-averaged aperture mapping sideband ``p`` onto ``omega``.

    Returns the mean over ``n_phase`` uniformly spaced incident phases together
    with the min/max over those phases.
    """
    if n_phase < 1:
        raise ValueError("n_phase must be at least 1")
    if omega <= 0:
        raise ValueError("observation frequency must be positive")
    if system is None:
        system = assemble_conversion_matrix(model, omega, P, truncation)
    a, b, degenerate = incident_response(system, model, p, theta)
    phases = 2 * math.pi * np.arange(n_phase) / n_phase
    I0 = a * np.exp(1j * phases) + b * np.exp(-1j * phases)
    scale = CONST.eta0 * model.R_L / model.E0**2
    vals = scale * np.abs(I0) ** 2
    return PhaseAveragedAperture(
        mean=float(np.mean(vals)), min=float(np.min(vals)), max=float(np.max(vals)),
        phases=phases, values=vals, degenerate=degenerate,
    )


def aperture_envelope(model: TVCircuitModel, omega: float, p: int, theta=math.pi / 2, P: int = DEFAULT_ORDER,
                      system: ConversionSystem | None = None) -> tuple[float, float]:
    """Exact min/max of the aperture over all incident phases."""
    if system is None:
        system = assemble_conversion_matrix(model, omega, P)
    a, b, _ = incident_response(system, model, p, theta)
    scale = CONST.eta0 * model.R_L / model.E0**2
    return scale * (abs(a) - abs(b)) ** 2, scale * (abs(a) + abs(b)) ** 2


@dataclass
class SpectrumPoint:
    omega: float
    apertures: HarmonicApertureSet
    envelope: dict[int, tuple[float, float]]
    degenerate: dict[int, bool]


def aperture_spectrum(model: TVCircuitModel, omega_grid, p_set=None, P: int = DEFAULT_ORDER,
                      n_phase: int = DEFAULT_N_PHASE) -> list[SpectrumPoint]:
    """Broadside cross apertures scaled by 2/3 to sphere means, per observation frequency."""
    if p_set is None:
        p_set = range(-P, P + 1)
    out = []
    for omega in omega_grid:
        system = assemble_conversion_matrix(model, omega, P)
        peak, mean, env, deg = {}, {}, {}, {}
        for p in p_set:
            r = cross_aperture(model, omega, p, P=P, n_phase=n_phase, system=system)
            peak[p] = r.mean
            mean[p] = MEAN_OVER_PEAK * r.mean
            env[p] = (MEAN_OVER_PEAK * r.min, MEAN_OVER_PEAK * r.max)
            deg[p] = r.degenerate
        aps = HarmonicApertureSet(observation_freq=omega, mod_freq=model.mod_freq, order=P, peak=peak, mean=mean)
        out.append(SpectrumPoint(omega=omega, apertures=aps, envelope=env, degenerate=deg))
    return out


def aperture_sum_temperature(apertures: HarmonicApertureSet, env: SpectralEnvironment, p_set=None) -> float:
    """Isotropic TV temperature with negative sidebands folded onto |w_p|."""
    if p_set is None:
        p_set = sorted(apertures.mean)
    freqs = [abs(apertures.harmonic_freq(p)) for p in p_set]
    means = [apertures.mean[p] for p in p_set]
    temps = [env.T_b(w) for w in freqs]
    return harmonic_sum(freqs, means, temps)


def covariance_noise_temperature(model: TVCircuitModel, omega: float, env: SpectralEnvironment,
                                 P: int = DEFAULT_ORDER, quad: SphereQuadrature | None = None,
                                 truncation: int = DEFAULT_TRUNCATION) -> float:
    """Noise temperature from the current covariance ``Z^-1 C_V Z^-H``.

    Each sideband contributes an independent (diagonal) voltage covariance
    built from the isotropic brightness at ``|w_p|``.
    """
    if quad is None:
        quad = build_product_rule(16, 8)
    system = assemble_conversion_matrix(model, omega, P, truncation)
    theta = quad.theta
    cv = np.zeros(system.freqs.size)
    for i, wp in enumerate(system.freqs):
        w = abs(wp)
        T = env.T_b(w)
        if T == 0.0:
            continue
        v = voc_amplitude(model, w, theta) / model.E0
        cv[i] = 2 * CONST.eta0 * CONST.k_B * T / wavelength(w) ** 2 * float(np.dot(quad.weights, v**2))
    Y = system.Y
    CI = Y @ np.diag(cv) @ Y.conj().T
    i0 = system.index(0)
    return float(model.R_L / (2 * CONST.k_B) * CI[i0, i0].real)
