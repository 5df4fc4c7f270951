"""Time-domain oracle for the pumped loop: marching-on-in-time of the series
L-R-C(t) circuit followed by a windowed single-bin DFT of the steady state.

Drive and pump are tabulated over one common period so each step is a table
lookup; the charge is a compensated (Kahan) running sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numba
import numpy as np

from .errors import ConvergenceError, InstabilityError
from .noisecore import CONST
from .pamp import PhaseAveragedAperture, TVCircuitModel, voc_amplitude

SAMPLES_PER_PERIOD = 1024
MIN_SETTLE_MOD_PERIODS = 200
WINDOW_RTOL = 1e-3
MAX_COMMON_PERIOD = 1e-4  # s


@numba.njit(cache=True, nogil=True)
def _march_kernel(v_tab, invC_tab, start, n_steps, record_from, L_dt, inv_denom, dt,
                  i_prev, q, q_comp, guard):
    n_rec = n_steps - record_from
    out = np.empty(max(n_rec, 0))
    period = v_tab.size
    idx = start % period
    for n in range(n_steps):
        # capacitor voltage uses the charge accumulated through the previous step
        i = (v_tab[idx] + L_dt * i_prev - q * invC_tab[idx]) * inv_denom
        if not abs(i) < guard:
            return out, i_prev, q, q_comp, n
        y = i * dt - q_comp
        t = q + y
        q_comp = (t - q) - y
        q = t
        i_prev = i
        if n >= record_from:
            out[n - record_from] = i
        idx += 1
        if idx == period:
            idx = 0
    return out, i_prev, q, q_comp, -1


def _as_hz_fraction(omega: float) -> Fraction:
    # frequencies are resolved to 1 mHz when building the common period
    return Fraction(round(omega / (2 * math.pi) * 1000), 1000)


def common_period(*omegas: float) -> float:
    """Shortest time containing an integer number of cycles of every frequency."""
    g = Fraction(0)
    for w in omegas:
        f = abs(_as_hz_fraction(w))
        if f == 0:
            continue
        g = f if g == 0 else Fraction(math.gcd(g.numerator * f.denominator, f.numerator * g.denominator),
                                      g.denominator * f.denominator)
    if g == 0:
        raise ValueError("need at least one nonzero frequency")
    return float(1 / g)


@dataclass
class TransientRun:
    drive_freq: float  # rad/s, physical (positive)
    drive_phase: float
    drive_amplitude: float  # V
    observe_freq: float
    dt: float
    steps_per_period: int  # samples per common period
    n_settle_cycles: int  # common periods marched before recording
    window_cycles: int  # common periods per analysis window
    n_windows: int = 2
    window: str = "rect"
    samples: np.ndarray | None = field(default=None, repr=False)
    start_index: int = 0  # absolute step index of samples[0]

    @property
    def common_period(self) -> float:
        return self.dt * self.steps_per_period

    @property
    def window_len(self) -> int:
        return self.window_cycles * self.steps_per_period


def plan_run(model: TVCircuitModel, drive_freq: float, observe_freq: float, drive_phase: float = 0.0,
             drive_amplitude: float = 1.0, samples_per_period: int = SAMPLES_PER_PERIOD,
             settle_time: float | None = None, window: str = "rect") -> TransientRun:
    """Choose dt, settling length and window for a leakage-free steady-state read-out.

    dt is the shortest of the drive and pump periods over ``samples_per_period``,
    nudged so a whole number of steps spans the common period.
    """
    if drive_freq <= 0 or observe_freq <= 0:
        raise ValueError("drive and observation frequencies must be positive")
    Tc = common_period(drive_freq, model.pump_freq, observe_freq)
    if Tc > MAX_COMMON_PERIOD:
        raise ValueError(f"frequencies are not commensurate enough (common period {Tc:.3e} s)")
    shortest = 2 * math.pi / max(drive_freq, model.pump_freq)
    n_per = math.ceil(Tc / (shortest / samples_per_period))
    dt = Tc / n_per
    if settle_time is None:
        settle_time = default_settle_time(model)
    T_mod = 2 * math.pi / model.pump_freq
    window_cycles = max(1, math.ceil(MIN_SETTLE_MOD_PERIODS * T_mod / Tc))
    return TransientRun(
        drive_freq=drive_freq, drive_phase=drive_phase, drive_amplitude=drive_amplitude,
        observe_freq=observe_freq, dt=dt, steps_per_period=n_per,
        n_settle_cycles=math.ceil(settle_time / Tc), window_cycles=window_cycles, window=window,
    )


def default_settle_time(model: TVCircuitModel) -> float:
    """max(10 loop time constants, 200 pump periods, 10 pumped time constants).

    The last term uses the degenerate-pump negative resistance M/(w_p/2 C0),
    which lengthens the slowest transient well beyond 2 L/R.
    """
    R = model.R_total
    if not model.below_threshold:
        raise InstabilityError("pump depth exceeds the parametric oscillation threshold")
    tau = 2 * model.L_a / R
    tau_pumped = 2 * model.L_a / (R - model.pumped_resistance)
    return max(10 * tau, MIN_SETTLE_MOD_PERIODS * 2 * math.pi / model.pump_freq, 10 * tau_pumped)


def _tables(model: TVCircuitModel, run: TransientRun):
    t = run.dt * np.arange(run.steps_per_period)
    v = run.drive_amplitude * np.cos(run.drive_freq * t + run.drive_phase)
    invC = 1.0 / model.capacitance(t)
    if np.any(invC <= 0):
        raise ValueError("capacitance must stay positive")
    return v, invC


@dataclass
class MarchState:
    step: int = 0
    i_prev: float = 0.0
    q: float = 0.0
    q_comp: float = 0.0


def march(model: TVCircuitModel, run: TransientRun, n_steps: int | None = None, record_from: int = 0,
          state: MarchState | None = None) -> tuple[np.ndarray, MarchState]:
    """Advance the loop current ``n_steps`` steps and return the recorded tail.

    ``i_n = (v_n + L/dt i_{n-1} - (dt/C_n) sum_{n'<n} i_n') / (L/dt + R)``.
    With defaults the whole run (settle plus windows) is marched and every
    step is recorded.
    """
    if run.dt <= 0:
        raise ValueError("dt must be positive")
    if state is None:
        state = MarchState()
    if n_steps is None:
        n_steps = (run.n_settle_cycles + run.n_windows * run.window_cycles) * run.steps_per_period
    v_tab, invC_tab = _tables(model, run)
    L_dt = model.L_a / run.dt
    guard = 1e6 * max(run.drive_amplitude, 1e-300) / model.R_total
    out, i_prev, q, q_comp, bad = _march_kernel(
        v_tab, invC_tab, state.step, n_steps, record_from, L_dt, 1.0 / (L_dt + model.R_total),
        run.dt, state.i_prev, state.q, state.q_comp, guard,
    )
    if bad >= 0:
        raise InstabilityError(
            f"current exceeded the overflow guard at step {state.step + bad} "
            "(parametric oscillation or dt too large)"
        )
    return out, MarchState(state.step + n_steps, i_prev, q, q_comp)


def fourier_amplitude(samples: np.ndarray, omega: float, dt: float, start_index: int = 0,
                      window: str = "rect") -> complex:
    """Complex peak amplitude of the ``omega`` component of a sampled record."""
    n = start_index + np.arange(samples.size)
    ph = np.exp(-1j * omega * dt * n)
    if window == "rect":
        return complex(2.0 * np.dot(samples, ph) / samples.size)
    if window == "hann":
        w = np.hanning(samples.size)
        return complex(2.0 * np.dot(samples * w, ph) / w.sum())
    raise ValueError(f"unknown window {window!r}")


def run_to_steady_state(model: TVCircuitModel, run: TransientRun, max_extensions: int = 40) -> TransientRun:
    """March past settling and record ``run.n_windows`` windows that agree to 0.1%.

    Keeps marching one window at a time while successive windows disagree.
    """
    settle = run.n_settle_cycles * run.steps_per_period
    _, state = march(model, run, n_steps=settle, record_from=settle)
    W = run.window_len
    recs = []
    for _ in range(run.n_windows):
        seg, state = march(model, run, n_steps=W, state=state)
        recs.append(seg)
    for _ in range(max_extensions + 1):
        amps = [abs(fourier_amplitude(r, run.observe_freq, run.dt, window=run.window)) for r in recs[-2:]]
        if _windows_agree(*amps):
            break
        seg, state = march(model, run, n_steps=W, state=state)
        recs = recs[1:] + [seg]
    run.samples = np.concatenate(recs[-run.n_windows:])
    run.start_index = state.step - run.samples.size
    return run


def _windows_agree(a: float, b: float, floor: float = 0.0) -> bool:
    scale = max(abs(a), abs(b))
    return abs(a - b) <= WINDOW_RTOL * scale + floor


def extract_aperture(run: TransientRun, model: TVCircuitModel, observe_freq: float | None = None,
                     floor: float = 0.0) -> float:
    """Aperture from the last recorded window: P_L / (E0^2 / (2 eta0)).

    Raises ConvergenceError when the last two windows differ by more than 0.1%
    in amplitude (plus an optional absolute amplitude ``floor``).
    """
    if run.samples is None:
        raise ValueError("run has no recorded samples")
    w = run.observe_freq if observe_freq is None else observe_freq
    W = run.window_len
    if run.samples.size < 2 * W:
        raise ValueError("need two recorded windows to check convergence")
    last = run.samples[-W:]
    prev = run.samples[-2 * W:-W]
    start = run.start_index + run.samples.size - W
    a_last = abs(fourier_amplitude(last, w, run.dt, start, run.window))
    a_prev = abs(fourier_amplitude(prev, w, run.dt, start - W, run.window))
    if not _windows_agree(a_last, a_prev, floor):
        raise ConvergenceError(f"successive windows differ: {a_prev:.6e} vs {a_last:.6e}")
    return CONST.eta0 * model.R_L * a_last**2 / model.E0**2


def transient_aperture(model: TVCircuitModel, omega: float, p: int, theta: float = math.pi / 2,
                       phases=(0.0,), samples_per_period: int = SAMPLES_PER_PERIOD) -> PhaseAveragedAperture:
    """Aperture mapping the tone at ``|omega + p w_m|`` onto ``omega``, one run per incident phase."""
    w_drive = abs(omega + p * model.pump_freq)
    v = float(voc_amplitude(model, w_drive, theta))
    # amplitudes below ~1e-12 of the drive response are at round-off level
    floor = 1e-12 * v / model.R_total
    vals = []
    for phi in phases:
        run = plan_run(model, w_drive, omega, phi, v, samples_per_period)
        run_to_steady_state(model, run)
        vals.append(extract_aperture(run, model, floor=floor))
    vals = np.array(vals)
    phases = np.asarray(phases, dtype=float)
    ratio = 2 * omega / model.pump_freq
    degenerate = abs(ratio - round(ratio)) <= 1e-12 * ratio
    return PhaseAveragedAperture(mean=float(vals.mean()), min=float(vals.min()), max=float(vals.max()),
                                 phases=phases, values=vals, degenerate=degenerate)


def phase_envelope(phases, values) -> tuple[float, float]:
    """Min/max of ``c0 + c1 cos 2phi + c2 sin 2phi`` fitted to samples on a uniform phase grid."""
    phases = np.asarray(phases, dtype=float)
    values = np.asarray(values, dtype=float)
    A = np.stack([np.ones_like(phases), np.cos(2 * phases), np.sin(2 * phases)], axis=1)
    c, *_ = np.linalg.lstsq(A, values, rcond=None)
    amp = math.hypot(c[1], c[2])
    return float(c[0] - amp), float(c[0] + amp)


def average_powers(run: TransientRun, model: TVCircuitModel) -> tuple[float, float, float]:
    """Time-averaged (source, loop-dissipated, load-dissipated) power over the last window."""
    W = run.window_len
    i = run.samples[-W:]
    n = run.start_index + run.samples.size - W + np.arange(W)
    v = run.drive_amplitude * np.cos(run.drive_freq * run.dt * (n % run.steps_per_period) + run.drive_phase)
    return float(np.mean(v * i)), float(model.R_total * np.mean(i * i)), float(model.R_L * np.mean(i * i))
