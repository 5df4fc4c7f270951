"""Scenario runners behind the command line: config dict in, tables and diagnostics out.

Configs give frequencies in Hz; everything is converted to rad/s here, once.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources

import jsonschema
import numpy as np

from . import pamp, tma, toymodel, transient
from .noisecore import SpectralEnvironment, band_elevated, flat
from .output import Table
from .sphere import build_product_rule, sphere_average

TWO_PI = 2 * math.pi
MHZ = 1e6


def hz(f: float) -> float:
    return TWO_PI * f


def to_hz(w: float) -> float:
    return w / TWO_PI


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("config_schema.json").read_text(encoding="utf-8"))


def validate_config(cfg: dict) -> None:
    """Raise ``jsonschema.ValidationError`` on any schema violation."""
    jsonschema.validate(cfg, load_schema(), cls=jsonschema.Draft202012Validator)


def expand_axis(spec) -> np.ndarray:
    if isinstance(spec, list):
        return np.asarray(spec, dtype=float)
    start, stop, num = spec["start"], spec["stop"], spec["num"]
    if spec.get("spacing", "linear") == "log":
        if start <= 0 or stop <= 0:
            raise ValueError("log axis needs positive endpoints")
        return np.logspace(math.log10(start), math.log10(stop), num)
    return np.linspace(start, stop, num)


@dataclass
class ScenarioResult:
    tables: dict[str, Table]
    diagnostics: dict = field(default_factory=dict)
    passed: bool = True


def _ordered_map(fn, items, threads: int):
    # results come back in input order regardless of completion order
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# toy


def build_toy(block: dict) -> tuple[toymodel.ToyConfig, np.ndarray, np.ndarray, str]:
    carrier = hz(block.get("carrier_hz", 300 * MHZ))
    mod_ratio = block.get("mod_ratio", 0.5)
    env_spec = block.get("environment", {"kind": "flat"})
    T0 = env_spec.get("T_b_K", 290.0)
    kind = env_spec["kind"]
    if kind == "flat":
        env = SpectralEnvironment(flat(T0), carrier=carrier)
    elif kind == "noisy_neighbor":
        env = toymodel.noisy_neighbor(T0, env_spec.get("kappa", 10.0), carrier, mod_ratio)
    else:
        missing = [k for k in ("T_hot_K", "band_lo_hz", "band_hi_hz") if k not in env_spec]
        if missing:
            raise ValueError(f"band_elevated environment needs {missing}")
        env = SpectralEnvironment(
            band_elevated(T0, env_spec["T_hot_K"], hz(env_spec["band_lo_hz"]), hz(env_spec["band_hi_hz"])),
            carrier=carrier,
        )
    cfg = toymodel.ToyConfig(eta_tau=block.get("eta_tau", 1.0), mode=block.get("mode", "directive"),
                             environment=env, mod_ratio=mod_ratio)
    default = {"start": 0.1, "stop": 10.0, "num": 41, "spacing": "log"}
    alphas = expand_axis(block.get("alphas", default))
    betas = expand_axis(block.get("betas", default))
    if np.any(alphas < 0) or np.any(betas < 0):
        raise ValueError("alpha and beta must be nonnegative")
    return cfg, alphas, betas, ("fig3" if kind == "flat" else "fig4")


def run_toy(block: dict, figure: str | None = None, threads: int = 1) -> ScenarioResult:
    cfg, alphas, betas, default_fig = build_toy(block)
    rows = _ordered_map(lambda a: toymodel.snr_ratio_grid([a], betas, cfg)[0], alphas, threads)
    table = Table(["alpha \\ beta (SNR_TV/SNR_LTI, dB)"] + [f"{b:.12g}" for b in betas])
    for a, row in zip(alphas, rows):
        table.add(float(a), *[float(x) for x in row])
    grid = np.array(rows)
    diag = {
        "shape": [len(alphas), len(betas)],
        # ratio should never increase with beta
        "monotone_nonincreasing_in_beta": bool(np.all(np.diff(grid, axis=1) <= 1e-12)),
    }
    return ScenarioResult({figure or default_fig: table}, diag)


# ---------------------------------------------------------------------------
# parametric loop


def build_pamp_model(block: dict) -> pamp.TVCircuitModel:
    w0 = hz(block.get("design_freq_hz", 300 * MHZ))
    return pamp.TVCircuitModel(
        R_a=block.get("R_a_ohm", 0.0523), L_a=block.get("L_a_H", 104.9e-9),
        load_ratio=block.get("load_ratio", 1.1), M=block.get("M", 5e-4), design_freq=w0,
        pump_freq=block.get("pump_ratio", 2.0) * w0, pump_phase=block.get("pump_phase_rad", 0.0),
    )


def _transient_row(model, omega, p, n_phase, spp):
    ratio = 2 * omega / model.pump_freq
    if abs(ratio - round(ratio)) > 1e-12 * ratio:
        # off degeneracy the response does not depend on the incident phase
        n_phase = 1
    phases = TWO_PI * np.arange(n_phase) / n_phase
    r = transient.transient_aperture(model, omega, p, phases=phases, samples_per_period=spp)
    k = pamp.MEAN_OVER_PEAK
    if r.degenerate and n_phase >= 3:
        lo, hi = transient.phase_envelope(r.phases, r.values)
    else:
        lo, hi = r.min, r.max
    return k * r.mean, k * lo, k * hi, r.degenerate


def run_pamp(block: dict, figure: str | None = None, threads: int = 1) -> ScenarioResult:
    model = build_pamp_model(block)
    P = block.get("order", pamp.DEFAULT_ORDER)
    n_phase = block.get("n_phase", pamp.DEFAULT_N_PHASE)
    harmonics = block.get("harmonics", [-2, -1, 0, 1])
    if any(abs(p) > P for p in harmonics):
        raise ValueError(f"harmonics {harmonics} exceed the retained order {P}")
    f0 = to_hz(model.design_freq)
    sweep = expand_axis(block.get("sweep_hz", {"start": f0 - MHZ, "stop": f0 + MHZ, "num": 81}))
    omegas = [hz(f) for f in sweep]

    table = Table(["method", "freq_hz", "p", "Abar_p_m2", "Abar_p_min_m2", "Abar_p_max_m2", "degenerate"])
    k = pamp.MEAN_OVER_PEAK

    def cm_point(w):
        sys = pamp.assemble_conversion_matrix(model, w, P)
        out = []
        for p in harmonics:
            r = pamp.cross_aperture(model, w, p, P=P, n_phase=n_phase, system=sys)
            lo, hi = pamp.aperture_envelope(model, w, p, P=P, system=sys)
            out.append((p, k * r.mean, k * lo, k * hi, r.degenerate))
        return out

    lti = model.lti_reference()
    for w, pts in zip(omegas, _ordered_map(cm_point, omegas, threads)):
        for p, m, lo, hi, deg in pts:
            table.add("CM", to_hz(w), p, m, lo, hi, deg)
        a = k * pamp.cross_aperture(lti, w, 0, P=P, n_phase=1).mean
        table.add("CM-LTI", to_hz(w), 0, a, a, a, False)

    tr = block.get("transient", {})
    if tr.get("enabled", False):
        n_tr = tr.get("n_phase", 8)
        spp = tr.get("samples_per_period", transient.SAMPLES_PER_PERIOD)
        jobs = [(hz(f), p) for f in tr.get("freqs_hz", [f0]) for p in harmonics]
        res = _ordered_map(lambda j: _transient_row(model, j[0], j[1], n_tr, spp), jobs, threads)
        for (w, p), (m, lo, hi, deg) in zip(jobs, res):
            table.add("transient", to_hz(w), p, m, lo, hi, deg)

    # convergence and degeneracy diagnostics at the design frequency
    w0 = model.design_freq
    a4 = pamp.cross_aperture(model, w0, 0, P=P, n_phase=n_phase).mean
    a6 = pamp.cross_aperture(model, w0, 0, P=P + 2, n_phase=n_phase).mean
    spec = pamp.aperture_spectrum(model, [w0], P=P, n_phase=n_phase)[0]
    env = SpectralEnvironment(flat(block.get("T_b_K", 290.0)), carrier=w0)
    T_all = pamp.aperture_sum_temperature(spec.apertures, env)
    T_0 = pamp.aperture_sum_temperature(spec.apertures, env, p_set=[0])
    diag = {
        "order": P,
        "n_phase": n_phase,
        "order_increase_rel_change_p0": abs(a6 - a4) / a4,
        "degenerate_T_ratio_all_vs_p0": T_all / T_0,
        "degenerate_Abar_ratio_m1_over_0": spec.apertures.mean[-1] / spec.apertures.mean[0],
    }
    return ScenarioResult({figure or "fig5": table}, diag)


# ---------------------------------------------------------------------------
# time-modulated array


def build_tma(block: dict, M: float) -> tma.TMAConfig:
    w0 = hz(block.get("carrier_hz", 300 * MHZ))
    order = block.get("order", 3)
    ell, Z0 = block.get("ell_m"), block.get("Z0_ohm")
    if "elements" in block:
        els = block["elements"]
        return tma.TMAConfig(
            positions=[e["position_m"] for e in els],
            weights=[complex(*e.get("weight", [1.0, 0.0])) for e in els],
            t_hat=[e["t_hat"] for e in els], tau_hat=[e["tau_hat"] for e in els],
            period=TWO_PI * M / w0, order=order, ell=ell, Z0=Z0,
        )
    cfg = tma.reference_array(M=M, omega0=w0, K=block.get("K", 8), order=order)
    return replace(cfg, ell=ell, Z0=Z0) if ell is not None or Z0 is not None else cfg


def run_tma(block: dict, figure: str | None = None, threads: int = 1) -> ScenarioResult:
    w0 = hz(block.get("carrier_hz", 300 * MHZ))
    Ms = block.get("M_values", [1000.0])
    widths = block.get("filter_widths", [0, 1, 2, 3])
    method = block.get("method", "closed_form")
    fig7 = Table(["p", "M", "Abar_p"])
    db = Table(["M", "P_filter", "T_increase_dB"])
    quad = build_product_rule() if method == "quadrature" else None
    for M in Ms:
        cfg = build_tma(block, M)
        ps = list(range(-cfg.order, cfg.order + 1))
        vals = _ordered_map(lambda p: tma.mean_aperture(cfg, w0, p, method=method, quad=quad), ps, threads)
        for p, v in zip(ps, vals):
            fig7.add(p, M, v)
        for P in widths:
            db.add(M, P, tma.filtered_noise_temperature(cfg, w0, P).ratio_db)
    return ScenarioResult({figure or "fig7": fig7, "tma_db": db}, {"method": method})


# ---------------------------------------------------------------------------
# verification


VERIFY_FREQS_MHZ = (299.0, 299.5, 300.25, 300.5, 301.0)
VERIFY_HARMONICS = (-2, -1, 0, 1)
CM_TR_RTOL = 0.02
CM_TR_ENVELOPE_RTOL = 0.05


def _rel(a: float, b: float) -> float:
    s = max(abs(a), abs(b))
    return 0.0 if s == 0 else abs(a - b) / s


def verify_pamp(quick: bool = False, threads: int = 1) -> ScenarioResult:
    model = pamp.TVCircuitModel()
    freqs = VERIFY_FREQS_MHZ[1:3] if quick else VERIFY_FREQS_MHZ
    harmonics = (-1, 0) if quick else VERIFY_HARMONICS
    table = Table(["check", "freq_hz", "p", "cm", "transient", "rel_diff", "tolerance", "pass"])
    jobs = [(hz(f * MHZ), p) for f in freqs for p in harmonics]

    def one(job):
        w, p = job
        cm = pamp.cross_aperture(model, w, p).mean
        tr = transient.transient_aperture(model, w, p).mean
        return cm, tr

    ok = True
    for (w, p), (cm, tr) in zip(jobs, _ordered_map(one, jobs, threads)):
        good = _rel(cm, tr) <= CM_TR_RTOL
        ok &= good
        table.add("aperture", to_hz(w), p, cm, tr, _rel(cm, tr), CM_TR_RTOL, good)

    w0 = model.design_freq
    phases = TWO_PI * np.arange(8) / 8
    for p in ((0,) if quick else (0, -1)):
        lo, hi = pamp.aperture_envelope(model, w0, p)
        r = transient.transient_aperture(model, w0, p, phases=phases)
        tlo, thi = transient.phase_envelope(r.phases, r.values)
        for name, c, t in (("envelope_min", lo, tlo), ("envelope_max", hi, thi)):
            good = _rel(c, t) <= CM_TR_ENVELOPE_RTOL
            ok &= good
            table.add(name, to_hz(w0), p, c, t, _rel(c, t), CM_TR_ENVELOPE_RTOL, good)
    return ScenarioResult({"verify_pamp": table}, {"n_checks": len(table.rows)}, passed=bool(ok))


def golden_samples(n: int):
    """Deterministic well-spread (p, khat, M) samples; no random generator involved."""
    g = (math.sqrt(5) - 1) / 2
    Ms = (10.0, 100.0, 1000.0)
    out = []
    for i in range(n):
        z = 1 - 2 * (i + 0.5) / n
        phi = TWO_PI * ((i * g) % 1.0)
        s = math.sqrt(1 - z * z)
        out.append((i % 5 - 2, np.array([s * math.cos(phi), s * math.sin(phi), z]), Ms[i % 3]))
    return out


def verify_tma(quick: bool = False, threads: int = 1) -> ScenarioResult:
    w0 = hz(300 * MHZ)
    table = Table(["check", "p", "M", "reference", "candidate", "rel_diff", "tolerance", "pass"])
    ok = True
    quad = build_product_rule()
    for M in (10.0, 1000.0) if quick else (10.0, 100.0, 1000.0):
        cfg = tma.reference_array(M=M, omega0=w0)
        for p in range(-2, 3):
            a = tma.mean_aperture(cfg, w0, p)
            b = tma.mean_aperture(cfg, w0, p, method="quadrature", quad=quad)
            good = _rel(a, b) <= 1e-6
            ok &= good
            table.add("closed_form_vs_quadrature", p, M, a, b, _rel(a, b), 1e-6, good)
    samples = golden_samples(6 if quick else 20)

    def one(s):
        p, khat, M = s
        cfg = tma.reference_array(M=M, omega0=w0)
        return tma.directional_aperture(cfg, w0, p, khat), tma.time_domain_aperture(cfg, w0, p, khat)

    for (p, _, M), (a, b) in zip(samples, _ordered_map(one, samples, threads)):
        good = abs(a - b) <= 0.01 * max(a, b) or max(a, b) < 1e-12
        ok &= good
        table.add("frequency_vs_time_domain", p, M, a, b, _rel(a, b), 0.01, good)
    return ScenarioResult({"verify_tma": table}, {"n_checks": len(table.rows)}, passed=bool(ok))


def _dipole(k):
    return pamp.directivity(np.arccos(np.clip(k[..., 2], -1, 1)))


def verify_quadrature(quick: bool = False, threads: int = 1) -> ScenarioResult:
    table = Table(["integrand", "n_theta", "n_phi", "value", "value_doubled", "abs_diff", "tolerance", "pass"])
    cfg = tma.reference_array(M=1000.0)
    w0 = hz(300 * MHZ)
    cases = [
        ("dipole_pattern", _dipole),
        ("tma_p1_aperture", lambda k: tma.directional_aperture(cfg, w0, 1, k)),
    ]
    ok = True
    for name, f in cases:
        for nt, nph in ((32, 64),) if quick else ((32, 64), (64, 128)):
            a = sphere_average(f, build_product_rule(nt, nph))
            b = sphere_average(f, build_product_rule(2 * nt, 2 * nph))
            good = abs(a - b) <= 1e-8 * max(abs(b), 1.0)
            ok &= good
            table.add(name, nt, nph, a, b, abs(a - b), 1e-8, good)
    return ScenarioResult({"verify_quadrature": table}, {"n_checks": len(table.rows)}, passed=bool(ok))


VERIFIERS = {"pamp": verify_pamp, "tma": verify_tma, "quadrature": verify_quadrature}
RUNNERS = {"toy": run_toy, "pamp": run_pamp, "tma": run_tma}


def run_config(cfg: dict, threads: int = 1) -> ScenarioResult:
    kind = cfg["scenario"]
    if kind == "verify":
        v = cfg["verify"]
        return VERIFIERS[v["target"]](quick=v.get("quick", False), threads=threads)
    figure = cfg.get("output", {}).get("figure")
    return RUNNERS[kind](cfg[kind], figure=figure, threads=threads)
