"""Independent brute-force references backing the verification suite.

These run at deliberately naive settings, use no code from the fast
reduction chain beyond the shared physical constants (the Cartesian oracle
deliberately consumes transverse_kernel, whose own ingredients are covered
by the propagation-factor oracle), and exist solely to catch regressions in
the production integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bell as bell_mod
from . import elements as elements_mod
from . import kernels, observables, quadrature
from .config import WavePlateSetting
from .constants import CONST

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class OracleReport:
    """One oracle-vs-production comparison (or invariant check)."""

    name: str
    reference: complex
    fast: complex
    rel_err: float
    tol: float
    passed: bool

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: rel_err={self.rel_err:.3e} "
                f"(tol {self.tol:.1e})")


def _report(name, reference, fast, tol):
    ref = complex(reference)
    fst = complex(fast)
    scale = max(abs(ref), abs(fst), 1e-300)
    rel = abs(ref - fst) / scale
    return OracleReport(name=name, reference=ref, fast=fst, rel_err=rel,
                        tol=tol, passed=rel <= tol)


# --------------------------------------------------------------------------
# raw double-integral propagation factor
# --------------------------------------------------------------------------

def oracle_pi(q_z, omega, L, n_g, grid_n=4096):
    """Pi(q_z, Omega) by direct trapezoid quadrature of the z, z' double
    integral, evaluated in row blocks.

    The |z - z'| fold of the integrand generates both group-velocity signs,
    so the single double integral already equals the closed form with its
    (n_g -> -n_g) companion term.
    """
    if grid_n < 200:
        raise ValueError("oracle_pi needs grid_n >= 200")
    z = np.linspace(-L / 2.0, L / 2.0, grid_n)
    w = np.full(grid_n, 1.0)
    w[0] = w[-1] = 0.5
    total = 0.0 + 0.0j
    block = 256
    for lo in range(0, grid_n, block):
        zr = z[lo:lo + block, None]
        u = zr - z[None, :]
        kern = np.exp(-1j * omega * n_g * u / CONST.c) \
            * np.exp(1j * q_z * np.abs(u)) / q_z
        total += np.sum(w[lo:lo + block, None] * w[None, :] * kern)
    h = z[1] - z[0]
    return complex(total * h * h / L**2)


# --------------------------------------------------------------------------
# Cartesian transverse-plane integral vs the radial Bessel reduction
# --------------------------------------------------------------------------

def oracle_cartesian_q(omega, delta_r, cfg, grid_n=4000):
    """Direct 2D Cartesian quadrature of transverse_kernel * e^{i q_y dr}
    over the truncated q plane."""
    if grid_n < 400:
        raise ValueError("oracle_cartesian_q needs grid_n >= 400 per axis")
    q_max = 2.0 / cfg.beam_waist * math.sqrt(math.log(1e12))
    qx = np.linspace(-q_max, q_max, grid_n)
    w = np.full(grid_n, 1.0)
    w[0] = w[-1] = 0.5
    total = 0.0 + 0.0j
    block = 64
    for lo in range(0, grid_n, block):
        qxr = qx[lo:lo + block, None]
        kern = kernels.transverse_kernel(qxr, qx[None, :], omega, cfg)
        kern = kern * np.exp(1j * qx[None, :] * delta_r)
        total += np.sum(w[lo:lo + block, None] * w[None, :] * kern)
    h = qx[1] - qx[0]
    return complex(total * h * h)


def radial_q_integral(omega, delta_r, cfg):
    """Production-path radial integral matching oracle_cartesian_q."""
    q_max = 2.0 / cfg.beam_waist * math.sqrt(math.log(1e12))
    run = cfg.with_(beam_separation=delta_r)
    q0, qd = elements_mod._q_pass(run, np.array([float(omega)]), q_max)
    return complex(qd[0])


# --------------------------------------------------------------------------
# dense-grid spectral autocorrelation
# --------------------------------------------------------------------------

def oracle_autocorrelation(cfg, omega):
    """f(Omega) by dense trapezoid overlap of the filtered pulse spectra."""
    sw = cfg.sigma_omega
    wc = cfg.central_frequency
    lo = max(cfg.filter.omega_min, wc - 20.0 * sw, 0.0)
    hi = min(cfg.filter.omega_max, wc + 20.0 * sw)
    if cfg.filter.kind == "monochromatic":
        lo = cfg.filter.omega_d - cfg.filter.delta_omega / 2.0
        hi = cfg.filter.omega_d + cfg.filter.delta_omega / 2.0
    grid = np.linspace(lo, hi, 40001)
    num = np.trapezoid(kernels.pulse_spectrum(cfg, grid)
                       * kernels.pulse_spectrum(cfg, grid + omega), grid)
    den = np.trapezoid(kernels.pulse_spectrum(cfg, grid) ** 2, grid)
    return float(num / den)


def oracle_bessel_j(order, x):
    """J_n(x) from the integral definition (1/pi) int_0^pi cos(n phi
    - x sin phi) dphi on a dense periodic grid."""
    phi = np.linspace(0.0, math.pi, 20001)
    return float(np.trapezoid(np.cos(order * phi - x * np.sin(phi)), phi) / math.pi)


# --------------------------------------------------------------------------
# brute-force classical overlap
# --------------------------------------------------------------------------

def oracle_classical_overlap(cfg, waveform, pulse_index, n_trans=41, n_z=121,
                             n_t=161):
    """L_i by raw 4D space-time quadrature of the pulse envelope against the
    classical field (coarse grids; seconds)."""
    w = cfg.beam_waist
    tau = cfg.pulse_duration
    L = cfg.crystal_length
    dt_i = 0.0 if pulse_index == 1 else cfg.time_delay
    dr_i = 0.0 if pulse_index == 1 else cfg.beam_separation

    xs = np.linspace(-3.0 * w, 3.0 * w, n_trans)
    zs = np.linspace(-L / 2.0, L / 2.0, n_z)
    norm = 2.0**1.5 / (math.pi**1.5 * tau * w**2 * L)

    total = 0.0
    # transverse plane separates from (z, t) for z-propagating plane waves,
    # but integrate it numerically anyway to stay brute force
    trans = np.trapezoid(np.trapezoid(
        np.exp(-2.0 * (xs[:, None]**2 + (xs[None, :] + dr_i)**2) / w**2),
        xs, axis=1), xs)
    for z in zs:
        ts = np.linspace(z * cfg.group_index / CONST.c - dt_i - 5.0 * tau,
                         z * cfg.group_index / CONST.c - dt_i + 5.0 * tau, n_t)
        envelope = np.exp(-2.0 * (cfg.group_index * z / CONST.c - ts - dt_i)**2
                          / tau**2)
        field = np.zeros_like(ts)
        for comp in waveform.components:
            field += comp.amplitude * np.cos(
                comp.wavevector * z - comp.frequency * ts + comp.phase)
        total += np.trapezoid(envelope * field, ts)
    total *= (zs[1] - zs[0]) * trans * norm
    return complex(-0.5 * math.sqrt(cfg.prefactor) * total)


# --------------------------------------------------------------------------
# verification suite
# --------------------------------------------------------------------------

def _pi_grid_reports(cfg, budget):
    L = cfg.crystal_length
    n = 4096 if budget == "full" else 1500
    tol = 1e-6 if budget == "full" else 2e-5
    reports = []
    qzl_vals = [0.3 + 0.05j, 0.8 + 0.2j, 1.3 + 0.01j, 1.9 + 0.4j, 2.5 + 0.1j]
    bl_vals = [0.25, 0.6, 1.0, 1.6, 2.2]
    for i, qzl in enumerate(qzl_vals):
        for j, bl in enumerate(bl_vals):
            q_z = qzl / L
            omega = bl * CONST.c / (cfg.group_index * L)
            ref = oracle_pi(q_z, omega, L, cfg.group_index, grid_n=n)
            fast = kernels.propagation_factor(q_z, omega, L, cfg.group_index)
            reports.append(_report(f"pi_grid[{i},{j}]", ref, fast, tol))
    return reports


def _cartesian_reports(cfg, budget):
    w = cfg.beam_waist
    n = 4000 if budget == "full" else 1200
    tol = 1e-4 if budget == "full" else 2e-3
    omegas = [2.0e13, 3.5e13]
    reports = []
    for dr_units in (0.0, 5.0, 10.0):
        for omega in omegas:
            ref = oracle_cartesian_q(omega, dr_units * w, cfg, grid_n=n)
            fast = radial_q_integral(omega, dr_units * w, cfg)
            reports.append(_report(
                f"cartesian_q[dr={dr_units:g}w,omega={omega:.1e}]",
                ref, fast, tol))
    return reports


def _autocorrelation_reports(cfg):
    reports = []
    sw = cfg.sigma_omega
    band = cfg.with_(filter=type(cfg.filter).band(
        cfg.central_frequency + 3.0 * sw, math.inf))
    for name, run in (("full", cfg), ("band", band)):
        for k, omega in enumerate((0.0, 0.7 * sw, -1.3 * sw, 2.4 * sw)):
            ref = oracle_autocorrelation(run, omega)
            fast = kernels.spectral_autocorrelation(run, omega)
            reports.append(_report(f"autocorr_{name}[{k}]", ref, fast, 1e-8))
    return reports


def _bessel_reports():
    reports = []
    for order in (0, 2):
        for x in (0.5, 1.0, 5.0, 20.0, 150.0):
            ref = oracle_bessel_j(order, x)
            fast = quadrature.bessel_j(order, x)
            reports.append(OracleReport(
                name=f"bessel_j{order}({x:g})", reference=ref, fast=fast,
                rel_err=abs(ref - fast), tol=1e-10,
                passed=abs(ref - fast) <= 1e-10))
    return reports


def _phase_norm_report(rng):
    thetas = rng.uniform(math.pi / 2.0, 3.0 * math.pi / 2.0, size=1000)
    signs = rng.choice([-1, 1], size=1000)
    worst = max(abs(abs(kernels.ellipsometry_phase(
        WavePlateSetting(float(t), int(s)))) - 1.0)
        for t, s in zip(thetas, signs))
    return OracleReport(name="ellipsometry_unit_modulus", reference=0.0,
                        fast=worst, rel_err=worst, tol=1e-12,
                        passed=worst <= 1e-12)


def _negativity_reports(cfg, budget):
    reports = []
    dr_list = (0.0, 2.0, 5.0) if budget == "full" else (0.0, 5.0)
    sw = cfg.sigma_omega
    band = type(cfg.filter).band(cfg.central_frequency + 3.0 * sw, math.inf)
    for dr_units in dr_list:
        run = cfg.with_(beam_separation=dr_units * cfg.beam_waist, filter=band)
        e = elements_mod.vacuum_elements(run)
        es, lam = elements_mod.auto_scale(e, target=1e-4)
        closed = observables.negativity(es).negativity
        oracle = observables.negativity_oracle(elements_mod.assemble_state(es))
        tol_abs = max(1e-10, 10.0 * es.magnitude() ** 2)
        err = abs(closed - oracle)
        reports.append(OracleReport(
            name=f"negativity_pt[dr={dr_units:g}w]", reference=oracle,
            fast=closed, rel_err=err, tol=tol_abs, passed=err <= tol_abs))
    return reports


def _witness_report(cfg):
    sw = cfg.sigma_omega
    run = cfg.with_(beam_separation=5.0 * cfg.beam_waist,
                    filter=type(cfg.filter).band(
                        cfg.central_frequency + 3.0 * sw, math.inf))
    e = elements_mod.vacuum_elements(run)
    budget = observables.witness_budget(e)
    err = abs(budget.combination - budget.witness)
    return OracleReport(name="witness_budget_identity",
                        reference=budget.witness, fast=budget.combination,
                        rel_err=err, tol=1e-8, passed=err <= 1e-8)


def _thermal_monotonicity_report(cfg, budget):
    temps = (0.0, 4.0, 20.0, 100.0) if budget != "full" else \
        (0.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0)
    sw = cfg.sigma_omega
    run = cfg.with_(beam_separation=5.0 * cfg.beam_waist,
                    filter=type(cfg.filter).band(
                        cfg.central_frequency + 3.0 * sw, math.inf))
    values = [observables.negativity(
        elements_mod.thermal_elements(run.with_(temperature=t))).negativity
        for t in temps]
    drops = all(values[i + 1] <= values[i] + 1e-12 * max(1.0, values[i])
                for i in range(len(values) - 1))
    worst = max((values[i + 1] - values[i] for i in range(len(values) - 1)),
                default=0.0)
    return OracleReport(name="thermal_negativity_monotone", reference=0.0,
                        fast=worst, rel_err=max(worst, 0.0), tol=1e-12,
                        passed=drops)


def _tsirelson_report():
    e = elements_mod.ProbeMatrixElements(m=1e-4, x=1e-8)
    b_max, _ = bell_mod.bell_optimize(e, n_lo=1e-4)
    err = abs(b_max - bell_mod.TWO_SQRT2)
    return OracleReport(name="tsirelson_limit", reference=bell_mod.TWO_SQRT2,
                        fast=b_max, rel_err=err, tol=1e-3, passed=err <= 1e-3)


def _operator_identity_reports(rng):
    worst_var = 0.0
    worst_sb = 0.0
    for _ in range(100):
        g = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        mat = g @ g.conj().T
        mat /= np.trace(mat).real
        state = elements_mod.ProbeState(matrix=mat)
        n_d = 7.0
        for mode in (1, 2):
            rho = observables.reduce_single_mode(state, mode)
            var_sum = (observables.single_beam_variance(
                rho, WavePlateSetting(math.pi / 2.0), n_d)
                + observables.single_beam_variance(
                    rho, WavePlateSetting(math.pi), n_d))
            mean_a = complex(np.trace(rho @ observables._A))
            n_mean = complex(np.trace(
                rho @ (observables._A.conj().T @ observables._A))).real
            lhs = var_sum + 4.0 * n_d * abs(mean_a) ** 2
            rhs = 2.0 * n_d + 4.0 * n_d * n_mean
            worst_var = max(worst_var, abs(lhs - rhs))
            sb_sum = (observables.shot_noise_removed(
                rho, WavePlateSetting(math.pi / 2.0),
                WavePlateSetting(math.pi / 2.0), n_d)
                + observables.shot_noise_removed(
                    rho, WavePlateSetting(math.pi),
                    WavePlateSetting(math.pi), n_d))
            worst_sb = max(worst_sb, abs(sb_sum - 4.0 * n_mean / n_d))
    return [
        OracleReport(name="variance_sum_identity", reference=0.0,
                     fast=worst_var, rel_err=worst_var, tol=1e-10,
                     passed=worst_var <= 1e-10),
        OracleReport(name="shot_noise_removed_number", reference=0.0,
                     fast=worst_sb, rel_err=worst_sb, tol=1e-10,
                     passed=worst_sb <= 1e-10),
    ]


def run_verification_suite(cfg, budget="full"):
    """Every oracle comparison plus the module invariants; failures are
    collected, not fail-fast."""
    rng = np.random.default_rng(20240817)
    reports = []
    reports.extend(_pi_grid_reports(cfg, budget))
    reports.extend(_autocorrelation_reports(cfg))
    reports.extend(_bessel_reports())
    reports.append(_phase_norm_report(rng))
    reports.extend(_operator_identity_reports(rng))
    reports.append(_tsirelson_report())
    reports.extend(_cartesian_reports(cfg, budget))
    reports.extend(_negativity_reports(cfg, budget))
    reports.append(_witness_report(cfg))
    reports.append(_thermal_monotonicity_report(cfg, budget))
    return reports
