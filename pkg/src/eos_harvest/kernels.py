"""Closed-form physics kernels feeding the density-matrix integrals.

Everything here is a pure function of the configuration: the normalized
spectral autocorrelation f(Omega) of the pulse spectrum under the detection
filter, thermal occupation, the vacuum mode density, the crystal propagation
factor Pi(q_z, Omega), the transverse mode kernel and its Bessel-reduced
radial form, the ellipsometry phase P(Theta) with its inverse, and the
classical-waveform overlap that produces the mean-field matrix elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import materials, quadrature
from ._backend import bracket_numpy, kernel_tables
from .config import WavePlateSetting
from .constants import CONST

TWO_PI = 2.0 * math.pi


class FilterError(ValueError):
    """The requested operation is incompatible with the spectral filter."""


# --------------------------------------------------------------------------
# pulse spectrum and its filtered autocorrelation
# --------------------------------------------------------------------------

def pulse_spectrum(cfg, omega):
    """Gaussian pulse spectrum amplitude (tau^2/2pi)^(1/4) e^{-tau^2(|w|-wc)^2/4}."""
    tau = cfg.pulse_duration
    return (tau**2 / TWO_PI) ** 0.25 * np.exp(
        -(tau**2) * (np.abs(omega) - cfg.central_frequency) ** 2 / 4.0)


# Gauss-Legendre rule reused for all filtered-overlap integrals
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(512)
_SUPPORT = 16.0  # half-width of the numerically relevant window in sigma_omega


def _band_window(cfg):
    lo = max(cfg.filter.omega_min,
             cfg.central_frequency - _SUPPORT * cfg.sigma_omega, 0.0)
    hi = min(cfg.filter.omega_max,
             cfg.central_frequency + _SUPPORT * cfg.sigma_omega)
    return lo, hi


def _overlap_numeric(cfg, shift, lo, hi):
    """int_lo^hi E(w) E(w + shift) dw on the shared Gauss-Legendre rule.

    ``shift`` may be an array; each entry integrates over the window where
    both spectra are alive, so the fixed-order rule stays spectrally
    accurate.
    """
    shift = np.atleast_1d(np.asarray(shift, dtype=float))
    sw = cfg.sigma_omega
    wc = cfg.central_frequency
    lo_i = np.maximum(lo, wc - shift - _SUPPORT * sw)
    hi_i = np.minimum(hi, wc - shift + _SUPPORT * sw)
    width = np.maximum(hi_i - lo_i, 0.0)
    mid = 0.5 * (hi_i + lo_i)
    x = mid[:, None] + 0.5 * width[:, None] * _GL_NODES[None, :]
    y = pulse_spectrum(cfg, x) * pulse_spectrum(cfg, x + shift[:, None])
    return 0.5 * width * (y * _GL_WEIGHTS[None, :]).sum(axis=1)


def spectral_autocorrelation(cfg, omega):
    """Normalized spectral autocorrelation f(Omega) of the filtered pulses.

    Omega is signed; scalar or array.  Full filter evaluates the closed
    Gaussian form; band filters integrate the truncated overlap numerically;
    the monochromatic scheme returns the spectral ratio
    E(omega_d + Omega) / E(omega_d).
    """
    filt = cfg.filter
    arr = np.asarray(omega, dtype=float)
    if filt.kind == "full":
        out = np.exp(-(cfg.pulse_duration**2) * arr**2 / 8.0)
    elif filt.kind == "monochromatic":
        if abs(filt.omega_d - cfg.central_frequency) > 8.0 * cfg.sigma_omega:
            raise FilterError(
                "monochromatic filter sits farther than 8 sigma_omega from the "
                "pulse spectrum; f(Omega) would divide by ~0")
        out = pulse_spectrum(cfg, filt.omega_d + arr) / pulse_spectrum(cfg, filt.omega_d)
    else:
        lo, hi = _band_window(cfg)
        if not lo < hi:
            raise FilterError("band filter excludes the entire pulse spectrum")
        denom = float(_overlap_numeric(cfg, np.array([0.0]), lo, hi)[0])
        # the unfiltered spectrum is normalized: int E^2 dw = 1
        if denom < 1e-12:
            raise FilterError("band filter keeps a negligible part of the spectrum")
        out = _overlap_numeric(cfg, arr.ravel(), lo, hi).reshape(arr.shape) / denom
    return out if arr.ndim else float(out)


def band_fraction(cfg):
    """Fraction of the pulse power kept by a band filter (1 otherwise).

    The unfiltered spectrum is normalized to unit power, so this is just
    the windowed self-overlap.
    """
    if cfg.filter.kind != "band":
        return 1.0
    lo, hi = _band_window(cfg)
    if not lo < hi:
        raise FilterError("band filter excludes the entire pulse spectrum")
    return float(_overlap_numeric(cfg, np.array([0.0]), lo, hi)[0])


def autocorrelation_band_erf(cfg, omega):
    """Closed error-function form of f(Omega) for band filters (cross-check
    of the numeric default)."""
    from scipy.special import erf

    if cfg.filter.kind != "band":
        raise FilterError("erf form applies to band filters only")
    tau = cfg.pulse_duration
    wc = cfg.central_frequency
    arr = np.asarray(omega, dtype=float)
    s = tau / math.sqrt(2.0)

    def window(center):
        top = (1.0 if math.isinf(cfg.filter.omega_max)
               else erf((cfg.filter.omega_max - center) * s))
        return top - erf((cfg.filter.omega_min - center) * s)

    num = np.array([window(wc - om / 2.0) for om in np.atleast_1d(arr)])
    out = np.exp(-(tau**2) * arr**2 / 8.0) * num.reshape(arr.shape) / window(wc)
    return out if arr.ndim else float(out)


# --------------------------------------------------------------------------
# occupation, mode density, propagation
# --------------------------------------------------------------------------

def thermal_occupation(temperature, omega):
    """Bose-Einstein occupation; exactly zero at T = 0."""
    arr = np.asarray(omega, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError("thermal_occupation requires omega > 0")
    if temperature < 0.0:
        raise ValueError("thermal_occupation requires T >= 0")
    if temperature == 0.0:
        out = np.zeros_like(arr)
    else:
        out = 1.0 / np.expm1(CONST.hbar * arr / (CONST.kB * temperature))
    return out if arr.ndim else float(out)


def vacuum_mode_density(cfg, omega):
    """E_vac^2 = hbar n(Omega) Omega^3 / (2 pi^2 eps0 c^3), complex n as is."""
    n = materials.refractive_index(cfg.material, omega)
    arr = np.asarray(omega, dtype=float)
    out = CONST.hbar * np.asarray(n) * arr**3 / (2.0 * math.pi**2 * CONST.eps0 * CONST.c**3)
    return out if arr.ndim else complex(out)


def propagation_factor(q_z, omega, L, n_g):
    """Crystal propagation factor Pi(q_z, Omega) of the z, z' integrals.

    The caller supplies the branch Im q_z >= 0.  Removable singularities at
    q_z = -+ Omega n_g / c are bridged by a series once |c*L| < 1e-4.
    Even in Omega by construction.
    """
    qz = np.asarray(q_z, dtype=complex)
    if np.any(qz == 0.0):
        raise ValueError("propagation_factor requires q_z != 0")
    b = np.asarray(omega, dtype=float) * n_g / CONST.c
    br = bracket_numpy(qz + b, L) + bracket_numpy(qz - b, L)
    out = br / (L * qz)
    return out if (qz.ndim or np.ndim(omega)) else complex(out)


def transverse_kernel(q_x, q_y, omega, cfg):
    """Cartesian transverse kernel R(q_par, Omega) of the mode integrals."""
    if not np.all(np.asarray(omega) > 0.0):
        raise ValueError("transverse_kernel requires Omega > 0")
    n = materials.refractive_index(cfg.material, omega)
    q_c = np.asarray(n) * np.asarray(omega) / CONST.c
    if np.any(q_c.real <= 0.0):
        raise ValueError("Re q(Omega) <= 0: unphysical material")
    qx = np.asarray(q_x, dtype=float)
    qy = np.asarray(q_y, dtype=float)
    q2 = qx**2 + qy**2
    qz = np.sqrt(q_c**2 - q2)
    qz = np.where(np.asarray(qz).imag < 0.0, -qz, qz)
    e2 = vacuum_mode_density(cfg, omega)
    pi_fac = propagation_factor(qz, omega, cfg.crystal_length, cfg.group_index)
    out = (e2 * np.exp(-q2 * cfg.beam_waist**2 / 4.0) * (1.0 - qx**2 / q_c**2)
           * pi_fac / (4.0 * math.pi * q_c.real))
    return out if (qx.ndim or qy.ndim) else complex(out)


def angular_reduced_kernel(q, omega, delta_r, cfg):
    """Radial kernel after the angular reduction of the q-plane integral.

    Integrating exp(i q_y dr) against the transverse kernel over the polar
    angle turns the 2D integral into q * A * [2 pi J0(q dr)
    - pi (q^2/q_c^2) (J0 + J2)(q dr)]; this returns that radial integrand.
    """
    q_arr = np.atleast_1d(np.asarray(q, dtype=float))
    omega = float(omega)
    if not omega > 0.0:
        raise ValueError("angular_reduced_kernel requires Omega > 0")
    n = materials.refractive_index(cfg.material, omega)
    q_c = n * omega / CONST.c
    if q_c.real <= 0.0:
        raise ValueError("Re q(Omega) <= 0: unphysical material")
    pref = vacuum_mode_density(cfg, omega) / (4.0 * math.pi * q_c.real)
    aq, aq3 = kernel_tables(
        q_arr, np.array([q_c**2]), np.array([pref]),
        np.array([omega * cfg.group_index / CONST.c]),
        cfg.beam_waist**2 / 4.0, cfg.crystal_length)
    x = q_arr * abs(delta_r)
    j0 = quadrature.bessel_j(0, x)
    j0pj2 = j0 + quadrature.bessel_j(2, x)
    out = TWO_PI * j0 * aq[0] - math.pi * j0pj2 * aq3[0]
    return out if np.asarray(q).ndim else complex(out[0])


# --------------------------------------------------------------------------
# per-frequency context for the element integrator
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelContext:
    """Precomputed per-Omega data shared by all element integrands."""

    omega: np.ndarray       # (n,) rad/s
    n: np.ndarray           # complex refractive index
    q_c: np.ndarray         # n * Omega / c
    e2_vac: np.ndarray      # vacuum mode density
    f_plus: np.ndarray      # f(+Omega)
    f_minus: np.ndarray     # f(-Omega)
    n_t: np.ndarray         # thermal occupation


def kernel_context(cfg, omega):
    """Build the KernelContext on an array of positive frequencies."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    n = np.asarray(materials.refractive_index(cfg.material, omega))
    q_c = n * omega / CONST.c
    if np.any(q_c.real <= 0.0):
        raise ValueError("Re q(Omega) <= 0: unphysical material")
    return KernelContext(
        omega=omega, n=n, q_c=q_c,
        e2_vac=np.asarray(vacuum_mode_density(cfg, omega)),
        f_plus=np.asarray(spectral_autocorrelation(cfg, omega)),
        f_minus=np.asarray(spectral_autocorrelation(cfg, -omega)),
        n_t=np.asarray(thermal_occupation(cfg.temperature, omega)),
    )


# --------------------------------------------------------------------------
# ellipsometry phase
# --------------------------------------------------------------------------

def ellipsometry_phase(setting):
    """Detection phase P(Theta) = s [sqrt(-cos th) + i sqrt(2) cos(th/2)].

    Unit modulus for every valid setting: -cos th = 1 - 2 cos^2(th/2) on
    [pi/2, 3pi/2], so |P|^2 = 1 identically.
    """
    minus_cos = max(-math.cos(setting.theta), 0.0)
    return setting.sign * complex(math.sqrt(minus_cos),
                                  math.sqrt(2.0) * math.cos(setting.theta / 2.0))


def invert_phase(target):
    """Wave-plate setting whose detection phase equals ``target`` (|target|=1)."""
    target = complex(target)
    if abs(abs(target) - 1.0) > 1e-9:
        raise ValueError("invert_phase requires a unit-modulus target phase")
    s = 1 if target.real >= 0.0 else -1
    u = target.imag / (s * math.sqrt(2.0))
    u = min(max(u, -1.0), 1.0)
    theta = 2.0 * math.acos(u)
    return WavePlateSetting(theta=theta, sign=s)


def detection_efficiency(chi2, L, omega_c, n_c):
    """C with sqrt(C) = 2 L chi2 omega_c / (eps0 c n_c)."""
    for name, val in (("chi2", chi2), ("L", L), ("omega_c", omega_c), ("n_c", n_c)):
        if not val > 0.0:
            raise ValueError(f"detection_efficiency requires {name} > 0")
    sqrt_c = 2.0 * L * chi2 * omega_c / (CONST.eps0 * CONST.c * n_c)
    return sqrt_c**2


# --------------------------------------------------------------------------
# classical waveform overlap
# --------------------------------------------------------------------------

def classical_overlap(cfg, waveform, pulse_index):
    """Mean-field matrix element L_i for a classical plane-wave sum.

    Closed Gaussian transforms handle the transverse plane and time; the
    z-integral across the crystal is done numerically.  Only the full
    (unfiltered) detection scheme has the real-envelope form used here.
    """
    if cfg.filter.kind != "full":
        raise FilterError(
            "classical_overlap requires the full (unfiltered) detection scheme; "
            "band or monochromatic filters make the pulse projector complex")
    if pulse_index not in (1, 2):
        raise ValueError("pulse_index must be 1 or 2")
    delay = 0.0 if pulse_index == 1 else cfg.time_delay
    L = cfg.crystal_length
    tau = cfg.pulse_duration
    total = 0.0
    for comp in waveform.components:
        kappa = comp.wavevector - comp.frequency * cfg.group_index / CONST.c
        chi = comp.frequency * delay + comp.phase

        def integrand(z, kappa=kappa, chi=chi):
            return np.cos(kappa * z + chi)

        period = TWO_PI / abs(kappa) if kappa != 0.0 else math.inf
        res = quadrature.oscillation_panels(
            integrand, -L / 2.0, L / 2.0, period, rel_tol=1e-10, abs_tol=1e-16 * L)
        total += (comp.amplitude * math.exp(-comp.frequency**2 * tau**2 / 8.0)
                  * res.value.real / L)
    return complex(-0.5 * math.sqrt(cfg.prefactor) * total)
