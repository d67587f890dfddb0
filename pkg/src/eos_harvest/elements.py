"""Reduced-density-matrix elements of the two probe modes.

The evaluated frequency-space forms collapse to a pair of nested 1D
integrals once the transverse plane is reduced to its radial Bessel form:
an outer integral over the THz frequency Omega and, per frequency, a radial
q integral of the mode kernel.  Vacuum and thermal contributions share one
integrand (the thermal part carries the Bose factor and vanishes
identically at T = 0), and all four independent element integrals run in a
single adaptive pass with shared refinement.

Values are reported in reduced units of the common prefactor C*N_d
(== 1 unless the config carries a physical scale block).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, replace

import numpy as np

from . import kernels, quadrature
from .config import config_hash
from .constants import CONST

_LN_CUT = math.log(1e12)        # envelope truncation: e^{-x} below 1e-12
_CHUNK = 64                     # Omega rows per inner q-pass
_Q_REL_TOL = 1e-7
_OMEGA_REL_TOL = 1e-6
_NODES_PER_PERIOD = 10


@dataclass(frozen=True)
class ProbeMatrixElements:
    """Entries of the probe density matrix in reduced units C*N_d.

    For stationary homogeneous fields with identical pulses l11 == l22 and
    l1 == l2; l21 is always conj(l12).
    """

    l1: complex = 0.0
    l2: complex = 0.0
    l11: float = 0.0
    l22: float = 0.0
    l12: complex = 0.0
    m: complex = 0.0
    k11: complex = 0.0
    k22: complex = 0.0
    x: float = 0.0

    def __post_init__(self):
        if self.l11 < 0.0 or self.l22 < 0.0:
            raise ValueError("diagonal elements l11, l22 must be >= 0")

    @property
    def l21(self):
        return np.conj(self.l12)

    def scaled(self, lam):
        """Elements under prefactor C*N_d -> lam * C*N_d: first-order
        entries scale with sqrt(lam), second-order linearly, x
        quadratically."""
        r = math.sqrt(lam)
        return ProbeMatrixElements(
            l1=self.l1 * r, l2=self.l2 * r,
            l11=self.l11 * lam, l22=self.l22 * lam,
            l12=self.l12 * lam, m=self.m * lam,
            k11=self.k11 * lam, k22=self.k22 * lam,
            x=self.x * lam**2)

    def magnitude(self):
        """Largest element magnitude (drives perturbative-accuracy bounds)."""
        return max(abs(self.l1), abs(self.l2), self.l11, self.l22,
                   abs(self.l12), abs(self.m), abs(self.k11), abs(self.k22))


def x_fourth_order(e):
    """Wick decomposition of the double-excitation weight:
    X = L11 L22 + |L21|^2 + |M|^2 (Gaussian field states)."""
    return float(e.l11 * e.l22 + abs(e.l12) ** 2 + abs(e.m) ** 2)


# --------------------------------------------------------------------------
# integration domain
# --------------------------------------------------------------------------

def _omega_cutoff(cfg):
    """Truncation of the semi-infinite Omega integral where every spectral
    weight has fallen below 1e-12 of its peak."""
    sw = cfg.sigma_omega
    base = sw * math.sqrt(_LN_CUT)
    filt = cfg.filter
    if filt.kind == "band":
        frac = kernels.band_fraction(cfg)
        return sw * math.sqrt(_LN_CUT + 2.0 * max(0.0, -math.log(frac)))
    if filt.kind == "monochromatic":
        d = abs(filt.omega_d - cfg.central_frequency)
        return max(base, d + math.sqrt(d * d + sw * sw * _LN_CUT))
    return base


def _q_cutoff(cfg):
    return 2.0 / cfg.beam_waist * math.sqrt(_LN_CUT)


def _omega_breakpoints(cfg, omega_max):
    pts = []
    material = cfg.material
    oscillators = getattr(material, "oscillators", ())
    for osc in oscillators:
        for p in (osc.omega_to - 3.0 * osc.gamma, osc.omega_to,
                  osc.omega_to + 3.0 * osc.gamma, osc.omega_lo):
            if 0.0 < p < omega_max:
                pts.append(p)
    return pts


# --------------------------------------------------------------------------
# inner radial integral
# --------------------------------------------------------------------------

def _q_pass(cfg, omega, q_max):
    """Radial integrals (Q0, Qd) of the angular-reduced kernel for a batch
    of frequencies, sharing one adaptive refinement."""
    n = np.asarray(kernels.materials.refractive_index(cfg.material, omega))
    q_c = n * omega / CONST.c
    if np.any(q_c.real <= 0.0):
        raise ValueError("Re q(Omega) <= 0: unphysical material")
    qc2 = q_c**2
    pref = np.asarray(kernels.vacuum_mode_density(cfg, omega)) / (4.0 * math.pi * q_c.real)
    b = omega * cfg.group_index / CONST.c
    quarter_w2 = cfg.beam_waist**2 / 4.0
    dr = abs(cfg.beam_separation)
    L = cfg.crystal_length

    def integrand(q):
        aq, aq3 = kernels.kernel_tables(q, qc2, pref, b, quarter_w2, L)
        x = q * dr
        j0 = quadrature.bessel_j(0, x)
        j0pj2 = j0 + quadrature.bessel_j(2, x)
        k0 = 2.0 * math.pi * aq - math.pi * aq3
        kd = 2.0 * math.pi * j0[None, :] * aq - math.pi * j0pj2[None, :] * aq3
        return np.concatenate([k0, kd], axis=0)

    # oscillation budget: Bessel phase q*dr plus crystal phase ~ L*q_c
    phase_span = q_max * dr + L * float(np.max(np.abs(q_c))) + L * float(np.max(b))
    n_init = max(8, math.ceil(phase_span / (2.0 * math.pi)
                              * _NODES_PER_PERIOD / 15.0))
    light_lines = sorted({float(v) for v in q_c.real if 0.0 < v < q_max})
    res = quadrature.integrate_adaptive(
        integrand, 0.0, q_max, rel_tol=_Q_REL_TOL, abs_tol=1e-300,
        breakpoints=light_lines, initial_panels=n_init, max_panels=16384)
    vals = res.value
    half = vals.shape[0] // 2
    return vals[:half], vals[half:]


# --------------------------------------------------------------------------
# outer frequency integral
# --------------------------------------------------------------------------

def _element_integrals(cfg):
    """Returns the reduced-unit integrals (l11, l12, m, k_raw) where
    k_raw = m evaluated at coincident pulses (before the 1/sqrt(2))."""
    omega_max = _omega_cutoff(cfg)
    q_max = _q_cutoff(cfg)
    dt = cfg.time_delay

    def integrand(omega):
        out = np.empty((4, omega.size), dtype=complex)
        for lo in range(0, omega.size, _CHUNK):
            sl = slice(lo, min(lo + _CHUNK, omega.size))
            om = omega[sl]
            q0, qd = _q_pass(cfg, om, q_max)
            fp = np.asarray(kernels.spectral_autocorrelation(cfg, om))
            fm = np.asarray(kernels.spectral_autocorrelation(cfg, -om))
            nt = np.asarray(kernels.thermal_occupation(cfg.temperature, om))
            phase = np.exp(1j * dt * om)
            cos_dt = np.cos(dt * om)
            ffm = fp * fm
            out[0, sl] = fp**2 * q0.real + nt * (fp**2 + fm**2) * q0.real
            out[1, sl] = (fp**2 * phase
                          + nt * (phase * fp**2 + np.conj(phase) * fm**2)) * qd.real
            out[2, sl] = ffm * cos_dt * (qd + 2.0 * nt * qd.real)
            out[3, sl] = ffm * (q0 + 2.0 * nt * q0.real)
        return out

    breakpoints = _omega_breakpoints(cfg, omega_max)
    period = (2.0 * math.pi / abs(dt)) if dt != 0.0 else math.inf
    res = quadrature.oscillation_panels(
        integrand, 0.0, omega_max, period, nodes_per_period=_NODES_PER_PERIOD,
        rel_tol=_OMEGA_REL_TOL, abs_tol=1e-300,
        breakpoints=breakpoints, initial_panels=24, max_panels=8192)
    l11_v, l12_v, m_v, k_v = res.value * 0.25
    return l11_v, l12_v, m_v, k_v


# --------------------------------------------------------------------------
# public element constructors (cached)
# --------------------------------------------------------------------------

_cache_lock = threading.Lock()
_element_cache: dict = {}


def _cached_integrals(cfg):
    key = config_hash(cfg)
    with _cache_lock:
        hit = _element_cache.get(key)
    if hit is not None:
        return hit
    val = _element_integrals(cfg)
    with _cache_lock:
        _element_cache[key] = val
    return val


def _elements_from_integrals(cfg):
    l11_v, l12_v, m_v, k_v = _cached_integrals(cfg)
    pref = cfg.prefactor
    l11 = float(l11_v.real) * pref
    l12 = complex(l12_v) * pref
    m = complex(m_v) * pref
    k = complex(k_v) / math.sqrt(2.0) * pref
    e = ProbeMatrixElements(l1=0.0, l2=0.0, l11=l11, l22=l11, l12=l12,
                            m=m, k11=k, k22=k)
    return replace(e, x=x_fourth_order(e))


def vacuum_elements(cfg):
    """Density-matrix elements for the THz field in its vacuum state."""
    if cfg.temperature != 0.0:
        cfg = cfg.with_(temperature=0.0)
    return _elements_from_integrals(cfg)


def thermal_elements(cfg):
    """Elements for a thermal THz state at cfg.temperature (vacuum at T=0)."""
    return _elements_from_integrals(cfg)


def coherent_elements(cfg, waveform):
    """Elements for a coherently displaced vacuum described by a classical
    plane-wave sum.  The displacement adds mean-field products on top of the
    vacuum values; requires the full detection filter (real pulse
    projector)."""
    base = vacuum_elements(cfg)
    l1 = kernels.classical_overlap(cfg, waveform, 1)
    l2 = kernels.classical_overlap(cfg, waveform, 2)
    e = replace(
        base,
        l1=l1, l2=l2,
        l11=base.l11 + abs(l1) ** 2,
        l22=base.l22 + abs(l2) ** 2,
        l12=base.l12 + l1 * np.conj(l2),
        m=base.m + l1 * l2,
        k11=base.k11 + l1 * l1 / math.sqrt(2.0),
        k22=base.k22 + l2 * l2 / math.sqrt(2.0))
    return replace(e, x=x_fourth_order(e))


def exchange_self(cfg):
    """Same-pulse exchange element K_ii: the coincident-pulse exchange
    kernel divided by sqrt(2)."""
    return _elements_from_integrals(cfg).k11


# --------------------------------------------------------------------------
# state assembly
# --------------------------------------------------------------------------

BASIS = ((0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2))


@dataclass(frozen=True)
class ProbeState:
    """6x6 density matrix on the truncated EOS basis
    [|00>, |10>, |01>, |11>, |20>, |02>]."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (6, 6):
            raise ValueError("ProbeState needs a 6x6 matrix")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-12:
            raise ValueError("ProbeState matrix is not hermitian")
        if abs(np.trace(mat) - 1.0) > 1e-12:
            raise ValueError("ProbeState trace differs from 1")
        if np.min(mat.diagonal().real) < -1e-12:
            raise ValueError("ProbeState has a negative diagonal entry")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


def assemble_state(e):
    """Assemble the 6x6 probe state from its elements.

    The (1,1) entry closes the trace: 1 - l11 - l22 - x.  A value below
    -1e-9 means the inputs left the perturbative regime; rescale the
    elements (ProbeMatrixElements.scaled) before assembling.
    """
    for name in ("l1", "l2", "l11", "l22", "l12", "m", "k11", "k22", "x"):
        if not np.all(np.isfinite(np.asarray(getattr(e, name)))):
            raise ValueError(f"element {name} is not finite")
    rho00 = 1.0 - e.l11 - e.l22 - e.x
    if rho00 < -1e-9:
        raise ValueError(
            "1 - l11 - l22 - x < 0: elements are outside the perturbative "
            "regime; rescale them before assembling a state")
    lower = np.zeros((6, 6), dtype=complex)
    lower[0, 0] = rho00
    lower[1, 1] = e.l11
    lower[2, 2] = e.l22
    lower[3, 3] = e.x
    lower[1, 0] = e.l1
    lower[2, 0] = e.l2
    lower[3, 0] = e.m
    lower[4, 0] = e.k11
    lower[5, 0] = e.k22
    lower[2, 1] = e.l21
    mat = lower + np.tril(lower, -1).conj().T
    return ProbeState(matrix=mat)


def auto_scale(e, target=1e-3):
    """Prefactor lambda such that the scaled elements assemble into a
    comfortably perturbative state; returns (scaled_elements, lambda)."""
    mag = e.magnitude()
    lam = 1.0 if mag <= target else target / mag
    return e.scaled(lam), lam
