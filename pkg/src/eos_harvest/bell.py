"""Bell functional of the two-beam correlators and its optimization.

In the monochromatic detection scheme the local oscillator is attenuated to
N_LO photons and the normalized correlator becomes
G = 2 N_LO Re[P1* P2 l12 + P1 P2 m] / (N_LO^2 + N_LO l11 + x); the CHSH-type
combination of four settings then probes Bell nonlocality.  The denominator
follows the printed single-mode bookkeeping; the two-mode alternative
(N_LO (l11 + l22) in place of N_LO l11) is computed alongside so scans can
report when the choice matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize as _opt

from .config import WavePlateSetting
from .kernels import ellipsometry_phase

TWO_SQRT2 = 2.0 * math.sqrt(2.0)
_THETA_LO = math.pi / 2.0
_THETA_HI = 3.0 * math.pi / 2.0


@dataclass(frozen=True)
class BellSettings:
    """Four ellipsometry settings plus the attenuated LO photon number."""

    theta1: WavePlateSetting
    theta1_prime: WavePlateSetting
    theta2: WavePlateSetting
    theta2_prime: WavePlateSetting
    n_lo: float

    def __post_init__(self):
        if not self.n_lo > 0.0:
            raise ValueError("n_lo must be > 0")


def _denominator(e, n_lo, two_mode=False):
    local = e.l11 + e.l22 if two_mode else e.l11
    return n_lo**2 + n_lo * local + e.x


def bell_correlator(e, setting1, setting2, n_lo, two_mode_denominator=False):
    """Single normalized correlator G_{Theta1 Theta2} of the Bell test."""
    p1 = ellipsometry_phase(setting1)
    p2 = ellipsometry_phase(setting2)
    num = 2.0 * n_lo * (np.conj(p1) * p2 * e.l12 + p1 * p2 * e.m).real
    return float(num / _denominator(e, n_lo, two_mode_denominator))


def bell_value(e, settings, two_mode_denominator=False):
    """Bell combination B = |G(1,2) - G(1,2') + G(1',2) + G(1',2')|."""
    g = lambda a, b: bell_correlator(e, a, b, settings.n_lo, two_mode_denominator)
    return abs(g(settings.theta1, settings.theta2)
               - g(settings.theta1, settings.theta2_prime)
               + g(settings.theta1_prime, settings.theta2)
               + g(settings.theta1_prime, settings.theta2_prime))


def bell_max_closed(e, n_lo, two_mode_denominator=False):
    """Exact supremum of the Bell combination over all settings.

    With P free on the unit circle the correlator is
    c * Re[l12 e^{i(psi2-psi1)} + m e^{i(psi1+psi2)}]; the induced correlator
    ellipse gives sup B = 2 sqrt(2) c sqrt(|l12|^2 + |m|^2).  Wick-consistent
    x makes this <= 2 sqrt(2) for every N_LO (AM-GM on the denominator).
    """
    c = 2.0 * n_lo / _denominator(e, n_lo, two_mode_denominator)
    return TWO_SQRT2 * c * math.hypot(abs(e.l12), abs(e.m))


def _phase_grid(thetas):
    return np.array([ellipsometry_phase(WavePlateSetting(t)) for t in thetas])


def bell_optimize(e, n_lo, grid_points=8, refine=True, two_mode_denominator=False):
    """Maximize the Bell combination over the four settings.

    Coarse stage: ``grid_points`` wave-plate angles per setting crossed with
    the four sign patterns that remain after removing per-party global
    flips.  Fine stage: Nelder-Mead on the four angles with signs frozen.
    Deterministic for fixed inputs.  Returns (B_max, BellSettings).
    """
    if not n_lo > 0.0:
        raise ValueError("n_lo must be > 0")
    den = _denominator(e, n_lo, two_mode_denominator)
    thetas = np.linspace(_THETA_LO, _THETA_HI, grid_points)
    p = _phase_grid(thetas)
    # correlator table for sign-(+,+) pairs
    g0 = (2.0 * n_lo / den) * (np.conj(p)[:, None] * p[None, :] * e.l12
                               + p[:, None] * p[None, :] * e.m).real

    best = (-1.0, None)
    for s1p in (1, -1):
        for s2p in (1, -1):
            b = np.abs(g0[:, None, :, None]
                       - s2p * g0[:, None, None, :]
                       + s1p * g0[None, :, :, None]
                       + s1p * s2p * g0[None, :, None, :])
            idx = np.unravel_index(np.argmax(b), b.shape)
            if b[idx] > best[0]:
                best = (float(b[idx]),
                        (thetas[idx[0]], thetas[idx[1]], thetas[idx[2]],
                         thetas[idx[3]], s1p, s2p))

    b_val, (t1, t1p, t2, t2p, s1p, s2p) = best
    signs = (1, s1p, 1, s2p)

    def pack(angles):
        return BellSettings(
            theta1=WavePlateSetting(float(angles[0]), signs[0]),
            theta1_prime=WavePlateSetting(float(angles[1]), signs[1]),
            theta2=WavePlateSetting(float(angles[2]), signs[2]),
            theta2_prime=WavePlateSetting(float(angles[3]), signs[3]),
            n_lo=n_lo)

    angles = np.array([t1, t1p, t2, t2p])
    if refine:
        res = _opt.minimize(
            lambda ang: -bell_value(e, pack(np.clip(ang, _THETA_LO, _THETA_HI)),
                                    two_mode_denominator),
            angles, method="Nelder-Mead",
            bounds=[(_THETA_LO, _THETA_HI)] * 4,
            options={"maxiter": 500, "xatol": 1e-10, "fatol": 1e-12})
        if -res.fun >= b_val:
            b_val = -float(res.fun)
            angles = np.clip(res.x, _THETA_LO, _THETA_HI)

    return b_val, pack(angles)
