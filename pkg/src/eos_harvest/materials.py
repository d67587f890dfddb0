"""THz permittivity and refractive index of the nonlinear crystal.

Supports a constant complex permittivity or a sum of Lorentz phonon
oscillators eps(O) = eps_inf * (1 + sum_k (w_LO^2 - w_TO^2) /
(w_TO^2 - O^2 - i*gamma*O)).  The temperature dependence of the
permittivity is deliberately ignored.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
import yaml

TWO_PI = 2.0 * math.pi
_THZ = TWO_PI * 1e12


class MaterialError(ValueError):
    """Invalid material description."""


class MaterialPoleError(ZeroDivisionError):
    """Evaluation landed exactly on an undamped phonon pole."""


@dataclass(frozen=True)
class Oscillator:
    """One phonon resonance (all rad/s)."""

    omega_to: float
    omega_lo: float
    gamma: float

    def __post_init__(self):
        if not self.omega_to > 0.0:
            raise MaterialError("oscillator omega_to must be > 0")
        if not self.omega_lo > 0.0:
            raise MaterialError("oscillator omega_lo must be > 0")
        if self.omega_lo < self.omega_to:
            raise MaterialError("oscillator needs omega_lo >= omega_to (passivity)")
        if self.gamma < 0.0:
            raise MaterialError("oscillator gamma must be >= 0")


@dataclass(frozen=True)
class Constant:
    """Frequency-independent complex permittivity."""

    epsilon: complex

    def __post_init__(self):
        if self.epsilon.imag < 0.0:
            raise MaterialError("constant permittivity needs Im eps >= 0 (passivity)")


@dataclass(frozen=True)
class LorentzOscillators:
    """Sum of Lorentz phonon resonances on top of eps_inf."""

    eps_inf: float
    oscillators: tuple[Oscillator, ...]

    def __post_init__(self):
        if not self.eps_inf > 0.0:
            raise MaterialError("eps_inf must be > 0")
        if not self.oscillators:
            raise MaterialError("lorentz model needs at least one oscillator")


PermittivityModel = Constant | LorentzOscillators


def _lorentz_eps_signed(model, omega):
    """Lorentz formula evaluated with signed frequency (test hook for the
    crossing-symmetry check Re even / Im odd)."""
    omega = np.asarray(omega, dtype=float)
    eps = np.ones_like(omega, dtype=complex)
    for osc in model.oscillators:
        denom = osc.omega_to**2 - omega**2 - 1j * osc.gamma * omega
        if np.any(denom == 0.0):
            raise MaterialPoleError(
                "undamped resonance evaluated exactly at omega_to")
        eps = eps + (osc.omega_lo**2 - osc.omega_to**2) / denom
    return model.eps_inf * eps


def permittivity(model, omega):
    """Complex permittivity eps(omega) for omega >= 0 (scalar or array)."""
    arr = np.asarray(omega, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("permittivity requires omega >= 0")
    if isinstance(model, Constant):
        out = np.broadcast_to(complex(model.epsilon), arr.shape).copy()
    else:
        out = _lorentz_eps_signed(model, arr)
    return out if arr.ndim else complex(out)


def refractive_index(model, omega):
    """n(omega) = sqrt(eps(omega)), branch with Im n >= 0."""
    eps = np.asarray(permittivity(model, omega))
    n = np.sqrt(eps)
    n = np.where(n.imag < 0.0, -n, n)
    return n if np.asarray(omega).ndim else complex(n)


# --------------------------------------------------------------------------
# parameter files
# --------------------------------------------------------------------------

_DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
DEFAULT_MATERIAL_FILE = os.path.join(_DATA_DIR, "znte_lorentz.yaml")


def material_from_dict(d, base_dir="."):
    """Build a model from a config-style mapping (kinds: constant / lorentz /
    file)."""
    if not isinstance(d, dict):
        raise MaterialError("material spec must be a mapping")
    kind = d.get("kind")
    if kind == "file":
        path = d.get("path")
        if not path:
            raise MaterialError("material kind 'file' needs a 'path'")
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        return load_material(path)
    if kind == "constant":
        if "n" in d:
            n = float(d["n"])
            return Constant(epsilon=complex(n * n, 0.0))
        eps = d.get("epsilon")
        if isinstance(eps, (list, tuple)) and len(eps) == 2:
            return Constant(epsilon=complex(float(eps[0]), float(eps[1])))
        if isinstance(eps, (int, float)):
            return Constant(epsilon=complex(float(eps), 0.0))
        raise MaterialError("constant material needs 'n' or 'epsilon' ([re, im])")
    if kind == "lorentz":
        try:
            oscs = tuple(
                Oscillator(omega_to=float(o["omega_to_thz"]) * _THZ,
                           omega_lo=float(o["omega_lo_thz"]) * _THZ,
                           gamma=float(o["gamma_thz"]) * _THZ)
                for o in d["oscillators"])
            return LorentzOscillators(eps_inf=float(d["eps_inf"]), oscillators=oscs)
        except (KeyError, TypeError) as exc:
            raise MaterialError(f"malformed lorentz material spec: {exc}") from exc
    raise MaterialError("material kind must be constant, lorentz or file")


def material_to_dict(model):
    if isinstance(model, Constant):
        return {"kind": "constant",
                "epsilon": [model.epsilon.real, model.epsilon.imag]}
    return {"kind": "lorentz",
            "eps_inf": model.eps_inf,
            "oscillators": [{"omega_to_thz": o.omega_to / _THZ,
                             "omega_lo_thz": o.omega_lo / _THZ,
                             "gamma_thz": o.gamma / _THZ}
                            for o in model.oscillators]}


def load_material(path):
    """Load a material parameter file ('#' header lines carry provenance)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise MaterialError(f"cannot read material file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise MaterialError(f"malformed material file {path}: {exc}") from exc
    model = material_from_dict(raw, base_dir=os.path.dirname(os.path.abspath(path)))
    if isinstance(model, LorentzOscillators) and raw.get("kind") == "file":
        raise MaterialError("material files must not chain to further files")
    return model


def default_material():
    """The bundled THz permittivity of the 1 mm ZnTe detection crystal."""
    return load_material(DEFAULT_MATERIAL_FILE)
