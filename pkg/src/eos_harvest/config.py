"""Experiment configuration: domain types, units, loading and validation.

Internal units are SI throughout (m, s, rad/s, K).  Human-facing
configuration files use the experimental units of the field (um, fs, mm,
THz, K); field names carry their unit as a suffix so a file is
self-documenting.  Loading converts exactly once, at the boundary.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field, replace

import yaml

from . import materials
from .constants import CONST

TWO_PI = 2.0 * math.pi

# human-facing unit factors (config value * factor = SI value)
UM = 1e-6
FS = 1e-15
MM = 1e-3
THZ = TWO_PI * 1e12   # 1 THz of frequency = 2*pi*1e12 rad/s


class ConfigError(ValueError):
    """Base class for configuration problems."""


class ConfigParseError(ConfigError):
    """The file could not be read or is not structured key-value text."""


class ConfigValidationError(ConfigError):
    """A field violates a constraint; names both."""

    def __init__(self, field_name, constraint):
        self.field_name = field_name
        self.constraint = constraint
        super().__init__(f"config field '{field_name}': {constraint}")


@dataclass(frozen=True)
class SpectralFilter:
    """Frequency filter applied to the detected probe modes.

    kind is one of "full", "band", "monochromatic".  Band keeps
    [omega_min, omega_max]; monochromatic keeps a narrow window of width
    delta_omega centred on omega_d.  All values in rad/s.
    """

    kind: str = "full"
    omega_min: float = 0.0
    omega_max: float = math.inf
    omega_d: float | None = None
    delta_omega: float | None = None

    @classmethod
    def full(cls):
        return cls(kind="full")

    @classmethod
    def band(cls, omega_min, omega_max=math.inf):
        return cls(kind="band", omega_min=float(omega_min), omega_max=float(omega_max))

    @classmethod
    def monochromatic(cls, omega_d, delta_omega):
        return cls(kind="monochromatic", omega_d=float(omega_d),
                   delta_omega=float(delta_omega))

    def validate(self, sigma_omega):
        if self.kind not in ("full", "band", "monochromatic"):
            raise ConfigValidationError("filter.kind",
                                        "must be full, band or monochromatic")
        if self.kind == "band":
            if not 0.0 <= self.omega_min < self.omega_max:
                raise ConfigValidationError(
                    "filter.omega_min", "requires 0 <= omega_min < omega_max")
        if self.kind == "monochromatic":
            if self.omega_d is None or self.delta_omega is None:
                raise ConfigValidationError(
                    "filter.omega_d", "monochromatic filter needs omega_d and delta_omega")
            if self.delta_omega <= 0.0:
                raise ConfigValidationError("filter.delta_omega", "must be > 0")
            # narrow-window condition backing a_i ~ a_i(omega_d)
            if self.delta_omega >= sigma_omega / 50.0:
                raise ConfigValidationError(
                    "filter.delta_omega",
                    f"must be < sigma_omega/50 = {sigma_omega / 50.0:.6g} rad/s")


@dataclass(frozen=True)
class WavePlateSetting:
    """Ellipsometry setting: wave-plate phase theta in [pi/2, 3*pi/2] and
    the sign of the fast-axis angle."""

    theta: float
    sign: int = 1

    def __post_init__(self):
        if not (math.pi / 2.0 - 1e-12) <= self.theta <= (3.0 * math.pi / 2.0 + 1e-12):
            raise ConfigValidationError("waveplate.theta", "must lie in [pi/2, 3*pi/2]")
        if self.sign not in (-1, 1):
            raise ConfigValidationError("waveplate.sign", "must be -1 or +1")


@dataclass(frozen=True)
class PlaneWaveComponent:
    """One plane-wave component of a classical THz waveform, propagating
    along z: amplitude * cos(wavevector*z - frequency*t + phase)."""

    amplitude: float          # V/m (reduced-unit amplitude when unscaled)
    wavevector: float         # rad/m along z
    frequency: float          # rad/s, > 0
    phase: float = 0.0        # rad


@dataclass(frozen=True)
class ClassicalWaveform:
    """Finite sum of plane-wave components, the classical amplitude of a
    coherent THz state."""

    components: tuple[PlaneWaveComponent, ...] = ()

    def __post_init__(self):
        for j, comp in enumerate(self.components):
            if not comp.frequency > 0.0:
                raise ConfigValidationError(
                    f"waveform.components[{j}].frequency", "must be > 0")
            for name in ("amplitude", "wavevector", "frequency", "phase"):
                if not math.isfinite(getattr(comp, name)):
                    raise ConfigValidationError(
                        f"waveform.components[{j}].{name}", "must be finite")


@dataclass(frozen=True)
class PhysicalScale:
    """Optional absolute calibration.  When absent all density-matrix
    elements are reported in reduced units C*N_d == 1."""

    chi2: float        # m/V
    n_d: float         # photons in the detected band
    n_c: float         # NIR refractive index at omega_c

    def __post_init__(self):
        for name in ("chi2", "n_d", "n_c"):
            if not getattr(self, name) > 0.0:
                raise ConfigValidationError(f"scale.{name}", "must be > 0")


@dataclass(frozen=True)
class ExperimentConfig:
    """All geometric, spectral and material parameters of one EOS run (SI)."""

    beam_waist: float                       # w, m
    pulse_duration: float                   # tau_sigma, s
    crystal_length: float                   # L, m
    group_index: float                      # n_g
    central_frequency: float                # omega_c, rad/s
    beam_separation: float = 0.0            # delta_r (along y), m; signed
    time_delay: float = 0.0                 # delta_t, s; positive delays pulse 2
    temperature: float = 0.0                # K
    filter: SpectralFilter = field(default_factory=SpectralFilter.full)
    material: materials.PermittivityModel = field(
        default_factory=materials.default_material)
    scale: PhysicalScale | None = None

    def __post_init__(self):
        for name in ("beam_waist", "pulse_duration", "crystal_length",
                     "central_frequency"):
            if not getattr(self, name) > 0.0:
                raise ConfigValidationError(name, "must be > 0")
        if not self.group_index > 0.0:
            raise ConfigValidationError("group_index", "must be > 0")
        if self.temperature < 0.0:
            raise ConfigValidationError("temperature", "must be >= 0")
        for name in ("beam_separation", "time_delay"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigValidationError(name, "must be finite")
        self.filter.validate(2.0 / self.pulse_duration)

    @property
    def sigma_omega(self):
        """Spectral width of the laser pulses, sigma_omega = 2/tau_sigma."""
        return 2.0 / self.pulse_duration

    @property
    def prefactor(self):
        """C*N_d: 1.0 in reduced units, else from the physical scale block."""
        if self.scale is None:
            return 1.0
        from .kernels import detection_efficiency
        c_eff = detection_efficiency(self.scale.chi2, self.crystal_length,
                                     self.central_frequency, self.scale.n_c)
        return c_eff * self.scale.n_d

    def with_(self, **changes):
        """Functional update returning a new validated config."""
        return replace(self, **changes)


def sigma_omega(cfg):
    """Spectral width sigma_omega = 2/tau_sigma of the pulse spectrum."""
    if not cfg.pulse_duration > 0.0:
        raise ConfigValidationError("pulse_duration", "must be > 0")
    return 2.0 / cfg.pulse_duration


# --------------------------------------------------------------------------
# file I/O
# --------------------------------------------------------------------------

_TOP_KEYS = {
    "beam_waist_um", "pulse_duration_fs", "crystal_length_mm", "group_index",
    "central_frequency_thz", "beam_separation_um", "time_delay_fs",
    "temperature_k", "filter", "material", "scale",
}


def _require_number(d, key, where):
    v = d.get(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigValidationError(f"{where}{key}", "must be a number")
    return float(v)


def _filter_from_dict(d):
    kind = d.get("kind", "full")
    if kind == "full":
        return SpectralFilter.full()
    if kind == "band":
        omega_min = _require_number(d, "omega_min_thz", "filter.") * THZ
        omega_max = d.get("omega_max_thz", math.inf)
        if not isinstance(omega_max, (int, float)):
            raise ConfigValidationError("filter.omega_max_thz", "must be a number")
        omega_max = float(omega_max)
        omega_max = math.inf if math.isinf(omega_max) else omega_max * THZ
        return SpectralFilter.band(omega_min, omega_max)
    if kind == "monochromatic":
        return SpectralFilter.monochromatic(
            _require_number(d, "omega_d_thz", "filter.") * THZ,
            _require_number(d, "delta_omega_thz", "filter.") * THZ)
    raise ConfigValidationError("filter.kind", "must be full, band or monochromatic")


def _filter_to_dict(f):
    if f.kind == "full":
        return {"kind": "full"}
    if f.kind == "band":
        return {"kind": "band",
                "omega_min_thz": f.omega_min / THZ,
                "omega_max_thz": (math.inf if math.isinf(f.omega_max)
                                  else f.omega_max / THZ)}
    return {"kind": "monochromatic",
            "omega_d_thz": f.omega_d / THZ,
            "delta_omega_thz": f.delta_omega / THZ}


def config_from_dict(raw, base_dir="."):
    """Build a validated ExperimentConfig from a human-unit dictionary."""
    if not isinstance(raw, dict):
        raise ConfigParseError("top level of the config must be a mapping")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigValidationError(sorted(unknown)[0], "unknown config key")

    filt = raw.get("filter", {"kind": "full"})
    if not isinstance(filt, dict):
        raise ConfigValidationError("filter", "must be a mapping")

    mat_spec = raw.get("material")
    if mat_spec is None:
        material = materials.default_material()
    else:
        material = materials.material_from_dict(mat_spec, base_dir=base_dir)

    scale_spec = raw.get("scale")
    scale = None
    if scale_spec is not None:
        if not isinstance(scale_spec, dict):
            raise ConfigValidationError("scale", "must be a mapping")
        scale = PhysicalScale(
            chi2=_require_number(scale_spec, "chi2_m_per_v", "scale."),
            n_d=_require_number(scale_spec, "n_d_photons", "scale."),
            n_c=_require_number(scale_spec, "n_c", "scale."))

    return ExperimentConfig(
        beam_waist=_require_number(raw, "beam_waist_um", "") * UM,
        pulse_duration=_require_number(raw, "pulse_duration_fs", "") * FS,
        crystal_length=_require_number(raw, "crystal_length_mm", "") * MM,
        group_index=_require_number(raw, "group_index", ""),
        central_frequency=_require_number(raw, "central_frequency_thz", "") * THZ,
        beam_separation=(float(raw.get("beam_separation_um", 0.0)) * UM),
        time_delay=(float(raw.get("time_delay_fs", 0.0)) * FS),
        temperature=float(raw.get("temperature_k", 0.0)),
        filter=_filter_from_dict(filt),
        material=material,
        scale=scale,
    )


def config_to_dict(cfg):
    """Human-unit dictionary representation (inverse of config_from_dict)."""
    d = {
        "beam_waist_um": cfg.beam_waist / UM,
        "pulse_duration_fs": cfg.pulse_duration / FS,
        "crystal_length_mm": cfg.crystal_length / MM,
        "group_index": cfg.group_index,
        "central_frequency_thz": cfg.central_frequency / THZ,
        "beam_separation_um": cfg.beam_separation / UM,
        "time_delay_fs": cfg.time_delay / FS,
        "temperature_k": cfg.temperature,
        "filter": _filter_to_dict(cfg.filter),
        "material": materials.material_to_dict(cfg.material),
    }
    if cfg.scale is not None:
        d["scale"] = {"chi2_m_per_v": cfg.scale.chi2,
                      "n_d_photons": cfg.scale.n_d,
                      "n_c": cfg.scale.n_c}
    return d


def load_config(path):
    """Load and validate an experiment configuration file (YAML key-value)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigParseError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigParseError(f"malformed config file {path}: {exc}") from exc
    return config_from_dict(raw, base_dir=os.path.dirname(os.path.abspath(path)))


def serialize_config(cfg):
    """Serialize to the same human-unit YAML schema accepted by load_config."""
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=True,
                          default_flow_style=False)


def config_hash(cfg):
    """Stable content hash of the configuration (reduced to its serialization)."""
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()[:16]


def apply_overrides(raw, overrides):
    """Apply CLI ``--set dotted.key=value`` pairs to a raw config dictionary."""
    for item in overrides:
        if "=" not in item:
            raise ConfigParseError(f"override '{item}' is not of the form key=value")
        key, _, text = item.partition("=")
        try:
            value = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigParseError(f"override '{item}': bad value: {exc}") from exc
        node = raw
        parts = key.strip().split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigParseError(f"override '{item}': '{part}' is not a mapping")
        node[parts[-1]] = value
    return raw
