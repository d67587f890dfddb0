"""Two-beam electro-optic sampling of THz quantum fields.

Computes the reduced density matrix of the two near-infrared probe modes
after electro-optic mixing with vacuum, thermal or coherent THz fields, and
derives the harvested correlations, negativity, entanglement-witness budget
and Bell-functional values from it.
"""

__version__ = "0.1.0"

from ._backend import backend_name
from .bell import BellSettings, bell_max_closed, bell_optimize, bell_value
from .config import (ClassicalWaveform, ConfigError, ExperimentConfig,
                     PhysicalScale, PlaneWaveComponent, SpectralFilter,
                     WavePlateSetting, load_config, serialize_config,
                     sigma_omega)
from .constants import CONST, PhysicalConstants
from .elements import (ProbeMatrixElements, ProbeState, assemble_state,
                       coherent_elements, exchange_self, thermal_elements,
                       vacuum_elements, x_fourth_order)
from .kernels import (classical_overlap, detection_efficiency,
                      ellipsometry_phase, invert_phase, propagation_factor,
                      spectral_autocorrelation, thermal_occupation,
                      transverse_kernel, vacuum_mode_density)
from .materials import (Constant, LorentzOscillators, Oscillator,
                        default_material, load_material, permittivity,
                        refractive_index)
from .observables import (NegativityReport, WitnessBudget, mean_signal,
                          negativity, negativity_oracle, reduce_single_mode,
                          shot_noise_removed, single_beam_variance,
                          two_beam_correlation, witness_budget,
                          witness_expectation)
from .oracles import run_verification_suite
from .quadrature import (IntegrationResult, QuadratureError, bessel_j,
                         integrate_adaptive, oscillation_panels)
