"""Physical constants (SI, CODATA 2018)."""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants used throughout the engine.

    eps0 is derived from mu0 and c so that mu0*eps0*c**2 == 1 holds to
    machine precision rather than only to the precision of tabulated values.
    """

    hbar: float = 1.054571817e-34   # J s
    c: float = 299792458.0          # m / s
    mu0: float = 1.25663706212e-6   # H / m
    kB: float = 1.380649e-23        # J / K
    eps0: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "eps0", 1.0 / (self.mu0 * self.c**2))


CONST = PhysicalConstants()
