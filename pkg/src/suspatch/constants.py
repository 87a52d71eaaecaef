"""Physical constants (SI units)."""

import math

c0 = 299792458.0              # speed of light in vacuum [m/s]
mu0 = 4.0e-7 * math.pi        # vacuum permeability [H/m]
eps0 = 1.0 / (mu0 * c0 * c0)  # vacuum permittivity [F/m]
eta0 = mu0 * c0               # free-space wave impedance [ohm]
