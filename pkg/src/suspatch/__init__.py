"""FDTD solver and one-port characterization toolkit for compact
suspended-patch antennas.

The staggering and time conventions shared by every module are documented
in :mod:`suspatch.grid`.
"""

from .backends import BACKEND_NAME
from .cpml import CpmlGrading
from .exceptions import (ConfigError, EnergyBalanceError, FitError,
                         GeometryError, InstabilityError,
                         InvalidParameterError, NoLinkError, PassivityError,
                         SingularImpedanceError, SuspatchError)
from .farfield import (EfficiencyReport, FarFieldPattern, HuygensSurface,
                       PatternMetrics, azimuth_ripple, directivity,
                       efficiency_report, gain, hpbw, ntff, pattern_metrics)
from .geometry import (AntennaSpec, PinSpec, StripSpec, VoxelModel,
                       build_default_antenna, sweep_parameter, voxelize)
from .grid import (EnergyReport, FieldState, GridSpec, MaterialMap,
                   courant_timestep, field_energy, material_coefficients)
from .netan import (BandReport, FrequencyResponse, RlcModel, band_metrics,
                    dft_at, fit_parallel_rlc, friis_range, impedance,
                    parallel_rlc_impedance, reflection_coefficient,
                    return_loss)
from .ports import (LumpedPort, PortRecord, Waveform, apply_port,
                    gap_voltage, loop_current, record_port, waveform_sample)
from .solver import Simulation
from .validation import (cavity_lowest_mode, cpml_reflection_test,
                         make_tube_grid, plane_wave_speed,
                         rectangular_cavity_mode)

__version__ = "0.1.0"
