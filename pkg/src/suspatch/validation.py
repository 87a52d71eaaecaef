"""Analytic-oracle validation runs: plane-wave speed, cavity modes, CPML.

These drive the full 3-D engine in configurations with known answers.  The
plane-wave and boundary tests use a TEM tube: PEC walls normal to the E
polarization, PMC walls on the other pair, so a uniform plane wave
propagates along z exactly as in one dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import c0
from .cpml import CpmlGrading
from .exceptions import InvalidParameterError
from .grid import GridSpec, MaterialMap
from .netan import dft_at
from .ports import Waveform
from .solver import Simulation


class SoftSource:
    """Additive E-field source hook over a fixed index selection."""

    def __init__(self, component: str, selection, waveform: Waveform,
                 scale: float = 1.0):
        self.component = component
        self.selection = selection
        self.waveform = waveform
        self.scale = scale

    def after_e(self, state, t_mid: float):
        # E has just advanced to t_mid + dt/2
        arr = getattr(state, self.component)
        arr[self.selection] += self.scale * self.waveform.sample(t_mid)


def make_tube_grid(n_cross: int, n_len: int, delta: float, pml: int,
                   cfl_factor: float = 0.95) -> GridSpec:
    """TEM tube: x walls PEC, y walls PMC, z ends CPML (or PEC if pml=0)."""
    z_bc = "cpml" if pml > 0 else "pec"
    return GridSpec.make(n_cross, n_cross, n_len, delta, delta, delta,
                         cfl_factor=cfl_factor, pml_thickness=pml,
                         face_bc=("pec", "pec", "pmc", "pmc", z_bc, z_bc))


def plane_wave_speed(cells_per_wavelength: float = 20.0, delta: float = 1e-3,
                     cfl_factor: float = 0.95, probe_separation: int = 60,
                     backend: str | None = None) -> float:
    """Measured propagation speed of a plane pulse in vacuum [m/s].

    Launches a +-z pulse pair from a uniform Ex source plane in the TEM
    tube and measures the phase delay at the carrier between two probe
    planes, i.e. the phase-front time of flight over a known distance.
    """
    f0 = c0 / (cells_per_wavelength * delta)
    wf = Waveform(f0=f0, f_span=f0 / 3.0)
    pml = 10
    k1 = pml + 18
    k2 = k1 + probe_separation
    n_len = k2 + 20 + pml
    grid = make_tube_grid(4, n_len, delta, pml, cfl_factor)
    sim = Simulation(grid, MaterialMap.vacuum(grid), backend=backend)
    ks = pml + 6
    src = SoftSource("Ex", (slice(None), slice(None), ks), wf)

    travel = (k2 - ks + 10) * delta / c0
    n_steps = int(math.ceil((wf.end_time + travel) / grid.dt))
    p1 = np.empty(n_steps)
    p2 = np.empty(n_steps)
    for n in range(n_steps):
        sim.step(hooks=(src,))
        p1[n] = sim.state.Ex[2, 2, k1]
        p2[n] = sim.state.Ex[2, 2, k2]

    x1 = dft_at(p1, grid.dt, [f0])[0]
    x2 = dft_at(p2, grid.dt, [f0])[0]
    dist = probe_separation * delta
    omega = 2.0 * math.pi * f0
    principal = -np.angle(x2 / x1)  # delay tau > 0 gives phase -omega*tau
    m = round((omega * dist / c0 - principal) / (2.0 * math.pi))
    tau = (principal + 2.0 * math.pi * m) / omega
    return dist / tau


def cpml_reflection_test(grid: GridSpec, grading: CpmlGrading | None = None,
                         backend: str | None = None) -> float:
    """Reflection (dB) of the +z boundary, measured against a long reference.

    A pulse launched down the tube passes a probe near the far face; the
    same run in a tube extended far enough that nothing returns in the
    window provides the incident reference, and the difference at the probe
    is the reflected wave.  Returns 20*log10(max|refl| / max|incident|).
    """
    nz, dz = grid.nz, grid.dz
    pml = grid.pml_thickness
    f0 = c0 / (20.0 * dz)
    wf = Waveform(f0=f0, f_span=f0 / 3.0)
    lead_hi = pml if grid.face_bc[5] == "cpml" else 0
    kp = nz - lead_hi - 8
    ks = kp - 40
    # the source also launches a -z pulse; the window must close before its
    # echo off the z_lo end can reach the probe
    tail_cells = int(math.ceil(c0 * wf.end_time / dz))
    if ks < (nz - kp) + tail_cells + 4:
        raise InvalidParameterError(
            f"tube too short: need nz >= {2 * (nz - kp) + tail_cells + 44 + 4}")
    echo_cells = (kp - ks) + 2 * (nz - kp) + 12
    t_end = wf.end_time + echo_cells * dz / c0 + wf.end_time
    n_steps = int(math.ceil(t_end / grid.dt))

    # reference: same tube continued past the far wall, so the probe sees
    # only the incident wave inside the window
    extend = int(math.ceil(c0 * t_end / dz)) + 8
    ref_grid = GridSpec.make(grid.nx, grid.ny, nz + extend,
                             grid.dx, grid.dy, dz,
                             cfl_factor=grid.cfl_factor,
                             pml_thickness=0,
                             face_bc=grid.face_bc[:4] + ("pec", "pec"))

    def probe_series(g):
        sim = Simulation(g, MaterialMap.vacuum(g), grading=grading, backend=backend)
        src = SoftSource("Ex", (slice(None), slice(None), ks), wf)
        out = np.empty(n_steps)
        for n in range(n_steps):
            sim.step(hooks=(src,))
            out[n] = sim.state.Ex[g.nx // 2, g.ny // 2, kp]
        return out

    test = probe_series(grid)
    ref = probe_series(ref_grid)
    incident = float(np.max(np.abs(ref)))
    reflected = float(np.max(np.abs(test - ref)))
    if reflected == 0.0:
        return -float("inf")
    return 20.0 * math.log10(reflected / incident)


@dataclass(frozen=True)
class DipoleRunResult:
    pattern: object
    p_in: float
    record: object


def hertzian_dipole_run(f0: float = 2.0e9, delta: float = 2e-3, n: int = 54,
                        pml: int = 10, inset_cells: int = 4,
                        backend: str | None = None) -> DipoleRunResult:
    """Drive a single z edge in vacuum through a 50 ohm lumped port.

    The far field of this elementary radiator has the analytic sin(theta)
    pattern with directivity 1.5, and with no loss anywhere the net port
    power must match the transform's radiated power.
    """
    import types

    from .farfield import HuygensSurface, ntff
    from .netan import FrequencyResponse
    from .ports import LumpedPort, PortRecord, Waveform as _W

    grid = GridSpec.make(n, n, n, delta, delta, delta, pml_thickness=pml)
    mats = MaterialMap.vacuum(grid)
    model = types.SimpleNamespace(grid=grid, materials=mats,
                                  port_index=(n // 2, n // 2, n // 2),
                                  port_resistance=50.0)
    wf = _W(f0=f0, f_span=f0 / 2.0)
    port = LumpedPort(model, wf.sample)
    surf = HuygensSurface(grid, [f0], inset_cells=inset_cells)
    sim = Simulation(grid, mats, backend=backend)
    transit = 3.0 * n * delta / c0
    n_steps = int(math.ceil((wf.end_time + transit) / grid.dt))
    for _ in range(n_steps):
        sim.step(hooks=(port,))
        surf.accumulate(sim.state)
    surf.finalize()
    record = PortRecord.from_port(port, wf)
    resp = FrequencyResponse.from_time_series(record.v, record.i, record.dt,
                                              np.array([f0]), zs=50.0)
    p_in = resp.input_power(f0)
    pattern = ntff(surf, f0, p_in=p_in)
    return DipoleRunResult(pattern, p_in, record)


@dataclass(frozen=True)
class CavityResult:
    f_peak_hz: float
    f_analytic_hz: float

    @property
    def relative_error(self) -> float:
        return abs(self.f_peak_hz - self.f_analytic_hz) / self.f_analytic_hz


def rectangular_cavity_mode(a: float, b: float, d: float,
                            m: int = 1, n: int = 1, p: int = 0) -> float:
    """Analytic resonance of an air-filled a x b x d PEC box [Hz]."""
    return 0.5 * c0 * math.sqrt((m / a) ** 2 + (n / b) ** 2 + (p / d) ** 2)


def cavity_lowest_mode(a: float = 30e-3, b: float = 20e-3, d: float = 10e-3,
                       resolution: float = 1e-3, cfl_factor: float = 0.95,
                       n_periods: float = 160.0,
                       backend: str | None = None) -> CavityResult:
    """Measured lowest resonance of an air-filled PEC box.

    Drives Ez at the transverse center (the TE110 antinode), records a
    probe after the source dies, and refines the spectral peak on a dense
    frequency grid by parabolic interpolation.
    """
    f_ref = rectangular_cavity_mode(a, b, d)
    nx = int(round(a / resolution))
    ny = int(round(b / resolution))
    nz = int(round(d / resolution))
    grid = GridSpec.make(nx, ny, nz, a / nx, b / ny, d / nz,
                         cfl_factor=cfl_factor, pml_thickness=0)
    sim = Simulation(grid, MaterialMap.vacuum(grid), backend=backend)
    wf = Waveform(f0=f_ref, f_span=0.35 * f_ref)
    src = SoftSource("Ez", (nx // 2, ny // 2, nz // 2), wf)

    n_steps = int(math.ceil(n_periods / (f_ref * grid.dt)))
    probe = np.empty(n_steps)
    for step in range(n_steps):
        sim.step(hooks=(src,))
        probe[step] = sim.state.Ez[nx // 2 + nx // 5, ny // 2 + ny // 5, nz // 2]

    window = np.hanning(n_steps)
    f_grid = np.linspace(0.8 * f_ref, 1.2 * f_ref, 4001)
    spec = np.abs(dft_at(probe * window, grid.dt, f_grid))
    ipk = int(np.argmax(spec))
    if 0 < ipk < f_grid.size - 1:
        y0, y1, y2 = spec[ipk - 1], spec[ipk], spec[ipk + 1]
        denom = y0 - 2.0 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom else 0.0
        f_peak = f_grid[ipk] + shift * (f_grid[1] - f_grid[0])
    else:
        f_peak = f_grid[ipk]
    return CavityResult(float(f_peak), f_ref)
