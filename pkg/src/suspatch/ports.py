"""Lumped-port excitation and port voltage/current recording.

The port is a Thevenin source, an ideal voltage source in series with
``port_resistance``, driving one z-directed E edge (the source gap at the
ground end of the feed column).  The gap voltage is v = -Ez*dz and the
port current is the discrete Ampere circulation around the gap edge, so
the measured impedance includes the single-cell gap capacitance, which is
physically part of the structure.

Current samples land on H time points; the record aligns them to E time
points by two-point averaging, which matters for the phase of Z(f).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParameterError
from .grid import FieldState

_LN10 = math.log(10.0)


@dataclass(frozen=True)
class Waveform:
    """Gaussian-modulated cosine covering [f0 - f_span, f0 + f_span].

    tau = sqrt(ln 10) / (pi * f_span) puts the envelope spectrum at -20 dB
    of its peak at the band edges; t0 >= 4*tau keeps the turn-on below
    exp(-16) of the amplitude.
    """

    f0: float
    f_span: float
    amplitude: float = 1.0
    t0: float | None = None

    def __post_init__(self):
        if self.f0 <= 0.0 or self.f_span <= 0.0:
            raise InvalidParameterError("f0 and f_span must be positive")
        if self.t0 is None:
            object.__setattr__(self, "t0", 4.0 * self.tau)
        elif self.t0 < 4.0 * self.tau:
            raise InvalidParameterError("t0 must be >= 4*tau for a causal start")

    @property
    def tau(self) -> float:
        return math.sqrt(_LN10) / (math.pi * self.f_span)

    @property
    def end_time(self) -> float:
        """Time after which |s| <= exp(-16) * amplitude again."""
        return self.t0 + 4.0 * self.tau

    def sample(self, t):
        u = (np.asarray(t, dtype=np.float64) - self.t0) / self.tau
        s = self.amplitude * np.exp(-u * u) * np.cos(
            2.0 * math.pi * self.f0 * (np.asarray(t) - self.t0))
        return float(s) if s.ndim == 0 else s

    def covers(self, f: float) -> bool:
        return self.f0 - self.f_span <= f <= self.f0 + self.f_span


def waveform_sample(w: Waveform, t) -> float:
    """Source voltage s(t) = A * exp(-((t-t0)/tau)^2) * cos(2*pi*f0*(t-t0))."""
    if np.any(np.asarray(t) < 0.0):
        raise InvalidParameterError("t must be >= 0")
    return w.sample(t)


def gap_voltage(state: FieldState, index, dz: float) -> float:
    """Line integral of -E across the source gap (one z edge)."""
    i, j, k = index
    return -state.Ez[i, j, k] * dz


def loop_current(state: FieldState, index, dx: float, dy: float) -> float:
    """Discrete Ampere circulation around the gap edge (+z current)."""
    i, j, k = index
    return ((state.Hy[i, j, k] - state.Hy[i - 1, j, k]) * dy
            - (state.Hx[i, j, k] - state.Hx[i, j - 1, k]) * dx)


def record_port(state: FieldState, model) -> tuple[float, float]:
    """Instantaneous (v, i) samples at the model's port edge."""
    g = model.grid
    return (gap_voltage(state, model.port_index, g.dz),
            loop_current(state, model.port_index, g.dx, g.dy))


def apply_port(state: FieldState, model, waveform, t: float,
               e_before: float, i_loop: float,
               resistance: float | None = None) -> FieldState:
    """Rewrite the port edge with the Thevenin source-resistor update.

    Folds the resistor current into the lossy edge update semi-implicitly:

        Ez+ = ((1 - a - b)*Ez- + (dt/eps)*(curlH - Vs/(Rs*A))) / (1 + a + b)

    with a = sigma*dt/(2*eps), b = dt*dz/(2*Rs*eps*A) and A = dx*dy.  The
    discrete curl at the edge is i_loop/A; ``e_before`` and ``i_loop`` are
    the edge value and Ampere circulation taken just before the generic E
    update (H is already at the half step then).  Leaves every other edge
    untouched.
    """
    if resistance is None:
        resistance = model.port_resistance
    if resistance <= 0.0:
        raise InvalidParameterError("port resistance must be positive")
    g = model.grid
    i, j, k = model.port_index
    area = g.dx * g.dy
    eps = model.materials.eps_edge_z[i, j, k]
    ca = model.materials.ca_z[i, j, k]
    a = (1.0 - ca) / (1.0 + ca)
    beta = g.dt * g.dz / (2.0 * resistance * eps * area)
    vs = float(waveform(t)) if callable(waveform) else float(waveform.sample(t))
    curl = i_loop / area
    num = (1.0 - a - beta) * e_before + (g.dt / eps) * (
        curl - vs / (resistance * area))
    state.Ez[i, j, k] = num / (1.0 + a + beta)
    return state


class LumpedPort:
    """Solver hook driving and recording the port edge.

    Captures the pre-update edge value and Ampere circulation, lets the
    generic E update run, then rewrites the single port edge through
    :func:`apply_port` with the source sampled at the half step.
    """

    def __init__(self, model, source, resistance: float | None = None):
        if resistance is None:
            resistance = model.port_resistance
        if resistance <= 0.0:
            raise InvalidParameterError("port resistance must be positive")
        self.model = model
        self.source = source
        self.resistance = float(resistance)
        self._idx = tuple(model.port_index)
        self._dz = model.grid.dz
        self._e_before = 0.0
        self.v: list[float] = []
        self.i_raw: list[float] = []
        self.source_samples: list[float] = []

    def before_e(self, state: FieldState):
        self._e_before = state.Ez[self._idx]
        self.i_raw.append(loop_current(state, self._idx,
                                       self.model.grid.dx, self.model.grid.dy))

    def after_e(self, state: FieldState, t_mid: float):
        vs = float(self.source(t_mid))
        apply_port(state, self.model, lambda _t: vs, t_mid,
                   self._e_before, self.i_raw[-1], self.resistance)
        self.v.append(gap_voltage(state, self._idx, self._dz))
        self.source_samples.append(vs)

    def flux(self) -> float:
        """|v*i| of the newest sample pair, for termination tracking."""
        if not self.v:
            return 0.0
        return abs(self.v[-1] * self.i_raw[-1])


@dataclass
class PortRecord:
    """Aligned port time series; row m holds values at t = (m+1)*dt."""

    dt: float
    v: np.ndarray
    i: np.ndarray
    source: np.ndarray
    port_resistance: float
    f0: float = 0.0
    f_span: float = 0.0

    CSV_HEADER = "t,v,i,source"

    def __post_init__(self):
        if not (len(self.v) == len(self.i) == len(self.source)):
            raise InvalidParameterError("v, i and source must have equal length")
        for name in ("v", "i", "source"):
            if not np.isfinite(getattr(self, name)).all():
                raise InvalidParameterError(f"non-finite value in port record {name}")

    @classmethod
    def from_port(cls, port: LumpedPort, waveform: Waveform | None = None) -> "PortRecord":
        """Assemble the record, aligning H-time current to E time points.

        i[m] = (i_raw at (m+1/2)dt + i_raw at (m+3/2)dt) / 2; the final
        point reuses the last raw sample, negligible once the run has
        decayed to termination.
        """
        raw = np.asarray(port.i_raw, dtype=np.float64)
        v = np.asarray(port.v, dtype=np.float64)
        src = np.asarray(port.source_samples, dtype=np.float64)
        n = v.size
        i_al = np.empty(n)
        if n > 1:
            i_al[:-1] = 0.5 * (raw[:-1] + raw[1:])
        if n:
            i_al[-1] = raw[-1]
        kwargs = {}
        if waveform is not None:
            kwargs = {"f0": waveform.f0, "f_span": waveform.f_span}
        return cls(port.model.grid.dt, v, i_al, src,
                   port.resistance, **kwargs)

    @property
    def t(self) -> np.ndarray:
        return (np.arange(len(self.v)) + 1.0) * self.dt

    def write_csv(self, path):
        from .textio import write_csv
        write_csv(path, self.CSV_HEADER.split(","),
                  np.column_stack([self.t, self.v, self.i, self.source]))

    @classmethod
    def read_csv(cls, path, port_resistance: float = 50.0) -> "PortRecord":
        from .textio import read_csv
        cols = read_csv(path, cls.CSV_HEADER.split(","))
        t, v, i, source = (cols[name] for name in ("t", "v", "i", "source"))
        if len(t) < 2:
            raise InvalidParameterError("port record needs at least 2 rows")
        return cls(float(t[0]), v, i, source, port_resistance)
