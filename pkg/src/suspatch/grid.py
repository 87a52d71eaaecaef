"""Yee-lattice containers and closed-form helpers for the FDTD core.

Index and staggering convention (canonical for the whole package)
-----------------------------------------------------------------
A grid holds ``nx * ny * nz`` cells of size ``dx * dy * dz``.  Node
``(i, j, k)`` sits at ``(i*dx, j*dy, k*dz)``.  Electric-field samples live
on cell edges, magnetic-field samples on cell faces:

    Ex[i, j, k] at ((i+1/2)*dx,  j*dy,       k*dz)        shape (nx,   ny+1, nz+1)
    Ey[i, j, k] at (i*dx,       (j+1/2)*dy,  k*dz)        shape (nx+1, ny,   nz+1)
    Ez[i, j, k] at (i*dx,        j*dy,      (k+1/2)*dz)   shape (nx+1, ny+1, nz)
    Hx[i, j, k] at (i*dx,       (j+1/2)*dy, (k+1/2)*dz)   shape (nx+1, ny,   nz)
    Hy[i, j, k] at ((i+1/2)*dx,  j*dy,      (k+1/2)*dz)   shape (nx,   ny+1, nz)
    Hz[i, j, k] at ((i+1/2)*dx, (j+1/2)*dy,  k*dz)        shape (nx,   ny,   nz+1)

E is sampled at integer time steps ``n*dt`` and H at half steps
``(n+1/2)*dt``.  One solver step advances H first, then E.  Outer grid
faces are closed with PEC by default; faces may instead be declared PMC
(mirror symmetry) or CPML-absorbing, in which case the absorbing layer is
still backed by the outer PEC wall.  All other modules refer to this
convention rather than restating it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import c0, eps0, mu0
from .exceptions import InvalidParameterError

FACE_KEYS = ("x_lo", "x_hi", "y_lo", "y_hi", "z_lo", "z_hi")
FACE_BCS = ("pec", "pmc", "cpml")


def courant_timestep(dx: float, dy: float, dz: float, cfl_factor: float = 1.0) -> float:
    """Largest stable time step scaled by ``cfl_factor``.

    Returns ``cfl_factor / (c0 * sqrt(1/dx^2 + 1/dy^2 + 1/dz^2))``.
    """
    if dx <= 0.0 or dy <= 0.0 or dz <= 0.0:
        raise InvalidParameterError("cell sizes must be positive")
    if not 0.0 < cfl_factor <= 1.0:
        raise InvalidParameterError(f"cfl_factor must be in (0, 1], got {cfl_factor}")
    return cfl_factor / (c0 * math.sqrt(1.0 / dx**2 + 1.0 / dy**2 + 1.0 / dz**2))


def material_coefficients(eps_r, sigma, dt):
    """Lossy-dielectric update coefficients (Ca, Cb) for an E edge.

    Ca = (1 - s) / (1 + s) and Cb = (dt / (eps0*eps_r)) / (1 + s) with
    s = sigma*dt / (2*eps0*eps_r).  Cb multiplies the discrete curl of H,
    which already carries the 1/dx factors.  Accepts scalars or arrays.
    """
    eps_r = np.asarray(eps_r, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    if np.any(eps_r < 1.0):
        raise InvalidParameterError("relative permittivity must be >= 1")
    if np.any(sigma < 0.0):
        raise InvalidParameterError("conductivity must be >= 0")
    if dt <= 0.0:
        raise InvalidParameterError("dt must be positive")
    eps = eps0 * eps_r
    s = sigma * dt / (2.0 * eps)
    ca = (1.0 - s) / (1.0 + s)
    cb = (dt / eps) / (1.0 + s)
    if ca.ndim == 0:
        return float(ca), float(cb)
    return ca, cb


@dataclass(frozen=True)
class GridSpec:
    """Geometry, time step and boundary layout of a Yee grid."""

    nx: int
    ny: int
    nz: int
    dx: float
    dy: float
    dz: float
    dt: float
    pml_thickness: int = 10
    cfl_factor: float = 0.95
    face_bc: tuple[str, str, str, str, str, str] = None  # keyed per FACE_KEYS

    def __post_init__(self):
        if self.face_bc is None:
            bc = "cpml" if self.pml_thickness > 0 else "pec"
            object.__setattr__(self, "face_bc", (bc,) * 6)
        if len(self.face_bc) != 6 or any(b not in FACE_BCS for b in self.face_bc):
            raise InvalidParameterError(f"face_bc must be six of {FACE_BCS}")
        if self.pml_thickness < 0:
            raise InvalidParameterError("pml_thickness must be >= 0")
        if any(b == "cpml" for b in self.face_bc) and self.pml_thickness < 1:
            raise InvalidParameterError("cpml faces require pml_thickness >= 1")
        for axis, n in enumerate((self.nx, self.ny, self.nz)):
            lo, hi = self.face_bc[2 * axis], self.face_bc[2 * axis + 1]
            layers = (lo == "cpml") + (hi == "cpml")
            if n < layers * self.pml_thickness + 4:
                raise InvalidParameterError(
                    f"axis {axis}: {n} cells leave no interior beside "
                    f"{layers} CPML layer(s) of {self.pml_thickness} cells"
                )
        if not 0.0 < self.cfl_factor <= 1.0:
            raise InvalidParameterError("cfl_factor must be in (0, 1]")
        dt_max = courant_timestep(self.dx, self.dy, self.dz, self.cfl_factor)
        # Tiny headroom so a dt computed from the same formula round-trips.
        if self.dt > dt_max * (1.0 + 1e-12):
            raise InvalidParameterError(
                f"dt={self.dt} exceeds the Courant bound {dt_max} "
                f"(cfl_factor={self.cfl_factor})"
            )
        if self.dt <= 0.0:
            raise InvalidParameterError("dt must be positive")

    @classmethod
    def make(cls, nx, ny, nz, dx, dy, dz, *, cfl_factor=0.95, pml_thickness=10,
             face_bc=None) -> "GridSpec":
        """Build a spec with dt at the scaled Courant limit."""
        dt = courant_timestep(dx, dy, dz, cfl_factor)
        return cls(nx, ny, nz, dx, dy, dz, dt, pml_thickness, cfl_factor, face_bc)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    def component_shape(self, name: str) -> tuple[int, int, int]:
        nx, ny, nz = self.nx, self.ny, self.nz
        return {
            "Ex": (nx, ny + 1, nz + 1),
            "Ey": (nx + 1, ny, nz + 1),
            "Ez": (nx + 1, ny + 1, nz),
            "Hx": (nx + 1, ny, nz),
            "Hy": (nx, ny + 1, nz),
            "Hz": (nx, ny, nz + 1),
        }[name]

    def cell_volume(self) -> float:
        return self.dx * self.dy * self.dz


def _edge_average(cells: np.ndarray, axes: tuple[int, int]) -> np.ndarray:
    """Average a per-cell array onto edges whose transverse axes are given.

    The result gains one sample along each transverse axis; boundary edges
    average the available (replicated) cells.
    """
    pad = [(0, 0)] * 3
    for ax in axes:
        pad[ax] = (1, 1)
    p = np.pad(cells, pad, mode="edge")
    a, b = axes
    sl = [slice(None)] * 3

    def take(off_a, off_b):
        s = list(sl)
        s[a] = slice(off_a, p.shape[a] - 1 + off_a)
        s[b] = slice(off_b, p.shape[b] - 1 + off_b)
        return p[tuple(s)]

    return 0.25 * (take(0, 0) + take(1, 0) + take(0, 1) + take(1, 1))


@dataclass
class MaterialMap:
    """Per-cell material data plus precomputed per-edge update coefficients.

    ``pec_x/y/z`` mark E edges forced to exactly zero after every update.
    ``eps_edge_*`` are the edge-averaged absolute permittivities used by the
    energy accounting and the lumped port.
    """

    eps_r: np.ndarray
    sigma: np.ndarray
    pec_x: np.ndarray
    pec_y: np.ndarray
    pec_z: np.ndarray
    ca_x: np.ndarray
    cb_x: np.ndarray
    ca_y: np.ndarray
    cb_y: np.ndarray
    ca_z: np.ndarray
    cb_z: np.ndarray
    eps_edge_x: np.ndarray
    eps_edge_y: np.ndarray
    eps_edge_z: np.ndarray

    @classmethod
    def build(cls, grid: GridSpec, eps_r=None, sigma=None,
              pec_x=None, pec_y=None, pec_z=None) -> "MaterialMap":
        shape = grid.shape
        eps_r = np.ones(shape) if eps_r is None else np.asarray(eps_r, dtype=np.float64)
        sigma = np.zeros(shape) if sigma is None else np.asarray(sigma, dtype=np.float64)
        if eps_r.shape != shape or sigma.shape != shape:
            raise InvalidParameterError("material arrays must be per-cell (nx, ny, nz)")
        if np.any(eps_r < 1.0) or np.any(sigma < 0.0):
            raise InvalidParameterError("need eps_r >= 1 and sigma >= 0 everywhere")

        def mask(m, name):
            if m is None:
                return np.zeros(grid.component_shape(name), dtype=bool)
            m = np.asarray(m, dtype=bool)
            if m.shape != grid.component_shape(name):
                raise InvalidParameterError(f"PEC mask shape mismatch for {name}")
            return m

        # Transverse axes per E component: Ex -> (y, z), Ey -> (x, z), Ez -> (x, y).
        coeffs = {}
        for comp, axes in (("x", (1, 2)), ("y", (0, 2)), ("z", (0, 1))):
            er = _edge_average(eps_r, axes)
            sg = _edge_average(sigma, axes)
            ca, cb = material_coefficients(er, sg, grid.dt)
            coeffs[comp] = (eps0 * er, ca, cb)
        return cls(
            eps_r=eps_r, sigma=sigma,
            pec_x=mask(pec_x, "Ex"), pec_y=mask(pec_y, "Ey"), pec_z=mask(pec_z, "Ez"),
            ca_x=coeffs["x"][1], cb_x=coeffs["x"][2],
            ca_y=coeffs["y"][1], cb_y=coeffs["y"][2],
            ca_z=coeffs["z"][1], cb_z=coeffs["z"][2],
            eps_edge_x=coeffs["x"][0], eps_edge_y=coeffs["y"][0],
            eps_edge_z=coeffs["z"][0],
        )

    @classmethod
    def vacuum(cls, grid: GridSpec) -> "MaterialMap":
        return cls.build(grid)


@dataclass
class CpmlFaceState:
    """Auxiliary convolution accumulators for one absorbing face.

    ``psi_e1/psi_e2`` correct the two E components with a derivative along
    the face normal; ``psi_h1/psi_h2`` the corresponding H components.
    """

    psi_e1: np.ndarray
    psi_e2: np.ndarray
    psi_h1: np.ndarray
    psi_h2: np.ndarray


def _cpml_state_shapes(grid: GridSpec, face: str):
    nx, ny, nz = grid.nx, grid.ny, grid.nz
    s_e = grid.pml_thickness - 1
    s_h = grid.pml_thickness
    axis = {"x": 0, "y": 1, "z": 2}[face[0]]
    if axis == 0:
        # psi for Ey, Ez, Hy, Hz (normal-x derivatives), full transverse range
        return (s_e, ny, nz + 1), (s_e, ny + 1, nz), (s_h, ny + 1, nz), (s_h, ny, nz + 1)
    if axis == 1:
        # psi for Ex, Ez, Hx, Hz
        return (nx, s_e, nz + 1), (nx + 1, s_e, nz), (nx + 1, s_h, nz), (nx, s_h, nz + 1)
    # psi for Ex, Ey, Hx, Hy
    return (nx, ny + 1, s_e), (nx + 1, ny, s_e), (nx + 1, ny, s_h), (nx, ny + 1, s_h)


@dataclass
class FieldState:
    """Mutable solver state: the six field arrays plus CPML accumulators."""

    Ex: np.ndarray
    Ey: np.ndarray
    Ez: np.ndarray
    Hx: np.ndarray
    Hy: np.ndarray
    Hz: np.ndarray
    time_index: int = 0
    cpml: dict = field(default_factory=dict)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "FieldState":
        comps = {n: np.zeros(grid.component_shape(n)) for n in
                 ("Ex", "Ey", "Ez", "Hx", "Hy", "Hz")}
        cpml = {}
        for face, bc in zip(FACE_KEYS, grid.face_bc):
            if bc != "cpml":
                continue
            sh = _cpml_state_shapes(grid, face)
            cpml[face] = CpmlFaceState(*(np.zeros(s) for s in sh))
        return cls(**comps, cpml=cpml)

    def components(self):
        return (("Ex", self.Ex), ("Ey", self.Ey), ("Ez", self.Ez),
                ("Hx", self.Hx), ("Hy", self.Hy), ("Hz", self.Hz))

    def copy(self) -> "FieldState":
        return FieldState(
            self.Ex.copy(), self.Ey.copy(), self.Ez.copy(),
            self.Hx.copy(), self.Hy.copy(), self.Hz.copy(),
            self.time_index,
            {k: CpmlFaceState(v.psi_e1.copy(), v.psi_e2.copy(),
                              v.psi_h1.copy(), v.psi_h2.copy())
             for k, v in self.cpml.items()},
        )


@dataclass(frozen=True)
class EnergyReport:
    """Instantaneous field energy, 0.5 * sum(eps*|E|^2 + mu0*|H|^2) * dV."""

    time_index: int
    electric_j: float
    magnetic_j: float

    @property
    def total_j(self) -> float:
        return self.electric_j + self.magnetic_j


def _trapezoid_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = 0.5
    w[-1] = 0.5
    return w


def field_energy(state: FieldState, materials: MaterialMap, grid: GridSpec) -> EnergyReport:
    """Energy snapshot with trapezoidal weights along integer-index axes.

    Samples on outer walls carry half weight so a uniform field integrates
    to exactly the grid volume.
    """
    dv = grid.cell_volume()
    wx = _trapezoid_weights(grid.nx + 1)
    wy = _trapezoid_weights(grid.ny + 1)
    wz = _trapezoid_weights(grid.nz + 1)

    def weighted(arr, int_axes):
        out = arr
        for ax, w in int_axes:
            shape = [1, 1, 1]
            shape[ax] = -1
            out = out * w.reshape(shape)
        return float(np.sum(out))

    e = 0.0
    e += weighted(materials.eps_edge_x * state.Ex**2, ((1, wy), (2, wz)))
    e += weighted(materials.eps_edge_y * state.Ey**2, ((0, wx), (2, wz)))
    e += weighted(materials.eps_edge_z * state.Ez**2, ((0, wx), (1, wy)))
    m = 0.0
    m += weighted(mu0 * state.Hx**2, ((0, wx),))
    m += weighted(mu0 * state.Hy**2, ((1, wy),))
    m += weighted(mu0 * state.Hz**2, ((2, wz),))
    return EnergyReport(state.time_index, 0.5 * e * dv, 0.5 * m * dv)
