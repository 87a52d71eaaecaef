"""Leapfrog time stepping with CPML faces, PMC mirrors and PEC masks.

A step advances H by half a step, applies CPML corrections to H, advances
interior E, updates PMC wall-tangential E with mirrored H, applies CPML
corrections to E, re-pins wall-tangential E on PEC-backed faces, zeroes
masked PEC edges, then runs any source hooks.  Hooks may implement
``before_e(state)`` (fires just before the E update) and
``after_e(state, t_mid)`` with ``t_mid = (n + 1/2) * dt``.

All kernels are single threaded and the face order is fixed, so identical
inputs yield bit-identical trajectories on either backend.
"""

from __future__ import annotations

import numpy as np

from . import backends
from .constants import mu0
from .cpml import CpmlGrading, build_face_plans, stretched_inverse_deltas
from .exceptions import InstabilityError
from .grid import FACE_KEYS, FieldState, GridSpec, MaterialMap, field_energy


class Simulation:
    """Owns one FieldState and advances it deterministically."""

    def __init__(self, grid: GridSpec, materials: MaterialMap, *,
                 grading: CpmlGrading | None = None,
                 nan_check_interval: int = 100,
                 backend: str | None = None):
        self.grid = grid
        self.materials = materials
        self.grading = grading or CpmlGrading()
        self.nan_check_interval = int(nan_check_interval)
        self.kernels = backends.get_backend(backend)
        self.state = FieldState.zeros(grid)
        self.dt_mu = grid.dt / mu0

        self.face_plans = build_face_plans(grid, self.grading)
        (self.rdx_e, self.rdy_e, self.rdz_e,
         self.rdx_h, self.rdy_h, self.rdz_h) = stretched_inverse_deltas(grid, self.face_plans)

        m = materials
        self._pec_idx = tuple(np.nonzero(mask) for mask in (m.pec_x, m.pec_y, m.pec_z))
        self._pmc_faces = [f for f, bc in zip(FACE_KEYS, grid.face_bc) if bc == "pmc"]
        self._pinned_faces = [f for f, bc in zip(FACE_KEYS, grid.face_bc) if bc != "pmc"]

    # -- one leapfrog cycle -------------------------------------------------

    def step(self, hooks=()) -> FieldState:
        st, k = self.state, self.kernels
        n = st.time_index
        t_mid = (n + 0.5) * self.grid.dt

        k.update_h(st.Ex, st.Ey, st.Ez, st.Hx, st.Hy, st.Hz, self.dt_mu,
                   self.rdx_h, self.rdy_h, self.rdz_h)
        for p in self.face_plans:
            self._cpml_h(p)

        for h in hooks:
            before = getattr(h, "before_e", None)
            if before is not None:
                before(st)

        m = self.materials
        k.update_e(st.Ex, st.Ey, st.Ez, st.Hx, st.Hy, st.Hz,
                   m.ca_x, m.cb_x, m.ca_y, m.cb_y, m.ca_z, m.cb_z,
                   self.rdx_e, self.rdy_e, self.rdz_e)
        self._update_pmc_walls()
        for p in self.face_plans:
            self._cpml_e(p)
        self._pin_pec_walls()
        self._zero_pec_edges()

        for h in hooks:
            after = getattr(h, "after_e", None)
            if after is not None:
                after(st, t_mid)

        st.time_index = n + 1
        if self.nan_check_interval > 0 and st.time_index % self.nan_check_interval == 0:
            self.assert_finite()
        return st

    def run(self, n_steps: int, hooks=()) -> FieldState:
        for _ in range(n_steps):
            self.step(hooks)
        return self.state

    def energy(self):
        return field_energy(self.state, self.materials, self.grid)

    def assert_finite(self):
        for name, arr in self.state.components():
            if not np.isfinite(arr).all():
                bad = np.argwhere(~np.isfinite(arr))[0]
                raise InstabilityError(name, bad, self.state.time_index)

    # -- boundary pieces ----------------------------------------------------

    def _cpml_h(self, p):
        st, k, f = self.state, self.kernels, self.state.cpml[p.face]
        inv_d = (1.0 / self.grid.dx, 1.0 / self.grid.dy, 1.0 / self.grid.dz)[p.axis]
        if p.axis == 0:
            k.cpml_h_x(st.Ey, st.Ez, st.Hy, st.Hz, self.dt_mu,
                       f.psi_h1, f.psi_h2, p.bh, p.ch, p.offset_h, inv_d)
        elif p.axis == 1:
            k.cpml_h_y(st.Ex, st.Ez, st.Hx, st.Hz, self.dt_mu,
                       f.psi_h1, f.psi_h2, p.bh, p.ch, p.offset_h, inv_d)
        else:
            k.cpml_h_z(st.Ex, st.Ey, st.Hx, st.Hy, self.dt_mu,
                       f.psi_h1, f.psi_h2, p.bh, p.ch, p.offset_h, inv_d)

    def _cpml_e(self, p):
        st, k, m, f = self.state, self.kernels, self.materials, self.state.cpml[p.face]
        inv_d = (1.0 / self.grid.dx, 1.0 / self.grid.dy, 1.0 / self.grid.dz)[p.axis]
        if p.axis == 0:
            k.cpml_e_x(st.Ey, st.Ez, st.Hy, st.Hz, m.cb_y, m.cb_z,
                       f.psi_e1, f.psi_e2, p.be, p.ce, p.offset_e, inv_d)
        elif p.axis == 1:
            k.cpml_e_y(st.Ex, st.Ez, st.Hx, st.Hz, m.cb_x, m.cb_z,
                       f.psi_e1, f.psi_e2, p.be, p.ce, p.offset_e, inv_d)
        else:
            k.cpml_e_z(st.Ex, st.Ey, st.Hx, st.Hy, m.cb_x, m.cb_y,
                       f.psi_e1, f.psi_e2, p.be, p.ce, p.offset_e, inv_d)

    def _update_pmc_walls(self):
        """Advance wall-tangential E on PMC faces using mirrored H.

        Tangential H is odd about a magnetic wall, so the normal derivative
        of the in-plane H component at the wall becomes +-2*H/delta.
        """
        st, m = self.state, self.materials
        nx, ny, nz = self.grid.nx, self.grid.ny, self.grid.nz
        for face in self._pmc_faces:
            if face == "x_lo" or face == "x_hi":
                i = 0 if face == "x_lo" else nx
                ih = 0 if face == "x_lo" else nx - 1
                sgn = 2.0 if face == "x_lo" else -2.0
                st.Ey[i, :, 1:-1] = m.ca_y[i, :, 1:-1] * st.Ey[i, :, 1:-1] + m.cb_y[i, :, 1:-1] * (
                    (st.Hx[i, :, 1:] - st.Hx[i, :, :-1]) * self.rdz_e[None, 1:-1]
                    - sgn * st.Hz[ih, :, 1:-1] * self.rdx_e[i]
                )
                st.Ez[i, 1:-1, :] = m.ca_z[i, 1:-1, :] * st.Ez[i, 1:-1, :] + m.cb_z[i, 1:-1, :] * (
                    sgn * st.Hy[ih, 1:-1, :] * self.rdx_e[i]
                    - (st.Hx[i, 1:, :] - st.Hx[i, :-1, :]) * self.rdy_e[1:-1, None]
                )
            elif face == "y_lo" or face == "y_hi":
                j = 0 if face == "y_lo" else ny
                jh = 0 if face == "y_lo" else ny - 1
                sgn = 2.0 if face == "y_lo" else -2.0
                st.Ex[:, j, 1:-1] = m.ca_x[:, j, 1:-1] * st.Ex[:, j, 1:-1] + m.cb_x[:, j, 1:-1] * (
                    sgn * st.Hz[:, jh, 1:-1] * self.rdy_e[j]
                    - (st.Hy[:, j, 1:] - st.Hy[:, j, :-1]) * self.rdz_e[None, 1:-1]
                )
                st.Ez[1:-1, j, :] = m.ca_z[1:-1, j, :] * st.Ez[1:-1, j, :] + m.cb_z[1:-1, j, :] * (
                    (st.Hy[1:, j, :] - st.Hy[:-1, j, :]) * self.rdx_e[1:-1, None]
                    - sgn * st.Hx[1:-1, jh, :] * self.rdy_e[j]
                )
            else:
                kk = 0 if face == "z_lo" else nz
                kh = 0 if face == "z_lo" else nz - 1
                sgn = 2.0 if face == "z_lo" else -2.0
                st.Ex[:, 1:-1, kk] = m.ca_x[:, 1:-1, kk] * st.Ex[:, 1:-1, kk] + m.cb_x[:, 1:-1, kk] * (
                    (st.Hz[:, 1:, kk] - st.Hz[:, :-1, kk]) * self.rdy_e[None, 1:-1]
                    - sgn * st.Hy[:, 1:-1, kh] * self.rdz_e[kk]
                )
                st.Ey[1:-1, :, kk] = m.ca_y[1:-1, :, kk] * st.Ey[1:-1, :, kk] + m.cb_y[1:-1, :, kk] * (
                    sgn * st.Hx[1:-1, :, kh] * self.rdz_e[kk]
                    - (st.Hz[1:, :, kk] - st.Hz[:-1, :, kk]) * self.rdx_e[1:-1, None]
                )

    def _pin_pec_walls(self):
        """Zero wall-tangential E on every non-PMC face.

        CPML corrections sweep full transverse ranges for simplicity, so
        the PEC backing is re-asserted explicitly each step.
        """
        st = self.state
        nx, ny, nz = self.grid.nx, self.grid.ny, self.grid.nz
        for face in self._pinned_faces:
            if face == "x_lo":
                st.Ey[0, :, :] = 0.0
                st.Ez[0, :, :] = 0.0
            elif face == "x_hi":
                st.Ey[nx, :, :] = 0.0
                st.Ez[nx, :, :] = 0.0
            elif face == "y_lo":
                st.Ex[:, 0, :] = 0.0
                st.Ez[:, 0, :] = 0.0
            elif face == "y_hi":
                st.Ex[:, ny, :] = 0.0
                st.Ez[:, ny, :] = 0.0
            elif face == "z_lo":
                st.Ex[:, :, 0] = 0.0
                st.Ey[:, :, 0] = 0.0
            else:
                st.Ex[:, :, nz] = 0.0
                st.Ey[:, :, nz] = 0.0

    def _zero_pec_edges(self):
        st = self.state
        for arr, idx in zip((st.Ex, st.Ey, st.Ez), self._pec_idx):
            if idx[0].size:
                arr[idx] = 0.0
