import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suspatch.constants import eps0
from suspatch.exceptions import InvalidParameterError
from suspatch.grid import (FieldState, GridSpec, MaterialMap,
                           courant_timestep, field_energy,
                           material_coefficients)


class TestCourantTimestep:
    def test_cubic_cell(self):
        # closed form delta / (c * sqrt(3)), evaluated independently
        assert courant_timestep(1e-3, 1e-3, 1e-3, 1.0) == pytest.approx(
            1.9258332015464706e-12, rel=1e-12)

    def test_linear_in_cfl(self):
        assert courant_timestep(1e-3, 1e-3, 1e-3, 0.5) == pytest.approx(
            9.629166007732353e-13, rel=1e-12)

    def test_anisotropic_cell(self):
        # independent evaluation of cfl / (c*sqrt(1/dx^2 + 1/dy^2 + 1/dz^2))
        assert courant_timestep(0.5e-3, 1e-3, 2e-3, 1.0) == pytest.approx(
            1.4557930622523692e-12, rel=1e-12)

    @pytest.mark.parametrize("cfl", [0.0, -0.3, 1.5])
    def test_bad_cfl_rejected(self, cfl):
        with pytest.raises(InvalidParameterError):
            courant_timestep(1e-3, 1e-3, 1e-3, cfl)

    def test_bad_spacing_rejected(self):
        with pytest.raises(InvalidParameterError):
            courant_timestep(0.0, 1e-3, 1e-3, 1.0)


class TestMaterialCoefficients:
    def test_vacuum(self):
        ca, cb = material_coefficients(1.0, 0.0, 1e-12)
        assert ca == 1.0
        assert cb == pytest.approx(1e-12 / eps0, rel=1e-14)

    def test_fr4_effective_conductivity_scale(self):
        # sigma = 2*pi*f*eps0*eps_r*tan_delta at 2.45 GHz, eps_r 4.4, tand 0.02
        sigma = 2 * math.pi * 2.45e9 * eps0 * 4.4 * 0.02
        assert sigma == pytest.approx(0.011994367604258005, rel=1e-12)
        ca, cb = material_coefficients(4.4, sigma, 1e-12)
        assert 0.0 < ca < 1.0
        assert cb > 0.0

    def test_reflective_limit(self):
        # cb -> 2/sigma, vanishing against the vacuum value dt/eps0
        ca, cb = material_coefficients(1.0, 1e9, 1e-12)
        assert ca == pytest.approx(-1.0, abs=1e-3)
        assert cb == pytest.approx(2.0 / 1e9, rel=1e-6)

    def test_preconditions(self):
        with pytest.raises(InvalidParameterError):
            material_coefficients(0.5, 0.0, 1e-12)
        with pytest.raises(InvalidParameterError):
            material_coefficients(1.0, -1.0, 1e-12)
        with pytest.raises(InvalidParameterError):
            material_coefficients(1.0, 0.0, 0.0)


class TestGridSpec:
    def test_make_uses_courant_dt(self):
        g = GridSpec.make(30, 30, 30, 1e-3, 1e-3, 1e-3, cfl_factor=0.9,
                          pml_thickness=10)
        assert g.dt == pytest.approx(
            courant_timestep(1e-3, 1e-3, 1e-3, 0.9), rel=1e-15)

    def test_oversized_dt_rejected(self):
        dt_max = courant_timestep(1e-3, 1e-3, 1e-3, 1.0)
        with pytest.raises(InvalidParameterError):
            GridSpec(30, 30, 30, 1e-3, 1e-3, 1e-3, dt_max * 1.01,
                     pml_thickness=10, cfl_factor=1.0)

    def test_interior_must_exist(self):
        with pytest.raises(InvalidParameterError):
            GridSpec.make(23, 30, 30, 1e-3, 1e-3, 1e-3, pml_thickness=10)

    def test_component_shapes_follow_staggering(self):
        g = GridSpec.make(6, 7, 8, 1e-3, 1e-3, 1e-3, pml_thickness=0)
        assert g.component_shape("Ex") == (6, 8, 9)
        assert g.component_shape("Hz") == (6, 7, 9)

    @given(dx=st.floats(1e-4, 1e-2), dy=st.floats(1e-4, 1e-2),
           dz=st.floats(1e-4, 1e-2), cfl=st.floats(0.05, 1.0),
           excess=st.floats(1.001, 10.0))
    @settings(max_examples=60, deadline=None)
    def test_courant_violations_always_rejected(self, dx, dy, dz, cfl, excess):
        dt_max = courant_timestep(dx, dy, dz, cfl)
        with pytest.raises(InvalidParameterError):
            GridSpec(8, 8, 8, dx, dy, dz, dt_max * excess, pml_thickness=0,
                     cfl_factor=cfl)

    @given(dx=st.floats(1e-4, 1e-2), dy=st.floats(1e-4, 1e-2),
           dz=st.floats(1e-4, 1e-2), cfl=st.floats(0.05, 1.0))
    @settings(max_examples=60, deadline=None)
    def test_courant_built_dt_accepted(self, dx, dy, dz, cfl):
        g = GridSpec.make(8, 8, 8, dx, dy, dz, cfl_factor=cfl, pml_thickness=0)
        assert g.dt > 0.0


class TestFieldEnergy:
    @pytest.fixture()
    def grid(self):
        return GridSpec.make(10, 12, 14, 1e-3, 1e-3, 1e-3, pml_thickness=0)

    def test_zero_fields(self, grid):
        state = FieldState.zeros(grid)
        rep = field_energy(state, MaterialMap.vacuum(grid), grid)
        assert rep.electric_j == 0.0
        assert rep.magnetic_j == 0.0
        assert rep.total_j == 0.0

    def test_uniform_ex_closed_form(self, grid):
        # uniform 1 V/m Ex over volume V gives 0.5*eps0*V exactly with the
        # trapezoidal wall weighting
        state = FieldState.zeros(grid)
        state.Ex[:] = 1.0
        rep = field_energy(state, MaterialMap.vacuum(grid), grid)
        vol = grid.nx * grid.ny * grid.nz * grid.cell_volume()
        assert rep.electric_j == pytest.approx(0.5 * eps0 * vol, rel=1e-12)
        assert rep.magnetic_j == 0.0

    def test_total_is_sum(self, grid):
        state = FieldState.zeros(grid)
        rng = np.random.default_rng(3)
        state.Ey[:] = rng.standard_normal(state.Ey.shape)
        state.Hz[:] = rng.standard_normal(state.Hz.shape)
        rep = field_energy(state, MaterialMap.vacuum(grid), grid)
        assert rep.total_j == rep.electric_j + rep.magnetic_j
        assert rep.electric_j > 0.0 and rep.magnetic_j > 0.0


class TestMaterialMap:
    def test_edge_average_uniform(self):
        g = GridSpec.make(6, 6, 6, 1e-3, 1e-3, 1e-3, pml_thickness=0)
        m = MaterialMap.build(g, np.full(g.shape, 4.4))
        assert np.allclose(m.eps_edge_x, 4.4 * eps0)

    def test_pec_mask_shape_checked(self):
        g = GridSpec.make(6, 6, 6, 1e-3, 1e-3, 1e-3, pml_thickness=0)
        with pytest.raises(InvalidParameterError):
            MaterialMap.build(g, pec_x=np.zeros((3, 3, 3), dtype=bool))

    def test_invalid_materials_rejected(self):
        g = GridSpec.make(6, 6, 6, 1e-3, 1e-3, 1e-3, pml_thickness=0)
        bad = np.ones(g.shape)
        bad[0, 0, 0] = 0.2
        with pytest.raises(InvalidParameterError):
            MaterialMap.build(g, eps_r=bad)
