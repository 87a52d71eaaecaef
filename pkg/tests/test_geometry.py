from dataclasses import replace

import numpy as np
import pytest

from suspatch.exceptions import GeometryError, InvalidParameterError
from suspatch.geometry import (AntennaSpec, PinSpec, StripSpec,
                               build_default_antenna, sweep_parameter,
                               voxelize)


class TestDefaultAntenna:
    def test_wavelength(self):
        spec = build_default_antenna(2.45e9)
        assert spec.wavelength == pytest.approx(0.12236426857142857, rel=1e-12)

    def test_substrate_thickness_ratio(self):
        # 0.026 * wavelength at 2.45 GHz
        spec = build_default_antenna(2.45e9)
        assert spec.substrate_thickness == pytest.approx(0.0031814709828571425,
                                                         rel=1e-12)

    def test_footprint(self):
        spec = build_default_antenna(2.45e9)
        assert spec.footprint_x == pytest.approx(20e-3)
        assert spec.footprint_y == pytest.approx(20e-3)
        # the footprint stays within the lambda/6 sizing
        assert spec.wavelength / 6.0 >= spec.footprint_x

    def test_provenance_tags(self):
        spec = build_default_antenna()
        assert spec.provenance["footprint_x_m"] == "paper"
        assert spec.provenance["substrate_thickness_m"] == "paper"
        assert spec.provenance["eps_r"] == "assumed"
        assert spec.provenance["feed_pin"] == "assumed"

    def test_sigma_eff_scale(self):
        spec = build_default_antenna()
        assert spec.sigma_eff() == pytest.approx(0.011994367604258005, rel=1e-9)


class TestSpecValidation:
    def test_pin_outside_footprint(self):
        with pytest.raises(GeometryError):
            replace(build_default_antenna(), feed_pin=PinSpec(25e-3, 0.0))

    def test_pin_outside_plate(self):
        spec = build_default_antenna()
        with pytest.raises(GeometryError):
            replace(spec, ground_pins=(PinSpec(-9e-3, 0.0),) + spec.ground_pins[1:])

    def test_exactly_three_ground_pins(self):
        spec = build_default_antenna()
        with pytest.raises(GeometryError):
            replace(spec, ground_pins=spec.ground_pins[:2])

    def test_exactly_two_strips(self):
        spec = build_default_antenna()
        with pytest.raises(GeometryError):
            replace(spec, strips=spec.strips[:1])

    def test_negative_strip_gap(self):
        spec = build_default_antenna()
        bad = tuple(replace(s, gap=-1e-3) for s in spec.strips)
        with pytest.raises(GeometryError):
            replace(spec, strips=bad)

    def test_feed_and_ground_pin_distinct(self):
        spec = build_default_antenna()
        with pytest.raises(GeometryError):
            replace(spec, feed_pin=PinSpec(spec.ground_pins[0].x,
                                           spec.ground_pins[0].y))

    def test_eps_r_and_tan_delta_ranges(self):
        with pytest.raises(GeometryError):
            replace(build_default_antenna(), eps_r=0.5)
        with pytest.raises(GeometryError):
            replace(build_default_antenna(), tan_delta=1.5)


class TestJsonRoundTrip:
    def test_round_trip(self, tmp_path):
        spec = build_default_antenna()
        path = tmp_path / "antenna.json"
        spec.write_json(path)
        back = AntennaSpec.read_json(path)
        assert back == spec

    def test_schema_version_checked(self):
        doc = build_default_antenna().to_json_dict()
        doc["schema_version"] = 99
        with pytest.raises(GeometryError):
            AntennaSpec.from_json_dict(doc)

    def test_missing_field(self):
        doc = build_default_antenna().to_json_dict()
        del doc["feed_pin"]
        with pytest.raises(GeometryError):
            AntennaSpec.from_json_dict(doc)


class TestSweepParameter:
    def test_feed_sweep_changes_only_feed(self):
        spec = build_default_antenna()
        out = sweep_parameter(spec, "feed_pin.x", [-4e-3, -3e-3, -2e-3])
        assert len(out) == 3
        for s, x in zip(out, (-4e-3, -3e-3, -2e-3)):
            assert s.feed_pin.x == x
            assert s.feed_pin.y == spec.feed_pin.y
            assert s.ground_pins == spec.ground_pins
            assert s.strips == spec.strips

    def test_empty_values(self):
        assert sweep_parameter(build_default_antenna(), "feed_pin.x", []) == []

    def test_invalid_value_raises(self):
        with pytest.raises(GeometryError):
            sweep_parameter(build_default_antenna(), "strips.gap", [-1e-3])

    def test_unknown_parameter(self):
        with pytest.raises(InvalidParameterError):
            sweep_parameter(build_default_antenna(), "bogus", [1.0])

    def test_ground_pin_cluster_translation(self):
        spec = build_default_antenna()
        out = sweep_parameter(spec, "ground_pins.x", [-3e-3])[0]
        xs = [p.x for p in out.ground_pins]
        assert np.mean(xs) == pytest.approx(-3e-3)
        # relative offsets preserved
        rel0 = np.diff([p.x for p in spec.ground_pins])
        assert np.allclose(np.diff(xs), rel0)


class TestVoxelize:
    def test_substrate_only_variant(self):
        spec = build_default_antenna()
        model = voxelize(spec, 1e-3, include_conductors=False)
        m = model.materials
        assert not m.pec_x.any() and not m.pec_y.any() and not m.pec_z.any()
        assert np.any(m.eps_r > 1.0)
        # substrate sits in the slab between ground and plate levels
        assert np.all(m.eps_r[:, :, :model.ground_node_k] == 1.0)
        assert np.all(m.eps_r[:, :, model.plate_node_k:] == 1.0)

    def test_plate_cell_counts(self):
        # counting oracle independent of the rasterizer internals
        spec = build_default_antenna()
        res = 0.5e-3
        model = voxelize(spec, res)
        f = model.features["top_plate"]
        nx_cells = f["i"][1] - f["i"][0]
        ny_cells = f["j"][1] - f["j"][0]
        assert nx_cells == round(spec.top_plate_x / res)
        assert ny_cells == round(spec.top_plate_y / res)

    def test_resolution_precondition(self):
        spec = build_default_antenna()
        with pytest.raises(InvalidParameterError):
            voxelize(spec, spec.substrate_thickness / 2.0)

    def test_padding_precondition(self):
        with pytest.raises(InvalidParameterError):
            voxelize(build_default_antenna(), 1e-3, padding_cells=5)

    def test_exactly_one_port_edge(self):
        model = voxelize(build_default_antenna(), 1e-3)
        i, j, k = model.port_index
        assert not model.materials.pec_z[i, j, k]
        # port edge sits in the substrate gap on the feed axis
        assert model.ground_node_k == k
        assert model.materials.pec_z[i, j, k + 1]  # feed pin directly above

    def test_idempotent(self):
        spec = build_default_antenna()
        m1 = voxelize(spec, 1e-3)
        m2 = voxelize(spec, 1e-3)
        assert np.array_equal(m1.materials.pec_x, m2.materials.pec_x)
        assert np.array_equal(m1.materials.eps_r, m2.materials.eps_r)
        assert m1.port_index == m2.port_index

    def test_refinement_consistency(self):
        spec = build_default_antenna()
        coarse = voxelize(spec, 1e-3)
        fine = voxelize(spec, 0.5e-3)
        assert set(coarse.features) == set(fine.features)
        for name in coarse.features:
            for ax in ("i", "j"):
                c = coarse.features[name][ax]
                f = fine.features[name][ax]
                n_c = c[1] - c[0]
                n_f = f[1] - f[0]
                assert abs(n_f - 2 * n_c) <= 1, (name, ax, n_c, n_f)

    def test_symmetric_spec_gives_symmetric_raster(self):
        # a spec symmetric under x<->y maps to a mirror-symmetric lattice
        spec = build_default_antenna()
        sym = replace(
            spec,
            feed_pin=PinSpec(4e-3, 4e-3),
            ground_pins=(PinSpec(-4e-3, -4e-3), PinSpec(-4e-3, -1e-3),
                         PinSpec(-1e-3, -4e-3)),
            strips=(StripSpec("+x", 12e-3, 1e-3, 1e-3),
                    StripSpec("+y", 12e-3, 1e-3, 1e-3)),
        )
        model = voxelize(sym, 1e-3)
        m = model.materials
        # swapping x and y axes exchanges the Ex and Ey masks
        assert np.array_equal(m.pec_x, m.pec_y.transpose(1, 0, 2))
        assert np.array_equal(m.pec_z, m.pec_z.transpose(1, 0, 2))
        assert np.array_equal(m.eps_r, m.eps_r.transpose(1, 0, 2))

    def test_containment_error_names_feature(self):
        spec = build_default_antenna()
        with pytest.raises(GeometryError, match="ground_pin_0"):
            replace(spec, ground_pins=(PinSpec(25e-3, 0.0),) + spec.ground_pins[1:])
