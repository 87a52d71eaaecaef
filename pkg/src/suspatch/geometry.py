"""Parametric suspended-patch antenna and rasterization onto the Yee grid.

The structure is a two-layer stack: a full-footprint ground plane on the
bottom, an FR4-class substrate slab, and a square top plate connected to
ground by three grounding pins and driven through a feed pin.  Two coplanar
strips flank the plate to trim its capacitance.  Coordinates are in meters
with the origin at the footprint center; +z points from ground to plate.

Conductors rasterize to PEC edge masks (zero-thickness sheets, single-edge
pin columns); the pin radius is recorded but not resolved below one cell.
The port is the bottom edge of the feed column, the source gap at the
ground-plane end.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .constants import c0, eps0
from .exceptions import GeometryError, InvalidParameterError
from .grid import GridSpec, MaterialMap

SCHEMA_VERSION = 1

STRIP_EDGES = ("+x", "-x", "+y", "-y")


@dataclass(frozen=True)
class PinSpec:
    x: float
    y: float
    radius: float = 3e-4


@dataclass(frozen=True)
class StripSpec:
    """Coplanar trim strip flanking one plate edge.

    ``gap`` separates the strip's inner long edge from the plate edge;
    ``offset`` slides the strip along that edge from the centered position.
    """

    edge: str
    length: float
    width: float
    gap: float
    offset: float = 0.0


@dataclass(frozen=True)
class AntennaSpec:
    """Parametric description of the suspended patch; SI units throughout."""

    f_design: float = 2.45e9
    footprint_x: float = 20e-3
    footprint_y: float = 20e-3
    substrate_thickness: float = None
    eps_r: float = 4.4
    tan_delta: float = 0.02
    top_plate_x: float = 11.5e-3
    top_plate_y: float = 11.5e-3
    feed_pin: PinSpec = PinSpec(-4.5e-3, 0.5e-3)
    ground_pins: tuple = (PinSpec(-5e-3, -3e-3), PinSpec(-5e-3, 0.0),
                          PinSpec(-5e-3, 3e-3))
    strips: tuple = (StripSpec("+y", 11.5e-3, 1e-3, 1.5e-3),
                     StripSpec("-y", 11.5e-3, 1e-3, 1.5e-3))
    port_resistance: float = 50.0
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.f_design <= 0.0:
            raise InvalidParameterError("f_design must be positive")
        if self.substrate_thickness is None:
            lam = c0 / self.f_design
            object.__setattr__(self, "substrate_thickness", 0.026 * lam)
        if self.substrate_thickness <= 0.0:
            raise GeometryError("substrate_thickness must be positive")
        if self.eps_r < 1.0 or not 0.0 <= self.tan_delta < 1.0:
            raise GeometryError("need eps_r >= 1 and 0 <= tan_delta < 1")
        if self.port_resistance <= 0.0:
            raise GeometryError("port_resistance must be positive")
        if len(self.ground_pins) != 3:
            raise GeometryError("exactly 3 ground pins required")
        if len(self.strips) != 2:
            raise GeometryError("exactly 2 strips required")
        for s in self.strips:
            if s.edge not in STRIP_EDGES:
                raise GeometryError(f"strip edge must be one of {STRIP_EDGES}")
            if s.length <= 0 or s.width <= 0 or s.gap < 0:
                raise GeometryError("strip length/width must be positive, gap >= 0")
        for name, (x0, x1, y0, y1) in self.feature_extents().items():
            hx, hy = self.footprint_x / 2, self.footprint_y / 2
            if x0 < -hx - 1e-12 or x1 > hx + 1e-12 or y0 < -hy - 1e-12 or y1 > hy + 1e-12:
                raise GeometryError(f"feature {name!r} extends outside the footprint")
        fp = self.feed_pin
        for g in self.ground_pins:
            if abs(g.x - fp.x) < 1e-9 and abs(g.y - fp.y) < 1e-9:
                raise GeometryError("feed pin coincides with a ground pin")
        px, py = self.top_plate_x / 2, self.top_plate_y / 2
        for name, pin in [("feed_pin", fp)] + [
                (f"ground_pin_{n}", g) for n, g in enumerate(self.ground_pins)]:
            if abs(pin.x) > px + 1e-12 or abs(pin.y) > py + 1e-12:
                raise GeometryError(
                    f"{name} must lie under the top plate it connects to")

    @property
    def wavelength(self) -> float:
        return c0 / self.f_design

    def sigma_eff(self) -> float:
        """Constant effective conductivity for tan_delta at f_design."""
        return 2.0 * np.pi * self.f_design * eps0 * self.eps_r * self.tan_delta

    def strip_extent(self, s: StripSpec):
        px, py = self.top_plate_x / 2, self.top_plate_y / 2
        if s.edge in ("+y", "-y"):
            y0 = py + s.gap if s.edge == "+y" else -py - s.gap - s.width
            return (-s.length / 2 + s.offset, s.length / 2 + s.offset,
                    y0, y0 + s.width)
        x0 = px + s.gap if s.edge == "+x" else -px - s.gap - s.width
        return (x0, x0 + s.width, -s.length / 2 + s.offset, s.length / 2 + s.offset)

    def feature_extents(self) -> dict:
        """Axis-aligned (x0, x1, y0, y1) of every conducting feature."""
        out = {
            "ground_plane": (-self.footprint_x / 2, self.footprint_x / 2,
                             -self.footprint_y / 2, self.footprint_y / 2),
            "top_plate": (-self.top_plate_x / 2, self.top_plate_x / 2,
                          -self.top_plate_y / 2, self.top_plate_y / 2),
            "feed_pin": (self.feed_pin.x, self.feed_pin.x,
                         self.feed_pin.y, self.feed_pin.y),
        }
        for n, g in enumerate(self.ground_pins):
            out[f"ground_pin_{n}"] = (g.x, g.x, g.y, g.y)
        for n, s in enumerate(self.strips):
            out[f"strip_{n}"] = self.strip_extent(s)
        return out

    # -- JSON schema ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "f_design_hz": self.f_design,
            "footprint_x_m": self.footprint_x,
            "footprint_y_m": self.footprint_y,
            "substrate_thickness_m": self.substrate_thickness,
            "eps_r": self.eps_r,
            "tan_delta": self.tan_delta,
            "top_plate_x_m": self.top_plate_x,
            "top_plate_y_m": self.top_plate_y,
            "feed_pin": {"x_m": self.feed_pin.x, "y_m": self.feed_pin.y,
                         "radius_m": self.feed_pin.radius},
            "ground_pins": [{"x_m": p.x, "y_m": p.y, "radius_m": p.radius}
                            for p in self.ground_pins],
            "strips": [{"edge": s.edge, "length_m": s.length, "width_m": s.width,
                        "gap_m": s.gap, "offset_m": s.offset} for s in self.strips],
            "port_resistance_ohm": self.port_resistance,
            "provenance": dict(self.provenance),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "AntennaSpec":
        d = dict(d)
        version = d.pop("schema_version", None)
        if version != SCHEMA_VERSION:
            raise GeometryError(f"unsupported antenna schema_version {version!r}")
        try:
            fp = d.pop("feed_pin")
            return cls(
                f_design=d.pop("f_design_hz"),
                footprint_x=d.pop("footprint_x_m"),
                footprint_y=d.pop("footprint_y_m"),
                substrate_thickness=d.pop("substrate_thickness_m"),
                eps_r=d.pop("eps_r"),
                tan_delta=d.pop("tan_delta"),
                top_plate_x=d.pop("top_plate_x_m"),
                top_plate_y=d.pop("top_plate_y_m"),
                feed_pin=PinSpec(fp["x_m"], fp["y_m"], fp["radius_m"]),
                ground_pins=tuple(PinSpec(p["x_m"], p["y_m"], p["radius_m"])
                                  for p in d.pop("ground_pins")),
                strips=tuple(StripSpec(s["edge"], s["length_m"], s["width_m"],
                                       s["gap_m"], s.get("offset_m", 0.0))
                             for s in d.pop("strips")),
                port_resistance=d.pop("port_resistance_ohm"),
                provenance=d.pop("provenance", {}),
            )
        except KeyError as exc:
            raise GeometryError(f"antenna JSON missing field {exc}") from exc

    def write_json(self, path):
        from .textio import write_json
        write_json(path, self.to_json_dict())

    @classmethod
    def read_json(cls, path) -> "AntennaSpec":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def build_default_antenna(f_design: float = 2.45e9, eps_r: float = 4.4) -> AntennaSpec:
    """Documented default geometry with per-field provenance tags.

    Values the published design fixes are tagged ``paper``; everything the
    layout leaves open (pin and strip placement, plate inset, eps_r) is
    tagged ``assumed`` and doubles as the sanctioned sweep target.
    """
    if f_design <= 0.0:
        raise InvalidParameterError("f_design must be positive")
    lam = c0 / f_design
    provenance = {
        "f_design_hz": "paper",
        "footprint_x_m": "paper",
        "footprint_y_m": "paper",
        "substrate_thickness_m": "paper",
        "tan_delta": "paper",
        "port_resistance_ohm": "paper",
        "eps_r": "assumed",
        "top_plate_x_m": "assumed",
        "top_plate_y_m": "assumed",
        "feed_pin": "assumed",
        "ground_pins": "assumed",
        "strips": "assumed",
    }
    return AntennaSpec(
        f_design=f_design,
        substrate_thickness=0.026 * lam,
        eps_r=eps_r,
        provenance=provenance,
    )


SWEEPABLE_PARAMETERS = (
    "feed_pin.x", "feed_pin.y", "ground_pins.x", "ground_pins.y",
    "top_plate_x", "top_plate_y", "plate_size", "strips.gap",
    "strips.length", "eps_r",
)


def sweep_parameter(spec: AntennaSpec, parameter_name: str, values) -> list[AntennaSpec]:
    """Specs differing only in one named parameter, each re-validated.

    ``ground_pins.x/y`` translate the pin cluster so its centroid lands on
    the value; ``plate_size`` sets both plate dimensions; ``strips.gap`` and
    ``strips.length`` apply to both strips.
    """
    if parameter_name not in SWEEPABLE_PARAMETERS:
        raise InvalidParameterError(
            f"unknown sweep parameter {parameter_name!r}; "
            f"choose from {SWEEPABLE_PARAMETERS}")
    out = []
    for v in values:
        v = float(v)
        if parameter_name == "feed_pin.x":
            new = replace(spec, feed_pin=replace(spec.feed_pin, x=v))
        elif parameter_name == "feed_pin.y":
            new = replace(spec, feed_pin=replace(spec.feed_pin, y=v))
        elif parameter_name in ("ground_pins.x", "ground_pins.y"):
            axis = parameter_name[-1]
            mean = float(np.mean([getattr(p, axis) for p in spec.ground_pins]))
            shift = v - mean
            pins = tuple(replace(p, **{axis: getattr(p, axis) + shift})
                         for p in spec.ground_pins)
            new = replace(spec, ground_pins=pins)
        elif parameter_name == "plate_size":
            new = replace(spec, top_plate_x=v, top_plate_y=v)
        elif parameter_name in ("top_plate_x", "top_plate_y"):
            new = replace(spec, **{parameter_name: v})
        elif parameter_name == "strips.gap":
            new = replace(spec, strips=tuple(replace(s, gap=v) for s in spec.strips))
        elif parameter_name == "strips.length":
            new = replace(spec, strips=tuple(replace(s, length=v) for s in spec.strips))
        else:
            new = replace(spec, eps_r=v)
        out.append(new)
    return out


@dataclass
class VoxelModel:
    """Rasterized antenna: grid, materials, port location and feature map."""

    grid: GridSpec
    materials: MaterialMap
    port_index: tuple[int, int, int]
    port_axis: str
    port_resistance: float
    spec: AntennaSpec
    features: dict
    ground_node_k: int
    plate_node_k: int


def _node(coord: float, origin: float, delta: float) -> int:
    # round half up: keeps interval endpoints monotone under refinement
    return int(math.floor((coord - origin) / delta + 0.5))


def voxelize(spec: AntennaSpec, resolution: float, padding_cells: int = 10,
             pml_cells: int = 10, cfl_factor: float = 0.95,
             include_conductors: bool = True) -> VoxelModel:
    """Rasterize the antenna onto a uniform-in-plane Yee grid.

    dz snaps to an integer divisor of the substrate thickness; dx = dy =
    ``resolution``.  Sheets become PEC edge masks on their node plane, pins
    become single-edge vertical PEC columns staircased to the nearest node,
    and the substrate cells carry (eps_r, sigma_eff).
    """
    h = spec.substrate_thickness
    if resolution > h / 3 + 1e-12:
        raise InvalidParameterError(
            f"resolution {resolution} too coarse: need >= 3 cells through "
            f"the {h} m substrate")
    if padding_cells < 10:
        raise InvalidParameterError("padding_cells must be >= 10")
    dx = dy = float(resolution)
    n_sub = int(round(h / resolution))
    dz = h / n_sub

    ncx = int(round(spec.footprint_x / dx))
    ncy = int(round(spec.footprint_y / dy))
    margin = padding_cells + pml_cells
    nx = ncx + 2 * margin
    ny = ncy + 2 * margin
    nz = n_sub + 2 * margin
    grid = GridSpec.make(nx, ny, nz, dx, dy, dz, cfl_factor=cfl_factor,
                         pml_thickness=pml_cells)

    # footprint corner in node indices
    i0, j0, k_g = margin, margin, margin
    k_t = k_g + n_sub
    x_orig = -spec.footprint_x / 2 - i0 * dx
    y_orig = -spec.footprint_y / 2 - j0 * dy

    eps = np.ones(grid.shape)
    sig = np.zeros(grid.shape)
    eps[i0:i0 + ncx, j0:j0 + ncy, k_g:k_t] = spec.eps_r
    sig[i0:i0 + ncx, j0:j0 + ncy, k_g:k_t] = spec.sigma_eff()

    pec_x = np.zeros(grid.component_shape("Ex"), dtype=bool)
    pec_y = np.zeros(grid.component_shape("Ey"), dtype=bool)
    pec_z = np.zeros(grid.component_shape("Ez"), dtype=bool)
    features = {}

    def add_sheet(name, extent, k_plane):
        x0, x1, y0, y1 = extent
        ia, ib = _node(x0, x_orig, dx), _node(x1, x_orig, dx)
        ja, jb = _node(y0, y_orig, dy), _node(y1, y_orig, dy)
        if not (0 < ia <= ib < nx and 0 < ja <= jb < ny):
            raise GeometryError(f"feature {name!r} rasterizes outside the grid")
        pec_x[ia:ib, ja:jb + 1, k_plane] = True
        pec_y[ia:ib + 1, ja:jb, k_plane] = True
        features[name] = {"i": (ia, ib), "j": (ja, jb), "k": (k_plane, k_plane),
                          "cells": ((ib - ia), (jb - ja))}

    def add_pin(name, pin, k_lo, k_hi):
        ip = _node(pin.x, x_orig, dx)
        jp = _node(pin.y, y_orig, dy)
        if not (0 < ip < nx and 0 < jp < ny):
            raise GeometryError(f"feature {name!r} rasterizes outside the grid")
        pec_z[ip, jp, k_lo:k_hi] = True
        features[name] = {"i": (ip, ip), "j": (jp, jp), "k": (k_lo, k_hi),
                          "radius_m": pin.radius}
        return ip, jp

    ext = spec.feature_extents()
    port_index = None
    if include_conductors:
        add_sheet("ground_plane", ext["ground_plane"], k_g)
        add_sheet("top_plate", ext["top_plate"], k_t)
        for n, s in enumerate(spec.strips):
            add_sheet(f"strip_{n}", spec.strip_extent(s), k_t)
        for n, g in enumerate(spec.ground_pins):
            add_pin(f"ground_pin_{n}", g, k_g, k_t)
        # feed column: gap edge at the ground end stays unmasked
        ip, jp = add_pin("feed_pin", spec.feed_pin, k_g + 1, k_t)
        port_index = (ip, jp, k_g)
        if pec_z[port_index]:
            raise GeometryError("port edge collides with a PEC feature")
    else:
        ip = _node(spec.feed_pin.x, x_orig, dx)
        jp = _node(spec.feed_pin.y, y_orig, dy)
        port_index = (ip, jp, k_g)

    materials = MaterialMap.build(grid, eps, sig, pec_x, pec_y, pec_z)
    return VoxelModel(grid, materials, port_index, "z", spec.port_resistance,
                      spec, features, k_g, k_t)
