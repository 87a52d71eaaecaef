"""Run configuration: JSON schema, strict validation, defaults.

One JSON document drives a simulation.  Units are SI and encoded in the
field names; unknown keys anywhere are hard errors so tuning-study typos
cannot silently fall back to defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .exceptions import ConfigError
from .geometry import AntennaSpec, build_default_antenna
from .textio import read_json

CONFIG_SCHEMA_VERSION = 1


def _take(d: dict, section: str, defaults: dict) -> dict:
    unknown = set(d) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown key(s) in {section}: {sorted(unknown)}")
    out = dict(defaults)
    out.update(d)
    return out


@dataclass(frozen=True)
class PatternRequest:
    frequencies_hz: tuple = (2.45e9,)
    cuts: tuple = ("xz", "yz", "azimuth:45")
    theta_step_deg: float = 2.0
    phi_step_deg: float = 2.0
    ripple_theta_deg: float = 45.0


@dataclass(frozen=True)
class RunConfig:
    antenna: AntennaSpec
    output_dir: Path
    resolution_m: float = 0.5e-3
    padding_cells: int = 10
    pml_cells: int = 10
    cfl_factor: float = 0.95
    waveform_f0_hz: float = 2.5e9
    waveform_span_hz: float = 0.6e9
    waveform_amplitude_v: float = 1.0
    freq_start_hz: float = 2.0e9
    freq_stop_hz: float = 3.0e9
    freq_count: int = 501
    flux_floor: float = 1e-5
    max_steps: int = 40000
    check_interval: int = 100
    pattern: PatternRequest = field(default_factory=PatternRequest)
    write_impedance_csv: bool = True
    write_band_report: bool = True
    write_rlc_fit: bool = True
    write_efficiency: bool = True
    paired_tan_delta: float | None = None
    save_surface: bool = True
    dump_fields: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.freq_count < 3:
            raise ConfigError("frequencies.count must be >= 3")
        if not self.freq_start_hz < self.freq_stop_hz:
            raise ConfigError("frequencies.start_hz must be below stop_hz")
        lo = self.waveform_f0_hz - self.waveform_span_hz
        hi = self.waveform_f0_hz + self.waveform_span_hz
        for name, f in (("frequencies.start_hz", self.freq_start_hz),
                        ("frequencies.stop_hz", self.freq_stop_hz)):
            if not lo <= f <= hi:
                raise ConfigError(
                    f"{name} = {f} outside the waveform coverage [{lo}, {hi}]")
        for f in self.pattern.frequencies_hz:
            if not self.freq_start_hz <= f <= self.freq_stop_hz:
                raise ConfigError(
                    f"pattern frequency {f} outside the analysis grid")
        if self.flux_floor <= 0.0 or self.max_steps < 1 or self.check_interval < 1:
            raise ConfigError("termination parameters must be positive")
        if self.paired_tan_delta is not None and not 0.0 <= self.paired_tan_delta < 1.0:
            raise ConfigError("paired_tan_delta must be in [0, 1)")

    @classmethod
    def from_json_dict(cls, doc: dict, base_dir: Path | None = None) -> "RunConfig":
        base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
        doc = dict(doc)
        version = doc.pop("schema_version", None)
        if version != CONFIG_SCHEMA_VERSION:
            raise ConfigError(f"unsupported config schema_version {version!r}")

        top_defaults = {
            "output_dir": None, "antenna": None, "antenna_file": None,
            "grid": {}, "waveform": {}, "frequencies": {}, "termination": {},
            "outputs": {}, "seed": 0,
        }
        doc = _take(doc, "config", top_defaults)
        if doc["output_dir"] is None:
            raise ConfigError("output_dir is required")
        if (doc["antenna"] is None) == (doc["antenna_file"] is None):
            raise ConfigError("exactly one of antenna / antenna_file is required")
        if doc["antenna_file"] is not None:
            try:
                antenna = AntennaSpec.read_json(base_dir / doc["antenna_file"])
            except OSError as exc:
                raise ConfigError(f"cannot read antenna_file: {exc}") from exc
        elif doc["antenna"] == "default":
            antenna = build_default_antenna()
        else:
            antenna = AntennaSpec.from_json_dict(doc["antenna"])

        g = _take(doc["grid"], "grid", {
            "resolution_m": 0.5e-3, "padding_cells": 10, "pml_cells": 10,
            "cfl_factor": 0.95})
        w = _take(doc["waveform"], "waveform", {
            "f0_hz": 2.5e9, "f_span_hz": 0.6e9, "amplitude_v": 1.0})
        fr = _take(doc["frequencies"], "frequencies", {
            "start_hz": 2.0e9, "stop_hz": 3.0e9, "count": 501})
        t = _take(doc["termination"], "termination", {
            "flux_floor": 1e-5, "max_steps": 40000, "check_interval": 100})
        o = _take(doc["outputs"], "outputs", {
            "impedance_csv": True, "band_report": True, "rlc_fit": True,
            "efficiency": True, "paired_tan_delta": None, "pattern": {},
            "save_surface": True, "dump_fields": False})
        p = _take(o["pattern"], "outputs.pattern", {
            "frequencies_hz": [2.45e9], "cuts": ["xz", "yz", "azimuth:45"],
            "theta_step_deg": 2.0, "phi_step_deg": 2.0,
            "ripple_theta_deg": 45.0})
        pattern = PatternRequest(tuple(p["frequencies_hz"]), tuple(p["cuts"]),
                                 p["theta_step_deg"], p["phi_step_deg"],
                                 p["ripple_theta_deg"])
        return cls(
            antenna=antenna,
            output_dir=base_dir / doc["output_dir"],
            resolution_m=g["resolution_m"], padding_cells=g["padding_cells"],
            pml_cells=g["pml_cells"], cfl_factor=g["cfl_factor"],
            waveform_f0_hz=w["f0_hz"], waveform_span_hz=w["f_span_hz"],
            waveform_amplitude_v=w["amplitude_v"],
            freq_start_hz=fr["start_hz"], freq_stop_hz=fr["stop_hz"],
            freq_count=fr["count"],
            flux_floor=t["flux_floor"], max_steps=t["max_steps"],
            check_interval=t["check_interval"],
            pattern=pattern,
            write_impedance_csv=o["impedance_csv"],
            write_band_report=o["band_report"],
            write_rlc_fit=o["rlc_fit"],
            write_efficiency=o["efficiency"],
            paired_tan_delta=o["paired_tan_delta"],
            save_surface=o["save_surface"],
            dump_fields=o["dump_fields"],
            seed=doc["seed"],
        )

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            doc = read_json(path)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_json_dict(doc, base_dir=path.parent)
