"""Run orchestration: simulate, analyze, sweep, and artifact emission.

``run`` executes voxelize -> time loop (port drive, surface accumulation,
termination watch) -> network and far-field analyses, then writes every
requested artifact with the deterministic writers.  Wall-clock timing goes
to ``timing.log`` and stdout only, never into compared artifacts.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import backends
from .config import RunConfig
from .exceptions import ConfigError, FitError, SuspatchError
from .farfield import (HuygensSurface, efficiency_report, ntff,
                       pattern_metrics, write_cut_csv, write_pattern_csv)
from .geometry import VoxelModel, sweep_parameter, voxelize
from .netan import BandReport, FrequencyResponse, band_metrics, fit_parallel_rlc
from .ports import LumpedPort, PortRecord, Waveform
from .solver import Simulation
from .textio import fmt, write_csv, write_json

ENV_OUT_DIR = "SUSPATCH_OUT_DIR"
ENV_WORKERS = "SUSPATCH_WORKERS"


@dataclass
class SimOutput:
    record: PortRecord
    surface: HuygensSurface | None
    steps: int
    termination: str
    final_state: object = None


def simulate(model: VoxelModel, waveform: Waveform, *,
             pattern_freqs=(), flux_floor: float = 1e-5,
             max_steps: int = 40000, check_interval: int = 100,
             surface_inset: int = 4, backend: str | None = None) -> SimOutput:
    """Time-march the model until port flux decays or max_steps is hit."""
    sim = Simulation(model.grid, model.materials,
                     nan_check_interval=check_interval, backend=backend)
    port = LumpedPort(model, waveform.sample)
    surface = None
    if len(pattern_freqs):
        surface = HuygensSurface(model.grid, pattern_freqs,
                                 inset_cells=surface_inset,
                                 materials=model.materials)
    hooks = (port,)
    peak_flux = 0.0
    termination = "max_steps"
    n = 0
    while n < max_steps:
        sim.step(hooks=hooks)
        if surface is not None:
            surface.accumulate(sim.state)
        n += 1
        if n % check_interval == 0:
            v = np.asarray(port.v[-check_interval:])
            i = np.asarray(port.i_raw[-check_interval:])
            window = float(np.max(np.abs(v * i)))
            peak_flux = max(peak_flux, window)
            t_now = n * model.grid.dt
            if (t_now > waveform.end_time and peak_flux > 0.0
                    and window < flux_floor * peak_flux):
                termination = "flux_decay"
                break
    if surface is not None:
        surface.finalize()
    return SimOutput(PortRecord.from_port(port, waveform), surface, n,
                     termination, sim.state)


@dataclass
class RunSummary:
    """Headline results mirrored from the artifact files."""

    schema_version: int
    backend: str
    steps: int
    termination: str
    f_res_hz: float | None
    rl_min_db: float
    f_rl_min_hz: float
    band_low_hz: float | None
    band_high_hz: float | None
    bandwidth_hz: float | None
    rlc_fit: dict | None
    pattern_metrics: list
    efficiency: dict | None
    assumptions: dict
    wall_clock_s: float  # reported on stdout; excluded from summary.json

    def to_json_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "backend": self.backend,
            "steps": self.steps,
            "termination": self.termination,
            "f_res_hz": self.f_res_hz,
            "rl_min_db": self.rl_min_db,
            "f_rl_min_hz": self.f_rl_min_hz,
            "band_low_hz": self.band_low_hz,
            "band_high_hz": self.band_high_hz,
            "bandwidth_hz": self.bandwidth_hz,
            "rlc_fit": self.rlc_fit,
            "pattern_metrics": self.pattern_metrics,
            "efficiency": self.efficiency,
            "assumptions": self.assumptions,
        }

    def describe(self) -> str:
        lines = [f"steps: {self.steps} ({self.termination}), "
                 f"backend: {self.backend}, wall clock: {self.wall_clock_s:.1f} s"]
        if self.f_res_hz is not None:
            lines.append(f"resonance: {self.f_res_hz / 1e9:.4f} GHz")
        else:
            lines.append("resonance: none found in band")
        lines.append(f"RL minimum: {self.rl_min_db:.2f} dB at "
                     f"{self.f_rl_min_hz / 1e9:.4f} GHz")
        if self.bandwidth_hz is not None:
            lines.append(f"-10 dB band: {self.band_low_hz / 1e9:.4f} to "
                         f"{self.band_high_hz / 1e9:.4f} GHz "
                         f"({self.bandwidth_hz / 1e6:.1f} MHz)")
        for pm in self.pattern_metrics:
            lines.append(
                f"pattern {pm['frequency_hz'] / 1e9:.3f} GHz: peak gain "
                f"{pm['peak_gain_db']:.2f} dB at (theta {pm['peak_theta_deg']:g}, "
                f"phi {pm['peak_phi_deg']:g}), ripple {pm['azimuth_ripple_db']:.2f} dB")
        if self.efficiency:
            e = self.efficiency
            lines.append(f"efficiency: match {e['eps_match']:.3f} * cd "
                         f"{e['eps_cd']:.3f} = {e['eps_total']:.3f}")
        return "\n".join(lines)


def _resolve_out_dir(config: RunConfig) -> Path:
    override = os.environ.get(ENV_OUT_DIR)
    if override:
        return Path(override) / Path(config.output_dir).name
    return Path(config.output_dir)


def dump_field_csvs(state, out_dir: Path):
    """One CSV per component, header i,j,k,value, rows in k-major order."""
    for name, arr in state.components():
        rows = []
        ni, nj, nk = arr.shape
        for k in range(nk):
            for j in range(nj):
                for i in range(ni):
                    rows.append((i, j, k, arr[i, j, k]))
        write_csv(out_dir / f"{name}.csv", ["i", "j", "k", "value"], rows)


def run(config: RunConfig, backend: str | None = None) -> RunSummary:
    t_start = time.perf_counter()
    out_dir = _resolve_out_dir(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not os.access(out_dir, os.W_OK):
        raise ConfigError(f"output directory {out_dir} is not writable")

    spec = config.antenna
    model = voxelize(spec, config.resolution_m, config.padding_cells,
                     config.pml_cells, config.cfl_factor)
    nyquist = 0.5 / model.grid.dt
    if config.freq_stop_hz >= nyquist:
        raise ConfigError(
            f"frequencies.stop_hz {config.freq_stop_hz} is at or above the "
            f"grid Nyquist {fmt(nyquist)}")
    waveform = Waveform(config.waveform_f0_hz, config.waveform_span_hz,
                        config.waveform_amplitude_v)

    spec.write_json(out_dir / "antenna.json")
    sim_out = simulate(
        model, waveform, pattern_freqs=tuple(config.pattern.frequencies_hz),
        flux_floor=config.flux_floor, max_steps=config.max_steps,
        check_interval=config.check_interval, backend=backend)
    record = sim_out.record
    record.write_csv(out_dir / "port.csv")

    freqs = np.linspace(config.freq_start_hz, config.freq_stop_hz,
                        config.freq_count)
    resp = FrequencyResponse.from_time_series(record.v, record.i, record.dt,
                                              freqs, zs=spec.port_resistance)
    if config.write_impedance_csv:
        resp.write_csv(out_dir / "impedance.csv")
    band = band_metrics(resp)
    if config.write_band_report:
        write_json(out_dir / "band.json", band.to_json_dict())

    rlc_payload = None
    if config.write_rlc_fit:
        try:
            model_fit, resid = fit_parallel_rlc(resp.za, resp.f)
            rlc_payload = model_fit.to_json_dict() | {"relative_rms_residual": resid}
        except (FitError, SuspatchError) as exc:
            rlc_payload = {"error": str(exc)}
        write_json(out_dir / "rlc.json", rlc_payload)

    metrics_list = []
    efficiency_payload = None
    if sim_out.surface is not None:
        if config.save_surface:
            sim_out.surface.save(out_dir / "surface")
        theta = np.arange(0.0, 180.0 + 1e-9, config.pattern.theta_step_deg)
        phi = np.arange(0.0, 360.0 + 1e-9, config.pattern.phi_step_deg)
        patterns = {}
        for f_pat in config.pattern.frequencies_hz:
            p_in = resp.input_power(f_pat)
            pat = ntff(sim_out.surface, f_pat, theta, phi, p_in=p_in)
            patterns[f_pat] = pat
            tag = f"{f_pat / 1e9:.4f}ghz"
            write_pattern_csv(pat, out_dir / f"pattern_{tag}.csv")
            for cut in config.pattern.cuts:
                safe = str(cut).replace(":", "_")
                write_cut_csv(pat, cut, out_dir / f"cut_{safe}_{tag}.csv")
            pm = pattern_metrics(pat, config.pattern.cuts,
                                 config.pattern.ripple_theta_deg)
            metrics_list.append(pm.to_json_dict())
            write_json(out_dir / f"metrics_{tag}.json", pm.to_json_dict())

        if config.write_efficiency and band.has_resonance and patterns:
            f_res = band.f_res_hz
            f_pat = min(patterns, key=lambda f: abs(f - f_res))
            idx = int(np.argmin(np.abs(resp.f - f_res)))
            pat = patterns[f_pat]
            p_rad_lossless = None
            if config.paired_tan_delta is not None:
                p_rad_lossless = _paired_run_p_rad(config, f_pat, backend)
            eff = efficiency_report(pat.p_rad, pat.p_in, resp.gamma[idx],
                                    p_rad_lossless)
            efficiency_payload = eff.to_json_dict() | {
                "f_res_hz": f_res, "pattern_frequency_hz": f_pat,
                "p_rad_w_per_hz2": pat.p_rad, "p_in_w_per_hz2": pat.p_in,
            }
            write_json(out_dir / "efficiency.json", efficiency_payload)

    if config.dump_fields:
        dump_field_csvs(sim_out.final_state, out_dir / "fields")
    summary = RunSummary(
        schema_version=1,
        backend=backend or backends.BACKEND_NAME,
        steps=sim_out.steps,
        termination=sim_out.termination,
        f_res_hz=band.f_res_hz,
        rl_min_db=band.rl_min_db,
        f_rl_min_hz=band.f_rl_min_hz,
        band_low_hz=band.band_low_hz,
        band_high_hz=band.band_high_hz,
        bandwidth_hz=band.bandwidth_hz,
        rlc_fit=rlc_payload,
        pattern_metrics=metrics_list,
        efficiency=efficiency_payload,
        assumptions=dict(spec.provenance),
        wall_clock_s=time.perf_counter() - t_start,
    )
    write_json(out_dir / "summary.json", summary.to_json_dict())
    (out_dir / "timing.log").write_text(
        f"wall_clock_s {summary.wall_clock_s:.3f}\n")
    return summary


def _paired_run_p_rad(config: RunConfig, f_pat: float, backend) -> float:
    """Radiated power of the paired run with the alternate loss tangent."""
    from dataclasses import replace as dc_replace
    spec2 = dc_replace(config.antenna, tan_delta=config.paired_tan_delta)
    model2 = voxelize(spec2, config.resolution_m, config.padding_cells,
                      config.pml_cells, config.cfl_factor)
    waveform = Waveform(config.waveform_f0_hz, config.waveform_span_hz,
                        config.waveform_amplitude_v)
    out2 = simulate(model2, waveform, pattern_freqs=(f_pat,),
                    flux_floor=config.flux_floor, max_steps=config.max_steps,
                    check_interval=config.check_interval, backend=backend)
    pat2 = ntff(out2.surface, f_pat)
    return pat2.p_rad


# -- re-analysis without re-simulation --------------------------------------

def analyze(port_csv, zs: float = 50.0, freq_start: float = 2.0e9,
            freq_stop: float = 3.0e9, freq_count: int = 501,
            out_dir=None, fit_rlc: bool = True) -> BandReport:
    """Network analysis of a stored port record."""
    record = PortRecord.read_csv(port_csv, port_resistance=zs)
    freqs = np.linspace(freq_start, freq_stop, freq_count)
    resp = FrequencyResponse.from_time_series(record.v, record.i, record.dt,
                                              freqs, zs=zs)
    band = band_metrics(resp)
    if out_dir is not None:
        out_dir = Path(out_dir)
        resp.write_csv(out_dir / "impedance.csv")
        write_json(out_dir / "band.json", band.to_json_dict())
        if fit_rlc:
            try:
                model_fit, resid = fit_parallel_rlc(resp.za, resp.f)
                payload = model_fit.to_json_dict() | {"relative_rms_residual": resid}
            except (FitError, SuspatchError) as exc:
                payload = {"error": str(exc)}
            write_json(out_dir / "rlc.json", payload)
    return band


# -- parameter sweeps --------------------------------------------------------

def _sweep_worker(args):
    config, value = args
    try:
        summary = run(config)
        return (value, "ok", summary.f_res_hz, summary.rl_min_db,
                summary.bandwidth_hz)
    except SuspatchError as exc:
        return (value, f"failed: {exc}", None, None, None)


def sweep(config: RunConfig, parameter: str, values, parallel: bool = False,
          workers: int | None = None) -> list[tuple]:
    """One run per value; returns and writes the sweep table.

    All specs are validated before any run starts.  Each run writes into
    ``<output_dir>/<parameter>=<value>/``; failures mark their row and do
    not abort siblings.
    """
    from dataclasses import replace as dc_replace

    values = [float(v) for v in values]
    specs = sweep_parameter(config.antenna, parameter, values)
    base_dir = _resolve_out_dir(config)
    jobs = []
    for value, spec in zip(values, specs):
        sub = base_dir / f"{parameter.replace('.', '_')}={value:.6g}"
        jobs.append((dc_replace(config, antenna=spec, output_dir=sub), value))

    if parallel and len(jobs) > 1:
        import multiprocessing as mp
        n_workers = workers or int(os.environ.get(ENV_WORKERS, "0")) or \
            min(len(jobs), os.cpu_count() or 1)
        ctx = mp.get_context("spawn")
        with ctx.Pool(n_workers) as pool:
            results = pool.map(_sweep_worker, jobs)
    else:
        results = [_sweep_worker(j) for j in jobs]

    rows = []
    for value, status, f_res, rl_min, bw in sorted(results, key=lambda r: r[0]):
        if status != "ok":
            rows.append((fmt(value), "failed", "failed", "failed"))
        else:
            rows.append((fmt(value),
                         fmt(f_res) if f_res is not None else "nan",
                         fmt(rl_min),
                         fmt(bw) if bw is not None else "nan"))
    base_dir.mkdir(parents=True, exist_ok=True)
    path = base_dir / "sweep.csv"
    lines = ["value,f_res_hz,rl_min_db,bandwidth_hz"]
    lines += [",".join(r) for r in rows]
    path.write_text("\n".join(lines) + "\n")
    return results
