"""Command-line front end.

Subcommands: simulate, analyze, pattern, fit-rlc, sweep.  Exit codes:
0 success (including an explicit no-resonance summary), 2 config or
schema error, 3 solver instability.  Environment: SUSPATCH_OUT_DIR
overrides the configured output directory, SUSPATCH_WORKERS sets the
parallel sweep worker count, SUSPATCH_BACKEND picks the stencil backend.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig
from .exceptions import ConfigError, InstabilityError, SuspatchError
from .farfield import HuygensSurface, ntff, pattern_metrics, write_cut_csv
from .netan import fit_parallel_rlc
from .textio import read_csv, read_json, write_json


def _cmd_simulate(args) -> int:
    from .driver import run
    config = RunConfig.from_file(args.config)
    summary = run(config)
    print(summary.describe())
    return 0


def _cmd_analyze(args) -> int:
    from .driver import analyze
    out_dir = Path(args.out) if args.out else Path(args.port_csv).parent
    band = analyze(args.port_csv, zs=args.zs, freq_start=args.f_start,
                   freq_stop=args.f_stop, freq_count=args.points,
                   out_dir=out_dir)
    if band.has_resonance:
        print(f"resonance: {band.f_res_hz / 1e9:.4f} GHz")
    else:
        print("resonance: none found in band")
    print(f"RL minimum: {band.rl_min_db:.2f} dB at {band.f_rl_min_hz / 1e9:.4f} GHz")
    if band.has_band:
        print(f"-10 dB bandwidth: {band.bandwidth_hz / 1e6:.1f} MHz")
    return 0


def _cmd_pattern(args) -> int:
    run_dir = Path(args.run_dir)
    surf_dir = run_dir / "surface"
    if not (surf_dir / "surface.json").exists():
        raise ConfigError(f"{surf_dir} holds no saved surface "
                          f"(simulate with outputs.save_surface)")
    surface = HuygensSurface.load(surf_dir)
    p_in = None
    eff_file = run_dir / "efficiency.json"
    if eff_file.exists():
        payload = read_json(eff_file)
        if abs(payload.get("pattern_frequency_hz", -1.0) - args.freq) < 1.0:
            p_in = payload.get("p_in_w_per_hz2")
    pat = ntff(surface, args.freq, p_in=p_in)
    if p_in is None:
        pat.p_in = pat.p_rad  # gain falls back to the directivity scale
        print("note: no stored input power at this frequency; gain columns "
              "are directivity-referenced")
    tag = f"{args.freq / 1e9:.4f}ghz"
    for cut in args.cut:
        safe = cut.replace(":", "_")
        path = run_dir / f"cut_{safe}_{tag}.csv"
        write_cut_csv(pat, cut, path)
        print(f"wrote {path}")
    metrics = pattern_metrics(pat, args.cut)
    write_json(run_dir / f"metrics_{tag}.json", metrics.to_json_dict())
    print(f"peak gain {metrics.peak_gain_db:.2f} dB at theta "
          f"{metrics.peak_theta_deg:g}, phi {metrics.peak_phi_deg:g}")
    return 0


def _cmd_fit_rlc(args) -> int:
    cols = read_csv(args.impedance_csv,
                    ["f_hz", "re_z", "im_z", "abs_z", "re_gamma", "im_gamma",
                     "rl_db"])
    za = cols["re_z"] + 1j * cols["im_z"]
    model, resid = fit_parallel_rlc(za, cols["f_hz"])
    payload = model.to_json_dict() | {"relative_rms_residual": resid}
    out = Path(args.out) if args.out else Path(args.impedance_csv).with_name("rlc.json")
    write_json(out, payload)
    print(f"R = {model.r_ohm:.4g} ohm, L = {model.l_h:.4g} H, "
          f"C = {model.c_f:.4g} F (f0 = {model.f0_hz / 1e9:.4f} GHz, "
          f"residual {resid:.3g})")
    return 0


def _cmd_sweep(args) -> int:
    from .driver import sweep
    config = RunConfig.from_file(args.config)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    results = sweep(config, args.param, values, parallel=args.parallel,
                    workers=args.workers)
    for value, status, f_res, rl_min, bw in sorted(results, key=lambda r: r[0]):
        if status != "ok":
            print(f"{value:g}: {status}")
        else:
            fr = f"{f_res / 1e9:.4f} GHz" if f_res else "no resonance"
            bws = f"{bw / 1e6:.1f} MHz" if bw else "no band"
            print(f"{value:g}: f_res {fr}, RL_min {rl_min:.2f} dB, {bws}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="suspatch", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a configured simulation")
    p.add_argument("config")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="re-analyze a stored port record")
    p.add_argument("port_csv")
    p.add_argument("--zs", type=float, default=50.0)
    p.add_argument("--f-start", type=float, default=2.0e9)
    p.add_argument("--f-stop", type=float, default=3.0e9)
    p.add_argument("--points", type=int, default=501)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("pattern", help="far-field cuts from a saved surface")
    p.add_argument("run_dir")
    p.add_argument("--freq", type=float, required=True)
    p.add_argument("--cut", action="append", default=None,
                   help="xz | yz | azimuth:<theta_deg> (repeatable)")
    p.set_defaults(func=_cmd_pattern)

    p = sub.add_parser("fit-rlc", help="parallel-RLC fit of an impedance CSV")
    p.add_argument("impedance_csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_fit_rlc)

    p = sub.add_parser("sweep", help="run a parameter sweep")
    p.add_argument("config")
    p.add_argument("--param", required=True)
    p.add_argument("--values", required=True,
                   help="comma-separated SI values; use --values=-4e-3,... "
                        "when the list starts with a minus sign")
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "cut", "missing") is None:
        args.cut = ["xz", "yz", "azimuth:45"]
    try:
        return args.func(args)
    except InstabilityError as exc:
        print(f"solver instability: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SuspatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
