"""Frequency-domain analysis of the one-port record.

Covers the single-frequency DFT, impedance, reflection coefficient and
return loss (negative-dB convention), resonance and -10 dB bandwidth
extraction, parallel-RLC equivalent-circuit fitting, and the free-space
link-range inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .constants import c0
from .exceptions import (FitError, InvalidParameterError, NoLinkError,
                         PassivityError, SingularImpedanceError)
from .textio import fmt, write_csv

RL_FLOOR_DB = -120.0
PASSIVITY_TOL = 1e-6
CURRENT_FLOOR = 1e-30


def dft_at(samples, dt: float, freqs) -> np.ndarray:
    """X(f) = dt * sum_n x[n] * exp(-2j*pi*f*n*dt) at each requested f."""
    samples = np.asarray(samples, dtype=np.float64)
    freqs = np.atleast_1d(np.asarray(freqs, dtype=np.float64))
    if dt <= 0.0:
        raise InvalidParameterError("dt must be positive")
    nyquist = 0.5 / dt
    if np.any(freqs >= nyquist):
        raise InvalidParameterError(
            f"requested frequency at or above Nyquist {fmt(nyquist)} Hz")
    n = np.arange(samples.size)
    out = np.empty(freqs.size, dtype=np.complex128)
    # chunk over frequencies to bound the (nf, nt) phase matrix
    step = max(1, int(4e6 // max(samples.size, 1)))
    for a in range(0, freqs.size, step):
        fs = freqs[a:a + step]
        phase = np.exp((-2j * math.pi * dt) * np.outer(fs, n))
        out[a:a + step] = phase @ samples
    return out * dt


def impedance(v: np.ndarray, i: np.ndarray) -> np.ndarray:
    """Za(f) = V(f) / I(f), complex, per frequency."""
    v = np.atleast_1d(np.asarray(v, dtype=np.complex128))
    i = np.atleast_1d(np.asarray(i, dtype=np.complex128))
    small = np.abs(i) < CURRENT_FLOOR
    if np.any(small):
        bad = int(np.argmax(small))
        raise SingularImpedanceError(
            f"|I| below {CURRENT_FLOOR} at frequency index {bad}")
    return v / i


def reflection_coefficient(za, zs) -> np.ndarray:
    """Gamma = (Za - Zs) / (Za + Zs)."""
    za = np.asarray(za, dtype=np.complex128)
    zs = np.asarray(zs, dtype=np.complex128)
    denom = za + zs
    if np.any(np.abs(denom) == 0.0):
        raise SingularImpedanceError("Za + Zs = 0")
    out = (za - zs) / denom
    return out if out.ndim else complex(out)


def return_loss(gamma) -> np.ndarray:
    """RL = 10*log10(|Gamma|^2) in dB, clamped at the -120 dB floor.

    |Gamma| marginally above 1 (within 1e-6) is treated as 1 so the result
    stays <= 0; anything larger signals a broken upstream simulation.
    """
    g = np.abs(np.asarray(gamma, dtype=np.complex128))
    if np.any(g > 1.0 + PASSIVITY_TOL):
        raise PassivityError(f"|Gamma| = {np.max(g)} exceeds 1 + {PASSIVITY_TOL}")
    g = np.minimum(g, 1.0)
    floor = 10.0 ** (RL_FLOOR_DB / 20.0)
    rl = 20.0 * np.log10(np.maximum(g, floor))
    return rl if rl.ndim else float(rl)


@dataclass
class FrequencyResponse:
    """Per-frequency port spectra and derived quantities."""

    f: np.ndarray
    v: np.ndarray
    i: np.ndarray
    za: np.ndarray
    zs: complex
    gamma: np.ndarray
    rl_db: np.ndarray

    CSV_HEADER = "f_hz,re_z,im_z,abs_z,re_gamma,im_gamma,rl_db"

    @classmethod
    def from_time_series(cls, v_t, i_t, dt: float, freqs, zs=50.0) -> "FrequencyResponse":
        freqs = np.asarray(freqs, dtype=np.float64)
        if freqs.ndim != 1 or freqs.size < 1 or np.any(np.diff(freqs) <= 0):
            raise InvalidParameterError("frequency grid must be sorted ascending")
        v = dft_at(v_t, dt, freqs)
        i = dft_at(i_t, dt, freqs)
        za = impedance(v, i)
        gamma = reflection_coefficient(za, zs)
        rl = return_loss(gamma)
        return cls(freqs, v, i, za, complex(zs), gamma, rl)

    def input_power(self, f: float) -> float:
        """Net accepted power density 0.5*Re(V*conj(I)) at the nearest bin."""
        idx = int(np.argmin(np.abs(self.f - f)))
        return 0.5 * float(np.real(self.v[idx] * np.conj(self.i[idx])))

    def write_csv(self, path):
        rows = np.column_stack([
            self.f, self.za.real, self.za.imag, np.abs(self.za),
            self.gamma.real, self.gamma.imag, self.rl_db,
        ])
        write_csv(path, self.CSV_HEADER.split(","), rows)


@dataclass(frozen=True)
class BandReport:
    """Resonance and -10 dB band summary; missing pieces stay None."""

    rl_min_db: float
    f_rl_min_hz: float
    f_res_hz: float | None = None
    band_low_hz: float | None = None
    band_high_hz: float | None = None
    threshold_db: float = -10.0

    @property
    def has_resonance(self) -> bool:
        return self.f_res_hz is not None

    @property
    def has_band(self) -> bool:
        return self.band_low_hz is not None and self.band_high_hz is not None

    @property
    def bandwidth_hz(self) -> float | None:
        if not self.has_band:
            return None
        return self.band_high_hz - self.band_low_hz

    def to_json_dict(self) -> dict:
        return {
            "rl_min_db": self.rl_min_db,
            "f_rl_min_hz": self.f_rl_min_hz,
            "f_res_hz": self.f_res_hz,
            "band_low_hz": self.band_low_hz,
            "band_high_hz": self.band_high_hz,
            "bandwidth_hz": self.bandwidth_hz,
            "threshold_db": self.threshold_db,
        }


def _interp_crossing(x0, x1, y0, y1, target):
    return x0 + (target - y0) * (x1 - x0) / (y1 - y0)


def band_metrics(resp: FrequencyResponse, threshold_db: float = -10.0) -> BandReport:
    """Scan RL for its minimum, interpolate band edges and the Im Za zero.

    The band edges are the threshold crossings nearest the RL minimum on
    each side; the resonance is the Im Za sign change nearest the minimum.
    Either may be absent, which is reported, not raised.
    """
    f, rl = resp.f, resp.rl_db
    if f.size < 3:
        raise InvalidParameterError("need at least 3 frequency points")
    imin = int(np.argmin(rl))
    rl_min = float(rl[imin])
    f_min = float(f[imin])

    band_low = band_high = None
    if rl_min <= threshold_db:
        lo = None
        for m in range(imin, 0, -1):
            if rl[m - 1] > threshold_db >= rl[m]:
                lo = _interp_crossing(f[m - 1], f[m], rl[m - 1], rl[m], threshold_db)
                break
        hi = None
        for m in range(imin, f.size - 1):
            if rl[m + 1] > threshold_db >= rl[m]:
                hi = _interp_crossing(f[m], f[m + 1], rl[m], rl[m + 1], threshold_db)
                break
        if lo is not None and hi is not None:
            band_low, band_high = float(lo), float(hi)

    x = resp.za.imag
    sign_change = np.nonzero(np.diff(np.signbit(x)))[0]
    f_res = None
    if sign_change.size:
        m = sign_change[int(np.argmin(np.abs(f[sign_change] - f_min)))]
        f_res = float(_interp_crossing(f[m], f[m + 1], x[m], x[m + 1], 0.0))
    return BandReport(rl_min, f_min, f_res, band_low, band_high, threshold_db)


@dataclass(frozen=True)
class RlcModel:
    """Parallel RLC one-port: Z = 1 / (1/R + 1/(jwL) + jwC)."""

    r_ohm: float
    l_h: float
    c_f: float

    def __post_init__(self):
        if self.r_ohm <= 0.0 or self.l_h <= 0.0 or self.c_f <= 0.0:
            raise InvalidParameterError("R, L and C must all be positive")

    @property
    def f0_hz(self) -> float:
        return 1.0 / (2.0 * math.pi * math.sqrt(self.l_h * self.c_f))

    def to_json_dict(self) -> dict:
        return {"r_ohm": self.r_ohm, "l_h": self.l_h, "c_f": self.c_f,
                "f0_hz": self.f0_hz}


def parallel_rlc_impedance(model: RlcModel, f) -> np.ndarray:
    """Impedance of the parallel RLC at frequency f (scalar or array)."""
    f = np.asarray(f, dtype=np.float64)
    if np.any(f <= 0.0):
        raise InvalidParameterError("f must be positive")
    w = 2.0 * math.pi * f
    y = 1.0 / model.r_ohm + 1.0 / (1j * w * model.l_h) + 1j * w * model.c_f
    z = np.asarray(1.0 / y)
    return complex(z) if z.ndim == 0 else z


def fit_parallel_rlc(za, f, max_iter: int = 200) -> tuple[RlcModel, float]:
    """Least-squares parallel-RLC fit of Za(f); returns (model, residual).

    Parameters are fit in log space to stay positive; the initial guess
    solves the susceptance at the two band ends for L and C and takes R
    from Re Za at the resonance.  The residual is the relative RMS
    |Z_model - Za| / |Za|.
    """
    za = np.asarray(za, dtype=np.complex128)
    f = np.asarray(f, dtype=np.float64)
    if f.size < 8:
        raise InvalidParameterError("need at least 8 frequency points")
    x = za.imag
    flips = np.nonzero(np.diff(np.signbit(x)))[0]
    if not flips.size:
        raise FitError("Im Za has no sign change: no resonance to fit")
    m = int(flips[0])
    f_res = _interp_crossing(f[m], f[m + 1], x[m], x[m + 1], 0.0)
    r0 = abs(za[m].real) or 50.0

    y = 1.0 / za
    w_a, w_b = 2.0 * math.pi * f[0], 2.0 * math.pi * f[-1]
    b_a, b_b = y[0].imag, y[-1].imag
    # susceptance B(w) = w*C - 1/(w*L); solve from the two band ends
    l0_guess = c0_guess = None
    a_mat = np.array([[w_a, -1.0 / w_a], [w_b, -1.0 / w_b]])
    try:
        cc, invl = np.linalg.solve(a_mat, np.array([b_a, b_b]))
        if cc > 0.0 and invl > 0.0:
            c0_guess, l0_guess = cc, 1.0 / invl
    except np.linalg.LinAlgError:
        pass
    if c0_guess is None:
        c0_guess = 1.0 / (2.0 * math.pi * f_res * r0)
        l0_guess = 1.0 / ((2.0 * math.pi * f_res) ** 2 * c0_guess)

    scale = np.abs(za)

    def residuals(p):
        model = RlcModel(math.exp(p[0]), math.exp(p[1]), math.exp(p[2]))
        dz = (parallel_rlc_impedance(model, f) - za) / scale
        return np.concatenate([dz.real, dz.imag])

    p0 = np.log([r0, l0_guess, c0_guess])
    sol = least_squares(residuals, p0, method="lm", max_nfev=max_iter * 4)
    if not sol.success and sol.cost > 1e-12:
        raise FitError(f"RLC fit did not converge: {sol.message}")
    model = RlcModel(*np.exp(sol.x))
    resid = math.sqrt(float(np.mean(np.abs(residuals(sol.x)) ** 2) * 2.0))
    return model, resid


def friis_range(p_tx_dbm: float, g_tx_db: float, g_rx_db: float,
                sensitivity_dbm: float, f: float) -> float:
    """Largest distance closing the free-space link budget.

    Solves p_tx + g_tx + g_rx - 20*log10(4*pi*d/lambda) >= sensitivity.
    """
    if f <= 0.0:
        raise InvalidParameterError("f must be positive")
    budget_db = p_tx_dbm + g_tx_db + g_rx_db - sensitivity_dbm
    if budget_db <= 0.0:
        raise NoLinkError(
            f"sensitivity {sensitivity_dbm} dBm exceeds delivered power")
    lam = c0 / f
    return lam / (4.0 * math.pi) * 10.0 ** (budget_db / 20.0)
