"""Near-to-far-field transform and radiation-pattern metrics.

Tangential E and H are accumulated as running DFTs on a closed box in the
vacuum gap between the structure and the absorbing boundary.  At a
requested frequency the equivalent currents J = n x H and M = -n x E feed
the radiation-vector integrals, giving the far-field amplitudes

    Ftheta = -(jk/4pi) * (Lphi + eta0*Ntheta)
    Fphi   = +(jk/4pi) * (Ltheta - eta0*Nphi)

where E_far = F * exp(-jkr) / r.  Radiation intensity, directivity, gain
and radiated power all use one spherical quadrature: midpoint in phi
(trapezoid across the duplicated 0/360 column) and sin(theta)-weighted
nodes in theta, so the directivity normalization closes by construction.

Angle convention: theta is the zenith angle from +z, phi the azimuth from
+x; grids are theta 0..180 and phi 0..360 inclusive, default 2 degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import c0, eta0
from .exceptions import EnergyBalanceError, InvalidParameterError
from .grid import FieldState, GridSpec
from .textio import write_csv

DB_FLOOR = 1e-30


def _axes_of(normal_axis: int) -> tuple[int, int]:
    return tuple(a for a in range(3) if a != normal_axis)


@dataclass
class _Face:
    """One box face: geometry plus per-frequency tangential accumulators."""

    normal_axis: int
    sign: int
    plane_node: int
    lo: tuple[int, int]   # transverse cell start (a1, a2)
    hi: tuple[int, int]   # transverse cell stop
    acc_e1: np.ndarray = None  # E along a1, shape (nf, n1, n2+1)
    acc_e2: np.ndarray = None  # E along a2, shape (nf, n1+1, n2)
    acc_h1: np.ndarray = None  # H along a1 averaged onto the plane
    acc_h2: np.ndarray = None


class HuygensSurface:
    """Closed six-face recording box with running DFT accumulators."""

    def __init__(self, grid: GridSpec, frequencies, inset_cells: int = 4,
                 materials=None):
        self.grid = grid
        self.frequencies = np.atleast_1d(np.asarray(frequencies, dtype=np.float64))
        if np.any(self.frequencies <= 0.0):
            raise InvalidParameterError("surface frequencies must be positive")
        if inset_cells < 1:
            raise InvalidParameterError("inset_cells must be >= 1")
        npml = grid.pml_thickness
        dims = (grid.nx, grid.ny, grid.nz)
        self.n0 = tuple(npml + inset_cells for _ in range(3))
        self.n1 = tuple(d - npml - inset_cells for d in dims)
        if any(b - a < 2 for a, b in zip(self.n0, self.n1)):
            raise InvalidParameterError("grid too small for the recording box")
        if materials is not None:
            self._check_containment(materials)
        self.finalized = False
        self._steps = 0
        self.faces = [self._make_face(axis, side)
                      for axis in range(3) for side in (0, 1)]

    def _check_containment(self, m):
        inside = np.zeros(self.grid.shape, dtype=bool)
        inside[self.n0[0]:self.n1[0], self.n0[1]:self.n1[1], self.n0[2]:self.n1[2]] = True
        busy = (m.eps_r > 1.0) | (m.sigma > 0.0)
        if np.any(busy & ~inside):
            raise InvalidParameterError("material structure extends outside the box")
        for mask in (m.pec_x, m.pec_y, m.pec_z):
            hits = np.argwhere(mask)
            if hits.size and (np.any(hits.min(axis=0) < np.array(self.n0)) or
                              np.any(hits.max(axis=0) > np.array(self.n1))):
                raise InvalidParameterError("PEC feature extends outside the box")

    def _make_face(self, axis: int, side: int) -> _Face:
        a1, a2 = _axes_of(axis)
        lo = (self.n0[a1], self.n0[a2])
        hi = (self.n1[a1], self.n1[a2])
        plane = self.n0[axis] if side == 0 else self.n1[axis]
        nf = self.frequencies.size
        n1c, n2c = hi[0] - lo[0], hi[1] - lo[1]
        f = _Face(axis, -1 if side == 0 else 1, plane, lo, hi)
        f.acc_e1 = np.zeros((nf, n1c, n2c + 1), dtype=np.complex128)
        f.acc_e2 = np.zeros((nf, n1c + 1, n2c), dtype=np.complex128)
        f.acc_h1 = np.zeros((nf, n1c + 1, n2c), dtype=np.complex128)
        f.acc_h2 = np.zeros((nf, n1c, n2c + 1), dtype=np.complex128)
        return f

    # E components live on the face plane; tangential H is averaged across
    # the two adjacent half layers onto the plane at accumulation time, and
    # both are interpolated to cell centers at finalization (the DFT is
    # linear, so the order does not matter).
    def _e_slabs(self, state: FieldState, face: _Face):
        comps = (state.Ex, state.Ey, state.Ez)
        a1, a2 = _axes_of(face.normal_axis)
        return (self._plane_slice(comps[a1], face, a1),
                self._plane_slice(comps[a2], face, a2))

    def _h_slabs(self, state: FieldState, face: _Face):
        comps = (state.Hx, state.Hy, state.Hz)
        a1, a2 = _axes_of(face.normal_axis)
        return (self._plane_avg(comps[a1], face, a1),
                self._plane_avg(comps[a2], face, a2))

    def _plane_slice(self, arr, face, tangent_axis):
        a1, a2 = _axes_of(face.normal_axis)
        sl = [None, None, None]
        sl[face.normal_axis] = face.plane_node
        # the tangent E component is edge-centered along itself (cell count)
        # and node-centered along the other tangent (cell count + 1)
        other = a2 if tangent_axis == a1 else a1
        lo, hi = face.lo, face.hi
        sl[tangent_axis] = slice(lo[0 if tangent_axis == a1 else 1],
                                 hi[0 if tangent_axis == a1 else 1])
        sl[other] = slice(lo[0 if other == a1 else 1],
                          hi[0 if other == a1 else 1] + 1)
        return arr[tuple(sl)]

    def _plane_avg(self, arr, face, tangent_axis):
        a1, a2 = _axes_of(face.normal_axis)
        sl = [None, None, None]
        k = face.plane_node
        other = a2 if tangent_axis == a1 else a1
        lo, hi = face.lo, face.hi
        # H tangent is node-centered along itself, edge-centered otherwise
        sl[tangent_axis] = slice(lo[0 if tangent_axis == a1 else 1],
                                 hi[0 if tangent_axis == a1 else 1] + 1)
        sl[other] = slice(lo[0 if other == a1 else 1],
                          hi[0 if other == a1 else 1])
        sa = list(sl)
        sa[face.normal_axis] = k - 1
        sb = list(sl)
        sb[face.normal_axis] = k
        return 0.5 * (arr[tuple(sa)] + arr[tuple(sb)])

    def accumulate(self, state: FieldState):
        """Fold the current step into every face's running DFT.

        Call once per completed solver step; E is weighted at t = n*dt and
        H at its own half-step time (n - 1/2)*dt.
        """
        if self.finalized:
            raise InvalidParameterError("surface already finalized")
        dt = self.grid.dt
        t_e = state.time_index * dt
        t_h = (state.time_index - 0.5) * dt
        w_e = dt * np.exp(-2j * math.pi * self.frequencies * t_e)
        w_h = dt * np.exp(-2j * math.pi * self.frequencies * t_h)
        for face in self.faces:
            e1, e2 = self._e_slabs(state, face)
            h1, h2 = self._h_slabs(state, face)
            for m in range(self.frequencies.size):
                face.acc_e1[m] += w_e[m] * e1
                face.acc_e2[m] += w_e[m] * e2
                face.acc_h1[m] += w_h[m] * h1
                face.acc_h2[m] += w_h[m] * h2
        self._steps += 1

    def finalize(self):
        self.finalized = True
        return self

    def frequency_index(self, f: float) -> int:
        hit = np.nonzero(np.isclose(self.frequencies, f, rtol=1e-9))[0]
        if not hit.size:
            raise InvalidParameterError(
                f"frequency {f} not accumulated; have {list(self.frequencies)}")
        return int(hit[0])

    # -- serialization for re-analysis without re-simulation ---------------

    def save(self, directory):
        from pathlib import Path

        from .textio import write_json
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        for n, face in enumerate(self.faces):
            for name in ("acc_e1", "acc_e2", "acc_h1", "acc_h2"):
                np.save(d / f"face{n}_{name}.npy", getattr(face, name))
        write_json(d / "surface.json", {
            "frequencies_hz": [float(f) for f in self.frequencies],
            "n0": list(self.n0), "n1": list(self.n1),
            "steps": self._steps,
            "grid": {"nx": self.grid.nx, "ny": self.grid.ny, "nz": self.grid.nz,
                     "dx": self.grid.dx, "dy": self.grid.dy, "dz": self.grid.dz,
                     "dt": self.grid.dt, "pml_thickness": self.grid.pml_thickness,
                     "cfl_factor": self.grid.cfl_factor,
                     "face_bc": list(self.grid.face_bc)},
        })

    @classmethod
    def load(cls, directory) -> "HuygensSurface":
        from pathlib import Path

        from .textio import read_json
        d = Path(directory)
        meta = read_json(d / "surface.json")
        g = meta["grid"]
        grid = GridSpec(g["nx"], g["ny"], g["nz"], g["dx"], g["dy"], g["dz"],
                        g["dt"], g["pml_thickness"], g["cfl_factor"],
                        tuple(g["face_bc"]))
        npml = grid.pml_thickness
        inset = meta["n0"][0] - npml
        surf = cls(grid, meta["frequencies_hz"], inset_cells=inset)
        for n, face in enumerate(surf.faces):
            for name in ("acc_e1", "acc_e2", "acc_h1", "acc_h2"):
                setattr(face, name, np.load(d / f"face{n}_{name}.npy"))
        surf._steps = meta["steps"]
        return surf.finalize()


@dataclass
class FarFieldPattern:
    """Far-field amplitudes over the (theta, phi) grid at one frequency."""

    frequency: float
    theta_deg: np.ndarray
    phi_deg: np.ndarray
    e_theta: np.ndarray  # F with E = F*exp(-jkr)/r, shape (ntheta, nphi)
    e_phi: np.ndarray
    p_rad: float
    p_in: float | None = None

    def intensity(self) -> np.ndarray:
        return (np.abs(self.e_theta) ** 2 + np.abs(self.e_phi) ** 2) / (2.0 * eta0)

    def solid_angle_weights(self) -> np.ndarray:
        th = np.radians(self.theta_deg)
        ph = np.radians(self.phi_deg)
        dth = th[1] - th[0]
        dph = ph[1] - ph[0]
        wth = np.sin(th) * dth
        wph = np.full(ph.size, dph)
        wph[0] *= 0.5
        wph[-1] *= 0.5
        return np.outer(wth, wph)


def ntff(surface: HuygensSurface, f: float, theta_deg=None, phi_deg=None,
         p_in: float | None = None) -> FarFieldPattern:
    """Radiation-vector transform of the finalized surface at frequency f."""
    if not surface.finalized:
        raise InvalidParameterError("finalize the surface before ntff")
    m = surface.frequency_index(f)
    grid = surface.grid
    deltas = (grid.dx, grid.dy, grid.dz)
    k = 2.0 * math.pi * f / c0

    theta_deg = np.arange(0.0, 180.0 + 1e-9, 2.0) if theta_deg is None \
        else np.asarray(theta_deg, dtype=np.float64)
    phi_deg = np.arange(0.0, 360.0 + 1e-9, 2.0) if phi_deg is None \
        else np.asarray(phi_deg, dtype=np.float64)
    th = np.radians(theta_deg)
    ph = np.radians(phi_deg)
    cos_ph, sin_ph = np.cos(ph), np.sin(ph)

    center = [0.5 * (a + b) * d for a, b, d in zip(surface.n0, surface.n1, deltas)]

    # collocate currents at face-cell centers once
    face_data = []
    for face in surface.faces:
        a1, a2 = _axes_of(face.normal_axis)
        e1 = 0.5 * (face.acc_e1[m][:, :-1] + face.acc_e1[m][:, 1:])
        e2 = 0.5 * (face.acc_e2[m][:-1, :] + face.acc_e2[m][1:, :])
        h1 = 0.5 * (face.acc_h1[m][:-1, :] + face.acc_h1[m][1:, :])
        h2 = 0.5 * (face.acc_h2[m][:, :-1] + face.acc_h2[m][:, 1:])
        s = float(face.sign)
        # J = n x H, M = -n x E for outward normal s*e_axis; (n, a1, a2)
        # is left-handed for the y-normal faces, hence the parity factor
        s *= 1.0 if face.normal_axis != 1 else -1.0
        j = {a1: -s * h2, a2: s * h1}
        mm = {a1: s * e2, a2: -s * e1}
        u1 = (np.arange(face.lo[0], face.hi[0]) + 0.5) * deltas[a1] - center[a1]
        u2 = (np.arange(face.lo[1], face.hi[1]) + 0.5) * deltas[a2] - center[a2]
        w0 = face.plane_node * deltas[face.normal_axis] - center[face.normal_axis]
        da = deltas[a1] * deltas[a2]
        face_data.append((face, a1, a2, j, mm, u1, u2, w0, da))

    nth, nph = th.size, ph.size
    f_theta = np.zeros((nth, nph), dtype=np.complex128)
    f_phi = np.zeros((nth, nph), dtype=np.complex128)

    sin_th, cos_th = np.sin(th), np.cos(th)
    for it in range(nth):
        st_, ct = sin_th[it], cos_th[it]
        k_dir = (k * st_ * cos_ph, k * st_ * sin_ph, np.full(nph, k * ct))
        n_th = np.zeros(nph, dtype=np.complex128)
        n_ph = np.zeros(nph, dtype=np.complex128)
        l_th = np.zeros(nph, dtype=np.complex128)
        l_ph = np.zeros(nph, dtype=np.complex128)
        for face, a1, a2, j, mm, u1, u2, w0, da in face_data:
            ph1 = np.exp(1j * np.outer(u1, k_dir[a1]))
            ph2 = np.exp(1j * np.outer(u2, k_dir[a2]))
            pn = np.exp(1j * w0 * k_dir[face.normal_axis])

            def surf_int(fq):
                return np.sum(ph1 * (fq @ ph2), axis=0) * pn * da

            s_j = {ax: surf_int(j[ax]) for ax in j}
            s_m = {ax: surf_int(mm[ax]) for ax in mm}
            proj_th = {0: ct * cos_ph, 1: ct * sin_ph, 2: -st_}
            proj_ph = {0: -sin_ph, 1: cos_ph, 2: 0.0}
            for ax in s_j:
                n_th += s_j[ax] * proj_th[ax]
                n_ph += s_j[ax] * proj_ph[ax]
                l_th += s_m[ax] * proj_th[ax]
                l_ph += s_m[ax] * proj_ph[ax]
        f_theta[it] = -(1j * k / (4.0 * math.pi)) * (l_ph + eta0 * n_th)
        f_phi[it] = (1j * k / (4.0 * math.pi)) * (l_th - eta0 * n_ph)

    pat = FarFieldPattern(f, theta_deg, phi_deg, f_theta, f_phi, 0.0, p_in)
    pat.p_rad = float(np.sum(pat.intensity() * pat.solid_angle_weights()))
    return pat


def directivity(pattern: FarFieldPattern) -> np.ndarray:
    """D(theta, phi) in dBi over the pattern grid."""
    if pattern.p_rad <= 0.0:
        raise InvalidParameterError("pattern has no radiated power")
    d = 4.0 * math.pi * pattern.intensity() / pattern.p_rad
    return 10.0 * np.log10(np.maximum(d, DB_FLOOR))


def gain(pattern: FarFieldPattern) -> np.ndarray:
    """G(theta, phi) in dB, normalized by net accepted input power."""
    if pattern.p_in is None or pattern.p_in <= 0.0:
        raise InvalidParameterError("pattern has no positive input power")
    g = 4.0 * math.pi * pattern.intensity() / pattern.p_in
    return 10.0 * np.log10(np.maximum(g, DB_FLOOR))


@dataclass(frozen=True)
class HpbwResult:
    width_deg: float
    open_beam: bool
    peak_angle_deg: float
    cut: str


def _cut_values(pattern: FarFieldPattern, cut):
    """(angles_deg, dB values, label) along a closed plane or cone cut."""
    db = directivity(pattern)
    if isinstance(cut, str):
        if cut == "xz":
            cut = ("elevation", 0.0)
        elif cut == "yz":
            cut = ("elevation", 90.0)
        elif cut.startswith("azimuth"):
            cut = ("azimuth", float(cut.split(":", 1)[1]) if ":" in cut else 90.0)
        else:
            raise InvalidParameterError(f"unknown cut {cut!r}")
    kind, angle = cut
    if kind == "azimuth":
        it = int(np.argmin(np.abs(pattern.theta_deg - angle)))
        # drop the duplicated 360-degree column from the closed circle
        return pattern.phi_deg[:-1], db[it, :-1], f"azimuth:{pattern.theta_deg[it]:g}"
    if kind != "elevation":
        raise InvalidParameterError(f"unknown cut kind {kind!r}")
    ip = int(np.argmin(np.abs(pattern.phi_deg - (angle % 360.0))))
    ipo = int(np.argmin(np.abs(pattern.phi_deg - ((angle + 180.0) % 360.0))))
    # signed zenith: +theta on the phi side, -theta on the opposite side
    ang = np.concatenate([pattern.theta_deg, -pattern.theta_deg[-2:0:-1]])
    val = np.concatenate([db[:, ip], db[-2:0:-1, ipo]])
    return ang, val, f"elevation:{pattern.phi_deg[ip]:g}"


def hpbw(pattern: FarFieldPattern, cut) -> HpbwResult:
    """Half-power beamwidth of the main lobe along a cut.

    The two -3 dB crossings around the cut maximum are located by linear
    interpolation; a side with no crossing yields the open-beam variant
    reporting the full cut span.
    """
    ang, val, label = _cut_values(pattern, cut)
    n = ang.size
    ipk = int(np.argmax(val))
    target = val[ipk] - 3.0
    span = 360.0

    def walk(direction):
        dist = 0.0
        prev_a, prev_v = ang[ipk], val[ipk]
        for s in range(1, n):
            idx = (ipk + direction * s) % n
            a, v = ang[idx], val[idx]
            step = abs(a - prev_a)
            step = min(step, 360.0 - step)
            dist += step
            if v <= target:
                frac = (prev_v - target) / (prev_v - v)
                return dist - step + frac * step
            prev_a, prev_v = a, v
        return None

    left = walk(-1)
    right = walk(+1)
    if left is None or right is None:
        return HpbwResult(span, True, float(ang[ipk]), label)
    return HpbwResult(left + right, False, float(ang[ipk]), label)


def azimuth_ripple(pattern: FarFieldPattern, theta_deg: float) -> float:
    """Max minus min of the pattern (dB) around the phi circle at theta."""
    it = int(np.argmin(np.abs(pattern.theta_deg - theta_deg)))
    db = directivity(pattern)[it, :-1]
    return float(np.max(db) - np.min(db))


@dataclass(frozen=True)
class EfficiencyReport:
    """Multiplicative efficiency decomposition of the radiating system.

    eps_match = 1 - |Gamma|^2 at resonance, eps_cd = P_rad / P_in (combined
    conduction and dielectric), eps_total their product.  A paired run with
    a lossless dielectric splits eps_cd into eps_c * eps_d.
    """

    eps_match: float
    eps_cd: float
    eps_total: float
    eps_c: float | None = None
    eps_d: float | None = None

    def to_json_dict(self) -> dict:
        return {"eps_match": self.eps_match, "eps_cd": self.eps_cd,
                "eps_total": self.eps_total, "eps_c": self.eps_c,
                "eps_d": self.eps_d}


def efficiency_report(p_rad: float, p_in_net: float, gamma_at_resonance,
                      p_rad_lossless: float | None = None) -> EfficiencyReport:
    if p_rad < 0.0 or p_in_net <= 0.0:
        raise InvalidParameterError("powers must be positive")
    if p_rad > p_in_net * (1.0 + 1e-3):
        raise EnergyBalanceError(
            f"P_rad {p_rad} exceeds accepted power {p_in_net}")
    g2 = abs(complex(gamma_at_resonance)) ** 2
    if g2 > 1.0 + 1e-6:
        raise InvalidParameterError("|Gamma| > 1 at resonance")
    eps_match = 1.0 - min(g2, 1.0)
    eps_cd = p_rad / p_in_net
    eps_c = eps_d = None
    if p_rad_lossless is not None:
        if p_rad_lossless <= 0.0:
            raise InvalidParameterError("lossless-run radiated power must be positive")
        eps_d = min(p_rad / p_rad_lossless, 1.0)
        eps_c = eps_cd / eps_d if eps_d > 0.0 else None
    return EfficiencyReport(eps_match, eps_cd, eps_match * eps_cd, eps_c, eps_d)


@dataclass(frozen=True)
class PatternMetrics:
    """Headline numbers extracted from one far-field pattern."""

    frequency_hz: float
    peak_gain_db: float
    peak_theta_deg: float
    peak_phi_deg: float
    peak_directivity_dbi: float
    hpbw_deg: dict
    azimuth_ripple_db: float
    ripple_theta_deg: float
    front_to_back_db: float

    def to_json_dict(self) -> dict:
        return {
            "frequency_hz": self.frequency_hz,
            "peak_gain_db": self.peak_gain_db,
            "peak_theta_deg": self.peak_theta_deg,
            "peak_phi_deg": self.peak_phi_deg,
            "peak_directivity_dbi": self.peak_directivity_dbi,
            "hpbw_deg": dict(self.hpbw_deg),
            "azimuth_ripple_db": self.azimuth_ripple_db,
            "ripple_theta_deg": self.ripple_theta_deg,
            "front_to_back_db": self.front_to_back_db,
        }


def pattern_metrics(pattern: FarFieldPattern, cuts=("xz", "yz", "azimuth:45"),
                    ripple_theta_deg: float = 45.0) -> PatternMetrics:
    g = gain(pattern)
    d = directivity(pattern)
    it, ip = np.unravel_index(int(np.argmax(g)), g.shape)
    widths = {}
    for cut in cuts:
        res = hpbw(pattern, cut)
        widths[res.cut if isinstance(cut, tuple) else cut] = (
            None if res.open_beam else res.width_deg)
    u = pattern.intensity()
    jt = int(np.argmin(np.abs(pattern.theta_deg - (180.0 - pattern.theta_deg[it]))))
    jp = int(np.argmin(np.abs(pattern.phi_deg - ((pattern.phi_deg[ip] + 180.0) % 360.0))))
    f2b = 10.0 * math.log10(max(u[it, ip], DB_FLOOR) / max(u[jt, jp], DB_FLOOR))
    return PatternMetrics(
        pattern.frequency, float(g[it, ip]), float(pattern.theta_deg[it]),
        float(pattern.phi_deg[ip]), float(d[it, ip]), widths,
        azimuth_ripple(pattern, ripple_theta_deg), ripple_theta_deg, f2b)


def write_pattern_csv(pattern: FarFieldPattern, path):
    g = gain(pattern)
    d = directivity(pattern)
    rows = []
    for it, t in enumerate(pattern.theta_deg):
        for ip, p in enumerate(pattern.phi_deg):
            rows.append((t, p, g[it, ip], d[it, ip]))
    write_csv(path, ["theta_deg", "phi_deg", "gain_db", "directivity_dbi"], rows)


def write_cut_csv(pattern: FarFieldPattern, cut, path):
    ang, val, _ = _cut_values(pattern, cut)
    offset = 0.0
    if pattern.p_in is not None and pattern.p_in > 0.0:
        offset = 10.0 * math.log10(pattern.p_rad / pattern.p_in)
    order = np.argsort(ang)
    rows = [(ang[i], val[i] + offset) for i in order]
    write_csv(path, ["angle_deg", "gain_db"], rows)
