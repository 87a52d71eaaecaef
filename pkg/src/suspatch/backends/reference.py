"""Pure-numpy stencil kernels, the fallback backend.

Every function here mirrors the compiled extension operation for
operation; the two backends must stay bit-identical (the extension builds
with FP contraction disabled for exactly this reason).  Face update order
is fixed by the caller so that overlapping corner corrections round the
same way in both backends.
"""

NAME = "python"


def update_h(ex, ey, ez, hx, hy, hz, dt_mu, rdx_h, rdy_h, rdz_h):
    """Faraday half step over the full grid (no boundary special cases)."""
    hx -= dt_mu * (
        (ez[:, 1:, :] - ez[:, :-1, :]) * rdy_h[None, :, None]
        - (ey[:, :, 1:] - ey[:, :, :-1]) * rdz_h[None, None, :]
    )
    hy -= dt_mu * (
        (ex[:, :, 1:] - ex[:, :, :-1]) * rdz_h[None, None, :]
        - (ez[1:, :, :] - ez[:-1, :, :]) * rdx_h[:, None, None]
    )
    hz -= dt_mu * (
        (ey[1:, :, :] - ey[:-1, :, :]) * rdx_h[:, None, None]
        - (ex[:, 1:, :] - ex[:, :-1, :]) * rdy_h[None, :, None]
    )


def update_e(ex, ey, ez, hx, hy, hz, ca_x, cb_x, ca_y, cb_y, ca_z, cb_z,
             rdx_e, rdy_e, rdz_e):
    """Ampere step on interior edges; wall-tangential E is left untouched."""
    ex[:, 1:-1, 1:-1] = ca_x[:, 1:-1, 1:-1] * ex[:, 1:-1, 1:-1] + cb_x[:, 1:-1, 1:-1] * (
        (hz[:, 1:, 1:-1] - hz[:, :-1, 1:-1]) * rdy_e[None, 1:-1, None]
        - (hy[:, 1:-1, 1:] - hy[:, 1:-1, :-1]) * rdz_e[None, None, 1:-1]
    )
    ey[1:-1, :, 1:-1] = ca_y[1:-1, :, 1:-1] * ey[1:-1, :, 1:-1] + cb_y[1:-1, :, 1:-1] * (
        (hx[1:-1, :, 1:] - hx[1:-1, :, :-1]) * rdz_e[None, None, 1:-1]
        - (hz[1:, :, 1:-1] - hz[:-1, :, 1:-1]) * rdx_e[1:-1, None, None]
    )
    ez[1:-1, 1:-1, :] = ca_z[1:-1, 1:-1, :] * ez[1:-1, 1:-1, :] + cb_z[1:-1, 1:-1, :] * (
        (hy[1:, 1:-1, :] - hy[:-1, 1:-1, :]) * rdx_e[1:-1, None, None]
        - (hx[1:-1, 1:, :] - hx[1:-1, :-1, :]) * rdy_e[None, 1:-1, None]
    )


# CPML corrections.  Slab index s maps to global node index offset + s along
# the face normal.  E corrections add cb*psi with the sign the psi term
# carries in the expanded update; H corrections add dt_mu*psi likewise.

def cpml_e_x(ey, ez, hy, hz, cb_y, cb_z, psi_eyx, psi_ezx, be, ce, offset, inv_d):
    n = be.size
    i0, i1 = offset, offset + n
    d_eyx = (hz[i0:i1, :, :] - hz[i0 - 1:i1 - 1, :, :]) * inv_d
    psi_eyx *= be[:, None, None]
    psi_eyx += ce[:, None, None] * d_eyx
    ey[i0:i1, :, :] -= cb_y[i0:i1, :, :] * psi_eyx
    d_ezx = (hy[i0:i1, :, :] - hy[i0 - 1:i1 - 1, :, :]) * inv_d
    psi_ezx *= be[:, None, None]
    psi_ezx += ce[:, None, None] * d_ezx
    ez[i0:i1, :, :] += cb_z[i0:i1, :, :] * psi_ezx


def cpml_e_y(ex, ez, hx, hz, cb_x, cb_z, psi_exy, psi_ezy, be, ce, offset, inv_d):
    n = be.size
    j0, j1 = offset, offset + n
    d_exy = (hz[:, j0:j1, :] - hz[:, j0 - 1:j1 - 1, :]) * inv_d
    psi_exy *= be[None, :, None]
    psi_exy += ce[None, :, None] * d_exy
    ex[:, j0:j1, :] += cb_x[:, j0:j1, :] * psi_exy
    d_ezy = (hx[:, j0:j1, :] - hx[:, j0 - 1:j1 - 1, :]) * inv_d
    psi_ezy *= be[None, :, None]
    psi_ezy += ce[None, :, None] * d_ezy
    ez[:, j0:j1, :] -= cb_z[:, j0:j1, :] * psi_ezy


def cpml_e_z(ex, ey, hx, hy, cb_x, cb_y, psi_exz, psi_eyz, be, ce, offset, inv_d):
    n = be.size
    k0, k1 = offset, offset + n
    d_exz = (hy[:, :, k0:k1] - hy[:, :, k0 - 1:k1 - 1]) * inv_d
    psi_exz *= be[None, None, :]
    psi_exz += ce[None, None, :] * d_exz
    ex[:, :, k0:k1] -= cb_x[:, :, k0:k1] * psi_exz
    d_eyz = (hx[:, :, k0:k1] - hx[:, :, k0 - 1:k1 - 1]) * inv_d
    psi_eyz *= be[None, None, :]
    psi_eyz += ce[None, None, :] * d_eyz
    ey[:, :, k0:k1] += cb_y[:, :, k0:k1] * psi_eyz


def cpml_h_x(ey, ez, hy, hz, dt_mu, psi_hyx, psi_hzx, bh, ch, offset, inv_d):
    n = bh.size
    i0, i1 = offset, offset + n
    d_hyx = (ez[i0 + 1:i1 + 1, :, :] - ez[i0:i1, :, :]) * inv_d
    psi_hyx *= bh[:, None, None]
    psi_hyx += ch[:, None, None] * d_hyx
    hy[i0:i1, :, :] += dt_mu * psi_hyx
    d_hzx = (ey[i0 + 1:i1 + 1, :, :] - ey[i0:i1, :, :]) * inv_d
    psi_hzx *= bh[:, None, None]
    psi_hzx += ch[:, None, None] * d_hzx
    hz[i0:i1, :, :] -= dt_mu * psi_hzx


def cpml_h_y(ex, ez, hx, hz, dt_mu, psi_hxy, psi_hzy, bh, ch, offset, inv_d):
    n = bh.size
    j0, j1 = offset, offset + n
    d_hxy = (ez[:, j0 + 1:j1 + 1, :] - ez[:, j0:j1, :]) * inv_d
    psi_hxy *= bh[None, :, None]
    psi_hxy += ch[None, :, None] * d_hxy
    hx[:, j0:j1, :] -= dt_mu * psi_hxy
    d_hzy = (ex[:, j0 + 1:j1 + 1, :] - ex[:, j0:j1, :]) * inv_d
    psi_hzy *= bh[None, :, None]
    psi_hzy += ch[None, :, None] * d_hzy
    hz[:, j0:j1, :] += dt_mu * psi_hzy


def cpml_h_z(ex, ey, hx, hy, dt_mu, psi_hxz, psi_hyz, bh, ch, offset, inv_d):
    n = bh.size
    k0, k1 = offset, offset + n
    d_hxz = (ey[:, :, k0 + 1:k1 + 1] - ey[:, :, k0:k1]) * inv_d
    psi_hxz *= bh[None, None, :]
    psi_hxz += ch[None, None, :] * d_hxz
    hx[:, :, k0:k1] += dt_mu * psi_hxz
    d_hyz = (ex[:, :, k0 + 1:k1 + 1] - ex[:, :, k0:k1]) * inv_d
    psi_hyz *= bh[None, None, :]
    psi_hyz += ch[None, None, :] * d_hyz
    hy[:, :, k0:k1] -= dt_mu * psi_hyz
