# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stencil kernels.

Operation-for-operation mirror of ``reference.py``; compiled with
-ffp-contract=off so both backends produce bit-identical trajectories.
"""

NAME = "compiled"


def update_h(double[:, :, ::1] ex, double[:, :, ::1] ey, double[:, :, ::1] ez,
             double[:, :, ::1] hx, double[:, :, ::1] hy, double[:, :, ::1] hz,
             double dt_mu,
             double[::1] rdx_h, double[::1] rdy_h, double[::1] rdz_h):
    cdef Py_ssize_t nx = hy.shape[0], ny = hx.shape[1], nz = hx.shape[2]
    cdef Py_ssize_t i, j, k
    cdef double t1, t2
    with nogil:
        for i in range(nx + 1):
            for j in range(ny):
                for k in range(nz):
                    t1 = (ez[i, j + 1, k] - ez[i, j, k]) * rdy_h[j]
                    t2 = (ey[i, j, k + 1] - ey[i, j, k]) * rdz_h[k]
                    hx[i, j, k] = hx[i, j, k] - dt_mu * (t1 - t2)
        for i in range(nx):
            for j in range(ny + 1):
                for k in range(nz):
                    t1 = (ex[i, j, k + 1] - ex[i, j, k]) * rdz_h[k]
                    t2 = (ez[i + 1, j, k] - ez[i, j, k]) * rdx_h[i]
                    hy[i, j, k] = hy[i, j, k] - dt_mu * (t1 - t2)
        for i in range(nx):
            for j in range(ny):
                for k in range(nz + 1):
                    t1 = (ey[i + 1, j, k] - ey[i, j, k]) * rdx_h[i]
                    t2 = (ex[i, j + 1, k] - ex[i, j, k]) * rdy_h[j]
                    hz[i, j, k] = hz[i, j, k] - dt_mu * (t1 - t2)


def update_e(double[:, :, ::1] ex, double[:, :, ::1] ey, double[:, :, ::1] ez,
             double[:, :, ::1] hx, double[:, :, ::1] hy, double[:, :, ::1] hz,
             double[:, :, ::1] ca_x, double[:, :, ::1] cb_x,
             double[:, :, ::1] ca_y, double[:, :, ::1] cb_y,
             double[:, :, ::1] ca_z, double[:, :, ::1] cb_z,
             double[::1] rdx_e, double[::1] rdy_e, double[::1] rdz_e):
    cdef Py_ssize_t nx = hy.shape[0], ny = hx.shape[1], nz = hx.shape[2]
    cdef Py_ssize_t i, j, k
    cdef double t1, t2
    with nogil:
        for i in range(nx):
            for j in range(1, ny):
                for k in range(1, nz):
                    t1 = (hz[i, j, k] - hz[i, j - 1, k]) * rdy_e[j]
                    t2 = (hy[i, j, k] - hy[i, j, k - 1]) * rdz_e[k]
                    ex[i, j, k] = ca_x[i, j, k] * ex[i, j, k] + cb_x[i, j, k] * (t1 - t2)
        for i in range(1, nx):
            for j in range(ny):
                for k in range(1, nz):
                    t1 = (hx[i, j, k] - hx[i, j, k - 1]) * rdz_e[k]
                    t2 = (hz[i, j, k] - hz[i - 1, j, k]) * rdx_e[i]
                    ey[i, j, k] = ca_y[i, j, k] * ey[i, j, k] + cb_y[i, j, k] * (t1 - t2)
        for i in range(1, nx):
            for j in range(1, ny):
                for k in range(nz):
                    t1 = (hy[i, j, k] - hy[i - 1, j, k]) * rdx_e[i]
                    t2 = (hx[i, j, k] - hx[i, j - 1, k]) * rdy_e[j]
                    ez[i, j, k] = ca_z[i, j, k] * ez[i, j, k] + cb_z[i, j, k] * (t1 - t2)


def cpml_e_x(double[:, :, ::1] ey, double[:, :, ::1] ez,
             double[:, :, ::1] hy, double[:, :, ::1] hz,
             double[:, :, ::1] cb_y, double[:, :, ::1] cb_z,
             double[:, :, ::1] psi_eyx, double[:, :, ::1] psi_ezx,
             double[::1] be, double[::1] ce, Py_ssize_t offset, double inv_d):
    cdef Py_ssize_t n = be.shape[0]
    cdef Py_ssize_t s, i, j, k
    cdef double d, p
    with nogil:
        for s in range(n):
            i = offset + s
            for j in range(psi_eyx.shape[1]):
                for k in range(psi_eyx.shape[2]):
                    d = (hz[i, j, k] - hz[i - 1, j, k]) * inv_d
                    p = be[s] * psi_eyx[s, j, k]
                    p = p + ce[s] * d
                    psi_eyx[s, j, k] = p
                    ey[i, j, k] = ey[i, j, k] - cb_y[i, j, k] * p
            for j in range(psi_ezx.shape[1]):
                for k in range(psi_ezx.shape[2]):
                    d = (hy[i, j, k] - hy[i - 1, j, k]) * inv_d
                    p = be[s] * psi_ezx[s, j, k]
                    p = p + ce[s] * d
                    psi_ezx[s, j, k] = p
                    ez[i, j, k] = ez[i, j, k] + cb_z[i, j, k] * p


def cpml_e_y(double[:, :, ::1] ex, double[:, :, ::1] ez,
             double[:, :, ::1] hx, double[:, :, ::1] hz,
             double[:, :, ::1] cb_x, double[:, :, ::1] cb_z,
             double[:, :, ::1] psi_exy, double[:, :, ::1] psi_ezy,
             double[::1] be, double[::1] ce, Py_ssize_t offset, double inv_d):
    cdef Py_ssize_t n = be.shape[0]
    cdef Py_ssize_t s, i, j, k
    cdef double d, p
    with nogil:
        for s in range(n):
            j = offset + s
            for i in range(psi_exy.shape[0]):
                for k in range(psi_exy.shape[2]):
                    d = (hz[i, j, k] - hz[i, j - 1, k]) * inv_d
                    p = be[s] * psi_exy[i, s, k]
                    p = p + ce[s] * d
                    psi_exy[i, s, k] = p
                    ex[i, j, k] = ex[i, j, k] + cb_x[i, j, k] * p
            for i in range(psi_ezy.shape[0]):
                for k in range(psi_ezy.shape[2]):
                    d = (hx[i, j, k] - hx[i, j - 1, k]) * inv_d
                    p = be[s] * psi_ezy[i, s, k]
                    p = p + ce[s] * d
                    psi_ezy[i, s, k] = p
                    ez[i, j, k] = ez[i, j, k] - cb_z[i, j, k] * p


def cpml_e_z(double[:, :, ::1] ex, double[:, :, ::1] ey,
             double[:, :, ::1] hx, double[:, :, ::1] hy,
             double[:, :, ::1] cb_x, double[:, :, ::1] cb_y,
             double[:, :, ::1] psi_exz, double[:, :, ::1] psi_eyz,
             double[::1] be, double[::1] ce, Py_ssize_t offset, double inv_d):
    cdef Py_ssize_t n = be.shape[0]
    cdef Py_ssize_t s, i, j, k
    cdef double d, p
    with nogil:
        for s in range(n):
            k = offset + s
            for i in range(psi_exz.shape[0]):
                for j in range(psi_exz.shape[1]):
                    d = (hy[i, j, k] - hy[i, j, k - 1]) * inv_d
                    p = be[s] * psi_exz[i, j, s]
                    p = p + ce[s] * d
                    psi_exz[i, j, s] = p
                    ex[i, j, k] = ex[i, j, k] - cb_x[i, j, k] * p
            for i in range(psi_eyz.shape[0]):
                for j in range(psi_eyz.shape[1]):
                    d = (hx[i, j, k] - hx[i, j, k - 1]) * inv_d
                    p = be[s] * psi_eyz[i, j, s]
                    p = p + ce[s] * d
                    psi_eyz[i, j, s] = p
                    ey[i, j, k] = ey[i, j, k] + cb_y[i, j, k] * p


def cpml_h_x(double[:, :, ::1] ey, double[:, :, ::1] ez,
             double[:, :, ::1] hy, double[:, :, ::1] hz, double dt_mu,
             double[:, :, ::1] psi_hyx, double[:, :, ::1] psi_hzx,
             double[::1] bh, double[::1] ch, Py_ssize_t offset, double inv_d):
    cdef Py_ssize_t n = bh.shape[0]
    cdef Py_ssize_t s, i, j, k
    cdef double d, p
    with nogil:
        for s in range(n):
            i = offset + s
            for j in range(psi_hyx.shape[1]):
                for k in range(psi_hyx.shape[2]):
                    d = (ez[i + 1, j, k] - ez[i, j, k]) * inv_d
                    p = bh[s] * psi_hyx[s, j, k]
                    p = p + ch[s] * d
                    psi_hyx[s, j, k] = p
                    hy[i, j, k] = hy[i, j, k] + dt_mu * p
            for j in range(psi_hzx.shape[1]):
                for k in range(psi_hzx.shape[2]):
                    d = (ey[i + 1, j, k] - ey[i, j, k]) * inv_d
                    p = bh[s] * psi_hzx[s, j, k]
                    p = p + ch[s] * d
                    psi_hzx[s, j, k] = p
                    hz[i, j, k] = hz[i, j, k] - dt_mu * p


def cpml_h_y(double[:, :, ::1] ex, double[:, :, ::1] ez,
             double[:, :, ::1] hx, double[:, :, ::1] hz, double dt_mu,
             double[:, :, ::1] psi_hxy, double[:, :, ::1] psi_hzy,
             double[::1] bh, double[::1] ch, Py_ssize_t offset, double inv_d):
    cdef Py_ssize_t n = bh.shape[0]
    cdef Py_ssize_t s, i, j, k
    cdef double d, p
    with nogil:
        for s in range(n):
            j = offset + s
            for i in range(psi_hxy.shape[0]):
                for k in range(psi_hxy.shape[2]):
                    d = (ez[i, j + 1, k] - ez[i, j, k]) * inv_d
                    p = bh[s] * psi_hxy[i, s, k]
                    p = p + ch[s] * d
                    psi_hxy[i, s, k] = p
                    hx[i, j, k] = hx[i, j, k] - dt_mu * p
            for i in range(psi_hzy.shape[0]):
                for k in range(psi_hzy.shape[2]):
                    d = (ex[i, j + 1, k] - ex[i, j, k]) * inv_d
                    p = bh[s] * psi_hzy[i, s, k]
                    p = p + ch[s] * d
                    psi_hzy[i, s, k] = p
                    hz[i, j, k] = hz[i, j, k] + dt_mu * p


def cpml_h_z(double[:, :, ::1] ex, double[:, :, ::1] ey,
             double[:, :, ::1] hx, double[:, :, ::1] hy, double dt_mu,
             double[:, :, ::1] psi_hxz, double[:, :, ::1] psi_hyz,
             double[::1] bh, double[::1] ch, Py_ssize_t offset, double inv_d):
    cdef Py_ssize_t n = bh.shape[0]
    cdef Py_ssize_t s, i, j, k
    cdef double d, p
    with nogil:
        for s in range(n):
            k = offset + s
            for i in range(psi_hxz.shape[0]):
                for j in range(psi_hxz.shape[1]):
                    d = (ey[i, j, k + 1] - ey[i, j, k]) * inv_d
                    p = bh[s] * psi_hxz[i, j, s]
                    p = p + ch[s] * d
                    psi_hxz[i, j, s] = p
                    hx[i, j, k] = hx[i, j, k] + dt_mu * p
            for i in range(psi_hyz.shape[0]):
                for j in range(psi_hyz.shape[1]):
                    d = (ex[i, j, k + 1] - ex[i, j, k]) * inv_d
                    p = bh[s] * psi_hyz[i, j, s]
                    p = p + ch[s] * d
                    psi_hyz[i, j, s] = p
                    hy[i, j, k] = hy[i, j, k] - dt_mu * p
