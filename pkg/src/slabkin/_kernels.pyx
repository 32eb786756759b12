# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled collision kernels.

Every row ``i`` of the output is owned by exactly one thread and its
contributions are summed in a fixed order, so results do not depend on the
thread count.
"""
import numpy as np

from cython.parallel import prange
from libc.math cimport sqrt, pow, floor, log, fabs, cos, sin


cdef struct Params:
    double c1
    double c2
    double m_a
    double m_b
    double pref
    double beta
    double mu
    double r
    double m_sharp
    double sqrt_n
    double h
    double y0
    double w_vstar
    double w_az
    int n
    int n_pol
    int n_az
    const double* axis
    const double* cos_t
    const double* w_gauss
    const double* b_plus
    const double* b_minus
    const double* cos_p
    const double* sin_p


cdef inline double ramp(double t) noexcept nogil:
    if t <= 0.0:
        return 0.0
    if t >= 1.0:
        return 1.0
    return t * t * (3.0 - 2.0 * t)


cdef inline double dmin(double a, double b) noexcept nogil:
    return a if a < b else b


cdef inline void node_velocity(const Params* P, long i, double* v) noexcept nogil:
    cdef long n = P.n
    v[0] = P.axis[i // (n * n)]
    v[1] = P.axis[(i // n) % n]
    v[2] = P.axis[i % n]


cdef inline long padded_index(const Params* P, long i) noexcept nogil:
    cdef long n = P.n
    cdef long n2 = n + 2
    return ((i // (n * n) + 1) * n2 + (i // n) % n + 1) * n2 + i % n + 1


cdef inline bint locate(const Params* P, const double* c, long* idx, double* wts) noexcept nogil:
    """Corner rows and trilinear weights on the zero-ringed grid."""
    cdef long i0[3]
    cdef double fr[3]
    cdef double t
    cdef int d, dx, dy, dz, m
    cdef long n2 = P.n + 2
    for d in range(3):
        t = (c[d] - P.y0) / P.h
        i0[d] = <long> floor(t)
        if i0[d] < 0 or i0[d] > P.n:
            return 0
        fr[d] = t - i0[d]
    m = 0
    for dx in range(2):
        for dy in range(2):
            for dz in range(2):
                idx[m] = ((i0[0] + dx) * n2 + i0[1] + dy) * n2 + i0[2] + dz
                wts[m] = ((fr[0] if dx else 1.0 - fr[0])
                          * (fr[1] if dy else 1.0 - fr[1])
                          * (fr[2] if dz else 1.0 - fr[2]))
                m += 1
    return 1


cdef inline double pair_frame(const Params* P, const double* v, const double* vs,
                              double* u, double* e1, double* e2, double* gn,
                              double* kmag) noexcept nogil:
    """Relative-velocity frame; returns the energy ramp and stores ``pref |g|^beta`` in ``kmag``."""
    cdef double g[3]
    cdef double s, dot, en, e
    cdef int d
    for d in range(3):
        g[d] = v[d] - vs[d]
    gn[0] = sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2])
    kmag[0] = 0.0
    if gn[0] == 0.0:
        return 0.0
    for d in range(3):
        u[d] = g[d] / gn[0]
    if fabs(u[0]) > 0.9:
        e1[0] = 0.0
        e1[1] = 1.0
    else:
        e1[0] = 1.0
        e1[1] = 0.0
    e1[2] = 0.0
    dot = e1[0] * u[0] + e1[1] * u[1]
    for d in range(3):
        e1[d] = e1[d] - dot * u[d]
    s = sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2])
    for d in range(3):
        e1[d] = e1[d] / s
    e2[0] = u[1] * e1[2] - u[2] * e1[1]
    e2[1] = u[2] * e1[0] - u[0] * e1[2]
    e2[2] = u[0] * e1[1] - u[1] * e1[0]
    en = 2.0 * (P.m_a * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
                + P.m_b * (vs[0] * vs[0] + vs[1] * vs[1] + vs[2] * vs[2])) / (P.m_a + P.m_b)
    e = ramp((P.sqrt_n - en) / (0.5 * P.sqrt_n))
    kmag[0] = P.pref * pow(gn[0], P.beta)
    return e


cdef inline double polar_weight(const Params* P, int jp, double kmag, double eramp) noexcept nogil:
    """Angular cutoff times capped kernel summed over the node and its mirror."""
    cdef double ct = P.cos_t[jp]
    cdef double m2 = 2.0 * P.m_sharp
    cdef double low = ramp((ct - 0.5 / P.m_sharp) * m2)
    cdef double high = ramp(((1.0 - 0.5 / P.m_sharp) - ct) * m2)
    if low == 0.0 or high == 0.0:
        return 0.0
    return low * high * eramp * (dmin(kmag * P.b_plus[jp], P.mu) + dmin(kmag * P.b_minus[jp], P.mu)) \
        * P.w_gauss[jp] * P.w_az * P.w_vstar


cdef inline double collide(const Params* P, int jp, int q, const double* v, const double* vs,
                           const double* u, const double* e1, const double* e2, double gn,
                           double* vp, double* vsp) noexcept nogil:
    """Post-collision velocities for one sphere node; returns the cutoff ``chi``."""
    cdef double ct = P.cos_t[jp]
    cdef double st = sqrt(1.0 - ct * ct)
    cdef double om[3]
    cdef double dot, nrm, qmin, a
    cdef int d
    for d in range(3):
        om[d] = ct * u[d] + st * (P.cos_p[q] * e1[d] + P.sin_p[q] * e2[d])
    nrm = sqrt(om[0] * om[0] + om[1] * om[1] + om[2] * om[2])
    for d in range(3):
        om[d] = om[d] / nrm
    dot = (vs[0] - v[0]) * om[0] + (vs[1] - v[1]) * om[1] + (vs[2] - v[2]) * om[2]
    for d in range(3):
        vp[d] = v[d] + P.c1 * dot * om[d]
        vsp[d] = vs[d] - P.c2 * dot * om[d]
    qmin = fabs(v[0])
    a = fabs(vs[0])
    if a < qmin:
        qmin = a
    a = fabs(vp[0])
    if a < qmin:
        qmin = a
    a = fabs(vsp[0])
    if a < qmin:
        qmin = a
    return ramp(P.m_sharp * (qmin - P.r) + 1.0)


cdef void gain_row(const Params* P, const double* fa, const double* fb, long nx,
                   long i, const long* row_ptr, const int* cols, double* out) noexcept nogil:
    cdef double v[3]
    cdef double vs[3]
    cdef double u[3]
    cdef double e1[3]
    cdef double e2[3]
    cdef double vp[3]
    cdef double vsp[3]
    cdef long ia[8]
    cdef long ib[8]
    cdef double wa[8]
    cdef double wb[8]
    cdef double gn, kmag, eramp, wpol, chi, w, a, b
    cdef long idx, k, x
    cdef int jp, q, c
    node_velocity(P, i, v)
    for idx in range(row_ptr[i], row_ptr[i + 1]):
        k = cols[idx]
        node_velocity(P, k, vs)
        eramp = pair_frame(P, v, vs, u, e1, e2, &gn, &kmag)
        if eramp == 0.0:
            continue
        for jp in range(P.n_pol):
            wpol = polar_weight(P, jp, kmag, eramp)
            if wpol == 0.0:
                continue
            for q in range(P.n_az):
                chi = collide(P, jp, q, v, vs, u, e1, e2, gn, vp, vsp)
                w = chi * wpol
                if w == 0.0:
                    continue
                if not locate(P, vp, ia, wa):
                    continue
                if not locate(P, vsp, ib, wb):
                    continue
                for x in range(nx):
                    a = 0.0
                    b = 0.0
                    for c in range(8):
                        a = a + wa[c] * fa[ia[c] * nx + x]
                        b = b + wb[c] * fb[ib[c] * nx + x]
                    out[x] = out[x] + w * a * b


cdef long entropy_row(const Params* P, const double* fa, const double* fb, long nx,
                      long i, const long* row_ptr, const int* cols, double* out,
                      double lfloor) noexcept nogil:
    cdef double v[3]
    cdef double vs[3]
    cdef double u[3]
    cdef double e1[3]
    cdef double e2[3]
    cdef double vp[3]
    cdef double vsp[3]
    cdef long ia[8]
    cdef long ib[8]
    cdef double wa[8]
    cdef double wb[8]
    cdef double gn, kmag, eramp, wpol, chi, w, a, b, xpre, xpost, xpre_f, xpost_f, lo, hi
    cdef long idx, k, x, pi, pk
    cdef long floors = 0
    cdef bint ina, inb
    cdef int jp, q, c
    node_velocity(P, i, v)
    pi = padded_index(P, i)
    for idx in range(row_ptr[i], row_ptr[i + 1]):
        k = cols[idx]
        pk = padded_index(P, k)
        node_velocity(P, k, vs)
        eramp = pair_frame(P, v, vs, u, e1, e2, &gn, &kmag)
        if eramp == 0.0:
            continue
        for jp in range(P.n_pol):
            wpol = polar_weight(P, jp, kmag, eramp)
            if wpol == 0.0:
                continue
            for q in range(P.n_az):
                chi = collide(P, jp, q, v, vs, u, e1, e2, gn, vp, vsp)
                w = chi * wpol
                if w == 0.0:
                    continue
                ina = locate(P, vp, ia, wa)
                inb = locate(P, vsp, ib, wb)
                for x in range(nx):
                    a = 0.0
                    b = 0.0
                    if ina and inb:
                        for c in range(8):
                            a = a + wa[c] * fa[ia[c] * nx + x]
                            b = b + wb[c] * fb[ib[c] * nx + x]
                    xpost = a * b
                    xpre = fa[pi * nx + x] * fb[pk * nx + x]
                    lo = xpre if xpre < xpost else xpost
                    hi = xpre if xpre > xpost else xpost
                    if lo < lfloor and hi > 0.0:
                        floors += 1
                    if xpost < lfloor:
                        xpost_f = lfloor
                    else:
                        xpost_f = xpost
                    if xpre < lfloor:
                        xpre_f = lfloor
                    else:
                        xpre_f = xpre
                    out[x] = out[x] + w * (xpost - xpre) * log(xpost_f / xpre_f)
    return floors


cdef void loss_row(const Params* P, long i, const long* row_ptr, const int* cols,
                   double* vals) noexcept nogil:
    cdef double v[3]
    cdef double vs[3]
    cdef double u[3]
    cdef double e1[3]
    cdef double e2[3]
    cdef double vp[3]
    cdef double vsp[3]
    cdef double gn, kmag = 0.0, eramp, wpol, acc
    cdef long idx, k
    cdef int jp, q
    node_velocity(P, i, v)
    for idx in range(row_ptr[i], row_ptr[i + 1]):
        k = cols[idx]
        node_velocity(P, k, vs)
        acc = 0.0
        eramp = pair_frame(P, v, vs, u, e1, e2, &gn, &kmag)
        if eramp != 0.0:
            for jp in range(P.n_pol):
                wpol = polar_weight(P, jp, kmag, eramp)
                if wpol == 0.0:
                    continue
                for q in range(P.n_az):
                    acc = acc + collide(P, jp, q, v, vs, u, e1, e2, gn, vp, vsp) * wpol
        vals[idx] = acc


cdef Params make_params(p, list keep):
    cdef Params P
    cdef const double[::1] axis = np.ascontiguousarray(p.axis, dtype=np.float64)
    cdef const double[::1] cos_t = np.ascontiguousarray(p.cos_t, dtype=np.float64)
    cdef const double[::1] w_gauss = np.ascontiguousarray(p.w_gauss, dtype=np.float64)
    cdef const double[::1] b_plus = np.ascontiguousarray(p.b_plus, dtype=np.float64)
    cdef const double[::1] b_minus = np.ascontiguousarray(p.b_minus, dtype=np.float64)
    cdef const double[::1] cos_p = np.ascontiguousarray(p.cos_p, dtype=np.float64)
    cdef const double[::1] sin_p = np.ascontiguousarray(p.sin_p, dtype=np.float64)
    keep.extend([axis, cos_t, w_gauss, b_plus, b_minus, cos_p, sin_p])
    P.c1 = p.c1
    P.c2 = p.c2
    P.m_a = p.m_a
    P.m_b = p.m_b
    P.pref = p.pref
    P.beta = p.beta
    P.mu = p.mu
    P.r = p.r
    P.m_sharp = p.m_sharp
    P.sqrt_n = p.sqrt_n
    P.h = p.h
    P.y0 = p.axis[0] - p.h
    P.w_vstar = p.w_vstar
    P.w_az = p.w_az
    P.n = p.n
    P.n_pol = len(p.cos_t)
    P.n_az = len(p.cos_p)
    P.axis = &axis[0]
    P.cos_t = &cos_t[0]
    P.w_gauss = &w_gauss[0]
    P.b_plus = &b_plus[0]
    P.b_minus = &b_minus[0]
    P.cos_p = &cos_p[0]
    P.sin_p = &sin_p[0]
    return P


def gain_rows(p, const double[:, ::1] fa_pad, const double[:, ::1] fb_pad,
              const long[::1] rows, const long[::1] row_ptr, const int[::1] cols,
              double[:, ::1] out, int num_threads=0):
    cdef list keep = []
    cdef Params P = make_params(p, keep)
    cdef long nrows = rows.shape[0]
    cdef long nx = fa_pad.shape[1]
    cdef long r
    if nrows == 0 or cols.shape[0] == 0:
        return
    cdef const double* fa = &fa_pad[0, 0]
    cdef const double* fb = &fb_pad[0, 0]
    cdef double* o = &out[0, 0]
    cdef const long* rp = &row_ptr[0]
    cdef const int* cl = &cols[0]
    cdef const long* rw = &rows[0]
    if num_threads <= 0:
        for r in prange(nrows, nogil=True, schedule="dynamic"):
            gain_row(&P, fa, fb, nx, rw[r], rp, cl, o + r * nx)
    else:
        for r in prange(nrows, nogil=True, schedule="dynamic", num_threads=num_threads):
            gain_row(&P, fa, fb, nx, rw[r], rp, cl, o + r * nx)


def entropy_rows(p, const double[:, ::1] fa_pad, const double[:, ::1] fb_pad,
                 const long[::1] rows, const long[::1] row_ptr, const int[::1] cols,
                 double[:, ::1] out, double lfloor, int num_threads=0):
    cdef list keep = []
    cdef Params P = make_params(p, keep)
    cdef long nrows = rows.shape[0]
    cdef long nx = fa_pad.shape[1]
    cdef long r
    if nrows == 0 or cols.shape[0] == 0:
        return 0
    counts = np.zeros(nrows, dtype=np.int64)
    cdef long[::1] cnt = counts
    cdef const double* fa = &fa_pad[0, 0]
    cdef const double* fb = &fb_pad[0, 0]
    cdef double* o = &out[0, 0]
    cdef const long* rp = &row_ptr[0]
    cdef const int* cl = &cols[0]
    cdef const long* rw = &rows[0]
    if num_threads <= 0:
        for r in prange(nrows, nogil=True, schedule="dynamic"):
            cnt[r] = entropy_row(&P, fa, fb, nx, rw[r], rp, cl, o + r * nx, lfloor)
    else:
        for r in prange(nrows, nogil=True, schedule="dynamic", num_threads=num_threads):
            cnt[r] = entropy_row(&P, fa, fb, nx, rw[r], rp, cl, o + r * nx, lfloor)
    return int(counts.sum())


def loss_weights(p, const long[::1] row_ptr, const int[::1] cols, int num_threads=0):
    cdef list keep = []
    cdef Params P = make_params(p, keep)
    cdef long nv = row_ptr.shape[0] - 1
    cdef long i
    vals_arr = np.zeros(cols.shape[0], dtype=np.float64)
    if cols.shape[0] == 0:
        return vals_arr
    cdef double[::1] vals = vals_arr
    cdef double* vp = &vals[0]
    cdef const long* rp = &row_ptr[0]
    cdef const int* cl = &cols[0]
    if num_threads <= 0:
        for i in prange(nv, nogil=True, schedule="dynamic"):
            loss_row(&P, i, rp, cl, vp)
    else:
        for i in prange(nv, nogil=True, schedule="dynamic", num_threads=num_threads):
            loss_row(&P, i, rp, cl, vp)
    return vals_arr
