# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops over group elements (see wpc.kernels for the contract)."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def series_sums(const double complex[::1] a, const double complex[::1] b,
                const unsigned char[::1] shell, const double complex[::1] z):
    cdef Py_ssize_t n = a.shape[0], m = z.shape[0], i, k
    cdef double zr, zi, br, bi, qr, qi, s, ur, ui, vr, vi, tr, ti, acc_abs, acc_shell
    theta = np.zeros(m, dtype=np.complex128)
    absum = np.zeros(m, dtype=np.float64)
    shellsum = np.zeros(m, dtype=np.float64)
    cdef double complex[::1] th = theta
    cdef double[::1] ab = absum
    cdef double[::1] sh = shellsum
    with nogil:
        for k in range(m):
            zr = z[k].real
            zi = z[k].imag
            tr = 0.0
            ti = 0.0
            acc_abs = 0.0
            acc_shell = 0.0
            for i in range(n):
                br = b[i].real
                bi = b[i].imag
                # q = conj(b) z + conj(a)
                qr = br * zr + bi * zi + a[i].real
                qi = br * zi - bi * zr - a[i].imag
                s = 1.0 / (qr * qr + qi * qi)
                # u = 1/q, v = u^2, term = v^2 = q^-4
                ur = qr * s
                ui = -qi * s
                vr = ur * ur - ui * ui
                vi = 2.0 * ur * ui
                tr += vr * vr - vi * vi
                ti += 2.0 * vr * vi
                s = s * s
                acc_abs += s
                acc_shell += s * shell[i]
            th[k] = tr + 1j * ti
            ab[k] = acc_abs
            sh[k] = acc_shell
    return theta, absum, shellsum


def image_min(const double complex[::1] a, const double complex[::1] b,
              const double complex[::1] z):
    cdef Py_ssize_t n = a.shape[0], m = z.shape[0], i, k, best_i
    cdef double zr, zi, pr, pi_, qr, qi, val, best
    minval = np.empty(m, dtype=np.float64)
    argmin = np.empty(m, dtype=np.int64)
    cdef double[::1] mv = minval
    cdef long long[::1] am = argmin
    with nogil:
        for k in range(m):
            zr = z[k].real
            zi = z[k].imag
            best = 2.0
            best_i = -1
            for i in range(n):
                # p = a z + b, q = conj(b) z + conj(a)
                pr = a[i].real * zr - a[i].imag * zi + b[i].real
                pi_ = a[i].real * zi + a[i].imag * zr + b[i].imag
                qr = b[i].real * zr + b[i].imag * zi + a[i].real
                qi = b[i].real * zi - b[i].imag * zr - a[i].imag
                val = (pr * pr + pi_ * pi_) / (qr * qr + qi * qi)
                if val < best:
                    best = val
                    best_i = i
            mv[k] = best
            am[k] = best_i
    return minval, argmin
