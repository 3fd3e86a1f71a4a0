# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Euler path kernel; semantics mirror ``_simcore_py``.

Paths are independent, so the whole chunk loop runs without the GIL; the
scratch ring buffers are reused across paths within a call.
"""

import numpy as np

cimport cython
from libc.math cimport exp, isfinite, pow, sqrt
from libc.stdint cimport int64_t

BACKEND_NAME = "cython"


def simulate_paths(
    double[:, :, ::1] z,
    double[:, ::1] out,
    double dt,
    double s_init,
    double[::1] x_init,
    double[::1] p,
    double[::1] q1,
    double[::1] q2,
    double[::1] bprefL,
    double[::1] bpref1,
    double[::1] bpref2,
    double r,
    double r0,
    double sigma,
    double beta,
    double sigma1,
    double sigma2,
    double rho,
    double a1,
    double a2,
    double theta1,
    double theta2,
    double[:, ::1] coeffs,
    double[::1] alphas,
    int64_t[::1] lags,
    double s_floor,
):
    cdef Py_ssize_t n_paths = z.shape[0]
    cdef Py_ssize_t n_steps = z.shape[2]
    cdef Py_ssize_t path, k, a
    cdef double sdt = sqrt(dt)
    cdef double rho_c = sqrt(1.0 - rho * rho)

    cdef Py_ssize_t[3] L
    cdef double[3] decay, w_old0, w_old1, w_new1, y0
    cdef double al, h
    cdef Py_ssize_t m
    for a in range(3):
        L[a] = lags[a] + 1
        if lags[a] > 0:
            al = alphas[a]
            h = lags[a] * dt
            decay[a] = exp(-al * dt)
            w_old0[a] = exp(-al * h)
            w_old1[a] = exp(-al * (h - dt))
            w_new1[a] = exp(al * dt)
            y0[a] = 0.5 * (exp(-al * h) + 1.0)
            for m in range(1, lags[a]):
                y0[a] += exp(-al * (h - dt * m))
            y0[a] *= dt * x_init[a]
        else:
            decay[a] = w_old0[a] = w_old1[a] = w_new1[a] = 0.0
            y0[a] = 0.0

    buf_arr = np.empty((3, max(L[0], max(L[1], L[2]))), dtype=np.float64)
    cdef double[:, ::1] buf = buf_arr

    cdef double AL = coeffs[0, 0], BL = coeffs[0, 1], CL = coeffs[0, 2]
    cdef double A1 = coeffs[1, 0], B1 = coeffs[1, 1], C1 = coeffs[1, 2]
    cdef double A2 = coeffs[2, 0], B2 = coeffs[2, 1], C2 = coeffs[2, 2]

    cdef double S, XL, X1, X2, YL, Y1, Y2, flag
    cdef double dW1, dW2, dW, Sb, sinv2b, bL, b1, b2
    cdef double bdiffL, bdiff1, bdiff2, ZL, Z1, Z2, e1, e2, pk
    cdef double newS, newXL, newX1, newX2, old_s, new_s

    with nogil:
        for path in range(n_paths):
            S = s_init
            XL = x_init[0]
            X1 = x_init[1]
            X2 = x_init[2]
            YL = y0[0]
            Y1 = y0[1]
            Y2 = y0[2]
            flag = 0.0
            for a in range(3):
                for m in range(L[a]):
                    buf[a, m] = x_init[a]

            for k in range(n_steps):
                dW1 = sdt * z[path, 0, k]
                dW2 = sdt * (rho * z[path, 0, k] + rho_c * z[path, 1, k])
                dW = sdt * z[path, 2, k]

                Sb = pow(S, beta)
                sinv2b = 1.0 / (Sb * Sb)
                bL = bprefL[k] * sinv2b
                b1 = bpref1[k] * sinv2b
                b2 = bpref2[k] * sinv2b
                bdiffL = bprefL[k] * sigma / Sb
                bdiff1 = bpref1[k] * sigma / Sb
                bdiff2 = bpref2[k] * sigma / Sb

                ZL = buf[0, k % L[0]] if lags[0] > 0 else XL
                Z1 = buf[1, k % L[1]] if lags[1] > 0 else X1
                Z2 = buf[2, k % L[2]] if lags[2] > 0 else X2

                e1 = 1.0 - q1[k]
                e2 = 1.0 - q2[k]
                pk = p[k]

                newS = S * exp((r - 0.5 * sigma * sigma * Sb * Sb) * dt
                               + sigma * Sb * dW)
                if not (newS > s_floor and isfinite(newS)):
                    flag = 1.0
                    newS = s_floor

                newXL = XL + ((pk - a1) * e1 + (pk - a2) * e2 + AL * XL
                              + (r - r0) * bL + BL * YL + CL * ZL) * dt \
                    + e1 * sigma1 * dW1 + e2 * sigma2 * dW2 + bdiffL * dW
                newX1 = X1 + (theta1 * a1 - (pk - a1) * e1 + A1 * X1
                              + B1 * Y1 + C1 * Z1 + (r - r0) * b1) * dt \
                    + q1[k] * sigma1 * dW1 + bdiff1 * dW
                newX2 = X2 + (theta2 * a2 - (pk - a2) * e2 + A2 * X2
                              + B2 * Y2 + C2 * Z2 + (r - r0) * b2) * dt \
                    + q2[k] * sigma2 * dW2 + bdiff2 * dW

                if lags[0] > 0:
                    old_s = 0.5 * dt * (w_old0[0] * buf[0, k % L[0]]
                                        + w_old1[0] * buf[0, (k + 1) % L[0]])
                    new_s = 0.5 * dt * (XL + w_new1[0] * newXL)
                    YL = decay[0] * (YL - old_s + new_s)
                    buf[0, k % L[0]] = newXL
                if lags[1] > 0:
                    old_s = 0.5 * dt * (w_old0[1] * buf[1, k % L[1]]
                                        + w_old1[1] * buf[1, (k + 1) % L[1]])
                    new_s = 0.5 * dt * (X1 + w_new1[1] * newX1)
                    Y1 = decay[1] * (Y1 - old_s + new_s)
                    buf[1, k % L[1]] = newX1
                if lags[2] > 0:
                    old_s = 0.5 * dt * (w_old0[2] * buf[2, k % L[2]]
                                        + w_old1[2] * buf[2, (k + 1) % L[2]])
                    new_s = 0.5 * dt * (X2 + w_new1[2] * newX2)
                    Y2 = decay[2] * (Y2 - old_s + new_s)
                    buf[2, k % L[2]] = newX2

                XL = newXL
                X1 = newX1
                X2 = newX2
                S = newS

            out[path, 0] = XL
            out[path, 1] = X1
            out[path, 2] = X2
            out[path, 3] = YL
            out[path, 4] = Y1
            out[path, 5] = Y2
            out[path, 6] = S
            out[path, 7] = flag
