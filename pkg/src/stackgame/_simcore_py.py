"""Vectorized NumPy fallback for the Euler path kernel.

Semantics are identical to the compiled kernel in ``_simcore.pyx``: paths
advance together one time step at a time, each agent keeps a ring buffer of
past wealth for the lagged state, and the integrated-delay state follows an
exponentially discounted trapezoid recursion that telescopes exactly to the
trapezoid recomputation over the buffer.

Wealth follows plain Euler steps; the price follows an Euler step in log
space, which preserves positivity (direct Euler on the level crosses zero
on a percent-level fraction of paths once the level-dependent volatility
grows, purely as a discretization artifact) and is exact when the
volatility exponent is zero.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def simulate_paths(
    z: np.ndarray,
    out: np.ndarray,
    dt: float,
    s_init: float,
    x_init: np.ndarray,
    p: np.ndarray,
    q1: np.ndarray,
    q2: np.ndarray,
    bprefL: np.ndarray,
    bpref1: np.ndarray,
    bpref2: np.ndarray,
    r: float,
    r0: float,
    sigma: float,
    beta: float,
    sigma1: float,
    sigma2: float,
    rho: float,
    a1: float,
    a2: float,
    theta1: float,
    theta2: float,
    coeffs: np.ndarray,
    alphas: np.ndarray,
    lags: np.ndarray,
    s_floor: float,
) -> None:
    """Advance ``z.shape[0]`` paths over ``z.shape[2]`` steps.

    ``coeffs`` is the 3x3 array of capital-flow coefficients (rows L, 1, 2;
    columns A, B, C); ``alphas`` the averaging rates; ``lags`` the integer
    delay lengths in steps.  Results land in ``out`` with columns
    (X_L, X_1, X_2, Y_L, Y_1, Y_2, S, flagged).
    """
    n_paths, _, n_steps = z.shape
    sdt = np.sqrt(dt)
    rho_c = np.sqrt(1.0 - rho * rho)

    S = np.full(n_paths, s_init)
    X = [np.full(n_paths, x_init[a]) for a in range(3)]
    Y = [np.zeros(n_paths) for _ in range(3)]
    flagged = np.zeros(n_paths)

    L = [int(lags[a]) + 1 for a in range(3)]
    bufs = []
    decay = np.empty(3)
    w_old0 = np.empty(3)
    w_old1 = np.empty(3)
    w_new1 = np.empty(3)
    for a in range(3):
        n_lag = int(lags[a])
        if n_lag > 0:
            al = alphas[a]
            h = n_lag * dt
            bufs.append(np.full((L[a], n_paths), x_init[a]))
            # Y(0): discounted trapezoid over the constant pre-history
            w = np.exp(-al * (h - dt * np.arange(n_lag + 1)))
            w[0] *= 0.5
            w[-1] *= 0.5
            Y[a][:] = x_init[a] * dt * w.sum()
            decay[a] = np.exp(-al * dt)
            w_old0[a] = np.exp(-al * h)
            w_old1[a] = np.exp(-al * (h - dt))
            w_new1[a] = np.exp(al * dt)
        else:
            bufs.append(None)
            decay[a] = w_old0[a] = w_old1[a] = w_new1[a] = 0.0

    AL, BL, CL = coeffs[0]
    A1, B1, C1 = coeffs[1]
    A2, B2, C2 = coeffs[2]

    for k in range(n_steps):
        dW1 = sdt * z[:, 0, k]
        dW2 = sdt * (rho * z[:, 0, k] + rho_c * z[:, 1, k])
        dW = sdt * z[:, 2, k]

        Sb = S ** beta
        sinv2b = 1.0 / (Sb * Sb)
        bL = bprefL[k] * sinv2b
        b1 = bpref1[k] * sinv2b
        b2 = bpref2[k] * sinv2b
        bdiffL = bprefL[k] * sigma / Sb
        bdiff1 = bpref1[k] * sigma / Sb
        bdiff2 = bpref2[k] * sigma / Sb

        Z = [
            bufs[a][k % L[a]] if bufs[a] is not None else X[a]
            for a in range(3)
        ]
        e1 = 1.0 - q1[k]
        e2 = 1.0 - q2[k]
        pk = p[k]

        newS = S * np.exp((r - 0.5 * sigma * sigma * Sb * Sb) * dt
                          + sigma * Sb * dW)
        bad = ~((newS > s_floor) & np.isfinite(newS))
        if bad.any():
            flagged[bad] = 1.0
            newS = np.where(bad, s_floor, newS)

        driftL = ((pk - a1) * e1 + (pk - a2) * e2 + AL * X[0]
                  + (r - r0) * bL + BL * Y[0] + CL * Z[0])
        newXL = X[0] + driftL * dt + e1 * sigma1 * dW1 + e2 * sigma2 * dW2 \
            + bdiffL * dW

        drift1 = (theta1 * a1 - (pk - a1) * e1 + A1 * X[1] + B1 * Y[1]
                  + C1 * Z[1] + (r - r0) * b1)
        newX1 = X[1] + drift1 * dt + q1[k] * sigma1 * dW1 + bdiff1 * dW

        drift2 = (theta2 * a2 - (pk - a2) * e2 + A2 * X[2] + B2 * Y[2]
                  + C2 * Z[2] + (r - r0) * b2)
        newX2 = X[2] + drift2 * dt + q2[k] * sigma2 * dW2 + bdiff2 * dW

        for a, newX in zip(range(3), (newXL, newX1, newX2)):
            buf = bufs[a]
            if buf is not None:
                old_slice = 0.5 * dt * (w_old0[a] * buf[k % L[a]]
                                        + w_old1[a] * buf[(k + 1) % L[a]])
                new_slice = 0.5 * dt * (X[a] + w_new1[a] * newX)
                Y[a] = decay[a] * (Y[a] - old_slice + new_slice)
                buf[k % L[a]] = newX
            X[a] = newX
        S = newS

    out[:, 0] = X[0]
    out[:, 1] = X[1]
    out[:, 2] = X[2]
    out[:, 3] = Y[0]
    out[:, 4] = Y[1]
    out[:, 5] = Y[2]
    out[:, 6] = S
    out[:, 7] = flagged
