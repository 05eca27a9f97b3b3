"""Numba kernels for the fused cubic-nonlinearity integration loop.

Every arithmetic expression here mirrors the numpy implementations in
``model`` and ``integrate`` term for term, in the same association order, so
the fused path and the step-by-step path produce identical floating-point
results. Keep the two in sync when editing either.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def rhs_cubic(x, y, dx, dy, a, b, c, delta, p, alpha):
    """Per-cell right-hand side with the cubic nonlinearity, written into dx/dy."""
    m, n = x.shape
    for i in range(m):
        im1 = i - 1 if i > 0 else m - 1
        ip1 = i + 1 if i < m - 1 else 0
        for k in range(n):
            km1 = k - 1 if k > 0 else n - 1
            kp1 = k + 1 if k < n - 1 else 0
            s = x[i, k]
            lap = x[im1, k] + x[ip1, k] + x[i, km1] + x[i, kp1] - 4.0 * s
            u = 0.0
            if i == 0:
                u += x[m - 1, k] - x[0, k]
            if i == m - 1:
                u += x[0, k] - x[m - 1, k]
            if k == 0:
                u += x[i, n - 1] - x[i, 0]
            if k == n - 1:
                u += x[i, 0] - x[i, n - 1]
            dx[i, k] = a * lap + s * (s - alpha) * (1.0 - s) - b * y[i, k] + p * u
            dy[i, k] = c * s - delta * y[i, k]


@njit(cache=True)
def advance_cubic(x, y, n_steps, dt, a, b, c, delta, p, alpha):
    """Advance (x, y) in place by n_steps classical RK4 steps of size dt."""
    m, n = x.shape
    k1x = np.empty((m, n))
    k1y = np.empty((m, n))
    k2x = np.empty((m, n))
    k2y = np.empty((m, n))
    k3x = np.empty((m, n))
    k3y = np.empty((m, n))
    k4x = np.empty((m, n))
    k4y = np.empty((m, n))
    tx = np.empty((m, n))
    ty = np.empty((m, n))
    for _ in range(n_steps):
        rhs_cubic(x, y, k1x, k1y, a, b, c, delta, p, alpha)
        for i in range(m):
            for k in range(n):
                tx[i, k] = x[i, k] + 0.5 * dt * k1x[i, k]
                ty[i, k] = y[i, k] + 0.5 * dt * k1y[i, k]
        rhs_cubic(tx, ty, k2x, k2y, a, b, c, delta, p, alpha)
        for i in range(m):
            for k in range(n):
                tx[i, k] = x[i, k] + 0.5 * dt * k2x[i, k]
                ty[i, k] = y[i, k] + 0.5 * dt * k2y[i, k]
        rhs_cubic(tx, ty, k3x, k3y, a, b, c, delta, p, alpha)
        for i in range(m):
            for k in range(n):
                tx[i, k] = x[i, k] + dt * k3x[i, k]
                ty[i, k] = y[i, k] + dt * k3y[i, k]
        rhs_cubic(tx, ty, k4x, k4y, a, b, c, delta, p, alpha)
        for i in range(m):
            for k in range(n):
                x[i, k] = x[i, k] + (dt / 6.0) * (k1x[i, k] + 2.0 * k2x[i, k] + 2.0 * k3x[i, k] + k4x[i, k])
                y[i, k] = y[i, k] + (dt / 6.0) * (k1y[i, k] + 2.0 * k2y[i, k] + 2.0 * k3y[i, k] + k4y[i, k])
