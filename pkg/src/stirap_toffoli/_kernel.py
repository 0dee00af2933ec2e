"""Compiled fixed-step RK4 for tridiagonal Hamiltonians."""

import numba
import numpy as np


@numba.njit(cache=True)
def _apply(diag, off, shift, psi, out):
    # out = -i (H - shift) psi for tridiagonal H with upper diagonal `off`
    n = psi.shape[0]
    for a in range(n):
        v = (diag[a] - shift) * psi[a]
        if a > 0:
            v += np.conj(off[a - 1]) * psi[a - 1]
        if a < n - 1:
            v += off[a] * psi[a + 1]
        out[a] = -1j * v


@numba.njit(cache=True)
def rk4_tridiagonal(diag, off, psi0, dt, store_every, shift):
    """Integrate ``i dpsi/dt = (H - shift) psi`` with classical RK4.

    ``diag`` (M, n) and ``off`` (M, n-1) are tabulated on the half-step grid,
    ``M = 2 * steps + 1``; row ``2j`` is time ``t0 + j dt`` and row ``2j+1``
    the midpoint. Returns the states stored every ``store_every`` steps
    (including the initial one) and the running maximum of each population.
    """
    m, n = diag.shape
    steps = (m - 1) // 2
    out = np.empty((steps // store_every + 1, n), np.complex128)
    maxpop = np.empty(n)
    psi = psi0.copy()
    for a in range(n):
        maxpop[a] = psi[a].real ** 2 + psi[a].imag ** 2
    out[0] = psi
    k1 = np.empty(n, np.complex128)
    k2 = np.empty(n, np.complex128)
    k3 = np.empty(n, np.complex128)
    k4 = np.empty(n, np.complex128)
    tmp = np.empty(n, np.complex128)
    s = 1
    h = 0.5 * dt
    for j in range(steps):
        i0 = 2 * j
        _apply(diag[i0], off[i0], shift, psi, k1)
        for a in range(n):
            tmp[a] = psi[a] + h * k1[a]
        _apply(diag[i0 + 1], off[i0 + 1], shift, tmp, k2)
        for a in range(n):
            tmp[a] = psi[a] + h * k2[a]
        _apply(diag[i0 + 1], off[i0 + 1], shift, tmp, k3)
        for a in range(n):
            tmp[a] = psi[a] + dt * k3[a]
        _apply(diag[i0 + 2], off[i0 + 2], shift, tmp, k4)
        for a in range(n):
            psi[a] += dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a])
            p = psi[a].real ** 2 + psi[a].imag ** 2
            if p > maxpop[a]:
                maxpop[a] = p
        if (j + 1) % store_every == 0:
            out[s] = psi
            s += 1
    return out, maxpop
