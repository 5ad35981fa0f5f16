"""Hot numeric kernels with a numba path and a pure-numpy path.

The numba path is used when numba imports and ``VERTEXQ_NUMBA`` is not set
to ``0``. Both paths compute the same sums in the same order per element, so
results agree to rounding; tests compare them directly.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("VERTEXQ_NUMBA", "1").strip().lower()

try:
    if _FLAG in ("0", "false", "no", "off"):
        raise ImportError("numba disabled by VERTEXQ_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# theta series:  sum_k exp(i pi k^2 tau + 2 i pi k (z + b/2)),  k in kvals
# ---------------------------------------------------------------------------

def theta_series_numpy(z, kvals, tau, shift):
    z = np.asarray(z, dtype=np.complex128).ravel()
    k = np.asarray(kvals, dtype=np.float64)
    quad = np.exp(1j * np.pi * k * k * tau)
    phase = np.exp(2j * np.pi * np.multiply.outer(z + shift, k))
    return phase @ quad


if HAVE_NUMBA:

    @njit(cache=True)
    def _theta_series_nb(z, kvals, tau, shift):
        n = z.shape[0]
        m = kvals.shape[0]
        quad = np.empty(m, dtype=np.complex128)
        for j in range(m):
            quad[j] = np.exp(1j * np.pi * kvals[j] * kvals[j] * tau)
        out = np.zeros(n, dtype=np.complex128)
        for i in range(n):
            w = 2j * np.pi * (z[i] + shift)
            acc = 0j
            for j in range(m):
                acc += np.exp(w * kvals[j]) * quad[j]
            out[i] = acc
        return out

    def theta_series_numba(z, kvals, tau, shift):
        z = np.ascontiguousarray(np.asarray(z, dtype=np.complex128).ravel())
        k = np.ascontiguousarray(np.asarray(kvals, dtype=np.float64))
        return _theta_series_nb(z, k, complex(tau), complex(shift))

    theta_series = theta_series_numba
else:
    theta_series = theta_series_numpy


# ---------------------------------------------------------------------------
# periodic chain trace:  tr_aux  G_N G_{N-1} ... G_1  with a homogeneous grid
# grid[a, b] is the site operator at auxiliary entry (a, b); site N is the
# leftmost tensor factor.
# ---------------------------------------------------------------------------

def chain_trace_numpy(grid, n_sites):
    grid = np.asarray(grid, dtype=np.complex128)
    r0, _, do, di = grid.shape
    acc = grid.copy()
    po, pi = do, di
    for _ in range(1, n_sites):
        acc = np.einsum("acij,cbpq->abipjq", grid, acc).reshape(r0, r0, do * po, di * pi)
        po *= do
        pi *= di
    return np.einsum("aaij->ij", acc)


if HAVE_NUMBA:

    @njit(cache=True)
    def _chain_step_nb(grid, acc):
        r0 = grid.shape[0]
        do = grid.shape[2]
        di = grid.shape[3]
        po = acc.shape[2]
        pi = acc.shape[3]
        out = np.zeros((r0, r0, do * po, di * pi), dtype=np.complex128)
        for a in range(r0):
            for c in range(r0):
                g = grid[a, c]
                if not np.any(g != 0):
                    continue
                for b in range(r0):
                    p = acc[c, b]
                    for i in range(do):
                        for j in range(di):
                            gij = g[i, j]
                            if gij == 0:
                                continue
                            for s in range(po):
                                row = i * po + s
                                for t in range(pi):
                                    out[a, b, row, j * pi + t] += gij * p[s, t]
        return out

    def chain_trace_numba(grid, n_sites):
        grid = np.ascontiguousarray(np.asarray(grid, dtype=np.complex128))
        acc = grid.copy()
        for _ in range(1, n_sites):
            acc = _chain_step_nb(grid, acc)
        return np.einsum("aaij->ij", acc)

    chain_trace = chain_trace_numba
else:
    chain_trace = chain_trace_numpy
