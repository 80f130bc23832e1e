"""Hot inner loops, with a numba path and a pure-numpy path.

The numba path is used when numba imports cleanly and the environment
variable ``HERALDPY_DISABLE_NUMBA`` is unset or falsy. Both paths are kept
importable under explicit names so tests and benchmarks can compare them.

All reductions are ordered so that results do not depend on the number of
threads numba schedules: rows are summed independently, then the row sums
are added sequentially.
"""

from __future__ import annotations

import os

import numpy as np

_TRUTHY = {"1", "true", "yes", "on"}

try:
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("HERALDPY_DISABLE_NUMBA", "").strip().lower() not in _TRUTHY

# Rows processed per block in the numpy fallbacks; bounds temporaries to ~32 MB.
_BLOCK_ELEMS = 4_000_000


def backend() -> str:
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy reference implementations
# ---------------------------------------------------------------------------


def _sinc_np(z: np.ndarray) -> np.ndarray:
    out = np.ones_like(z)
    nz = z != 0.0
    out[nz] = np.sin(z[nz]) / z[nz]
    return out


def _rows_per_block(n_cols: int) -> int:
    return max(1, _BLOCK_ELEMS // max(n_cols, 1))


def sinc2_double_sum_numpy(x: np.ndarray, a: np.ndarray, s: float) -> float:
    n = x.shape[0]
    row = np.empty(n)
    step = _rows_per_block(n)
    for start in range(0, n, step):
        stop = min(n, start + step)
        z = np.pi * s * (x[start:stop, None] - x[None, :])
        k = _sinc_np(z)
        row[start:stop] = a[start:stop] * np.sum(k * k * a[None, :], axis=1)
    total = 0.0
    for v in row:
        total += v
    return total


def density_fill_numpy(x: np.ndarray, phi: np.ndarray, s: float, scale: float) -> np.ndarray:
    z = np.pi * s * (x[:, None] - x[None, :])
    return scale * _sinc_np(z) * (phi[:, None] * np.conj(phi)[None, :])


def dft_direct_numpy(x: np.ndarray, c: np.ndarray, u: np.ndarray) -> np.ndarray:
    m = u.shape[0]
    out = np.empty(m, dtype=np.complex128)
    step = _rows_per_block(x.shape[0])
    for start in range(0, m, step):
        stop = min(m, start + step)
        phase = np.exp(-2j * np.pi * np.outer(u[start:stop], x))
        out[start:stop] = phase @ c
    return out


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _sinc_nb(z):
        if z == 0.0:
            return 1.0
        return np.sin(z) / z

    @njit(parallel=True, cache=True)
    def sinc2_double_sum_numba(x, a, s):
        n = x.shape[0]
        row = np.empty(n)
        ps = np.pi * s
        for i in prange(n):
            xi = x[i]
            acc = 0.0
            for j in range(n):
                k = _sinc_nb(ps * (xi - x[j]))
                acc += k * k * a[j]
            row[i] = a[i] * acc
        total = 0.0
        for i in range(n):
            total += row[i]
        return total

    @njit(parallel=True, cache=True)
    def density_fill_numba(x, phi, s, scale):
        n = x.shape[0]
        out = np.empty((n, n), dtype=np.complex128)
        ps = np.pi * s
        for i in prange(n):
            pi_ = phi[i]
            for j in range(n):
                out[i, j] = scale * _sinc_nb(ps * (x[i] - x[j])) * (pi_ * np.conj(phi[j]))
        return out

    @njit(parallel=True, cache=True)
    def dft_direct_numba(x, c, u):
        m = u.shape[0]
        n = x.shape[0]
        out = np.empty(m, dtype=np.complex128)
        tp = -2.0 * np.pi
        for k in prange(m):
            uk = u[k]
            re = 0.0
            im = 0.0
            for j in range(n):
                ang = tp * x[j] * uk
                cr = np.cos(ang)
                si = np.sin(ang)
                re += c[j].real * cr - c[j].imag * si
                im += c[j].real * si + c[j].imag * cr
            out[k] = re + 1j * im
        return out

else:  # pragma: no cover
    sinc2_double_sum_numba = sinc2_double_sum_numpy
    density_fill_numba = density_fill_numpy
    dft_direct_numba = dft_direct_numpy


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def sinc2_double_sum(x: np.ndarray, a: np.ndarray, s: float) -> float:
    """Sum of ``a_i a_j sinc^2(pi s (x_i - x_j))`` over all index pairs."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    a = np.ascontiguousarray(a, dtype=np.float64)
    if USE_NUMBA:
        return float(sinc2_double_sum_numba(x, a, float(s)))
    return sinc2_double_sum_numpy(x, a, float(s))


def density_fill(x: np.ndarray, phi: np.ndarray, s: float, scale: float) -> np.ndarray:
    """Matrix ``scale * sinc(pi s (x_i - x_j)) * phi_i * conj(phi_j)``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    phi = np.ascontiguousarray(phi, dtype=np.complex128)
    if USE_NUMBA:
        return density_fill_numba(x, phi, float(s), float(scale))
    return density_fill_numpy(x, phi, float(s), float(scale))


def dft_direct(x: np.ndarray, c: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``psi_k = sum_j c_j exp(-2 pi i x_j u_k)`` by explicit summation."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.complex128)
    u = np.ascontiguousarray(u, dtype=np.float64)
    if USE_NUMBA:
        return dft_direct_numba(x, c, u)
    return dft_direct_numpy(x, c, u)
