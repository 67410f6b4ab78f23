"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The backend is chosen at import time: numba is used when it imports
successfully and the environment variable ``HORIZON_NUMBA`` is not set
to ``0``.  Both implementations are kept importable so they can be
benchmarked and cross-checked against each other (see
``benchmarks/bench_accel.py`` and ``tests/test_accel.py``).
"""

import math
import os

import numpy as np

# exp(x) underflows to 0 below roughly -745; stay clear of inf/0 * nan traps
_LOG_TINY = -740.0
# below this distance from the support edge the bump and all its
# derivatives up to order ~20 underflow in float64
_DELTA_FLOOR = 1e-4


def bump_derivative_values_numpy(u, pk, k):
    """Evaluate P_k(u) * (1-u^2)^(-2k) * exp(-1/(1-u^2)) on an array.

    ``pk`` holds the coefficients of P_k in ascending powers.  Values are
    computed in log space so that the (1-u^2)^(-2k) blow-up never meets
    the exp underflow as inf * 0.
    """
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(u)
    delta = 1.0 - u * u
    inside = delta > _DELTA_FLOOR
    if not np.any(inside):
        return out
    ui = u[inside]
    di = delta[inside]
    p = np.zeros_like(ui)
    for c in pk[::-1]:
        p = p * ui + c
    vals = np.zeros_like(ui)
    nz = p != 0.0
    logv = np.log(np.abs(p[nz])) - 2.0 * k * np.log(di[nz]) - 1.0 / di[nz]
    keep = logv > _LOG_TINY
    v = np.zeros_like(logv)
    v[keep] = np.sign(p[nz][keep]) * np.exp(logv[keep])
    vals[nz] = v
    out[inside] = vals
    return out


def oscillatory_transform_numpy(t_nodes, t_weights, f_vals, omegas, chunk=1024):
    """sum_m w_m f_m exp(-i omega t_m) for each omega, chunked to bound memory."""
    wf = t_weights * f_vals
    out = np.empty(omegas.size, dtype=np.complex128)
    for i in range(0, omegas.size, chunk):
        sl = slice(i, min(i + chunk, omegas.size))
        out[sl] = np.exp(-1j * np.outer(omegas[sl], t_nodes)) @ wf
    return out


HAS_NUMBA = False
NUMBA_ENABLED = False

if os.environ.get("HORIZON_NUMBA", "1") != "0":
    try:
        import numba

        HAS_NUMBA = True
    except ImportError:
        HAS_NUMBA = False

if HAS_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def bump_derivative_values_numba(u, pk, k):  # pragma: no cover - jitted
        n = u.size
        out = np.zeros(n, dtype=np.float64)
        for i in range(n):
            ui = u[i]
            delta = 1.0 - ui * ui
            if delta <= _DELTA_FLOOR:
                continue
            p = 0.0
            for j in range(pk.size - 1, -1, -1):
                p = p * ui + pk[j]
            if p == 0.0:
                continue
            logv = math.log(abs(p)) - 2.0 * k * math.log(delta) - 1.0 / delta
            if logv > _LOG_TINY:
                out[i] = math.copysign(math.exp(logv), p)
        return out

    @numba.njit(cache=True, nogil=True)
    def oscillatory_transform_numba(t_nodes, t_weights, f_vals, omegas):  # pragma: no cover
        out = np.empty(omegas.size, dtype=np.complex128)
        for j in range(omegas.size):
            w = omegas[j]
            acc_re = 0.0
            acc_im = 0.0
            for m in range(t_nodes.size):
                c = t_weights[m] * f_vals[m]
                ph = w * t_nodes[m]
                acc_re += c * math.cos(ph)
                acc_im -= c * math.sin(ph)
            out[j] = complex(acc_re, acc_im)
        return out

    NUMBA_ENABLED = True


def bump_derivative_values(u, pk, k):
    if NUMBA_ENABLED:
        return bump_derivative_values_numba(
            np.ascontiguousarray(u, dtype=np.float64),
            np.ascontiguousarray(pk, dtype=np.float64),
            k,
        )
    return bump_derivative_values_numpy(u, pk, k)


def oscillatory_transform(t_nodes, t_weights, f_vals, omegas):
    if NUMBA_ENABLED:
        return oscillatory_transform_numba(
            np.ascontiguousarray(t_nodes, dtype=np.float64),
            np.ascontiguousarray(t_weights, dtype=np.float64),
            np.ascontiguousarray(f_vals, dtype=np.float64),
            np.ascontiguousarray(omegas, dtype=np.float64),
        )
    return oscillatory_transform_numpy(t_nodes, t_weights, f_vals, omegas)
