"""Hot numeric kernels in two interchangeable flavors.

The inner loop of every density-matrix integral evaluates, on a grid of
(Omega rows) x (radial q nodes), the crystal propagation factor Pi and the
transverse weight of the mode kernel.  That work dominates runtime, so it is
compiled with numba when available; a pure-numpy implementation provides the
fallback and the reference for the cross-backend test.

Selection: environment variable ``EOS_HARVEST_BACKEND`` set to ``numba`` or
``numpy``; default is numba when importable, else numpy.
"""

from __future__ import annotations

import os

import numpy as np

_SERIES_CUT = 1e-4  # |c*L| below which the removable-singularity series is used


# --------------------------------------------------------------------------
# numpy reference implementation
# --------------------------------------------------------------------------

def bracket_numpy(c, L):
    """i/c + (1 - exp(i*c*L))/(L*c^2) with a series for small |c*L|."""
    c = np.asarray(c, dtype=complex)
    cl = c * L
    small = np.abs(cl) < _SERIES_CUT
    c_safe = np.where(small, 1.0, c)
    main = 1j / c_safe + (1.0 - np.exp(1j * c_safe * L)) / (L * c_safe**2)
    x = cl
    series = L * (0.5 + x * (1j / 6.0 + x * (-1.0 / 24.0 + x * (
        -1j / 120.0 + x * (1.0 / 720.0 + x * (1j / 5040.0 + x * (-1.0 / 40320.0)))))))
    return np.where(small, series, main)


def kernel_tables_numpy(q, qc2, pref, b, quarter_w2, L):
    """Radial kernel building blocks on an (Omega, q) grid.

    q : (nq,) real radial nodes; qc2, pref : (nw,) complex per-Omega data
    (q_c^2 and E_vac^2 / (4*pi*Re q_c)); b : (nw,) real Omega*n_g/c.
    Returns (Aq, Aq3) with Aq = q*A and Aq3 = q^3*A/q_c^2, where A is the
    q_x-independent part of the transverse kernel.
    """
    qz = np.sqrt(qc2[:, None] - q[None, :] ** 2)
    qz = np.where(qz.imag < 0.0, -qz, qz)
    br = bracket_numpy(qz + b[:, None], L) + bracket_numpy(qz - b[:, None], L)
    pi_fac = br / (L * qz)
    a = pref[:, None] * np.exp(-quarter_w2 * q[None, :] ** 2) * pi_fac
    aq = q[None, :] * a
    aq3 = (q[None, :] ** 3) * a / qc2[:, None]
    return aq, aq3


# --------------------------------------------------------------------------
# numba implementation
# --------------------------------------------------------------------------

try:  # pragma: no cover - exercised only when numba is installed
    import numba

    HAS_NUMBA = True

    @numba.njit(cache=True)
    def _bracket_scalar(c, L):
        cl = c * L
        if abs(cl) < _SERIES_CUT:
            x = cl
            return L * (0.5 + x * (1j / 6.0 + x * (-1.0 / 24.0 + x * (
                -1j / 120.0 + x * (1.0 / 720.0 + x * (
                    1j / 5040.0 + x * (-1.0 / 40320.0)))))))
        return 1j / c + (1.0 - np.exp(1j * cl)) / (L * c * c)

    @numba.njit(cache=True)
    def kernel_tables_numba(q, qc2, pref, b, quarter_w2, L):
        nw = qc2.shape[0]
        nq = q.shape[0]
        aq = np.empty((nw, nq), dtype=np.complex128)
        aq3 = np.empty((nw, nq), dtype=np.complex128)
        for i in range(nw):
            for k in range(nq):
                qz = np.sqrt(qc2[i] - q[k] * q[k])
                if qz.imag < 0.0:
                    qz = -qz
                br = _bracket_scalar(qz + b[i], L) + _bracket_scalar(qz - b[i], L)
                a = pref[i] * np.exp(-quarter_w2 * q[k] * q[k]) * br / (L * qz)
                aq[i, k] = q[k] * a
                aq3[i, k] = q[k] * q[k] * q[k] * a / qc2[i]
        return aq, aq3

except ImportError:  # pragma: no cover
    HAS_NUMBA = False
    kernel_tables_numba = None


def _select():
    forced = os.environ.get("EOS_HARVEST_BACKEND", "").strip().lower()
    if forced == "numpy":
        return "numpy"
    if forced == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("EOS_HARVEST_BACKEND=numba but numba is not importable")
        return "numba"
    return "numba" if HAS_NUMBA else "numpy"


_BACKEND = _select()


def backend_name():
    return _BACKEND


def kernel_tables(q, qc2, pref, b, quarter_w2, L):
    if _BACKEND == "numba":
        return kernel_tables_numba(
            np.ascontiguousarray(q, dtype=np.float64),
            np.ascontiguousarray(qc2, dtype=np.complex128),
            np.ascontiguousarray(pref, dtype=np.complex128),
            np.ascontiguousarray(b, dtype=np.float64),
            float(quarter_w2), float(L))
    return kernel_tables_numpy(q, qc2, pref, b, quarter_w2, L)
