"""Adaptive Gauss-Kronrod quadrature with batched, vector-valued integrands.

The engine evaluates every pending panel of one refinement round in a single
call of the integrand on a flat node array, which keeps numpy/numba kernels
hot.  Reduction order is fixed (panels sorted by left edge), so identical
inputs give bitwise-identical results on one platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

# Gauss-Kronrod 7-15 rule on [-1, 1] (QUADPACK abscissae/weights)
_XK_HALF = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WK_HALF = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG_HALF = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])

_NODES = np.concatenate([-_XK_HALF[:-1], _XK_HALF[::-1]])          # 15 ascending
_WK = np.concatenate([_WK_HALF[:-1], _WK_HALF[::-1]])
_GAUSS_IDX = np.arange(1, 15, 2)                                    # embedded G7
_WG = np.concatenate([_WG_HALF[:-1], _WG_HALF[::-1]])


@dataclass(frozen=True)
class IntegrationResult:
    """Value, conservative error estimate and integrand-evaluation count."""

    value: complex | np.ndarray
    error_estimate: float | np.ndarray
    evaluations: int


class QuadratureError(RuntimeError):
    """Raised when refinement stalls; carries the best partial result."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


def _eval_panels(f, left, right):
    """GK15 on a batch of panels; returns per-panel K15, |K15-G7| and nevals."""
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    y = np.asarray(f(x))
    if y.shape[-1] != x.size:
        raise ValueError("integrand must return values along the last axis")
    y = y.reshape(y.shape[:-1] + (left.size, 15))
    k15 = np.tensordot(y, _WK, axes=([-1], [0])) * half
    g7 = np.tensordot(y[..., _GAUSS_IDX], _WG, axes=([-1], [0])) * half
    return k15, np.abs(k15 - g7), x.size


def integrate_adaptive(f, a, b, rel_tol=1e-6, abs_tol=1e-14, *,
                       breakpoints=(), initial_panels=1, max_panels=4096,
                       component_floor_rel=1e-10):
    """Adaptively integrate ``f`` over [a, b].

    ``f`` maps a node array of shape (n,) to values of shape (n,) or
    (m, n) for m simultaneous components sharing one refinement.  Known
    awkward points (resonances, branch lines) go in ``breakpoints``;
    oscillatory integrands should come through :func:`oscillation_panels`.

    Each component j is converged when its summed panel error is below
    max(abs_tol, rel_tol*|I_j|, component_floor_rel*rel_tol*max_k|I_k|);
    the floor keeps near-cancelling components from stalling refinement.
    """
    a = float(a)
    b = float(b)
    if not a < b:
        raise ValueError("integrate_adaptive requires a < b")
    if rel_tol <= 0.0 or abs_tol <= 0.0:
        raise ValueError("tolerances must be > 0")

    edges = set(np.linspace(a, b, max(1, int(initial_panels)) + 1))
    edges.update(float(p) for p in breakpoints if a < p < b)
    edges = np.array(sorted(edges))
    left, right = edges[:-1], edges[1:]

    vals, errs, nev = _eval_panels(f, left, right)
    evaluations = nev

    while True:
        order = np.argsort(left, kind="stable")
        total = vals[..., order].sum(axis=-1)
        err_comp = errs[..., order].sum(axis=-1)
        scale = np.abs(np.atleast_1d(total))
        tol = np.maximum.reduce([
            np.full_like(scale, abs_tol),
            rel_tol * scale,
            np.full_like(scale, component_floor_rel * scale.max(initial=0.0)),
        ])
        bad = np.atleast_1d(err_comp) > tol
        if not bad.any():
            break
        if left.size >= max_panels:
            raise QuadratureError(
                f"quadrature did not converge within {max_panels} panels "
                f"(error {np.max(np.atleast_1d(err_comp) / tol):.3g}x tolerance)",
                IntegrationResult(total, err_comp, evaluations))

        # split the worst offenders (deterministic tie-break on position)
        panel_badness = (np.atleast_2d(errs) / tol[:, None]).max(axis=0)
        k = min(max(1, left.size // 8), 64, max_panels - left.size)
        pick = np.lexsort((left, -panel_badness))[:k]
        pick = pick[panel_badness[pick] > 0.0]
        if pick.size == 0:
            break

        width = right[pick] - left[pick]
        refinable = width > 1e-14 * (b - a)
        pick = pick[refinable]
        if pick.size == 0:
            raise QuadratureError(
                "quadrature stalled on panels at roundoff width",
                IntegrationResult(total, err_comp, evaluations))

        mid = 0.5 * (left[pick] + right[pick])
        new_left = np.concatenate([left[pick], mid])
        new_right = np.concatenate([mid, right[pick]])
        new_vals, new_errs, nev = _eval_panels(f, new_left, new_right)
        evaluations += nev

        keep = np.ones(left.size, dtype=bool)
        keep[pick] = False
        left = np.concatenate([left[keep], new_left])
        right = np.concatenate([right[keep], new_right])
        vals = np.concatenate([vals[..., keep], new_vals], axis=-1)
        errs = np.concatenate([errs[..., keep], new_errs], axis=-1)

    if np.ndim(total) == 0:
        return IntegrationResult(complex(total), float(err_comp), evaluations)
    return IntegrationResult(total, err_comp, evaluations)


def oscillation_panels(f, a, b, period_hint, nodes_per_period=10, **kwargs):
    """Integrate an oscillatory integrand: fixed panelization with at least
    ``nodes_per_period`` nodes per oscillation, then adaptive refinement.

    ``period_hint = inf`` degenerates to plain :func:`integrate_adaptive`.
    """
    if not period_hint > 0.0:
        raise ValueError("period_hint must be > 0")
    if math.isinf(period_hint):
        n = 1
    else:
        n = max(1, math.ceil((b - a) / period_hint * nodes_per_period / 15.0))
    n = max(n, int(kwargs.pop("initial_panels", 1)))
    return integrate_adaptive(f, a, b, initial_panels=n, **kwargs)


def bessel_j(order, x):
    """Bessel function J_0 or J_2 for x >= 0 (scalar or array).

    Backed by scipy.special; absolute error stays far below the 1e-10
    budget for x <= 1e4 (checked against the integral definition in the
    test suite).
    """
    if order not in (0, 2):
        raise ValueError("bessel_j supports orders 0 and 2 only")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("bessel_j requires x >= 0")
    out = _sp.j0(arr) if order == 0 else _sp.jv(2, arr)
    return out if np.asarray(x).ndim else float(out)
