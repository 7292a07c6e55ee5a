"""Adaptive Gauss-Kronrod quadrature.

Integrands are called with 1-D numpy arrays of abscissae and must return
an array of the same shape.
"""

from __future__ import annotations

import heapq
from typing import Callable

import numpy as np

from .errors import QuadratureError

Integrand = Callable[[np.ndarray], np.ndarray]

MAX_DEPTH = 60
MAX_INTERVALS = 20000

# 15-point Kronrod rule and its embedded 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod abscissae (xgk[1], xgk[3], ...).
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5]] = _WG[:3]
_GWEIGHTS[[13, 11, 9]] = _WG[:3]
_GWEIGHTS[7] = _WG[3]


def _kronrod(f: Integrand, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    values = np.asarray(f(mid + half * _NODES), dtype=float)
    if not np.all(np.isfinite(values)):
        raise QuadratureError(f"non-finite integrand on [{a!r}, {b!r}]")
    k15 = half * float(values @ _KWEIGHTS)
    g7 = half * float(values @ _GWEIGHTS)
    return k15, abs(k15 - g7)


def quadrature(f: Integrand, a: float, b: float, tol: float = 1e-10,
               points: tuple[float, ...] = ()) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    The interval with the largest error estimate is bisected until the
    summed estimate falls below ``tol``. ``points`` lists interior
    breakpoints (kinks, jumps) that seed the initial partition.

    Raises:
        QuadratureError: if any interval needs more than 60 bisections or
            shrinks below floating-point resolution, or the partition
            exceeds 20000 subintervals.
    """
    if a == b:
        return 0.0
    if b < a:
        return -quadrature(f, b, a, tol, points)
    edges = sorted({a, b, *(p for p in points if a < p < b)})
    heap = []
    total = 0.0
    err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, e = _kronrod(f, lo, hi)
        total += val
        err += e
        heapq.heappush(heap, (-e, lo, hi, val, 0))
    while err > tol:
        neg_e, lo, hi, val, depth = heapq.heappop(heap)
        if depth >= MAX_DEPTH:
            raise QuadratureError(
                f"no convergence after depth {MAX_DEPTH} (error {err:.3g} > {tol:.3g})")
        mid = 0.5 * (lo + hi)
        if len(heap) >= MAX_INTERVALS:
            raise QuadratureError(
                f"{MAX_INTERVALS} subintervals used (error {err:.3g} > {tol:.3g})")
        if not lo < mid < hi:
            raise QuadratureError(f"interval [{lo!r}, {hi!r}] below floating-point resolution")
        left, el = _kronrod(f, lo, mid)
        right, er = _kronrod(f, mid, hi)
        total += left + right - val
        err += el + er + neg_e
        heapq.heappush(heap, (-el, lo, mid, left, depth + 1))
        heapq.heappush(heap, (-er, mid, hi, right, depth + 1))
    return total


def quadrature_to_infinity(f: Integrand, a: float, tail_scale: float,
                           tol: float = 1e-10) -> float:
    """Integrate ``f`` over ``[a, inf)``.

    Maps ``x = a - tail_scale * log(1 - t)`` onto ``t`` in ``[0, 1)``;
    ``tail_scale`` should be of the order of the integrand's decay length.
    """
    if tail_scale <= 0:
        raise ValueError("tail_scale must be positive")

    def mapped(t):
        one_minus = 1.0 - t
        return f(a - tail_scale * np.log(one_minus)) * (tail_scale / one_minus)

    return quadrature(mapped, 0.0, 1.0, tol)


def quadrature_singular(f: Integrand, a: float, b: float, singularity: float,
                        tol: float = 1e-10, points: tuple[float, ...] = ()) -> float:
    """Integrate ``f`` with an ``(x - a)**-singularity`` blow-up at ``a``.

    Substitutes ``x = a + u**q`` with ``q = 1/(1 - singularity)``, which
    cancels the singular factor exactly. Requires ``0 <= singularity < 1``.
    """
    if not 0.0 <= singularity < 1.0:
        raise ValueError("singularity exponent must lie in [0, 1)")
    q = 1.0 / (1.0 - singularity)

    def mapped(u):
        return f(a + u ** q) * (q * u ** (q - 1.0))

    u_points = tuple((p - a) ** (1.0 - singularity) for p in points if a < p < b)
    return quadrature(mapped, 0.0, (b - a) ** (1.0 - singularity), tol, u_points)


def gauss_legendre(f: Integrand, a: float, b: float, order: int = 64) -> float:
    """Fixed-order Gauss-Legendre rule; for integrands smooth on ``[a, b]``."""
    x, w = _legendre_rule(order)
    half = 0.5 * (b - a)
    return half * float(np.asarray(f(0.5 * (a + b) + half * x)) @ w)


_RULES: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _legendre_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _RULES:
        _RULES[order] = np.polynomial.legendre.leggauss(order)
    return _RULES[order]
