"""Vectorized Gauss-Legendre quadrature with certified (a posteriori) error.

Two entry points are used across the package:

* :func:`adaptive_gauss` -- bulk-bisection adaptive rule on a finite interval.
  Every round evaluates the integrand once on all active panels, so the
  integrand must accept numpy arrays.
* :func:`graded_integral` -- integrals of functions with an integrable
  (logarithmic or power) singularity at the left endpoint.  The integrand is
  called with the *distance* to the singular point, which keeps offsets of
  size ``1e-40`` exact instead of losing them to ``x = a + s`` rounding.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import QuadratureFailure

ArrayFunc = Callable[[np.ndarray], np.ndarray]


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``n``-point rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def fixed_gauss(f: ArrayFunc, a: float, b: float, n: int = 32):
    """Plain ``n``-point Gauss-Legendre rule on [a, b]."""
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return half * np.dot(w, f(0.5 * (a + b) + half * x))


def _panel_sums(f, lo, hi, n):
    x, w = gauss_legendre(n)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(pts.ravel())).reshape(pts.shape)
    return half * (vals @ w)


def adaptive_gauss(
    f: ArrayFunc,
    a: float,
    b: float,
    tol: float = 1e-10,
    *,
    rtol: float = 0.0,
    order: int = 16,
    breakpoints: Sequence[float] = (),
    initial_panels: int = 1,
    max_panels: int = 200_000,
    raise_on_failure: bool = True,
) -> tuple[complex | float, float]:
    """Integrate ``f`` over [a, b] to absolute tolerance ``tol``.

    Each panel is estimated twice: with one ``order``-point rule and with the
    same rule on its two halves.  The halves' sum is kept and the difference
    is the panel error.  Panels whose error exceeds their share of the
    budget (proportional to width) are bisected; the loop stops once the
    accumulated error fits in ``max(tol, rtol*|value|)``.

    Returns
    -------
    value, error
        ``error`` is the sum of accepted panel error estimates.

    Raises
    ------
    QuadratureFailure
        When the panel budget ``max_panels`` is exhausted first and
        ``raise_on_failure`` is set.
    """
    if b == a:
        return 0.0, 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    cuts = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    edges = np.concatenate(
        [np.linspace(lo, hi, initial_panels + 1)[:-1] for lo, hi in zip(cuts[:-1], cuts[1:])]
        + [np.array([b])]
    )
    lo, hi = edges[:-1], edges[1:]
    total_width = b - a
    value = 0.0
    error = 0.0
    n_panels = len(lo)
    while len(lo):
        mid = 0.5 * (lo + hi)
        coarse = _panel_sums(f, lo, hi, order)
        fine = _panel_sums(f, np.concatenate([lo, mid]), np.concatenate([mid, hi]), order)
        fine = fine[: len(lo)] + fine[len(lo):]
        err = np.abs(fine - coarse)
        budget = max(tol, rtol * abs(value + fine.sum())) - error
        share = max(budget, 0.0) * (hi - lo) / total_width
        done = (err <= share) | (hi - lo <= 8 * np.finfo(float).eps * np.maximum(1.0, np.abs(mid)))
        value = value + fine[done].sum()
        error += float(err[done].sum())
        lo, hi, mid = lo[~done], hi[~done], mid[~done]
        n_panels += len(lo)
        if n_panels > max_panels and len(lo):
            value = value + fine[~done].sum()
            error += float(err[~done].sum())
            if raise_on_failure:
                raise QuadratureFailure(
                    f"adaptive_gauss: {n_panels} panels, error {error:.3e} > tol {tol:.3e}"
                )
            break
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    if error > max(tol, rtol * abs(value)) and raise_on_failure:
        raise QuadratureFailure(f"adaptive_gauss: error {error:.3e} > tol {tol:.3e}")
    return sign * value, error


def graded_integral(
    g: ArrayFunc,
    length: float,
    tol: float = 1e-10,
    *,
    decay: float = 1.0,
    order: int = 16,
    max_segments: int = 400,
    max_panels: int = 200_000,
) -> tuple[complex | float, float]:
    """Integrate ``g(s)`` for ``s`` in (0, length] with a singularity at 0.

    Uses ``s = length * exp(-v)``, so the integrand becomes
    ``g(s) * s`` on ``v`` in [0, inf).  For an integrand behaving like
    ``s**(-beta) * log(1/s)**p`` this decays like ``exp(-(1-beta) v) v**p``,
    which is smooth.  ``decay`` is the expected exponential rate
    (``1 - beta``); the half line is cut into segments of length
    ``8/decay`` and integration stops once two consecutive segments are below
    ``tol/100``.  The remaining tail is bounded geometrically from the ratio
    of the last two segments.
    """
    if length <= 0:
        return 0.0, 0.0

    def h(v):
        s = length * np.exp(-v)
        return g(s) * s

    step = 8.0 / max(decay, 1e-3)
    value = 0.0
    error = 0.0
    start = 0.0
    prev = None
    quiet = 0
    for _ in range(max_segments):
        seg, seg_err = adaptive_gauss(
            h, start, start + step, tol / 20, order=order, max_panels=max_panels
        )
        value = value + seg
        error += seg_err
        start += step
        mag = abs(seg)
        if mag <= tol / 100:
            quiet += 1
        else:
            quiet = 0
        if quiet >= 2:
            if prev is not None and prev > 0 and mag < prev:
                ratio = mag / prev
                error += mag * ratio / (1.0 - ratio)
            else:
                error += mag
            return value, error
        prev = mag
    raise QuadratureFailure(f"graded_integral: tail not converged after v = {start:.1f}")


def kahan_sum(values: np.ndarray) -> float:
    """Compensated sum in index order (deterministic, order-stable)."""
    return math.fsum(np.asarray(values, dtype=float).tolist())
