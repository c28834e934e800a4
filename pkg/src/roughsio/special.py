"""Upper incomplete gamma function evaluated in log space.

Series for the lower function when ``x < s + 1``, modified-Lentz continued
fraction otherwise (the classical split; both converge fast on their side).
"""

from __future__ import annotations

import math

_TINY = 1e-300


def _lower_series(s: float, x: float, rtol: float, max_iter: int) -> float:
    """ln of gamma(s, x) = int_0^x t^(s-1) e^(-t) dt."""
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(max_iter):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * rtol:
            return -x + s * math.log(x) + math.log(total)
    raise ArithmeticError(f"lower gamma series did not converge (s={s}, x={x})")


def _upper_cf(s: float, x: float, rtol: float, max_iter: int) -> float:
    """ln of Gamma(s, x) by the Legendre continued fraction."""
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, max_iter + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < rtol:
            return -x + s * math.log(x) + math.log(h)
    raise ArithmeticError(f"upper gamma continued fraction did not converge (s={s}, x={x})")


def log_upper_gamma(s: float, x: float, rtol: float = 1e-15, max_iter: int = 10_000) -> float:
    """Return ``ln Gamma(s, x)`` for ``s > 0`` and ``x >= 0``."""
    if s <= 0:
        raise ValueError("s must be positive")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return math.lgamma(s)
    if x < s + 1.0:
        ln_lower = _lower_series(s, x, rtol, max_iter)
        ln_full = math.lgamma(s)
        return ln_full + math.log1p(-math.exp(ln_lower - ln_full))
    return _upper_cf(s, x, rtol, max_iter)


def upper_gamma_q(s: float, x: float) -> float:
    """Regularized ``Q(s, x) = Gamma(s, x) / Gamma(s)``."""
    return math.exp(log_upper_gamma(s, x) - math.lgamma(s))
