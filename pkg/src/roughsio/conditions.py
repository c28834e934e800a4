"""Integrability conditions on kernels and the L^p index ranges.

The central quantity is the log-power integral

    F(xi) = int_{S^1} |Omega(theta)| ln^p(1 / |theta . xi|) d theta,   p = 1 + alpha,

whose supremum over directions ``xi`` must be finite.  On the circle
``|theta . xi| = |cos(theta - phi)|`` vanishes at ``phi +- pi/2``; the
integral is split at those two angles and each of the four one-sided pieces
is integrated in the graded variable ``v = ln(1/w)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, Overflow
from .kernel import (
    DEFAULT_OVERFLOW_CAP,
    TWO_PI,
    LineKernel,
    SphericalKernel,
    SpikeKernel,
    as_angle,
)
from .parallel import pmap
from .quadrature import graded_integral

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class ConditionReport:
    kernel_id: str
    power: float
    probe_kind: str  # "angle" or "point"
    probes: list[dict]
    sup: float
    argmax: float
    verdict: str  # "bounded" or "overflow"
    tol: float
    refinement_steps: int = 0
    probe_density: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.probe_kind, "value", "error"])
        for p in sorted(self.probes, key=lambda r: r[self.probe_kind]):
            w.writerow([repr(float(p[self.probe_kind])), repr(float(p["value"])), repr(float(p["error"]))])
        return buf.getvalue()


@dataclass(frozen=True)
class IndexRange:
    lower: float
    upper: float
    source: str
    exact_lower: Fraction | None = None
    exact_upper: Fraction | None = None

    @property
    def empty(self) -> bool:
        return not self.lower < self.upper

    def __contains__(self, p: float) -> bool:
        return self.lower < p < self.upper


@dataclass
class BootstrapTrace:
    alpha: float
    rule: str
    p: list[float]
    s: list[float]
    q: list[float]
    iterations: int
    limit: float
    stalled: bool = False


# ------------------------------------------------------------ integrals


def log_power_integral(
    k: SphericalKernel,
    power: float,
    xi,
    tol: float = 1e-10,
    overflow_cap: float = DEFAULT_OVERFLOW_CAP,
) -> tuple[float, float]:
    """``int |Omega(theta)| ln^power(1/|cos(theta - phi)|) d theta`` and its error."""
    if power < 1:
        raise DomainError("power must be >= 1")
    if tol <= 0:
        raise DomainError("tol must be positive")
    phi = as_angle(xi)
    if isinstance(k, SpikeKernel):
        z = (phi + math.pi / 2) / TWO_PI
        val, err = k.abs().log_weight_integral(k.centers - z, power, tol / TWO_PI, periodic=True)
        val, err = TWO_PI * val, TWO_PI * err
    else:
        val = 0.0
        err = 0.0
        for zero in (phi + math.pi / 2, phi + 1.5 * math.pi):
            for side in (1.0, -1.0):
                def g(w, zero=zero, side=side):
                    return np.abs(k(zero + side * w)) * (-np.log(np.sin(w))) ** power

                v, e = graded_integral(g, math.pi / 2, tol / 4, decay=1.0)
                val += float(np.real(v))
                err += e
    if not math.isfinite(val) or val > overflow_cap:
        raise Overflow(f"log-power integral exceeds cap {overflow_cap:g}")
    return val, err


def _probe(k, power, tol, cap, phi):
    try:
        v, e = log_power_integral(k, power, phi, tol, cap)
        return {"angle": phi, "value": v, "error": e, "overflow": False}
    except Overflow:
        return {"angle": phi, "value": math.inf, "error": math.inf, "overflow": True}


def condition_sup_scan(
    k: SphericalKernel,
    power: float,
    M: int = 64,
    tol: float = 1e-9,
    *,
    refine: bool = True,
    angle_tol: float = 1e-6,
    overflow_cap: float = DEFAULT_OVERFLOW_CAP,
) -> ConditionReport:
    """Sup of :func:`log_power_integral` over directions.

    ``M`` uniformly spaced directions, then golden-section search on the
    bracket around the best probe.  The refinement probes are appended to
    the report, so ``sup`` is always the max over listed probes.
    """
    if M < 8:
        raise DomainError("need at least 8 probe directions")
    angles = [TWO_PI * m / M for m in range(M)]
    probes = pmap(lambda phi: _probe(k, power, tol, overflow_cap, phi), angles)
    steps = 0
    if refine and not any(p["overflow"] for p in probes):
        best = max(range(M), key=lambda i: probes[i]["value"])
        a = angles[best] - TWO_PI / M
        b = angles[best] + TWO_PI / M
        cache = {}

        def f(phi):
            if phi not in cache:
                cache[phi] = _probe(k, power, tol, overflow_cap, phi % TWO_PI)
                probes.append(cache[phi])
            return cache[phi]["value"]

        c = b - GOLDEN * (b - a)
        d = a + GOLDEN * (b - a)
        while b - a > angle_tol and steps < 60:
            if f(c) > f(d):
                b = d
            else:
                a = c
            c = b - GOLDEN * (b - a)
            d = a + GOLDEN * (b - a)
            steps += 1
    return _report(k.name, power, "angle", probes, tol, steps, M)


def _report(name, power, kind, probes, tol, steps, density):
    overflow = any(p.get("overflow") for p in probes)
    clean = [{kind: p[kind], "value": p["value"], "error": p["error"]} for p in probes]
    best = max(clean, key=lambda p: p["value"])
    return ConditionReport(
        kernel_id=name,
        power=power,
        probe_kind=kind,
        probes=clean,
        sup=best["value"],
        argmax=best[kind],
        verdict="overflow" if overflow else "bounded",
        tol=tol,
        refinement_steps=steps,
        probe_density=density,
    )


def line_log_power_integral(line: LineKernel, power: float, z: float, tol: float = 1e-10):
    """``int_0^1 |Omega~(x)| ln^power(1/|x - z|) dx``."""
    if isinstance(line.kernel, SpikeKernel):
        k = line.kernel.abs()
        return k.log_weight_integral(k.centers - z, power, tol)
    val = 0.0
    err = 0.0
    for side, length in ((-1.0, z), (1.0, 1.0 - z)):
        if length <= 0:
            continue

        def g(s, side=side):
            return np.abs(line(z + side * s)) * np.log(1.0 / s) ** power

        v, e = graded_integral(g, length, tol / 2, decay=1.0)
        val += float(np.real(v))
        err += e
    return val, err


def condition_line_1000(
    line: LineKernel,
    power: float,
    z_probes: Iterable[float],
    tol: float = 1e-10,
    overflow_cap: float = DEFAULT_OVERFLOW_CAP,
) -> ConditionReport:
    """Sup over ``z`` in [0, 1] of :func:`line_log_power_integral`."""
    if power < 1:
        raise DomainError("power must be >= 1")
    zs = [float(z) for z in z_probes]
    if any(not 0.0 <= z <= 1.0 for z in zs):
        raise DomainError("probe points must lie in [0, 1]")

    def one(z):
        v, e = line_log_power_integral(line, power, z, tol)
        over = not math.isfinite(v) or v > overflow_cap
        return {"point": z, "value": v, "error": e, "overflow": over}

    probes = pmap(one, zs)
    return _report(line.kernel.name, power, "point", probes, tol, 0, len(zs))


# ---------------------------------------------------------------- ranges


def _exact(alpha) -> Fraction:
    if isinstance(alpha, Fraction):
        return alpha
    return Fraction(alpha)


def theorem_ranges(alpha) -> tuple[IndexRange, IndexRange]:
    """Index ranges for T_Omega and for the maximal operator.

    ``((2+a)/(1+a), 2+a)`` and ``(1 + 3/(1+2a), 2(2+a)/3)``; the second is
    empty for ``a <= 1``.  Arithmetic is exact (fractions) and rounded once.
    """
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    a = _exact(alpha)
    lo1, hi1 = (2 + a) / (1 + a), 2 + a
    lo2, hi2 = 1 + Fraction(3) / (1 + 2 * a), 2 * (2 + a) / 3
    return (
        IndexRange(float(lo1), float(hi1), "theorem1", lo1, hi1),
        IndexRange(float(lo2), float(hi2), "theorem2", lo2, hi2),
    )


def bootstrap_sequences(alpha: float, iterations: int = 200, rule: str = "greedy", eta: float = 1e-6) -> BootstrapTrace:
    """Iterate the interpolation bootstrap for the T_Omega range.

    ``1/p_k = 1/q_{k-1} + (1/2 - 1/q_{k-1}) / (1 + alpha)`` and
    ``1/(2 s_k') = 1/2 - 1/q_k`` with ``s_k`` chosen in (p_{k-1}, p_k) by
    ``rule``: ``"midpoint"`` or ``"greedy"`` (``s_k = p_k - eta (p_k - p_{k-1})``).
    Iteration stops early once ``p_k`` no longer increases in floating point
    or no double lies strictly between ``p_{k-1}`` and ``p_k``.
    """
    if iterations < 1:
        raise DomainError("need at least one iteration")
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    if rule not in ("midpoint", "greedy"):
        raise DomainError("rule must be 'midpoint' or 'greedy'")
    if rule == "greedy" and not 0 < eta < 1:
        raise DomainError("eta must be in (0, 1)")
    p, s, q = [2.0], [], [4.0]
    stalled = False
    for _ in range(iterations):
        inv_q = 1.0 / q[-1]
        pk = 1.0 / (inv_q + (0.5 - inv_q) / (1.0 + alpha))
        if not pk > p[-1]:
            stalled = True
            break
        sk = 0.5 * (p[-1] + pk) if rule == "midpoint" else pk - eta * (pk - p[-1])
        if not p[-1] < sk < pk:
            # p_{k-1} and p_k are adjacent doubles; no admissible s_k remains
            stalled = True
            break
        inv_s_conj = 1.0 - 1.0 / sk
        qk = 1.0 / (0.5 - 0.5 * inv_s_conj)
        p.append(pk)
        s.append(sk)
        q.append(qk)
    return BootstrapTrace(alpha, rule, p, s, q, len(p) - 1, max(p), stalled)
