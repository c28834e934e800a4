"""A spike kernel satisfying every log condition but outside H^1, in log space.

For ``n >= n0 = 10^9``::

    gamma_n = exp(sqrt(ln n))      b_n = exp(-gamma_n)       delta_n = exp(-gamma_n^(1/4))
    a_n = 1/ln n                   c_n = a_n - delta_n       d_n = a_n + delta_n
    lam_n = 1 - beta_n = (ln n + 1.5 ln gamma_n) / gamma_n

and ``Omega~ = sum_n (c_n - x)^(-beta_n) 1_(c_n-b_n, c_n) - (d_n - x)^(-beta_n) 1_(d_n-b_n, d_n)``.
``b_n`` is around ``e^-95`` at ``n0``; it is only ever handled through
``ln b_n``.  Every spike mass has the exact form

    b^lam / lam = 1 / (n gamma^(1/2) (ln n + 1.5 ln gamma)),

and every log moment is an upper incomplete gamma value.

Infinite sums are reported as (partial value, tail bound) pairs.  Tails
use the integral test in ``s = sqrt(ln n)``, where ``dn / (n gamma^(1/2) ln n)``
becomes ``2 e^(-s/2) ds / s``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .kernel import SpikeKernel
from .quadrature import adaptive_gauss, graded_integral, kahan_sum
from .special import log_upper_gamma

N0 = 10**9
MAX_TERMS = 10**7


# ------------------------------------------------------------ parameters


@dataclass(frozen=True)
class SpikeParams:
    n: int
    ln_n: float
    gamma: float
    ln_b: float
    delta: float
    a: float
    c: float
    d: float
    one_minus_beta: float

    @property
    def beta(self) -> float:
        return 1.0 - self.one_minus_beta

    @property
    def ln_mass(self) -> float:
        return spike_ln_mass(self.n)

    @property
    def mass(self) -> float:
        return math.exp(self.ln_mass)

    def to_dict(self) -> dict:
        return asdict(self)


def spike_params(n: int, unsafe: bool = False) -> SpikeParams:
    """Sequence values at index ``n``; ``unsafe`` allows ``n < 10^9`` subject to the support check."""
    n = int(n)
    if n < N0 and not unsafe:
        raise DomainError(f"n = {n} below {N0}; pass unsafe=True to override")
    if n < 3:
        raise DomainError("n must be at least 3")
    ln_n = math.log(n)
    s = math.sqrt(ln_n)
    gamma = math.exp(s)
    delta = math.exp(-(gamma**0.25))
    a = 1.0 / ln_n
    c = a - delta
    d = a + delta
    lam = (ln_n + 1.5 * s) / gamma
    if not 0.0 < lam < 1.0:
        raise DomainError(f"1 - beta = {lam:g} outside (0, 1) at n = {n}")
    # c - b > 0  <=>  ln c > ln b = -gamma
    if not (c > 0 and math.log(c) > -gamma):
        raise DomainError(f"spike support leaves (0, 1) at n = {n}: c - b <= 0")
    if not d < 1:
        raise DomainError(f"d_n >= 1 at n = {n}")
    return SpikeParams(n, ln_n, gamma, -gamma, delta, a, c, d, lam)


def spike_ln_mass(n) -> float | np.ndarray:
    """``ln(b^lam / lam) = -ln n - sqrt(ln n)/2 - ln(ln n + 1.5 sqrt(ln n))``."""
    ln_n = np.log(np.asarray(n, dtype=float))
    s = np.sqrt(ln_n)
    out = -ln_n - 0.5 * s - np.log(ln_n + 1.5 * s)
    return float(out) if out.ndim == 0 else out


def spike_ln_mass_direct(n) -> float:
    """``lam ln b - ln lam`` from the table (the other side of the mass identity)."""
    p = spike_params(n, unsafe=True)
    return p.one_minus_beta * p.ln_b - math.log(p.one_minus_beta)


def spike_mass(n) -> float | np.ndarray:
    m = np.exp(spike_ln_mass(n))
    return float(m) if np.ndim(m) == 0 else m


def spike_ln_log_moment(n: int, power: float) -> float:
    """``ln int_0^b u^-beta ln^power(1/u) du = -(p+1) ln lam + ln Gamma(p+1, lam gamma)``."""
    if power < 0:
        raise DomainError("power must be nonnegative")
    p = spike_params(n, unsafe=n < N0)
    lam = p.one_minus_beta
    return -(power + 1.0) * math.log(lam) + log_upper_gamma(power + 1.0, lam * p.gamma)


def spike_log_moment(n: int, power: float) -> float:
    return math.exp(spike_ln_log_moment(n, power))


def log_moment_generic(ln_b: float, lam: float, power: float) -> float:
    """Same closed form for arbitrary width and exponent."""
    return math.exp(-(power + 1.0) * math.log(lam) + log_upper_gamma(power + 1.0, -lam * ln_b))


def counterexample_kernel(count: int = 1000, n0: int = N0) -> SpikeKernel:
    """The first ``count`` spike pairs (indices ``n0 .. n0+count-1``) as a spike kernel."""
    if count < 1:
        raise DomainError("count must be positive")
    ns = np.arange(n0, n0 + count, dtype=float)
    P = _arrays(ns)
    centers = np.concatenate([P["c"], P["d"]])
    ln_b = np.concatenate([-P["gamma"], -P["gamma"]])
    lam = np.concatenate([P["lam"], P["lam"]])
    signs = np.concatenate([np.ones(count), -np.ones(count)])
    return SpikeKernel(centers, ln_b, lam, signs, name=f"gs-counterexample[{count}]")


def _arrays(ns: np.ndarray) -> dict[str, np.ndarray]:
    ln_n = np.log(ns)
    s = np.sqrt(ln_n)
    gamma = np.exp(s)
    delta = np.exp(-(gamma**0.25))
    a = 1.0 / ln_n
    return {
        "ln_n": ln_n,
        "s": s,
        "gamma": gamma,
        "delta": delta,
        "a": a,
        "c": a - delta,
        "d": a + delta,
        "lam": (ln_n + 1.5 * s) / gamma,
        "ln_mass": -ln_n - 0.5 * s - np.log(ln_n + 1.5 * s),
    }


def _differences(ns: np.ndarray, N: int) -> dict[str, np.ndarray]:
    """``a_n - a_N`` and ``delta_n - delta_N`` without cancellation."""
    ln_N = math.log(N)
    dln = np.log1p((ns - N) / N)  # ln n - ln N
    ln_n = ln_N + dln
    da = -dln / (ln_n * ln_N)
    ds = dln / (np.sqrt(ln_n) + math.sqrt(ln_N))  # sqrt(ln n) - sqrt(ln N)
    gq_N = math.exp(math.sqrt(ln_N) / 4.0)  # gamma_N^(1/4)
    dgq = gq_N * np.expm1(ds / 4.0)
    delta_N = math.exp(-gq_N)
    ddelta = delta_N * np.expm1(-dgq)
    return {"da": da, "ddelta": ddelta, "delta_N": delta_N}


# ---------------------------------------------------------------- budgets


@dataclass
class BudgetPart:
    value: float
    terms: int
    tail_bound: float
    tail_method: str
    included: bool = True


@dataclass
class Budget:
    name: str
    alpha: float
    z_class: str
    N: int | None
    n_max: int
    parts: dict[str, BudgetPart] = field(default_factory=dict)

    @property
    def value(self) -> float:
        return math.fsum(p.value for p in self.parts.values() if p.included)

    @property
    def tail_bound(self) -> float:
        return math.fsum(p.tail_bound for p in self.parts.values() if p.included)

    @property
    def total(self) -> float:
        return self.value + self.tail_bound

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(value=self.value, tail_bound=self.tail_bound, total=self.total)
        return d


def _s_integral(func, s_lo: float, s_hi: float = math.inf, rtol: float = 1e-12) -> float:
    """``int func(s) ds`` on [s_lo, s_hi]; an infinite upper end is cut where func is below 1e-300 relative."""
    if s_hi == math.inf:
        s_hi = s_lo + 1.0
        peak = abs(func(np.array([s_lo])))[0]
        while abs(func(np.array([s_hi])))[0] > 1e-300 * max(peak, 1e-300) and s_hi < 1e6:
            peak = max(peak, abs(func(np.array([s_hi])))[0])
            s_hi = s_lo + 2.0 * (s_hi - s_lo)
    if s_hi <= s_lo:
        return 0.0
    val, _ = adaptive_gauss(func, s_lo, s_hi, 0.0, rtol=rtol, initial_panels=64)
    return float(val)


def harmonic_tail(n_max: float, log_power: float = 0.0, shift: float = 0.0) -> float:
    """Integral-test bound for ``sum_{n>n_max} (ln ln n + shift)^p / (n gamma_n^(1/2) ln n)``.

    With ``s = sqrt(ln n)`` the summand density is ``2 (2 ln s + shift)^p e^(-s/2) / s``.
    Requires the summand to be decreasing beyond ``n_max`` (true for n >= 10^9, p <= 3).
    """
    s0 = math.sqrt(math.log(n_max))
    p = log_power
    return _s_integral(lambda s: 2.0 * np.maximum(2.0 * np.log(s) + shift, 0.0) ** p * np.exp(-s / 2.0) / s, s0)


def _window(n_lo: int, n_hi: int) -> np.ndarray:
    if n_hi < n_lo:
        return np.zeros(0)
    if n_hi - n_lo + 1 > MAX_TERMS:
        raise DomainError(f"more than {MAX_TERMS} terms requested")
    return np.arange(n_lo, n_hi + 1, dtype=float)


def condition1000_partial(alpha: float, z_class: str = "zero", n_max: int = N0 + 10**5, N: int | None = None) -> Budget:
    """Partial sums and tail bounds for ``sup_z int |Omega~| ln^(1+alpha)(1/|x - z|) dx``.

    ``z_class`` selects the worst points: ``"zero"``, ``"cN"`` (``z = c_N``)
    or ``"dN"`` (``z = d_N``), the latter two for ``N`` (default ``10^9``).

    Parts included in the total:

    * ``"zero"``: ``sum ln^p(ln n)/(n gamma^(1/2) ln n)``; tail by the integral test.
    * ``"cN"/"dN"``: ``below`` (n < N) and ``above`` (N < n <= n_max) terms
      ``mass_n ln^p(1/|a_n - a_N|)``, a tail bounded with
      ``|a_n - a_N| >= (N ln^2 N)^-1``, the own spike in closed form
      (``I3``) and the partner spike at distance ``2 delta_N`` (``I4``).

    A ``literal`` part evaluates the spikes at their true positions
    ``c_n, d_n`` over the same index window; it is reported but excluded
    from the total because it has no tail bound.
    """
    if alpha < 0:
        raise DomainError("alpha must be nonnegative")
    if z_class not in ("zero", "cN", "dN"):
        raise DomainError("z_class must be 'zero', 'cN' or 'dN'")
    if n_max < N0 or n_max - N0 > MAX_TERMS:
        raise DomainError(f"n_max must lie in [{N0}, {N0 + MAX_TERMS}]")
    p = 1.0 + alpha
    ns = _window(N0, n_max)
    P = _arrays(ns)
    mass = np.exp(P["ln_mass"])
    bud = Budget("condition1000", alpha, z_class, N, n_max)
    if z_class == "zero":
        terms = np.log(P["ln_n"]) ** p / (ns * np.sqrt(P["gamma"]) * P["ln_n"])
        bud.parts["series"] = BudgetPart(kahan_sum(terms), len(ns), harmonic_tail(n_max, p), "integral test, s = sqrt(ln n)")
        literal = mass * (np.log(1.0 / P["c"]) ** p + np.log(1.0 / P["d"]) ** p)
        bud.parts["literal"] = BudgetPart(kahan_sum(literal), len(ns), math.nan, "window only", included=False)
        return bud
    N = N0 if N is None else int(N)
    if not N0 <= N <= n_max:
        raise DomainError("N must lie in [n0, n_max]")
    D = _differences(ns, N)
    other = ns != N
    with np.errstate(divide="ignore"):
        w = np.where(other, np.log(1.0 / np.abs(D["da"])), 0.0) ** p
    terms = mass * w
    below = other & (ns < N)
    above = other & (ns > N)
    ln_N = math.log(N)
    bud.parts["below"] = BudgetPart(kahan_sum(terms[below]), int(below.sum()), 0.0, "exact (finite range)")
    shift_log = math.log(N * ln_N**2)
    tail = shift_log**p * harmonic_tail(n_max, 0.0)
    bud.parts["above"] = BudgetPart(kahan_sum(terms[above]), int(above.sum()), tail, "|a_n - a_N| >= 1/(N ln^2 N), integral test")
    own = spike_params(N)
    bud.parts["I3"] = BudgetPart(spike_log_moment(N, p), 1, 0.0, "closed form (incomplete gamma)")
    gap = 2.0 * own.delta
    bud.parts["I4"] = BudgetPart(own.mass * math.log(1.0 / gap) ** p, 1, own.mass * p * math.log(1.0 / gap) ** (p - 1) * math.exp(own.ln_b) / gap, "point mass, first-order error")
    # true positions: z = c_N or d_N; distances to c_n and d_n
    dc = D["da"] - D["ddelta"]  # c_n - c_N
    dd = D["da"] + D["ddelta"]  # d_n - d_N
    if z_class == "cN":
        dist_c, dist_d = dc, dd + 2.0 * D["delta_N"]
    else:
        dist_c, dist_d = dc - 2.0 * D["delta_N"], dd
    with np.errstate(divide="ignore"):
        lit = mass * (np.log(1.0 / np.abs(dist_c)) ** p + np.log(1.0 / np.abs(dist_d)) ** p)
    bud.parts["literal"] = BudgetPart(kahan_sum(lit[other]), int(other.sum()), math.nan, "window only", included=False)
    return bud


# ----------------------------------------------------------- Hilbert side


@dataclass
class HilbertBound:
    N: int
    mass: float
    log_moment: float  # int u^-beta ln(1/u), the (2002)-type term
    log_delta_term: float  # |ln delta| * mass, the (2001)-type term
    near_integral: float  # exact int_0^b u^-beta ln(delta + u) du
    k_integral_lower: float
    l_upper: float
    l_upper_tail: float
    interval_lower: float
    dominance_ratio: float
    c: float
    C: float

    def to_dict(self) -> dict:
        return asdict(self)


def _log1p_moment(ln_b: float, lam: float, delta: float, terms: int = 60) -> float:
    """``int_0^b u^-beta log(1 + u/delta) du`` by its alternating series (needs b < delta)."""
    b_over = math.exp(ln_b) / delta
    if not b_over < 1:
        raise DomainError("series needs b < delta")
    total = 0.0
    for k in range(1, terms + 1):
        term = (-1) ** (k + 1) * math.exp(lam * ln_b + k * math.log(b_over)) / (k * (k + lam))
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return total


def far_spike_sum(N: int, n_max: int | None = None) -> tuple[float, float, int]:
    """``sum_{n != N} delta_n / (n gamma^(1/2) ln n) / (1/ln n - 1/ln N)^2``: window value, tail bound, terms."""
    n_max = N + 10**5 if n_max is None else n_max
    ns = _window(N0, n_max)
    P = _arrays(ns)
    D = _differences(ns, N)
    other = ns != N
    terms = P["delta"][other] / (ns[other] * np.sqrt(P["gamma"][other]) * P["ln_n"][other]) / D["da"][other] ** 2
    # n > n_max: (a_N - a_n)^-2 <= (a_N - a_{n_max+1})^-2 and delta_n <= delta_{n_max}
    far = _differences(np.array([float(n_max + 1)]), N)["da"][0]
    delta_edge = math.exp(-math.exp(math.sqrt(math.log(n_max)) / 4.0))
    tail = float(delta_edge / far**2 * harmonic_tail(n_max))
    return kahan_sum(terms), tail, int(other.sum())


def hilbert_lower_bound(N: int, c: float = 1.0 / 3.0, C: float = 1.0, n_max: int | None = None) -> HilbertBound:
    """Closed-form pieces of the lower bound for ``int_{d_N}^{d_N+delta_N} |H Omega~|``.

    ``k_integral_lower = c (log_moment - |ln delta| mass - |correction|) - C delta``;
    the default ``c = 1/3`` follows from the proximity inequality (partner
    spike at least 3/2 weaker, see :func:`proximity_ratio`).
    ``interval_lower = (k_integral_lower - delta (l_upper + l_upper_tail)) / pi``.
    """
    p = spike_params(N)
    mass = p.mass
    slm = spike_log_moment(N, 1.0)
    log_delta = -math.log(p.delta) * mass
    corr = _log1p_moment(p.ln_b, p.one_minus_beta, p.delta)
    near = math.log(p.delta) * mass + corr
    k_lower = c * (slm - log_delta - abs(corr)) - C * p.delta
    l_val, l_tail, _ = far_spike_sum(N, n_max)
    interval = float((k_lower - p.delta * (l_val + l_tail)) / math.pi)
    return HilbertBound(N, mass, slm, log_delta, near, k_lower, l_val, l_tail, interval, slm / log_delta, c, C)


@dataclass
class SyntheticCheck:
    b: float
    beta: float
    delta: float
    mass_closed: float
    mass_quadrature: float
    moment_closed: dict
    moment_quadrature: dict
    near_closed: float
    near_quadrature: float
    far_closed: float
    far_quadrature: float
    k_closed: float
    k_quadrature: float
    proximity_min_ratio: float

    def to_dict(self) -> dict:
        return asdict(self)


def proximity_ratio(b: float, beta: float, delta: float, samples: int = 64) -> float:
    """``min_y  int_dspike 1/(y-x)  /  int_cspike 1/(y-x)`` over ``y`` in (d, d+delta]; checks the 3/2 claim."""
    lam = 1.0 - beta
    ys = delta * np.logspace(-6, 0, samples)
    ratios = []
    for s in ys:
        near, _ = graded_integral(lambda u: u ** (-beta) / (s + u), b, 1e-13, decay=lam)
        far, _ = graded_integral(lambda u: u ** (-beta) / (2 * delta + s + u), b, 1e-13, decay=lam)
        ratios.append(float(near) / float(far))
    return float(min(ratios))


def synthetic_hilbert_check(b: float = 1e-3, beta: float = 0.5, delta: float = 0.1, tol: float = 1e-13) -> SyntheticCheck:
    """Closed forms versus direct quadrature at a resolvable spike."""
    lam = 1.0 - beta
    ln_b = math.log(b)
    mass_closed = b**lam / lam
    mass_quad, _ = graded_integral(lambda u: u ** (-beta), b, tol, decay=lam)
    mom_c, mom_q = {}, {}
    for pw in (1.0, 2.0, 3.0):
        mom_c[pw] = log_moment_generic(ln_b, lam, pw)
        mom_q[pw] = float(graded_integral(lambda u: u ** (-beta) * np.log(1.0 / u) ** pw, b, tol, decay=lam)[0])
    near_closed = math.log(delta) * mass_closed + _log1p_moment(ln_b, lam, delta)
    near_quad, _ = graded_integral(lambda u: u ** (-beta) * np.log(delta + u), b, tol, decay=lam)
    far_closed = -mom_c[1.0]  # int u^-beta ln u du
    # K integral: int_0^delta int_0^b u^-beta / (s + u) du ds
    k_closed = near_closed - far_closed

    def inner(svals):
        out = np.empty(np.shape(svals))
        for i, s in enumerate(np.ravel(svals)):
            out.flat[i] = graded_integral(lambda u: u ** (-beta) / (s + u), b, tol, decay=lam)[0]
        return out

    k_quad, _ = graded_integral(inner, delta, 1e-11, decay=lam)
    return SyntheticCheck(
        b, beta, delta, mass_closed, float(mass_quad), mom_c, mom_q,
        near_closed, float(near_quad), far_closed, -mom_q[1.0], k_closed, float(k_quad),
        proximity_ratio(b, beta, delta),
    )


# -------------------------------------------------------------- divergence


@dataclass
class DivergenceLedger:
    cutoffs: list[float]
    c: float
    C: float
    main_lower: list[float]
    main_upper: list[float]
    c1_upper: list[float]
    c2_upper: list[float]
    c1_total: float
    c2_total: float
    margin_total: list[float]
    margin_partial: list[float]
    exact_partial: dict
    crossover_ln_N: float
    partial_turning_ln_N: float
    increasing: bool
    positive_from_second: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _main_density(s):
    # gamma^(1/2)/(n ln n) dn  ->  2 e^(s/2) / s ds
    return 2.0 * np.exp(s / 2.0) / s


def _c1_density(s):
    # 1/(n gamma^(1/4) ln n) dn  ->  2 e^(-s/4) / s ds
    return 2.0 * np.exp(-s / 4.0) / s


def _c2_density(s):
    # delta_n dn = exp(-e^(s/4)) e^(s^2) 2 s ds
    return 2.0 * s * np.exp(s * s - np.exp(s / 4.0))


def _main_term(n):
    P = _arrays(np.asarray(n, dtype=float))
    return np.sqrt(P["gamma"]) / (n * P["ln_n"])


def _c1_term(n):
    P = _arrays(np.asarray(n, dtype=float))
    return 1.0 / (n * P["gamma"] ** 0.25 * P["ln_n"])


def _c2_term(n):
    return _arrays(np.asarray(n, dtype=float))["delta"]


def divergence_ledger(cutoffs: Sequence[float], c: float = 1.0 / 3.0, C: float = 1.0, exact_terms: int = 10**6) -> DivergenceLedger:
    """Bounds on the three series of the final divergence argument at each cutoff.

    All three summands decrease in ``n``, so for ``S(N) = sum_{n0}^{N} f``:
    ``int_{n0}^{N} f <= S(N) <= f(n0) + int_{n0}^{N} f``.
    ``margin_total = c main_lower(N) - C (c1_total + c2_total)`` uses the
    full convergent corrections; ``margin_partial`` uses their partial
    upper bounds to ``N``.  Cutoffs within ``exact_terms`` of ``n0`` also
    get enumerated partial sums.
    """
    cut = [float(x) for x in cutoffs]
    if any(b <= a for a, b in zip(cut, cut[1:])):
        raise DomainError("cutoffs must be strictly increasing")
    if cut[0] < N0:
        raise DomainError("cutoffs must be >= n0")
    s0 = math.sqrt(math.log(N0))
    f0 = {k: float(fn(np.array([float(N0)]))[0]) for k, fn in (("main", _main_term), ("c1", _c1_term), ("c2", _c2_term))}
    c1_total = f0["c1"] + _s_integral(_c1_density, s0)
    c2_total = f0["c2"] + _s_integral(_c2_density, s0, 200.0)
    main_lo, main_hi, c1_up, c2_up = [], [], [], []
    for N in cut:
        s = math.sqrt(math.log(N))
        m = _s_integral(_main_density, s0, s)
        main_lo.append(m)
        main_hi.append(f0["main"] + m)
        c1_up.append(min(f0["c1"] + _s_integral(_c1_density, s0, s), c1_total))
        c2_up.append(min(f0["c2"] + _s_integral(_c2_density, s0, min(s, 200.0)), c2_total))
    margin_total = [c * m - C * (c1_total + c2_total) for m in main_lo]
    margin_partial = [c * m - C * (a + b) for m, a, b in zip(main_lo, c1_up, c2_up)]
    exact = {}
    for N in cut:
        if N - N0 < exact_terms:
            ns = _window(N0, int(N))
            exact[repr(N)] = {
                "main": kahan_sum(_main_term(ns)),
                "c1": kahan_sum(_c1_term(ns)),
                "c2": kahan_sum(_c2_term(ns)),
            }
    crossover = _crossover(c, C, c1_total + c2_total, s0)
    turning = _turning_point(c, C, s0)
    # margin_total differences are exactly c * (main increments); comparing the
    # margins themselves would lose them under the ~1e111 correction total
    inc = all(c * (b - a) > 0 for a, b in zip(main_lo, main_lo[1:]))
    pos = all(x > 0 for x in margin_total[1:])
    return DivergenceLedger(cut, c, C, main_lo, main_hi, c1_up, c2_up, c1_total, c2_total,
                            margin_total, margin_partial, exact, crossover, turning, inc, pos)


def _crossover(c: float, C: float, corrections: float, s0: float) -> float:
    """``ln N`` where ``c * main_lower(N)`` first exceeds ``C * corrections``."""
    target = C * corrections / c
    lo, hi = s0, 2.0 * s0
    while _s_integral(_main_density, s0, hi) < target:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _s_integral(_main_density, s0, mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9 * hi:
            break
    return hi * hi


def _turning_point(c: float, C: float, s0: float) -> float:
    """``ln N`` beyond which the partial margin increases (main density beats both corrections)."""
    s = s0
    step = 0.01
    while c * _main_density(s) <= C * (_c1_density(s) + _c2_density(s)):
        s += step
        if s > 1e4:
            return math.inf
    return s * s


def term_stream_csv(kind: str, n_start: int = N0, count: int = 1000) -> str:
    """CSV rows ``n, ln_value, value`` for the mass, main, c1 or c2 series."""
    fns = {
        "mass": lambda ns: spike_ln_mass(ns),
        "main": lambda ns: np.log(_main_term(ns)),
        "c1": lambda ns: np.log(_c1_term(ns)),
        "c2": lambda ns: -_arrays(ns)["gamma"] ** 0.25,
    }
    if kind not in fns:
        raise DomainError(f"kind must be one of {sorted(fns)}")
    ns = _window(n_start, n_start + count - 1)
    lnv = fns[kind](ns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "ln_value", "value"])
    for n, lv in zip(ns, lnv):
        w.writerow([int(n), repr(float(lv)), repr(math.exp(lv))])
    return buf.getvalue()


# ---------------------------------------------------------------- H^1 member


@dataclass
class H1MemberReport:
    M: int
    thetas: list[float]
    ratios_re: list[float]
    ratios_im: list[float]
    ratio_abs_min: float
    ratio_abs_max: float
    alpha: float
    condition_closed: dict
    condition_quadrature: dict
    growth_ratio_closed: float
    growth_ratio_quadrature: float

    def to_dict(self) -> dict:
        return asdict(self)


def h1_partial_sum(M: int, thetas, chunk: int = 1 << 16) -> np.ndarray:
    """``sum_{k=2}^{M} e^{ik theta} / (ln k)^2`` by direct chunked summation."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if np.any(thetas == 0):
        raise DomainError("theta grid touches 0")
    out = np.zeros(thetas.shape, dtype=complex)
    for start in range(2, M + 1, chunk):
        ks = np.arange(start, min(start + chunk, M + 1), dtype=float)
        coef = 1.0 / np.log(ks) ** 2
        out += np.exp(1j * np.outer(thetas, ks)) @ coef
    return out


def truncated_condition_closed(M: float, alpha: float) -> float:
    """``int_{1/M}^{1} theta^-1 ln^(alpha-1)(1/theta) d theta = ln^alpha(M) / alpha``."""
    if alpha <= 0:
        raise DomainError("integral diverges at theta = 1 for alpha <= 0")
    return math.log(M) ** alpha / alpha


def truncated_condition_quadrature(M: float, alpha: float, tol: float = 1e-13) -> float:
    """The same integral in the variable theta (no substitution), as an oracle."""
    if alpha <= 0:
        raise DomainError("integral diverges at theta = 1 for alpha <= 0")

    def f(t):
        return np.log(1.0 / t) ** (alpha - 1.0) / t

    # log-spaced panels on [1/M, 1/2]; near theta = 1 integrate in s = 1 - theta
    lo = 1.0 / M
    edges = np.geomspace(lo, 0.5, int(math.log2(M)) + 2)
    val, _ = adaptive_gauss(f, lo, 0.5, tol, breakpoints=edges.tolist())
    near, _ = graded_integral(lambda s: (-np.log1p(-s)) ** (alpha - 1.0) / (1.0 - s), 0.5, tol, decay=min(alpha, 1.0))
    return float(val) + float(near)


def h1_member(M: int, thetas=None, alpha: float = 0.5, cutoffs: tuple[float, float] = (1e3, 1e6)) -> H1MemberReport:
    """Partial sums of the H^1 example, its asymptotic ratio, and truncated condition growth."""
    if M < 1000:
        raise DomainError("M must be at least 1000")
    if thetas is None:
        thetas = np.geomspace(10.0 / M, 1e-2, 32)
    thetas = np.asarray(thetas, dtype=float)
    if np.any(thetas < 1.0 / M):
        raise DomainError("theta grid must stay above 1/M")
    vals = h1_partial_sum(M, thetas)
    ratio = vals * thetas * np.log(1.0 / thetas) ** 2
    closed = {repr(c): truncated_condition_closed(c, alpha) for c in cutoffs}
    quad = {repr(c): truncated_condition_quadrature(c, alpha) for c in cutoffs}
    g_closed = closed[repr(cutoffs[1])] / closed[repr(cutoffs[0])]
    g_quad = quad[repr(cutoffs[1])] / quad[repr(cutoffs[0])]
    mags = np.abs(ratio)
    return H1MemberReport(M, thetas.tolist(), ratio.real.tolist(), ratio.imag.tolist(), float(mags.min()),
                          float(mags.max()), alpha, closed, quad, g_closed, g_quad)
