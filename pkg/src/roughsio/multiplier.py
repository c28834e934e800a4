"""Fourier symbols of the dyadic kernel pieces and the auxiliary multipliers.

Convention: ``f^(xi) = int f(x) e^{+2 pi i x.xi} dx``.  The DFT uses the
opposite sign, so grid operators evaluate these symbols at ``-xi``.

The unit-annulus piece ``sigma_0 = Omega(x/|x|) |x|^-2 1_{1<=|x|<=2}`` has

    sigma0^(r, phi) = int_0^{2pi} Omega(theta) I(r cos(theta - phi)) d theta,
    I(t) = int_1^2 exp(2 pi i rho t) d rho / rho.

Two evaluation routes are used.

* Harmonic: for ``Omega = sum c_l e^{il theta}``, Jacobi-Anger gives
  ``sigma0^ = 2 pi sum_l c_l e^{il phi} i^|l| B_|l|(2 pi r)`` with
  ``B_l(a) = int_a^{2a} J_l(x) dx / x``.  ``B_l`` comes from the integrals
  ``D_n = int_a^{2a} J_n`` through ``J_l/x = (J_{l-1}+J_{l+1})/(2l)`` and
  ``D_{n+1} = D_{n-1} - 2 [J_n]_a^{2a}``; ``D_0`` and ``B_0`` are Gauss
  sums for ``a < 40`` and an integration-by-parts series beyond.  Cost is
  independent of the radius, which is what makes radii up to 2^20 cheap.
* Quadrature: adaptive Gauss in ``theta`` with ``I`` in closed form
  (sine/cosine integrals).  Used for non-trigonometric kernels at moderate
  radii.  Non-trigonometric kernels at large radii go through the harmonic
  route with FFT coefficients, and the error is estimated by halving the
  number of harmonics.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy import special

from .errors import CalibrationError, GridTooCoarse
from .kernel import TWO_PI, FourierKernel, SphericalKernel, SpikeKernel, UnitDirection, as_angle
from .quadrature import adaptive_gauss, gauss_legendre, graded_integral

LN2 = math.log(2.0)
QUADRATURE_RADIUS = 1024.0
HARMONIC_SAMPLES = 16384
_SERIES_SWITCH = 40.0


@dataclass(frozen=True)
class FrequencyPoint:
    radius: float
    direction: UnitDirection = UnitDirection(0.0)

    def __post_init__(self):
        if not isinstance(self.direction, UnitDirection):
            object.__setattr__(self, "direction", UnitDirection(float(self.direction)))
        if not (self.radius >= 0 and math.isfinite(self.radius)):
            raise ValueError("radius must be finite and nonnegative")

    def dilate(self, factor: float) -> "FrequencyPoint":
        return FrequencyPoint(self.radius * factor, self.direction)


@dataclass(frozen=True)
class SymbolSample:
    frequency: FrequencyPoint
    value: complex
    error: float


@dataclass
class DecayReport:
    radii: list[float]
    sup_values: list[float]
    argmax_angles: list[float]
    alpha: float
    c_small: float
    c_large: float

    def to_dict(self) -> dict:
        return asdict(self)


def _freq(xi) -> FrequencyPoint:
    if isinstance(xi, FrequencyPoint):
        return xi
    if isinstance(xi, (tuple, list)) and len(xi) == 2:
        x, y = float(xi[0]), float(xi[1])
        return FrequencyPoint(math.hypot(x, y), UnitDirection(math.atan2(y, x)))
    return FrequencyPoint(float(xi))


# ---------------------------------------------------------- inner integral


def inner_oscillatory(t):
    """``int_1^2 exp(2 pi i r t) dr / r``, vectorized over ``t``."""
    t = np.asarray(t, dtype=float)
    a = TWO_PI * t
    out = np.empty(a.shape, dtype=complex)
    small = np.abs(a) < 0.5
    if np.any(small):
        x = a[small]
        acc = np.full(x.shape, LN2, dtype=complex)
        term = np.ones(x.shape, dtype=complex)
        for n in range(1, 24):
            term = term * (1j * x) / n
            acc += term * ((2.0**n - 1.0) / n)
        out[small] = acc
    big = ~small
    if np.any(big):
        x = np.abs(a[big])
        si1, ci1 = special.sici(x)
        si2, ci2 = special.sici(2.0 * x)
        out[big] = (ci2 - ci1) + 1j * np.sign(a[big]) * (si2 - si1)
    return out if out.ndim else complex(out)


def inner_bound(t):
    """``min(2, 3/|t|)``, the elementary bound on the inner integral."""
    t = np.abs(np.asarray(t, dtype=float))
    with np.errstate(divide="ignore"):
        return np.minimum(2.0, np.where(t > 0, 3.0 / t, np.inf))


def log_decay_bound(radius, cos_angle, alpha):
    """``2 ln(1.5/|c|)^(1+a) / ln(r)^(1+a)`` for ``r >= 2``, ``c = xi'.theta``."""
    c = np.abs(np.asarray(cos_angle, dtype=float))
    return 2.0 * np.log(1.5 / c) ** (1 + alpha) / np.log(radius) ** (1 + alpha)


# ------------------------------------------------------- Bessel integrals


def _j0_power_integral(a: np.ndarray, m: int) -> np.ndarray:
    """``int_a^{2a} J_0(x) x^-m dx`` for m in {0, 1}."""
    a = np.asarray(a, dtype=float)
    out = np.empty_like(a)
    low = a < _SERIES_SWITCH
    if np.any(low):
        x, w = gauss_legendre(96)
        al = a[low]
        pts = al[:, None] * (1.5 + 0.5 * x[None, :])
        vals = special.j0(pts) * pts ** (-m)
        out[low] = 0.5 * al * (vals @ w)
    hi = ~low
    if np.any(hi):
        ah = a[hi]
        ends = (ah, 2.0 * ah)
        j0 = [special.j0(e) for e in ends]
        j1 = [special.j1(e) for e in ends]
        total = np.zeros_like(ah)
        coef = np.ones_like(ah)
        prev = np.full_like(ah, np.inf)
        active = np.ones(ah.shape, dtype=bool)
        for k in range(60):
            n = m + 2 * k
            term = (j1[1] * ends[1] ** (-n) - j1[0] * ends[0] ** (-n)) - (n + 1) * (
                j0[1] * ends[1] ** (-(n + 1)) - j0[0] * ends[0] ** (-(n + 1))
            )
            term = coef * term
            mag = np.abs(coef) * ah ** (-n - 0.5)
            active &= mag < prev
            total = np.where(active, total + term, total)
            prev = np.where(active, mag, prev)
            if not np.any(active & (mag > 1e-18 * np.maximum(np.abs(total), 1e-300))):
                break
            coef = -coef * (n + 1) ** 2
        out[hi] = total
    return out


def bessel_radial(a, lmax: int) -> np.ndarray:
    """``B_l(a) = int_a^{2a} J_l(x) dx / x`` for ``l = 0..lmax``; shape (len(a), lmax+1)."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    out = np.zeros((len(a), lmax + 1))
    zero = a == 0
    out[zero, 0] = LN2
    nz = ~zero
    if not np.any(nz):
        return out
    an = a[nz]
    orders = np.arange(lmax + 2, dtype=float)
    jlo = special.jv(orders[None, :], an[:, None])
    jhi = special.jv(orders[None, :], 2.0 * an[:, None])
    d = np.empty((len(an), lmax + 2))
    d[:, 0] = _j0_power_integral(an, 0)
    if lmax + 2 > 1:
        d[:, 1] = jlo[:, 0] - jhi[:, 0]
    for n in range(1, lmax + 1):
        d[:, n + 1] = d[:, n - 1] - 2.0 * (jhi[:, n] - jlo[:, n])
    block = np.empty((len(an), lmax + 1))
    block[:, 0] = _j0_power_integral(an, 1)
    if lmax >= 1:
        ls = np.arange(1, lmax + 1)
        block[:, 1:] = (d[:, :-2][:, : lmax] + d[:, 2:]) / (2.0 * ls)
    out[nz] = block
    return out


# ----------------------------------------------------------- sigma0 hat


def _harmonics(k: SphericalKernel, samples: int) -> dict[int, complex]:
    if isinstance(k, FourierKernel):
        return k.coefficients
    cache = k.__dict__.setdefault("_harmonic_cache", {})
    if samples not in cache:
        t = np.arange(samples) * TWO_PI / samples
        c = np.fft.fft(k(t)) / samples
        coeffs = {}
        for i in range(samples):
            l = i if i < samples // 2 else i - samples
            coeffs[l] = c[i]
        cache[samples] = coeffs
    return cache[samples]


def _harmonic_symbol(coeffs: dict[int, complex], radii, angles) -> np.ndarray:
    """``sigma0^`` on the (radii x angles) grid from Fourier coefficients."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if not coeffs:
        return np.zeros((len(radii), len(angles)), dtype=complex)
    ls = np.array(list(coeffs), dtype=int)
    cs = np.array(list(coeffs.values()), dtype=complex)
    lmax = int(np.abs(ls).max())
    b = bessel_radial(TWO_PI * radii, lmax)[:, np.abs(ls)]
    phase = (1j ** (np.abs(ls) % 4)) * cs
    return TWO_PI * (b * phase[None, :]) @ np.exp(1j * np.outer(ls, angles))


def _quadrature_symbol(k: SphericalKernel, r: float, phi: float, tol: float):
    def f(theta):
        return k(theta) * inner_oscillatory(r * np.cos(theta - phi))

    val, err = adaptive_gauss(
        f, 0.0, TWO_PI, tol, breakpoints=k.breakpoints, initial_panels=max(8, int(4 * r))
    )
    return complex(val), err


def _spike_symbol(k: SpikeKernel, r: float, phi: float, tol: float):
    masses = k.masses
    b = k.widths
    vals = []
    err = 0.0
    for c, bw, lam, s, mass in zip(k.centers, b, k.lams, k.signs, masses):
        bound = TWO_PI * mass * (TWO_PI**2) * r * bw
        if bound <= tol / max(len(masses), 1):
            vals.append(s * mass * complex(inner_oscillatory(r * math.cos(TWO_PI * c - phi))))
            err += bound
        else:
            beta = 1.0 - lam
            v, e = graded_integral(
                lambda u: u ** (-beta) * inner_oscillatory(r * np.cos(TWO_PI * (c - u) - phi)),
                bw, tol / len(masses), decay=lam,
            )
            vals.append(s * v)
            err += e
    return TWO_PI * complex(math.fsum(v.real for v in vals) + 1j * math.fsum(v.imag for v in vals)), TWO_PI * err


def symbol_grid(k: SphericalKernel, radii, angles, tol: float = 1e-10):
    """``sigma0^`` on a radii x angles grid; returns (values, errors)."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    vals = np.zeros((len(radii), len(angles)), dtype=complex)
    errs = np.zeros((len(radii), len(angles)))
    if isinstance(k, FourierKernel):
        vals[:] = _harmonic_symbol(k.coefficients, radii, angles)
        scale = sum(abs(c) for c in k.coefficients.values())
        errs[:] = 1e-14 * TWO_PI * scale
        return vals, errs
    zero = radii == 0
    if np.any(zero):
        vals[zero] = LN2 * k.mean_value()
    for i, r in enumerate(radii):
        if r == 0:
            continue
        if isinstance(k, SpikeKernel):
            for jdx, phi in enumerate(angles):
                vals[i, jdx], errs[i, jdx] = _spike_symbol(k, r, phi, tol)
        elif r <= QUADRATURE_RADIUS:
            for jdx, phi in enumerate(angles):
                vals[i, jdx], errs[i, jdx] = _quadrature_symbol(k, r, phi, tol)
    far = (radii > QUADRATURE_RADIUS) if not isinstance(k, SpikeKernel) else np.zeros(len(radii), bool)
    if np.any(far):
        fine = _harmonic_symbol(_harmonics(k, HARMONIC_SAMPLES), radii[far], angles)
        coarse = _harmonic_symbol(_harmonics(k, HARMONIC_SAMPLES // 2), radii[far], angles)
        vals[far] = fine
        errs[far] = np.abs(fine - coarse)
    return vals, errs


def sigma0_hat(k: SphericalKernel, xi, tol: float = 1e-10) -> SymbolSample:
    """Symbol of the unit-annulus piece at one frequency."""
    f = _freq(xi)
    v, e = symbol_grid(k, [f.radius], [f.direction.angle], tol)
    return SymbolSample(f, complex(v[0, 0]), float(e[0, 0]))


def dyadic_symbol(k: SphericalKernel, kk: int, xi, tol: float = 1e-10) -> SymbolSample:
    """Symbol of ``sigma_kk`` (annulus 2^kk..2^(kk+1)) via dilation."""
    f = _freq(xi)
    s = sigma0_hat(k, f.dilate(2.0**kk), tol)
    return SymbolSample(f, s.value, s.error)


def abs_kernel(k: SphericalKernel) -> SphericalKernel:
    cached = k.__dict__.get("_abs_kernel")
    if cached is None:
        cached = k.abs()
        k.__dict__["_abs_kernel"] = cached
    return cached


def abs_sigma0_hat(k: SphericalKernel, xi, tol: float = 1e-10) -> SymbolSample:
    """Symbol of ``|sigma_0|``; equals ``ln 2 * ||Omega||_1`` at the origin."""
    f = _freq(xi)
    if f.radius == 0:
        return SymbolSample(f, complex(LN2 * k.l1_norm()), 0.0)
    return sigma0_hat(abs_kernel(k), f, tol)


# ---------------------------------------------------------- bumps/windows


def smoothstep(x, order: int = 7):
    """Polynomial step, 0 for x<=0 and 1 for x>=1, with ``(order-1)/2`` flat derivatives."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    n = (order - 1) // 2
    acc = np.zeros_like(x)
    for kk in range(n + 1):
        acc += math.comb(n + kk, kk) * math.comb(2 * n + 1, n - kk) * (-x) ** kk
    return x ** (n + 1) * acc


@dataclass(frozen=True)
class SchwartzBump:
    """Radial profile equal to ``amplitude`` on r <= plateau and 0 beyond ``support``."""

    amplitude: float = 1.0
    plateau: float = 2.0
    support: float = 3.0
    order: int = 7

    def __call__(self, r):
        x = (np.asarray(r, dtype=float) - self.plateau) / (self.support - self.plateau)
        return self.amplitude * (1.0 - smoothstep(x, self.order))

    @classmethod
    def calibrated(cls, k: SphericalKernel, **kw) -> "SchwartzBump":
        """Amplitude chosen so that ``mu_k^(0) = 0`` for the kernel ``k``."""
        return cls(amplitude=float(abs_sigma0_hat(k, 0.0).value.real), **kw)


@dataclass(frozen=True)
class LPWindow:
    """``psi(r)^2 = chi(r) - chi(2r)``, ``chi`` a smooth step from 1 (r<=t0) to 0 (r>=t1).

    Requires ``t1 <= 2 t0``; the support of ``psi`` is [t0/2, t1].  The
    default (1, 2) gives support [1/2, 2]; (3/2, 9/4) gives [3/4, 9/4].
    """

    t0: float = 1.0
    t1: float = 2.0
    order: int = 7

    def __post_init__(self):
        if not 0 < self.t0 < self.t1 <= 2 * self.t0:
            raise ValueError("need 0 < t0 < t1 <= 2 t0")

    @property
    def r_lo(self) -> float:
        return self.t0 / 2

    @property
    def r_hi(self) -> float:
        return self.t1

    def chi(self, r):
        return 1.0 - smoothstep((np.asarray(r, dtype=float) - self.t0) / (self.t1 - self.t0), self.order)

    def squared(self, r):
        r = np.asarray(r, dtype=float)
        return np.maximum(self.chi(r) - self.chi(2.0 * r), 0.0)

    def __call__(self, r):
        return np.sqrt(self.squared(r))


def lp_window(t0: float = 1.0, t1: float = 2.0, order: int = 7) -> LPWindow:
    return LPWindow(t0, t1, order)


def window_eval(w: LPWindow, r):
    return w(r)


def partition_sum(w: LPWindow, r, jmin: int = -40, jmax: int = 40):
    """``sum_j psi(2^j r)^2`` over ``jmin <= j <= jmax``."""
    r = np.asarray(r, dtype=float)
    return sum(w.squared(2.0**j * r) for j in range(jmin, jmax + 1))


def mu_symbol(k: SphericalKernel, kk: int, xi, bump: SchwartzBump, tol: float = 1e-10) -> SymbolSample:
    """``|sigma_kk|^ - Phi_kk^`` with the bump amplitude checked against ``|sigma_0|^(0)``."""
    at_zero = abs_sigma0_hat(k, 0.0).value.real - float(bump(0.0))
    if abs(at_zero) > 1e-10:
        raise CalibrationError(f"mu^(0) = {at_zero:.3e}; use SchwartzBump.calibrated(kernel)")
    f = _freq(xi)
    g = f.dilate(2.0**kk)
    s = abs_sigma0_hat(k, g, tol)
    return SymbolSample(f, s.value - float(bump(g.radius)), s.error)


# ---------------------------------------------------------------- norms


def _directions(n: int) -> np.ndarray:
    return np.arange(n) * TWO_PI / n


def tj_symbol(k: SphericalKernel, j: int, radii, angles, w: LPWindow, tol: float = 1e-10) -> np.ndarray:
    """``m_j(xi) = sum_kk psi(2^(j+kk)|xi|)^2 sigma0^(2^kk xi)`` on a grid."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    out = np.zeros((len(radii), len(angles)), dtype=complex)
    lo = math.floor(math.log2(w.r_lo / radii.max())) - j - 1
    hi = math.ceil(math.log2(w.r_hi / radii.min())) - j + 1
    for kk in range(lo, hi + 1):
        weight = w.squared(2.0 ** (j + kk) * radii)
        live = weight > 0
        if not np.any(live):
            continue
        vals, _ = symbol_grid(k, 2.0**kk * radii[live], angles, tol)
        out[live] += weight[live, None] * vals
    return out


def tj_symbol_norm(
    k: SphericalKernel,
    j: int,
    radii=None,
    w: LPWindow | None = None,
    *,
    directions: int = 32,
    rtol: float = 1e-3,
    max_refinements: int = 4,
    tol: float = 1e-10,
) -> float:
    """``sup |m_j|`` = L^2 operator norm of ``T_j``.

    ``m_j(2 xi) = m_j(xi)``, so one octave of radii is the full sup.  The
    default grid is 64 points in [1, 2); radii and directions are doubled
    until the sup moves by at most ``rtol`` (relative).
    """
    w = w or LPWindow()
    if radii is None:
        radii = 1.0 + np.arange(64) / 64
    radii = np.asarray(radii, dtype=float)
    best = None
    for _ in range(max_refinements + 1):
        val = float(np.abs(tj_symbol(k, j, radii, _directions(directions), w, tol)).max())
        if best is not None and abs(val - best) <= rtol * max(abs(val), 1e-300):
            return max(val, best)
        if val == 0.0 and best == 0.0:
            return 0.0
        best = val if best is None else max(val, best)
        lo, hi = radii.min(), radii.max()
        radii = np.linspace(lo, hi, 2 * len(radii) - 1)
        directions *= 2
    raise GridTooCoarse(f"T_{j} symbol sup not stable to rtol={rtol}")


def product_symbol(k, j: int, ks: Sequence[int], bump: SchwartzBump, radii, angles, tol: float = 1e-10) -> np.ndarray:
    """``prod_i |1 - Phi^(2^k_i r)| |sigma0^(2^(j+k_i) xi)|`` on a grid."""
    radii = np.asarray(radii, dtype=float)
    out = np.ones((len(radii), len(angles)))
    for ki in ks:
        high = np.abs(1.0 - bump(2.0**ki * radii))
        vals, _ = symbol_grid(k, 2.0 ** (j + ki) * radii, angles, tol)
        out *= high[:, None] * np.abs(vals)
    return out


def product_budget(C: float, j: int, ks: Sequence[int], alpha: float) -> float:
    """``C^(2m) prod_i (1 + j + k_i - k_1)^-(1+alpha)``."""
    k1 = ks[0]
    return C ** len(ks) * math.prod((1.0 + j + ki - k1) ** -(1.0 + alpha) for ki in ks)


def mjk_product_norm(
    k: SphericalKernel,
    j: int,
    ks: Sequence[int],
    bump: SchwartzBump | None = None,
    radii=None,
    *,
    directions: int = 16,
    octaves: int = 16,
    points_per_octave: int = 24,
    tol: float = 1e-10,
) -> float:
    """L^2 norm of ``M_{j,k_1} ... M_{j,k_2m}``: sup of the product symbol on ``|xi| >= 2^(1-k_1)``."""
    ks = list(ks)
    if j < 0:
        raise ValueError("j must be nonnegative")
    if ks != sorted(ks):
        raise ValueError("k-list must be nondecreasing")
    bump = bump or SchwartzBump()
    if radii is None:
        start = 2.0 ** (1 - ks[0])
        radii = start * 2.0 ** (np.arange(octaves * points_per_octave + 1) / points_per_octave)
    return float(product_symbol(k, j, ks, bump, radii, _directions(directions), tol).max())


def large_radius_constant(k: SphericalKernel, alpha: float, *, octaves: int = 20, points_per_octave: int = 16,
                       directions: int = 32) -> float:
    """``sup_{r >= 2} |sigma0^(r)| ln(r)^(1+alpha)`` on a log grid of radii in [2, 2^(1+octaves)]."""
    radii = 2.0 * 2.0 ** (np.arange(octaves * points_per_octave + 1) / points_per_octave)
    vals, _ = symbol_grid(k, radii, _directions(directions))
    return float((np.abs(vals).max(axis=1) * np.log(radii) ** (1 + alpha)).max())


def product_constant(k: SphericalKernel, alpha: float, **kw) -> float:
    """Per-factor constant ``C`` such that ``|sigma_{j+k_i}^| <= C (1+j+k_i-k_1)^-(1+alpha)`` on ``|xi| >= 2^(1-k_1)``.

    From the large-radius decay constant: ``ln(2^(j+k_i)|xi|) >= (1+j+k_i-k_1) ln 2``
    and ``|1 - Phi^| <= 1``.
    """
    return large_radius_constant(k, alpha, **kw) / LN2 ** (1 + alpha)


def decay_scan(k: SphericalKernel, radii, alpha: float, directions: int = 64, tol: float = 1e-10) -> DecayReport:
    """Sup over directions of ``|sigma0^|`` per radius and the two fitted constants."""
    radii = np.asarray(radii, dtype=float)
    angles = _directions(directions)
    vals, _ = symbol_grid(k, radii, angles, tol)
    mags = np.abs(vals)
    sup = mags.max(axis=1)
    arg = angles[mags.argmax(axis=1)]
    small = (radii > 0) & (radii <= 2)
    large = radii >= 2
    c_small = float((sup[small] / radii[small]).max()) if np.any(small) else 0.0
    c_large = float((sup[large] * np.log(radii[large]) ** (1 + alpha)).max()) if np.any(large) else 0.0
    return DecayReport(radii.tolist(), sup.tolist(), arg.tolist(), alpha, c_small, c_large)


def small_radius_constant(k: SphericalKernel) -> float:
    """Small-radius constant as displayed for the annulus piece: ``2 pi ln2 ||Omega||_1``."""
    return TWO_PI * LN2 * k.l1_norm()


def small_radius_constant_sharp(k: SphericalKernel) -> float:
    """Constant that follows from ``|e^{is}-1| <= |s|``: ``2 pi ||Omega||_1``."""
    return TWO_PI * k.l1_norm()


def symbol_points(k: SphericalKernel, radii, angles, tol: float = 1e-10) -> np.ndarray:
    """``sigma0^`` at paired (radius, angle) points of any common shape."""
    radii, angles = np.broadcast_arrays(np.asarray(radii, dtype=float), np.asarray(angles, dtype=float))
    shape = radii.shape
    r = radii.ravel()
    a = angles.ravel()
    out = np.zeros(r.shape, dtype=complex)
    if isinstance(k, FourierKernel) and k.coefficients:
        ls = np.array(list(k.coefficients), dtype=int)
        cs = np.array(list(k.coefficients.values()), dtype=complex) * (1j ** (np.abs(ls) % 4))
        lmax = int(np.abs(ls).max())
        for start in range(0, len(r), 2048):
            sl = slice(start, start + 2048)
            b = bessel_radial(TWO_PI * r[sl], lmax)[:, np.abs(ls)]
            out[sl] = TWO_PI * np.sum(b * cs[None, :] * np.exp(1j * np.outer(a[sl], ls)), axis=1)
        return out.reshape(shape)
    for i, (ri, ai) in enumerate(zip(r, a)):
        out[i] = symbol_grid(k, [ri], [ai], tol)[0][0, 0]
    return out.reshape(shape)


def tj_symbol_points(k: SphericalKernel, j: int, radii, angles, w: LPWindow, tol: float = 1e-10) -> np.ndarray:
    """Pointwise version of :func:`tj_symbol`; zero at the origin."""
    radii, angles = np.broadcast_arrays(np.asarray(radii, dtype=float), np.asarray(angles, dtype=float))
    out = np.zeros(radii.shape, dtype=complex)
    pos = radii > 0
    if not np.any(pos):
        return out
    lo = math.floor(math.log2(w.r_lo / radii[pos].max())) - j - 1
    hi = math.ceil(math.log2(w.r_hi / radii[pos].min())) - j + 1
    for kk in range(lo, hi + 1):
        weight = w.squared(2.0 ** (j + kk) * radii)
        live = (weight > 0) & pos
        if np.any(live):
            out[live] += weight[live] * symbol_points(k, 2.0**kk * radii[live], angles[live], tol)
    return out
