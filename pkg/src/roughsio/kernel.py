"""Kernels on the unit circle.

A kernel ``Omega`` is a complex function on S^1, parametrized by the angle
``theta`` in [0, 2*pi).  All integrals use the *unnormalized* arc length
``d theta`` (total measure ``2*pi``); nothing in the package divides by
``2*pi`` implicitly.

Representations
---------------
``FourierKernel``     finitely many coefficients ``c_l``: Omega = sum c_l e^{i l theta}
``SampledKernel``     M uniform samples, trigonometric or periodic-linear interpolation
``SpikeKernel``       power spikes ``sign * (c - x)^(-beta)`` on (c - b, c), stored on
                      [0, 1] via x = theta / (2 pi) (widths kept as ``ln b``)
``CallbackKernel``    vectorized python callable plus known breakpoints
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DivergentMoment, SingularPoint
from .quadrature import adaptive_gauss, graded_integral, kahan_sum
from .special import log_upper_gamma

TWO_PI = 2.0 * math.pi
TOL_MEAN = 1e-10
DEFAULT_OVERFLOW_CAP = 1e12


@dataclass(frozen=True)
class UnitDirection:
    """A point of S^1 given by its angle, normalized to [0, 2*pi)."""

    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", float(self.angle) % TWO_PI)

    @property
    def vector(self) -> tuple[float, float]:
        return math.cos(self.angle), math.sin(self.angle)


def as_angle(direction) -> float:
    """Accept a ``UnitDirection`` or a bare angle."""
    if isinstance(direction, UnitDirection):
        return direction.angle
    return float(direction) % TWO_PI


@dataclass(frozen=True)
class KernelMoments:
    l1_norm: float
    mean: complex
    llogl: float
    l1_error: float = 0.0
    llogl_error: float = 0.0


class SphericalKernel:
    """Common interface.  Subclasses implement ``__call__`` on angle arrays."""

    name: str = "kernel"
    declared_mean_zero: bool = False
    smooth: bool = False

    def __call__(self, theta):
        raise NotImplementedError

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Angles in [0, 2*pi) where the kernel is not smooth."""
        return ()

    def line(self, x):
        """Value of the transferred function on [0, 1]."""
        return self(TWO_PI * np.asarray(x, dtype=float))

    def _integrate(self, func, tol):
        return adaptive_gauss(func, 0.0, TWO_PI, tol, breakpoints=self.breakpoints, initial_panels=8)

    def mean_value(self, tol: float = 1e-12) -> complex:
        val, _ = self._integrate(lambda t: self(t), tol)
        return complex(val)

    def l1_norm(self, tol: float = 1e-12) -> float:
        return self.l1_with_error(tol)[0]

    def l1_with_error(self, tol: float = 1e-12) -> tuple[float, float]:
        val, err = self._integrate(lambda t: np.abs(self(t)), tol)
        return float(val), err

    def abs(self) -> "SphericalKernel":
        return CallbackKernel(
            lambda t: np.abs(self(t)).astype(complex),
            name=f"|{self.name}|",
            breakpoints=self.abs_breakpoints(),
            smooth=False,
        )

    def abs_breakpoints(self) -> tuple[float, ...]:
        return self.breakpoints

    def sup_estimate(self, samples: int = 4096) -> float:
        t = (np.arange(samples) + 0.5) * TWO_PI / samples
        return float(np.max(np.abs(self(t))))

    def descriptor(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} is not serializable")


class FourierKernel(SphericalKernel):
    """``Omega(theta) = sum_l c_l exp(i l theta)`` with finitely many ``l``."""

    def __init__(self, coefficients: Mapping[int, complex], name: str = "fourier"):
        coeffs = {int(l): complex(c) for l, c in coefficients.items() if c != 0}
        self.coefficients = dict(sorted(coeffs.items()))
        self.name = name
        self.smooth = True
        self.declared_mean_zero = self.coefficients.get(0, 0) == 0

    @cached_property
    def _arrays(self):
        ls = np.array(list(self.coefficients), dtype=float)
        cs = np.array(list(self.coefficients.values()), dtype=complex)
        return ls, cs

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        ls, cs = self._arrays
        if not len(ls):
            return np.zeros(theta.shape, dtype=complex)
        flat = theta.ravel()
        out = np.empty(flat.shape, dtype=complex)
        chunk = max(1, 2_000_000 // len(ls))
        for i in range(0, len(flat), chunk):
            out[i:i + chunk] = np.exp(1j * np.outer(flat[i:i + chunk], ls)) @ cs
        return out.reshape(theta.shape)

    def mean_value(self, tol: float = 1e-12) -> complex:
        return TWO_PI * self.coefficients.get(0, 0j)

    @cached_property
    def is_real(self) -> bool:
        return all(
            abs(c - np.conj(self.coefficients.get(-l, 0))) <= 1e-15 * max(1.0, abs(c))
            for l, c in self.coefficients.items()
        )

    def abs_breakpoints(self) -> tuple[float, ...]:
        if not self.is_real:
            return ()
        return _real_zeros(lambda t: self(t).real)

    def descriptor(self) -> dict:
        return {
            "type": "fourier",
            "name": self.name,
            "coefficients": [[l, c.real, c.imag] for l, c in self.coefficients.items()],
        }


def _real_zeros(func: Callable, samples: int = 4096) -> tuple[float, ...]:
    t = np.linspace(0.0, TWO_PI, samples + 1)
    v = func(t)
    roots = []
    for i in range(samples):
        if v[i] == 0:
            roots.append(t[i])
        elif v[i] * v[i + 1] < 0:
            roots.append(brentq(lambda s: float(func(np.array([s]))[0]), t[i], t[i + 1], xtol=1e-15))
    return tuple(sorted(r % TWO_PI for r in roots))


class SampledKernel(SphericalKernel):
    """Uniform samples at ``theta_m = 2*pi*m/M`` with an interpolation rule.

    ``"trig"`` reproduces band-limited kernels exactly; ``"linear"`` is the
    choice for rough data, where a trigonometric interpolant would ring
    around jumps.
    """

    def __init__(self, samples: Sequence[complex], interpolation: str = "trig", name: str = "sampled"):
        self.samples = np.asarray(samples, dtype=complex)
        if self.samples.ndim != 1 or len(self.samples) < 2:
            raise ValueError("need a 1-d array of at least two samples")
        if interpolation not in ("trig", "linear"):
            raise ValueError("interpolation must be 'trig' or 'linear'")
        self.interpolation = interpolation
        self.name = name
        self.smooth = interpolation == "trig"
        self.declared_mean_zero = abs(self.samples.mean()) <= TOL_MEAN

    @cached_property
    def _fourier(self) -> FourierKernel:
        m = len(self.samples)
        c = np.fft.fft(self.samples) / m
        coeffs = {}
        for k in range(m):
            l = k if k < (m + 1) // 2 else k - m
            coeffs[l] = c[k]
        if m % 2 == 0:
            nyq = c[m // 2]
            coeffs[-m // 2] = nyq / 2
            coeffs[m // 2] = nyq / 2
        return FourierKernel(coeffs, name=self.name)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.interpolation == "trig":
            return self._fourier(theta)
        m = len(self.samples)
        grid = np.arange(m + 1) * TWO_PI / m
        vals = np.append(self.samples, self.samples[0])
        t = np.mod(theta, TWO_PI)
        return np.interp(t, grid, vals.real) + 1j * np.interp(t, grid, vals.imag)

    def mean_value(self, tol: float = 1e-12) -> complex:
        # exact for both rules: trapezoid integrates trig polynomials of
        # degree < M and piecewise-linear functions exactly
        return TWO_PI * complex(self.samples.mean())

    @property
    def breakpoints(self):
        if self.interpolation == "linear" and len(self.samples) <= 64:
            return tuple(np.arange(len(self.samples)) * TWO_PI / len(self.samples))
        return ()

    def descriptor(self) -> dict:
        return {
            "type": "sampled",
            "name": self.name,
            "interpolation": self.interpolation,
            "samples_re": self.samples.real.tolist(),
            "samples_im": self.samples.imag.tolist(),
        }


class SpikeKernel(SphericalKernel):
    """Sum of power spikes ``sign_i * (c_i - x)^(-beta_i)`` on (c_i - b_i, c_i).

    The natural domain is [0, 1]; on the circle ``Omega(theta)`` is the
    spike sum at ``x = theta/(2 pi)``.  Widths are stored as ``ln b`` and
    exponents as ``lam = 1 - beta`` so that paper-scale spikes (b ~ e^-95)
    never underflow.  Each spike's mass ``int u^(-beta) du = b^lam / lam`` is
    kept in log form.
    """

    def __init__(self, centers, ln_widths, one_minus_betas, signs, name: str = "spikes"):
        self.centers = np.atleast_1d(np.asarray(centers, dtype=float))
        self.ln_widths = np.broadcast_to(np.asarray(ln_widths, dtype=float), self.centers.shape).copy()
        self.lams = np.broadcast_to(np.asarray(one_minus_betas, dtype=float), self.centers.shape).copy()
        self.signs = np.broadcast_to(np.asarray(signs, dtype=float), self.centers.shape).copy()
        if np.any((self.lams <= 0) | (self.lams >= 1)):
            raise ValueError("need 0 < 1 - beta < 1 for every spike")
        if np.any(self.centers - np.exp(self.ln_widths) < 0) or np.any(self.centers > 1):
            raise ValueError("spike supports must lie inside [0, 1]")
        self.name = name
        self.smooth = False
        self.declared_mean_zero = abs(self.line_mean()) <= TOL_MEAN

    @property
    def widths(self) -> np.ndarray:
        return np.exp(self.ln_widths)

    @property
    def ln_masses(self) -> np.ndarray:
        return self.lams * self.ln_widths - np.log(self.lams)

    @property
    def masses(self) -> np.ndarray:
        return np.exp(self.ln_masses)

    def line(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.zeros(flat.shape, dtype=complex)
        b = self.widths
        for c, bw, lam, s in zip(self.centers, b, self.lams, self.signs):
            u = c - flat
            if np.any(u == 0):
                raise SingularPoint(f"x = {c!r} is a spike endpoint")
            inside = (u > 0) & (u < bw)
            out[inside] += s * np.exp(-(1.0 - lam) * np.log(u[inside]))
        return out.reshape(x.shape)

    def __call__(self, theta):
        return self.line(np.mod(np.asarray(theta, dtype=float), TWO_PI) / TWO_PI)

    def line_mean(self) -> float:
        return kahan_sum(self.signs * self.masses)

    def mean_value(self, tol: float = 1e-12) -> complex:
        return complex(TWO_PI * self.line_mean())

    def l1_with_error(self, tol: float = 1e-12):
        return TWO_PI * kahan_sum(self.masses), 0.0

    def abs(self) -> "SpikeKernel":
        return SpikeKernel(self.centers, self.ln_widths, self.lams, np.abs(self.signs), name=f"|{self.name}|")

    @property
    def breakpoints(self):
        if len(self.centers) > 256:
            return ()
        pts = np.concatenate([self.centers, self.centers - self.widths]) * TWO_PI
        return tuple(sorted(set(pts.tolist())))

    def sup_estimate(self, samples: int = 4096) -> float:
        return math.inf

    def log_weight_integral(self, offsets, power: float, tol: float = 1e-10, periodic: bool = False):
        """Per-spike ``int_0^b u^(-beta) ln^power(1/D(d_i - u)) du`` summed with |weights|.

        ``offsets[i] = c_i - z`` is the signed distance from the spike endpoint
        to the singular point ``z`` of the weight.  ``D(t) = |t|`` on the line
        and ``|sin(2 pi t)|`` on the circle (``periodic=True``).  Returns
        ``(value, error)`` of ``sum_i int |spike_i| * ln^power(...)``.

        Spikes far from ``z`` (distance > 1e3 * b) contribute
        ``mass * ln^power(1/D(d))`` with a first-order error bound; a spike
        ending exactly at ``z`` uses the closed form
        ``lam^-(p+1) Gamma(p+1, lam * ln(1/b))``; anything else is integrated
        with graded quadrature.
        """
        offsets = np.asarray(offsets, dtype=float)
        if periodic:
            offsets = (offsets + 0.25) % 0.5 - 0.25

            def dist(t):
                return np.abs(np.sin(TWO_PI * t))
        else:
            def dist(t):
                return np.abs(t)

        values = np.zeros(len(self.centers))
        errors = np.zeros(len(self.centers))
        b = self.widths
        masses = self.masses
        shift = math.log(TWO_PI) if periodic else 0.0
        for i, (d, lam, lnb) in enumerate(zip(offsets, self.lams, self.ln_widths)):
            if d == 0 and (not periodic or b[i] < 1e-6):
                # ln(1/D(u)) = ln(1/u) - shift + O(u^2): substitute v = ln(1/u)
                lnv = -lam * shift - (power + 1.0) * math.log(lam) + log_upper_gamma(power + 1.0, lam * (-lnb - shift))
                values[i] = math.exp(lnv)
                errors[i] = values[i] * (power * (TWO_PI * b[i]) ** 2 if periodic else 1e-14)
                continue
            gap = -d if d < 0 else d - b[i]
            if gap > 1e3 * b[i]:
                lw = max(-math.log(float(dist(np.array(d)))), 0.0)
                values[i] = masses[i] * lw**power
                errors[i] = values[i] * power * (b[i] / gap) / lw if lw > 0 else 0.0
                continue
            values[i], errors[i] = self._graded_spike(
                d, lam, b[i], power, dist, tol / max(len(self.centers), 1)
            )
        return kahan_sum(values), float(errors.sum())

    @staticmethod
    def _graded_spike(d, lam, b, power, dist, tol):
        beta = 1.0 - lam

        def g(u):
            lw = -np.log(dist(d - u))
            return u ** (-beta) * np.maximum(lw, 0.0) ** power

        if 0 < d < b:
            v1, e1 = graded_integral(lambda s: g(d - s), d, tol / 4, decay=1.0)
            v2, e2 = graded_integral(lambda s: g(d + s), b - d, tol / 4, decay=1.0)
            v0, e0 = graded_integral(g, min(d, b) / 2, tol / 4, decay=lam)
            # the graded pieces double count (0, d/2]; remove it
            v3, e3 = graded_integral(lambda s: g(d - s), d / 2, tol / 4, decay=1.0)
            return v0 + (v1 - v3) + v2, e0 + e1 + e2 + e3
        return graded_integral(g, b, tol, decay=lam)

    def descriptor(self) -> dict:
        return {
            "type": "spikes",
            "name": self.name,
            "centers": self.centers.tolist(),
            "ln_widths": self.ln_widths.tolist(),
            "one_minus_betas": self.lams.tolist(),
            "signs": self.signs.tolist(),
        }


class CallbackKernel(SphericalKernel):
    """Kernel given by a vectorized callable of the angle."""

    def __init__(self, func, name: str = "callback", breakpoints=(), smooth: bool = False,
                 mean_zero: bool | None = None, builtin: dict | None = None):
        self.func = func
        self.name = name
        self._breakpoints = tuple(sorted(float(b) % TWO_PI for b in breakpoints))
        self.smooth = smooth
        self._builtin = builtin
        if mean_zero is None:
            mean_zero = abs(self.mean_value()) <= TOL_MEAN
        self.declared_mean_zero = mean_zero

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.asarray(self.func(np.mod(theta, TWO_PI)), dtype=complex) * np.ones_like(theta)

    @property
    def breakpoints(self):
        return self._breakpoints

    def descriptor(self) -> dict:
        if self._builtin is None:
            return super().descriptor()
        return dict(self._builtin)


class ShiftedKernel(SphericalKernel):
    """``base - shift`` for a constant ``shift``; mean is tracked exactly."""

    def __init__(self, base: SphericalKernel, shift: complex):
        self.base = base
        self.shift = complex(shift)
        self.name = f"{base.name}-mean"
        self.smooth = base.smooth
        self._base_mean = base.mean_value()
        self.declared_mean_zero = abs(self._base_mean - TWO_PI * self.shift) <= TOL_MEAN

    def __call__(self, theta):
        return self.base(theta) - self.shift

    def line(self, x):
        return self.base.line(x) - self.shift

    @property
    def breakpoints(self):
        return self.base.breakpoints

    def mean_value(self, tol: float = 1e-12) -> complex:
        return self._base_mean - TWO_PI * self.shift

    def descriptor(self) -> dict:
        return {"type": "shifted", "base": self.base.descriptor(), "shift": [self.shift.real, self.shift.imag]}


# ---------------------------------------------------------------------------


def eval_kernel(k: SphericalKernel, theta) -> complex:
    """Pointwise value of ``k`` at one direction."""
    return complex(np.asarray(k(np.array([as_angle(theta)])))[0])


def mean_value(k: SphericalKernel, tol: float = 1e-12) -> complex:
    """``int_0^{2pi} Omega(theta) d theta`` (unnormalized arc length)."""
    return k.mean_value(tol)


def project_mean_zero(k: SphericalKernel) -> SphericalKernel:
    """Subtract the average ``mean_value(k) / (2 pi)``."""
    if isinstance(k, FourierKernel):
        coeffs = {l: c for l, c in k.coefficients.items() if l != 0}
        return FourierKernel(coeffs, name=k.name)
    if isinstance(k, SampledKernel):
        return SampledKernel(k.samples - k.samples.mean(), k.interpolation, name=k.name)
    m = k.mean_value()
    if m == 0:
        return k
    if isinstance(k, ShiftedKernel):
        return ShiftedKernel(k.base, k.shift + m / TWO_PI)
    return ShiftedKernel(k, m / TWO_PI)


def moments(k: SphericalKernel, tol: float = 1e-10, overflow_cap: float = DEFAULT_OVERFLOW_CAP) -> KernelMoments:
    """L^1 norm, mean and the L log L integral ``int |Omega| ln(2 + |Omega|)``."""
    mean = k.mean_value()
    if isinstance(k, SpikeKernel):
        l1, l1_err = k.l1_with_error()
        total = []
        err = 0.0
        for lnb, lam in zip(k.ln_widths, k.lams):
            beta = 1.0 - lam
            # ln(2 + u^-beta) = beta ln(1/u) + ln(1 + 2 u^beta)
            main = beta * math.exp(-2.0 * math.log(lam) + log_upper_gamma(2.0, -lam * lnb))
            b = math.exp(lnb)
            rest, rest_err = graded_integral(lambda u: u ** (-beta) * np.log1p(2.0 * u**beta), b, tol * b, decay=1.0) if b > 1e-30 else (0.0, 2.0 * b)
            total.append(main + rest)
            err += rest_err
        llogl = TWO_PI * kahan_sum(np.array(total))
        llogl_err = TWO_PI * err
    else:
        l1, l1_err = k.l1_with_error(tol)
        breaks = k.abs_breakpoints()
        llogl, llogl_err = adaptive_gauss(
            lambda t: (lambda a: a * np.log(2.0 + a))(np.abs(k(t))), 0.0, TWO_PI, tol,
            breakpoints=breaks, initial_panels=8,
        )
        llogl = float(llogl)
    if not math.isfinite(llogl) or llogl > overflow_cap:
        raise DivergentMoment(f"L log L integral exceeds cap {overflow_cap:g}")
    return KernelMoments(float(l1), complex(mean), float(llogl), l1_err, llogl_err)


@dataclass
class LineKernel:
    """``Omega~(x) = Omega(cos 2 pi x, sin 2 pi x)`` on [0, 1]."""

    kernel: SphericalKernel

    def __call__(self, x):
        return self.kernel.line(x)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(b / TWO_PI for b in self.kernel.abs_breakpoints())

    def l1_norm(self, tol: float = 1e-12) -> float:
        if isinstance(self.kernel, SpikeKernel):
            return kahan_sum(self.kernel.masses)
        val, _ = adaptive_gauss(lambda x: np.abs(self(x)), 0.0, 1.0, tol, breakpoints=self.breakpoints, initial_panels=8)
        return float(val)


def to_line_function(k: SphericalKernel) -> LineKernel:
    return LineKernel(k)


# --------------------------------------------------------------- builtins


def _sign_kernel() -> CallbackKernel:
    return CallbackKernel(
        lambda t: np.sign(np.cos(t)),
        name="sign",
        breakpoints=(math.pi / 2, 3 * math.pi / 2),
        mean_zero=True,
        builtin={"type": "builtin", "name": "sign"},
    )


def h1_member_kernel(terms: int = 1024) -> FourierKernel:
    """Truncation of ``sum_{k>=2} e^{ik theta} / (ln k)^2``."""
    return FourierKernel({k: 1.0 / math.log(k) ** 2 for k in range(2, terms + 1)}, name="h1member")


def builtin(name: str, **params) -> SphericalKernel:
    """Named kernels: cos, sin, sign, h1member, gs-counterexample."""
    if name == "cos":
        return FourierKernel({1: 0.5, -1: 0.5}, name="cos")
    if name == "sin":
        return FourierKernel({1: -0.5j, -1: 0.5j}, name="sin")
    if name == "sign":
        return _sign_kernel()
    if name == "h1member":
        return h1_member_kernel(int(params.get("terms", 1024)))
    if name == "gs-counterexample":
        from .counterexample import counterexample_kernel

        return counterexample_kernel(int(params.get("count", 1000)), n0=int(params.get("n0", 10**9)))
    raise KeyError(f"unknown builtin kernel {name!r}")


def from_descriptor(desc: Mapping | str) -> SphericalKernel:
    """Build a kernel from its JSON descriptor (or ``"builtin:<name>"``)."""
    if isinstance(desc, str):
        if desc.startswith("builtin:"):
            return builtin(desc.split(":", 1)[1])
        raise ValueError(f"cannot parse kernel spec {desc!r}")
    kind = desc["type"]
    if kind == "fourier":
        return FourierKernel({int(l): complex(re, im) for l, re, im in desc["coefficients"]}, name=desc.get("name", "fourier"))
    if kind == "sampled":
        re = np.asarray(desc["samples_re"], dtype=float)
        im = np.asarray(desc.get("samples_im", np.zeros_like(re)), dtype=float)
        return SampledKernel(re + 1j * im, desc.get("interpolation", "trig"), name=desc.get("name", "sampled"))
    if kind == "spikes":
        return SpikeKernel(desc["centers"], desc["ln_widths"], desc["one_minus_betas"], desc["signs"], name=desc.get("name", "spikes"))
    if kind == "builtin":
        return builtin(desc["name"], **desc.get("params", {}))
    if kind == "shifted":
        return ShiftedKernel(from_descriptor(desc["base"]), complex(*desc["shift"]))
    raise ValueError(f"unknown kernel type {kind!r}")
