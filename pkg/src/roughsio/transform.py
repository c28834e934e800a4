"""Grid realizations of the truncated, dyadic, maximal and Littlewood-Paley operators.

Grid convention: ``values[i, j]`` samples ``f(-L + i h, -L + j h)`` with
``h = 2L/N``; axis 0 is the first coordinate.  Convolutions with spatial
kernels use zero extension (2x zero padding, no wraparound) and are
defined as the lattice sums

    (K f)[p] = sum_q w[p - q] f[q],   w[m] = h^2 Omega(m/|m|) |m h|^-2 * frac(m),

where ``frac`` is the fraction of a 4x4 subsample of the cell that lies in
``eps <= |y| < R``.  Fractions add across adjacent shells, so nesting
identities hold up to float rounding.

Spectral operators (band filters, ``T_j``, ``Q_j``) act periodically on
the grid's torus: they multiply the DFT by a symbol sampled at the grid
frequencies ``fftfreq(N, h)``.  Kernel symbols carry the ``e^{+2 pi i}``
phase, so they are sampled at the reflected frequencies.
"""

from __future__ import annotations

import io
import json
import math
import struct
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ResolutionError
from .kernel import TWO_PI, SphericalKernel
from .multiplier import LPWindow, SchwartzBump, abs_kernel, symbol_points, tj_symbol_points

SUBSAMPLES = 4


@dataclass(frozen=True)
class Grid2D:
    half_width: float
    n: int
    values: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise DomainError("points per axis must be a power of two")
        if not self.half_width > 0:
            raise DomainError("half width must be positive")
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.n, self.n):
            raise DomainError(f"values must be {self.n}x{self.n}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("grid values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def axis(self) -> np.ndarray:
        return -self.half_width + self.h * np.arange(self.n)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    def like(self, values, **meta) -> "Grid2D":
        return Grid2D(self.half_width, self.n, values, meta)

    @classmethod
    def from_function(cls, func: Callable, half_width: float, n: int) -> "Grid2D":
        g = cls(half_width, n, np.zeros((n, n)))
        x, y = g.mesh()
        return g.like(func(x, y))

    def __add__(self, other: "Grid2D") -> "Grid2D":
        return self.like(self.values + other.values)

    def __sub__(self, other: "Grid2D") -> "Grid2D":
        return self.like(self.values - other.values)


@dataclass(frozen=True)
class TruncationSpec:
    inner: float
    outer: float

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise DomainError("need 0 < inner < outer")


@dataclass
class LpReport:
    p: float
    input_norm: float
    output_norm: float
    ratio: float
    family: str
    seed: int
    ratios: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


# ------------------------------------------------------------- kernels


def _offsets(n: int) -> np.ndarray:
    return np.arange(-(n - 1), n, dtype=float)


def shell_fraction(n: int, h: float, inner: float, outer: float) -> np.ndarray:
    """Covered fraction of each offset cell by ``inner <= |y| < outer``; shape (2n-1, 2n-1)."""
    m = _offsets(n)
    sub = (np.arange(SUBSAMPLES) + 0.5) / SUBSAMPLES - 0.5
    pts = (m[:, None] + sub[None, :]).ravel() * h
    r2 = pts[:, None] ** 2 + pts[None, :] ** 2
    inside = (r2 >= inner * inner) & (r2 < outer * outer)
    size = len(m)
    counts = inside.reshape(size, SUBSAMPLES, size, SUBSAMPLES).sum(axis=(1, 3))
    return counts / SUBSAMPLES**2


def kernel_weights(k: SphericalKernel, n: int, h: float, inner: float, outer: float) -> np.ndarray:
    """Lattice weights ``h^2 Omega(m/|m|) |m h|^-2 frac(m)``."""
    frac = shell_fraction(n, h, inner, outer)
    m = _offsets(n)
    mx, my = np.meshgrid(m, m, indexing="ij")
    live = frac > 0
    w = np.zeros(frac.shape, dtype=complex)
    ang = np.arctan2(my[live], mx[live])
    w[live] = k(ang) * frac[live] / (mx[live] ** 2 + my[live] ** 2)
    return w


def _fft_convolve(f: np.ndarray, w: np.ndarray) -> np.ndarray:
    n = f.shape[0]
    size = 2 * n
    fp = np.zeros((size, size), dtype=complex)
    fp[:n, :n] = f
    wp = np.zeros((size, size), dtype=complex)
    # offset m in -(n-1)..(n-1) goes to index m mod size
    idx = np.arange(-(n - 1), n) % size
    wp[np.ix_(idx, idx)] = w
    return np.fft.ifft2(np.fft.fft2(fp) * np.fft.fft2(wp))[:n, :n]


def _check_resolution(f: Grid2D, spec: TruncationSpec):
    if spec.inner < f.h:
        raise ResolutionError(f"inner radius {spec.inner:g} below grid spacing {f.h:g}")


def _tail_bound(k: SphericalKernel, f: Grid2D, outer: float) -> float:
    reach = 2.0 * math.sqrt(2.0) * f.half_width
    if outer >= reach:
        return 0.0
    return float(np.abs(f.values).max()) * k.l1_norm() * math.log(reach / outer)


def apply_truncated(k: SphericalKernel, f: Grid2D, spec: TruncationSpec) -> Grid2D:
    """Convolution with ``Omega(y/|y|)|y|^-2`` on ``inner <= |y| < outer`` (FFT, zero padded)."""
    _check_resolution(f, spec)
    w = kernel_weights(k, f.n, f.h, spec.inner, spec.outer)
    out = _fft_convolve(f.values, w)
    return f.like(out, inner=spec.inner, outer=spec.outer, tail_bound=_tail_bound(k, f, spec.outer))


def apply_truncated_direct(k: SphericalKernel, f: Grid2D, spec: TruncationSpec) -> Grid2D:
    """Same operator by the O(N^4) lattice sum; oracle for :func:`apply_truncated`."""
    _check_resolution(f, spec)
    n = f.n
    w = kernel_weights(k, n, f.h, spec.inner, spec.outer)
    out = np.zeros((n, n), dtype=complex)
    idx = np.arange(n)
    # w index of offset p - q is (p - q) + n - 1
    for p in range(n):
        rows = w[p - idx + n - 1]  # (q, 2n-1)
        block = rows[:, (idx[:, None] - idx[None, :]) + n - 1]  # (q, p', q')
        out[p] = np.einsum("qab,qb->a", block, f.values)
    return f.like(out)


def apply_Tk(k: SphericalKernel, f: Grid2D, kk: int, outer: float) -> Grid2D:
    """``T_k f``: the kernel restricted to ``2^kk <= |y| < outer``."""
    return apply_truncated(k, f, TruncationSpec(2.0**kk, outer))


def dyadic_piece(k: SphericalKernel, f: Grid2D, kk: int, outer: float | None = None) -> Grid2D:
    """``sigma_kk * f``: shell ``2^kk <= |y| < 2^(kk+1)`` (clipped at ``outer``)."""
    hi = 2.0 ** (kk + 1) if outer is None else min(2.0 ** (kk + 1), outer)
    return apply_truncated(k, f, TruncationSpec(2.0**kk, hi))


def maximal_truncated(k: SphericalKernel, f: Grid2D, kk_range: Sequence[int], outer: float) -> Grid2D:
    """``sup_k |T_k f|`` over the given shells."""
    kk_range = list(kk_range)
    if not kk_range:
        raise DomainError("empty shell range")
    vals = [np.abs(apply_Tk(k, f, kk, outer).values) for kk in kk_range if 2.0**kk < outer]
    best = np.max(vals, axis=0) if vals else np.zeros((f.n, f.n))
    return f.like(best)


def sigma_star(k: SphericalKernel, f: Grid2D, kk_range: Sequence[int]) -> Grid2D:
    """``sup_k |sigma_k| * |f|`` with ``|Omega|`` as kernel."""
    ak = abs_kernel(k)
    af = f.like(np.abs(f.values))
    vals = [np.abs(dyadic_piece(ak, af, kk).values) for kk in kk_range]
    return f.like(np.max(vals, axis=0))


def disc_counts(radius_cells: float) -> np.ndarray:
    """Indicator of lattice offsets with ``|m| < radius_cells``."""
    r = int(math.ceil(radius_cells))
    m = np.arange(-r, r + 1)
    return (m[:, None] ** 2 + m[None, :] ** 2 < radius_cells**2).astype(float)


def hl_maximal(f: Grid2D, max_level: int | None = None) -> Grid2D:
    """Centered maximal function over discs of radius ``h 2^m`` (zero extension).

    The average divides by the full lattice count of the disc; radius
    ``h`` is the single center cell, so ``Mf >= |f|``.
    """
    a = np.abs(f.values)
    n = f.n
    if max_level is None:
        max_level = int(math.ceil(math.log2(2 * math.sqrt(2) * n))) + 1
    best = a.copy()
    for m in range(1, max_level + 1):
        disc = disc_counts(2.0**m)
        r = disc.shape[0] // 2
        size = 1 << int(math.ceil(math.log2(n + 2 * r + 1)))
        fp = np.zeros((size, size))
        fp[:n, :n] = a
        dp = np.zeros((size, size))
        idx = np.arange(-r, r + 1) % size
        dp[np.ix_(idx, idx)] = disc
        conv = np.fft.irfft2(np.fft.rfft2(fp) * np.fft.rfft2(dp), s=(size, size))[:n, :n]
        best = np.maximum(best, np.maximum(conv, 0.0) / disc.sum())
    return f.like(best)


# ------------------------------------------------------------- spectral


def grid_frequencies(f: Grid2D, reflect: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Radius and angle of each DFT frequency (of ``-xi`` when ``reflect``)."""
    nu = np.fft.fftfreq(f.n, d=f.h)
    fx, fy = np.meshgrid(nu, nu, indexing="ij")
    if reflect:
        fx, fy = -fx, -fy
    return np.hypot(fx, fy), np.arctan2(fy, fx)


def apply_symbol(f: Grid2D, symbol: np.ndarray) -> Grid2D:
    return f.like(np.fft.ifft2(np.fft.fft2(f.values) * symbol))


def band_filter(f: Grid2D, j: int, w: LPWindow | None = None) -> Grid2D:
    """``S_j``: multiply the DFT by ``psi(2^j |xi|)``."""
    w = w or LPWindow()
    r, _ = grid_frequencies(f)
    return apply_symbol(f, w(2.0**j * r))


def band_range(f: Grid2D, w: LPWindow | None = None) -> range:
    """All ``j`` whose window meets a nonzero grid frequency."""
    w = w or LPWindow()
    r, _ = grid_frequencies(f)
    rmin = r[r > 0].min()
    rmax = r.max()
    return range(math.floor(math.log2(w.r_lo / rmax)), math.ceil(math.log2(w.r_hi / rmin)) + 1)


def tj_apply(k: SphericalKernel, f: Grid2D, j: int, w: LPWindow | None = None, tol: float = 1e-10) -> Grid2D:
    """``T_j f = sum_k S_{j+k}(sigma_k * S_{j+k} f)``, evaluated through its symbol."""
    w = w or LPWindow()
    r, a = grid_frequencies(f, reflect=True)
    return apply_symbol(f, tj_symbol_points(k, j, r, a, w, tol))


def qj_apply(
    k: SphericalKernel,
    f: Grid2D,
    j: int,
    bump: SchwartzBump | None = None,
    kk_range: Sequence[int] = (),
    tol: float = 1e-10,
) -> Grid2D:
    """``Q_j f = sup_k |(delta - Phi_k) * sigma_{j+k} * f|`` over ``kk_range``."""
    if j < 0:
        raise DomainError("j must be nonnegative")
    bump = bump or SchwartzBump()
    r, a = grid_frequencies(f, reflect=True)
    F = np.fft.fft2(f.values)
    best = np.zeros((f.n, f.n))
    for kk in kk_range:
        sym = (1.0 - bump(2.0**kk * r)) * symbol_points(k, 2.0 ** (j + kk) * r, a, tol)
        best = np.maximum(best, np.abs(np.fft.ifft2(F * sym)))
    return f.like(best)


def mu_square_function(k: SphericalKernel, f: Grid2D, kk_range: Sequence[int], bump: SchwartzBump) -> Grid2D:
    """``(sum_k |mu_k * |f||^2)^(1/2)`` with ``mu_k = |sigma_k| - Phi_k`` (spectral)."""
    ak = abs_kernel(k)
    r, a = grid_frequencies(f, reflect=True)
    F = np.fft.fft2(np.abs(f.values))
    acc = np.zeros((f.n, f.n))
    for kk in kk_range:
        sym = symbol_points(ak, 2.0**kk * r, a) - bump(2.0**kk * r)
        acc += np.abs(np.fft.ifft2(F * sym)) ** 2
    return f.like(np.sqrt(acc))


# ----------------------------------------------------------- Rademacher


def rademacher_square_identity(pieces: Sequence[Grid2D], chunk: int = 4096) -> tuple[float, float]:
    """Average over all sign patterns of ``||sum eps_k a_k||_2^2`` and ``sum ||a_k||_2^2``."""
    K = len(pieces)
    if not 1 <= K <= 16:
        raise DomainError("need 1 <= K <= 16 pieces")
    h2 = pieces[0].h ** 2
    A = np.stack([p.values.ravel() for p in pieces])
    total = 0.0
    patterns = 1 << K
    bits = np.arange(K)
    for start in range(0, patterns, chunk):
        ids = np.arange(start, min(start + chunk, patterns))
        signs = 1.0 - 2.0 * ((ids[:, None] >> bits[None, :]) & 1)
        sums = signs @ A
        total += float(np.sum(np.abs(sums) ** 2))
    average = total * h2 / patterns
    squares = float(np.sum(np.abs(A) ** 2)) * h2
    return average, squares


# --------------------------------------------------------------- norms


def lp_norm(f: Grid2D | np.ndarray, p: float, h: float | None = None) -> float:
    """``(sum |f|^p h^2)^(1/p)``."""
    if not p > 1:
        raise DomainError("p must exceed 1")
    if isinstance(f, Grid2D):
        vals, h = f.values, f.h
    else:
        vals = np.asarray(f)
        if h is None:
            raise DomainError("spacing required for raw arrays")
    a = np.abs(vals).ravel()
    scale = a.max() if a.size else 0.0
    if scale == 0:
        return 0.0
    return float(scale * (np.sum((a / scale) ** p) * h * h) ** (1.0 / p))


FAMILIES = ("gaussian", "bandlimited", "tent")


def probe_family(family: str, half_width: float, n: int, count: int, seed: int) -> list[Grid2D]:
    """Seeded test functions: Gaussian bumps, random band-limited, dilated tents."""
    if family not in FAMILIES:
        raise DomainError(f"family must be one of {FAMILIES}")
    rng = np.random.default_rng(seed)
    base = Grid2D(half_width, n, np.zeros((n, n)))
    x, y = base.mesh()
    out = []
    for _ in range(count):
        cx, cy = rng.uniform(-0.3, 0.3, 2) * half_width
        if family == "gaussian":
            s = rng.uniform(0.05, 0.2) * half_width
            vals = np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * s * s))
        elif family == "tent":
            s = rng.uniform(0.05, 0.3) * half_width
            vals = np.maximum(0.0, 1.0 - np.hypot(x - cx, y - cy) / s)
        else:
            spec = np.zeros((n, n), dtype=complex)
            r, _ = grid_frequencies(base)
            keep = (r > 0) & (r < 0.25 / base.h)
            spec[keep] = rng.normal(size=keep.sum()) + 1j * rng.normal(size=keep.sum())
            vals = np.fft.ifft2(spec).real
        out.append(base.like(vals))
    return out


def _operator(op: str | Callable, params: dict) -> Callable[[Grid2D], Grid2D]:
    if callable(op):
        return op
    if op == "identity":
        return lambda g: g
    k = params.get("kernel")
    if op == "truncated":
        spec = TruncationSpec(params["inner"], params["outer"])
        return lambda g: apply_truncated(k, g, spec)
    if op == "maximal":
        return lambda g: maximal_truncated(k, g, params["shells"], params["outer"])
    if op == "sigma_star":
        return lambda g: sigma_star(k, g, params["shells"])
    if op == "hl":
        return hl_maximal
    if op == "tj":
        return lambda g: tj_apply(k, g, params["j"])
    raise DomainError(f"unknown operator {op!r}")


def operator_norm_probe(
    op: str | Callable,
    p: float,
    family: str = "gaussian",
    seed: int = 0,
    *,
    params: dict | None = None,
    half_width: float = 8.0,
    n: int = 64,
    count: int = 8,
) -> LpReport:
    """Largest ``||Op f||_p / ||f||_p`` over a seeded family (a lower bound for the norm)."""
    if not p > 1:
        raise DomainError("p must exceed 1")
    apply = _operator(op, params or {})
    ratios = []
    best = (0.0, 0.0, 0.0)
    for g in probe_family(family, half_width, n, count, seed):
        a = lp_norm(g, p)
        b = lp_norm(apply(g), p)
        r = b / a if a > 0 else 0.0
        ratios.append(r)
        if r >= best[0]:
            best = (r, a, b)
    return LpReport(p, best[1], best[2], best[0], family, seed, ratios)


# ----------------------------------------------------------------- I/O

_HEADER = struct.Struct("<qd")


def grid_to_bytes(g: Grid2D) -> bytes:
    """Header (N as int64, L as float64) then row-major interleaved re/im float64, little endian."""
    data = np.empty((g.n, g.n, 2), dtype="<f8")
    data[..., 0] = g.values.real
    data[..., 1] = g.values.imag
    return _HEADER.pack(g.n, g.half_width) + data.tobytes()


def grid_from_bytes(raw: bytes) -> Grid2D:
    n, L = _HEADER.unpack_from(raw)
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(n, n, 2)
    return Grid2D(L, n, data[..., 0] + 1j * data[..., 1])


def grid_to_csv(g: Grid2D) -> str:
    buf = io.StringIO()
    buf.write(f"# n={g.n} half_width={float(g.half_width)!r}\n")
    buf.write("i,j,re,im\n")
    for i in range(g.n):
        for j in range(g.n):
            v = g.values[i, j]
            buf.write(f"{i},{j},{float(v.real)!r},{float(v.imag)!r}\n")
    return buf.getvalue()


def grid_from_csv(text: str) -> Grid2D:
    lines = text.splitlines()
    meta = dict(part.split("=") for part in lines[0].lstrip("# ").split())
    n = int(meta["n"])
    vals = np.zeros((n, n), dtype=complex)
    for line in lines[2:]:
        i, j, re, im = line.split(",")
        vals[int(i), int(j)] = float(re) + 1j * float(im)
    return Grid2D(float(meta["half_width"]), n, vals)
