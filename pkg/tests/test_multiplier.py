import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special

from roughsio.errors import CalibrationError
from roughsio.kernel import CallbackKernel, FourierKernel, SpikeKernel, builtin
from roughsio.multiplier import (
    LN2,
    FrequencyPoint,
    LPWindow,
    SchwartzBump,
    abs_sigma0_hat,
    bessel_radial,
    decay_scan,
    dyadic_symbol,
    inner_bound,
    inner_oscillatory,
    product_budget,
    mu_symbol,
    partition_sum,
    sigma0_hat,
    smoothstep,
    symbol_grid,
    symbol_points,
    tj_symbol,
    tj_symbol_norm,
    tj_symbol_points,
)

TWO_PI = 2 * math.pi


def quad_complex(f, a, b, **kw):
    re, _ = integrate.quad(lambda x: f(x).real, a, b, limit=400, epsabs=1e-14, **kw)
    im, _ = integrate.quad(lambda x: f(x).imag, a, b, limit=400, epsabs=1e-14, **kw)
    return re + 1j * im


@pytest.mark.parametrize("t", [-3.7, -0.05, 0.0, 0.01, 0.079, 0.08, 1.0, 12.5, 400.0])
def test_inner_integral_against_quadrature(t):
    w = 2 * np.pi * t
    re, _ = integrate.quad(lambda r: 1 / r, 1.0, 2.0, weight="cos", wvar=w, epsabs=1e-15)
    im, _ = integrate.quad(lambda r: 1 / r, 1.0, 2.0, weight="sin", wvar=w, epsabs=1e-15)
    ref = re + 1j * im
    assert inner_oscillatory(t) == pytest.approx(ref, abs=1e-13)


@given(st.floats(-1e4, 1e4))
def test_inner_integral_bounded(t):
    assert abs(inner_oscillatory(t)) <= inner_bound(t) + 1e-14


@pytest.mark.parametrize("a", [0.3, 5.0, 39.9, 40.1, 250.0])
def test_bessel_radial(a):
    got = bessel_radial(np.array([a]), 4)[0]
    for l in range(5):
        ref, _ = integrate.quad(lambda x: special.jv(l, x) / x, a, 2 * a, limit=500, epsabs=1e-15)
        assert got[l] == pytest.approx(ref, abs=1e-13)


def test_cos_symbol_two_dimensional_oracle():
    # frozen from a dblquad over the unit annulus with kernel x1/|x|^3
    assert sigma0_hat(builtin("cos"), (1.0, 0.0)).value == pytest.approx(0.10719725034488274j, abs=1e-10)


def test_symbol_at_origin_is_mean_times_ln2():
    k = FourierKernel({0: 1.0, 2: 1.0})
    assert sigma0_hat(k, 0.0).value == pytest.approx(TWO_PI * LN2, abs=1e-13)


@pytest.mark.parametrize("r", [0.3, 3.0, 50.0, 2000.0])
def test_harmonic_and_quadrature_routes_agree(r):
    four = builtin("cos")
    call = CallbackKernel(np.cos, name="cos-cb", smooth=True, mean_zero=True)
    angles = np.array([0.0, 0.9, 2.5])
    a, _ = symbol_grid(four, [r], angles)
    b, eb = symbol_grid(call, [r], angles)
    assert np.allclose(a, b, atol=1e-8)
    assert np.all(eb < 1e-7)


def test_spike_symbol_against_quadrature():
    k = SpikeKernel([0.3, 0.6], math.log(1e-3), 0.5, [1.0, -1.0])
    r, phi = 40.0, 0.4
    ref = 0.0
    for c, s in ((0.3, 1.0), (0.6, -1.0)):
        # u = v^2 removes the u^-1/2 endpoint singularity
        def f(v, c=c):
            theta = TWO_PI * (c - v * v)
            return 2.0 * inner_oscillatory(r * math.cos(theta - phi))

        ref += s * TWO_PI * quad_complex(f, 0.0, math.sqrt(1e-3))
    assert sigma0_hat(k, FrequencyPoint(r, phi)).value == pytest.approx(ref, abs=1e-8)


@given(st.integers(-6, 6), st.floats(0.01, 30.0), st.floats(0.0, TWO_PI))
def test_dilation(kk, r, phi):
    k = builtin("sin")
    xi = FrequencyPoint(r, phi)
    assert dyadic_symbol(k, kk, xi).value == pytest.approx(sigma0_hat(k, xi.dilate(2.0**kk)).value, abs=1e-12)


@given(st.floats(0.01, 500.0), st.floats(0.0, TWO_PI))
def test_abs_symbol_dominates(r, phi):
    k = builtin("cos")
    assert abs(sigma0_hat(k, FrequencyPoint(r, phi)).value) <= abs_sigma0_hat(k, 0.0).value.real + 1e-12


def test_pointwise_matches_grid():
    k = builtin("cos")
    radii = np.array([0.2, 3.0, 70.0])
    angles = np.array([0.1, 1.0, 2.0])
    grid, _ = symbol_grid(k, radii, angles)
    pts = symbol_points(k, radii[:, None], angles[None, :])
    assert np.allclose(grid, pts, atol=1e-13)


@given(st.floats(-3, 3))
def test_smoothstep_range(x):
    v = float(smoothstep(x))
    assert 0.0 <= v <= 1.0


@pytest.mark.parametrize("w", [LPWindow(), LPWindow(1.5, 2.25)], ids=["default", "narrow"])
def test_partition_of_unity(w):
    r = np.geomspace(1e-6, 1e6, 2000)
    assert np.max(np.abs(partition_sum(w, r) - 1.0)) <= 1e-12
    assert np.all(w(r[(r < w.r_lo) | (r > w.r_hi)]) == 0.0)


def test_window_rejects_bad_support():
    with pytest.raises(ValueError):
        LPWindow(1.0, 3.0)


def test_mu_requires_calibration():
    k = builtin("cos")
    with pytest.raises(CalibrationError):
        mu_symbol(k, 0, 1.0, SchwartzBump())
    bump = SchwartzBump.calibrated(k)
    assert abs(mu_symbol(k, 0, 0.0, bump).value) <= 1e-10


@given(st.integers(-3, 3))
def test_tj_symbol_dilation_invariant(j):
    k = builtin("cos")
    w = LPWindow()
    angles = np.array([0.0, 0.7])
    a = tj_symbol(k, j, [1.3], angles, w)
    b = tj_symbol(k, j, [2.6], angles, w)
    assert np.allclose(a, b, atol=1e-12)


def test_tj_points_match_grid():
    k = builtin("cos")
    w = LPWindow()
    r = np.array([0.7, 1.9])
    a = np.array([0.3, 1.4])
    grid = tj_symbol(k, 2, r, a, w)
    pts = tj_symbol_points(k, 2, r[:, None], a[None, :], w)
    assert np.allclose(grid, pts, atol=1e-12)


def test_tj_norm_bounded_by_sum_of_pieces():
    k = builtin("cos")
    n = tj_symbol_norm(k, 0)
    assert 0 < n <= 2 * abs_sigma0_hat(k, 0.0).value.real


def test_budget_formula():
    assert product_budget(2.0, 1, [0, 2], 1.0) == pytest.approx(4.0 * 2.0**-2 * 4.0**-2)


def test_decay_scan_constants():
    rep = decay_scan(builtin("cos"), [0.25, 0.5, 4.0, 8.0], 2.0, directions=16)
    assert rep.c_small == pytest.approx(max(s / r for s, r in zip(rep.sup_values[:2], rep.radii[:2])))
    assert rep.c_large == pytest.approx(max(s * math.log(r) ** 3 for s, r in zip(rep.sup_values[2:], rep.radii[2:])))
