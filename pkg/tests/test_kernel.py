import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from roughsio.errors import DivergentMoment, SingularPoint
from roughsio.kernel import (
    CallbackKernel,
    FourierKernel,
    SampledKernel,
    SpikeKernel,
    UnitDirection,
    builtin,
    eval_kernel,
    from_descriptor,
    mean_value,
    moments,
    project_mean_zero,
    to_line_function,
)

TWO_PI = 2 * math.pi
coeff = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


def fourier_kernels():
    return st.dictionaries(st.integers(-6, 6), coeff, min_size=1, max_size=5).map(FourierKernel)


@pytest.mark.parametrize("theta,expected", [(0.0, 1.0), (math.pi, -1.0)])
def test_single_harmonic_values(theta, expected):
    assert eval_kernel(FourierKernel({1: 1.0}), UnitDirection(theta)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("interp,tol", [("trig", 1e-13), ("linear", 1e-3)])
def test_sampled_cos(interp, tol):
    samples = np.cos(TWO_PI * np.arange(256) / 256)
    k = SampledKernel(samples, interp)
    assert eval_kernel(k, math.pi / 3).real == pytest.approx(0.5, abs=tol)


def test_constant_and_harmonic_means():
    assert mean_value(FourierKernel({0: 1.0})) == pytest.approx(TWO_PI)
    assert abs(mean_value(FourierKernel({1: 1.0}))) == 0.0


def test_spike_pair_mean_cancels():
    k = SpikeKernel([0.3, 0.6], math.log(1e-3), 0.5, [1.0, -1.0])
    assert abs(mean_value(k)) <= 1e-12


def test_spike_endpoint_is_singular():
    k = SpikeKernel([0.5], math.log(1e-2), 0.5, [1.0])
    with pytest.raises(SingularPoint):
        k.line(0.5)


def test_projection_kills_only_constant():
    k = project_mean_zero(FourierKernel({0: 3.0, 1: 2.0}))
    assert k.coefficients == {1: 2.0}
    assert project_mean_zero(FourierKernel({0: 1.0})).coefficients == {}


@given(fourier_kernels())
def test_projection_idempotent_fourier(k):
    once = project_mean_zero(k)
    twice = project_mean_zero(once)
    t = np.linspace(0, TWO_PI, 17)
    assert np.allclose(once(t), twice(t), atol=1e-12)
    assert abs(mean_value(once)) <= 1e-10


@pytest.mark.parametrize(
    "k",
    [
        CallbackKernel(lambda t: np.exp(np.cos(t)), name="expcos", smooth=True),
        SampledKernel(np.abs(np.sin(np.linspace(0, TWO_PI, 64, endpoint=False))), "linear"),
        SpikeKernel([0.4], math.log(0.05), 0.6, [1.0]),
    ],
    ids=["callback", "sampled", "spike"],
)
def test_projection_idempotent_other(k):
    once = project_mean_zero(k)
    assert abs(mean_value(once)) <= 1e-10
    twice = project_mean_zero(once)
    t = np.array([0.1, 1.0, 2.0, 4.0])
    assert np.allclose(once(t), twice(t), atol=1e-12)


def test_cos_moments():
    m = moments(builtin("cos"))
    ref, _ = integrate.quad(lambda t: abs(math.cos(t)) * math.log(2 + abs(math.cos(t))), 0, TWO_PI,
                            points=[math.pi / 2, 3 * math.pi / 2], epsabs=1e-13, limit=200)
    assert m.l1_norm == pytest.approx(4.0, abs=1e-10)
    assert m.llogl == pytest.approx(ref, abs=1e-9)
    assert m.llogl <= 4 * math.log(3)


def test_zero_moments():
    m = moments(FourierKernel({}))
    assert (m.l1_norm, m.llogl, abs(m.mean)) == (0.0, 0.0, 0.0)


def test_spike_moments_closed_form():
    k = SpikeKernel([0.2, 0.7], [math.log(1e-3), math.log(2e-3)], [0.5, 0.3], [1.0, -1.0])
    m = moments(k)
    assert m.l1_norm == pytest.approx(TWO_PI * sum(k.masses), rel=1e-14)
    ref = 0.0
    for b, lam in zip(k.widths, k.lams):
        beta = 1 - lam
        v, _ = integrate.quad(lambda u: u**-beta * math.log(2 + u**-beta), 0, b, epsabs=1e-14, limit=200)
        ref += v
    assert m.llogl == pytest.approx(TWO_PI * ref, rel=1e-8)


def test_moment_overflow_cap():
    with pytest.raises(DivergentMoment):
        moments(FourierKernel({0: 1e6}), overflow_cap=1.0)


@given(fourier_kernels())
def test_llogl_dominates_l1(k):
    m = moments(k, tol=1e-9)
    assert m.llogl >= m.l1_norm * math.log(2) - 1e-8


@pytest.mark.parametrize("name", ["cos", "sin", "sign"])
def test_line_mass_is_circle_mass_over_two_pi(name):
    k = builtin(name)
    assert to_line_function(k).l1_norm() == pytest.approx(k.l1_norm() / TWO_PI, abs=1e-11)


def test_line_identification():
    line = to_line_function(builtin("cos"))
    x = np.linspace(0, 1, 9)
    assert np.allclose(line(x), np.cos(TWO_PI * x), atol=1e-15)
    assert line(0.0) == eval_kernel(builtin("cos"), 0.0)


@pytest.mark.parametrize(
    "k",
    [
        FourierKernel({1: 0.5 + 0.25j, -3: 1.0}),
        SampledKernel(np.arange(8.0) - 3.5, "linear"),
        SpikeKernel([0.3, 0.6], math.log(1e-3), 0.5, [1.0, -1.0]),
        builtin("sign"),
    ],
    ids=["fourier", "sampled", "spikes", "builtin"],
)
def test_descriptor_round_trip(k):
    k2 = from_descriptor(json.loads(json.dumps(k.descriptor())))
    t = np.array([0.05, 1.3, 2.9, 5.5])
    assert np.allclose(k(t), k2(t), rtol=1e-15, atol=0)


def test_descriptor_errors():
    with pytest.raises(ValueError):
        from_descriptor({"type": "nope"})
    with pytest.raises(KeyError):
        from_descriptor("builtin:nope")
