import cmath
import math

import numpy as np
import pytest
from conftest import mp_eta, mp_theta, rel
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipdpp.theta import (
    ModularTau,
    dedekind_eta,
    imaginary_transform,
    log_dedekind_eta,
    reduce_argument,
    theta1_prime_zero,
    theta1_product,
    theta_eval,
    theta_log_abs,
    theta_parts,
)

coord = st.floats(-0.5, 0.5)
tau_im = st.floats(0.2, 3.0)
tau_re = st.floats(-0.5, 0.5)


@pytest.mark.parametrize("mu", range(4))
@pytest.mark.parametrize("tau", [1j, 0.3 + 0.8j, 0.25j, -0.4 + 1.7j, 0.1 + 0.35j])
def test_against_mpmath(mu, tau):
    rng = np.random.default_rng(mu)
    for _ in range(10):
        v = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5) * tau.imag)
        assert rel(theta_eval(mu, v, tau), mp_theta(mu, v, tau)) < 1e-12


def test_vectorized_matches_scalar():
    v = np.array([[0.1 + 0.2j, -0.3j], [0.4, 1.7 + 0.1j]])
    out = theta_eval(2, v, 0.9j)
    assert out.shape == v.shape
    for idx in np.ndindex(v.shape):
        assert out[idx] == pytest.approx(theta_eval(2, v[idx], 0.9j), rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(coord, coord, tau_re, tau_im, st.sampled_from(range(4)))
def test_parity(a, b, tr, ti, mu):
    tau = complex(tr, ti)
    v = a + b * tau
    sign = -1 if mu == 1 else 1
    assert rel(theta_eval(mu, -v, tau), sign * theta_eval(mu, v, tau), floor=1.0) < 1e-11


@settings(max_examples=200, deadline=None)
@given(coord, coord, tau_re, tau_im, st.integers(-4, 4), st.integers(-4, 4))
def test_theta1_quasi_periodicity(a, b, tr, ti, m, n):
    tau = complex(tr, ti)
    v = a + b * tau
    factor = (-1) ** (m + n) * cmath.exp(-1j * math.pi * (2 * n * v + n * n * tau))
    lhs = theta_eval(1, v + m + n * tau, tau)
    assert rel(lhs, factor * theta_eval(1, v, tau), floor=abs(factor)) < 1e-11


@settings(max_examples=100, deadline=None)
@given(coord, coord, tau_re, st.floats(0.6, 1.5), st.sampled_from(range(4)))
def test_transform_agrees_with_series(a, b, tr, ti, mu):
    tau = complex(tr, ti)
    v = a + b * tau
    assert rel(imaginary_transform(mu, v, tau), theta_eval(mu, v, tau, "series"), floor=1.0) < 1e-11


@settings(max_examples=100, deadline=None)
@given(coord, coord, tau_re, st.floats(0.3, 2.0))
def test_product_agrees_with_series(a, b, tr, ti):
    tau = complex(tr, ti)
    v = a + b * tau
    assert rel(theta1_product(v, tau), theta_eval(1, v, tau, "series"), floor=1.0) < 1e-11


def test_zeros_and_special_values():
    tau = 1.1j
    assert theta_eval(1, 0.0, tau) == 0
    assert theta_log_abs(1, 0.0, tau) == -math.inf
    for mu, zero in ((0, tau / 2), (2, 0.5), (3, 0.5 + tau / 2), (1, 2.0 - tau)):
        assert theta_eval(mu, zero, tau) == 0
    # the small-tau transform route keeps exact zeros too
    assert theta_eval(1, 1.0, 0.2j) == 0
    assert theta_eval(1, 1e-12, tau) != 0
    # theta_2(v) = theta_1(v + 1/2)
    assert rel(theta_eval(2, 0.13 + 0.2j, tau), theta_eval(1, 0.63 + 0.2j, tau)) < 1e-14


def test_large_arguments_stay_finite():
    tau = 1j
    v = 0.2 + 300.3j
    scale, unit = theta_parts(3, v, tau)
    assert np.isfinite(scale) and 0 < abs(unit) < 10
    # log|theta| from the quasi-periodicity with m = 300 shifts
    ref = theta_log_abs(3, 0.2 + 0.3j, tau) + math.pi * (2 * 300 * 0.3 + 300**2)
    assert theta_log_abs(3, v, tau) == pytest.approx(ref, rel=1e-13)


def test_reduce_argument_reconstructs():
    tau = 0.2 + 0.9j
    v = 3.7 - 2.4j
    red = reduce_argument(1, v, tau)
    assert abs(red.v_reduced.real) <= 0.5
    assert abs(red.v_reduced.imag) <= tau.imag / 2 + 1e-12
    assert rel(red.prefactor * theta_eval(1, red.v_reduced, tau), mp_theta(1, v, tau)) < 1e-12


@pytest.mark.parametrize("tau", [1j, 0.3j, 2j, 0.2 + 0.7j, 0.45 + 0.3j])
def test_eta_against_product_oracle(tau):
    assert rel(dedekind_eta(tau), mp_eta(tau)) < 1e-13
    assert rel(dedekind_eta(tau, "product"), mp_eta(tau)) < 1e-13


def test_eta_special_value():
    # eta(i) = Gamma(1/4) / (2 pi^{3/4})
    assert dedekind_eta(1j).real == pytest.approx(math.gamma(0.25) / (2 * math.pi**0.75), rel=1e-14)
    assert log_dedekind_eta(1j).imag == pytest.approx(0.0, abs=1e-15)


def test_theta1_prime():
    tau = 0.8j
    h = 1e-6
    num = (theta_eval(1, h, tau) - theta_eval(1, -h, tau)) / (2 * h)
    assert rel(theta1_prime_zero(tau), num) < 1e-9


@pytest.mark.parametrize("bad", [0.0, -1j, 1 - 0.1j, complex("nan")])
def test_invalid_tau(bad):
    with pytest.raises(ValueError):
        theta_eval(1, 0.1, bad)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        theta_eval(4, 0.1, 1j)
    with pytest.raises(ValueError):
        theta_eval(1, float("inf"), 1j)
    with pytest.raises(ValueError):
        theta_eval(1, 0.1, 1j, method="bogus")
    with pytest.raises(ValueError):
        log_dedekind_eta(1j, method="bogus")
    with pytest.raises(OverflowError):
        theta_eval(1, 1e9j, 1j)
    assert ModularTau(2j).nome == pytest.approx(math.exp(-2 * math.pi))
