"""Shared oracles and fixtures.  mpmath is used only here and in tests."""

import math

import mpmath as mp
import numpy as np
import pytest

from ellipdpp.roots import DomainGeometry

mp.mp.dps = 40

_JTHETA_INDEX = {0: 4, 1: 1, 2: 2, 3: 3}


def mp_theta(mu, v, tau):
    """theta_mu(v; tau) from mpmath's jtheta (nome q = e^{i pi tau}, argument pi v)."""
    q = mp.exp(1j * mp.pi * mp.mpc(tau))
    return complex(mp.jtheta(_JTHETA_INDEX[mu], mp.pi * mp.mpc(v), q))


def mp_eta(tau):
    """Dedekind eta from its q-product at 40 digits."""
    tau = mp.mpc(tau)
    return complex(mp.exp(1j * mp.pi * tau / 12) * mp.qp(mp.exp(2j * mp.pi * tau)))


def rel(a, b, floor=1e-300):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)))


def i_zero_oracle(geom, ny=4000):
    """Re int log|theta_1(2z/L)| from the product formula averaged over x.

    The x-average of log|1 - a e^{i t}| is 0 for |a| < 1 and log|a| otherwise;
    only the factor 1 - q^2 e^{-2 pi i v} crosses |a| = 1, on y > W/2.
    """
    L, W = geom.L, geom.W
    y = (np.arange(ny) + 0.5) * W / ny
    avg = (
        -math.pi * W / (4 * L)
        + 2 * math.pi * y / L
        + math.log(abs(mp_eta(geom.tau)))
        + math.pi * W / (12 * L)
        + np.where(y > W / 2, 4 * math.pi * y / L - 2 * math.pi * W / L, 0.0)
    )
    return L * np.sum(avg) * W / ny


def random_points(rng, geom, n, count=None):
    shape = (n,) if count is None else (count, n)
    return geom.L * rng.random(shape) + 1j * geom.W * rng.random(shape)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=[0.5, 1.0, 2.0], ids=lambda a: f"W/L={a}")
def geom(request):
    return DomainGeometry(1.0, request.param)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
