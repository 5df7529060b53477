"""Jacobi theta functions, Dedekind eta and their transformations.

Conventions: for ``q = exp(i pi tau)`` and ``z = exp(i pi v)``

    theta_0(v; tau) = sum_n (-1)^n q^{n^2} z^{2n}
    theta_1(v; tau) = i sum_n (-1)^n q^{(n-1/2)^2} z^{2n-1}
    theta_2(v; tau) = sum_n q^{(n-1/2)^2} z^{2n-1}
    theta_3(v; tau) = sum_n q^{n^2} z^{2n}

Every evaluation first reduces ``v`` into the cell ``|Im v| <= Im(tau)/2``,
``|Re v| <= 1/2`` using quasi-double-periodicity and keeps the resulting
prefactor in logarithmic form, so that values far outside the cell neither
overflow nor lose relative accuracy.  For ``Im(tau) < 0.5`` Jacobi's imaginary
transformation ``tau -> -1/tau`` is applied before summing.

All functions accept numpy arrays for ``v``; ``tau`` is a scalar.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModularTau",
    "ReducedArgument",
    "TRANSFORM_THRESHOLD",
    "check_tau",
    "theta_eval",
    "theta_parts",
    "theta_log_abs",
    "theta1_product",
    "reduce_argument",
    "imaginary_transform",
    "dedekind_eta",
    "log_dedekind_eta",
    "theta1_prime_zero",
]

TRANSFORM_THRESHOLD = 0.5
MAX_SHIFT = 10**6
MAX_TERMS = 10**4
_SERIES_EPS = 1e-18
_PRODUCT_EPS = 1e-16
_ETA_EPS = 1e-17

# sign picked up under v -> v+1 and v -> v+tau, stored as "odd" flags
_SIGN_ONE = {0: 0, 1: 1, 2: 1, 3: 0}
_SIGN_TAU = {0: 1, 1: 1, 2: 0, 3: 0}
# partner index and phase under tau -> -1/tau
_IMAG_PARTNER = {0: 2, 1: 1, 2: 0, 3: 3}
_IMAG_PHASE = {0: 0.25, 1: 0.75, 2: 0.25, 3: 0.25}


@dataclass(frozen=True)
class ModularTau:
    """A point of the upper half-plane."""

    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", check_tau(self.value))

    @property
    def nome(self) -> complex:
        return cmath.exp(1j * math.pi * self.value)

    def __complex__(self):
        return self.value


@dataclass(frozen=True)
class ReducedArgument:
    """``theta(mu, v, tau) == prefactor * theta(mu, v_reduced, tau)``."""

    v_reduced: complex
    prefactor: complex
    shifts: tuple[int, int]


def check_tau(tau) -> complex:
    if isinstance(tau, ModularTau):
        return tau.value
    tau = complex(tau)
    if not (math.isfinite(tau.real) and math.isfinite(tau.imag)):
        raise ValueError(f"tau must be finite, got {tau!r}")
    if tau.imag <= 0:
        raise ValueError(f"tau must lie in the upper half-plane, got {tau!r}")
    return tau


def _check_mu(mu) -> int:
    if mu not in (0, 1, 2, 3):
        raise ValueError(f"theta index must be one of 0, 1, 2, 3, got {mu!r}")
    return int(mu)


def _as_complex_array(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError("theta argument must be finite")
    return arr


def _reduce(mu, v, tau):
    """Vectorised reduction; returns (v_red, log_prefactor, m, n)."""
    m = np.rint(v.imag / tau.imag)
    if m.size and np.max(np.abs(m)) > MAX_SHIFT:
        raise OverflowError(
            f"argument shift |m| = {np.max(np.abs(m)):.3g} exceeds {MAX_SHIFT}"
        )
    v1 = v - m * tau
    n = np.rint(v1.real)
    v_red = v1 - n
    logpre = -1j * np.pi * (2.0 * m * v_red + m * m * tau)
    odd = m * _SIGN_TAU[mu] + n * _SIGN_ONE[mu]
    logpre = logpre + 1j * np.pi * np.mod(odd, 2.0)
    return v_red, logpre, m, n


def _n_max(tau: complex, a: float) -> int:
    """Smallest n with |q|^{(n-1/2)^2} e^{2 pi n a} below the series tolerance."""
    t = tau.imag
    target = -math.log(_SERIES_EPS)
    n = 2
    while n < MAX_TERMS:
        if math.pi * t * (n - 0.5) ** 2 - 2.0 * math.pi * n * a > target:
            return n + 1
        n += 1
    return MAX_TERMS


def _series_parts(mu, v, tau):
    """Direct series at already-reduced ``v``: returns (log_scale, unit)."""
    a = float(np.max(np.abs(v.imag))) if v.size else 0.0
    nmax = _n_max(tau, a)
    flat = v.reshape(-1)
    if mu in (0, 3):
        k = np.arange(-nmax, nmax + 1, dtype=float)
        expo = 1j * np.pi * tau * (k * k)[:, None] + 2j * np.pi * k[:, None] * flat[None, :]
        if mu == 0:
            expo = expo + 1j * np.pi * np.mod(k, 2.0)[:, None]
    else:
        k = np.arange(-nmax + 1, nmax + 1, dtype=float)
        h = k - 0.5
        expo = 1j * np.pi * tau * (h * h)[:, None] + 2j * np.pi * h[:, None] * flat[None, :]
        if mu == 1:
            expo = expo + 1j * np.pi * (np.mod(k, 2.0) + 0.5)[:, None]
    shift = expo.real.max(axis=0)
    unit = np.exp(expo - shift[None, :]).sum(axis=0)
    return shift.reshape(v.shape), unit.reshape(v.shape)


def _parts(mu, v, tau, method):
    v_red, logpre, _, _ = _reduce(mu, v, tau)
    use_transform = method == "transform" or (
        method == "auto" and tau.imag < TRANSFORM_THRESHOLD and abs(tau) < 1.0
    )
    if use_transform:
        tau_t = -1.0 / tau
        partner = _IMAG_PARTNER[mu]
        w = v_red / tau
        logpre = (
            logpre
            + 1j * np.pi * _IMAG_PHASE[mu]
            - 0.5 * cmath.log(tau)
            - 1j * np.pi * v_red * v_red / tau
        )
        w_red, logpre_t, _, _ = _reduce(partner, w, tau_t)
        scale, unit = _series_parts(partner, w_red, tau_t)
        logpre = logpre + logpre_t
    else:
        scale, unit = _series_parts(mu, v_red, tau)
    logmag = scale + logpre.real
    unit = unit * np.exp(1j * logpre.imag)
    # the paired series terms cancel only to rounding at the lattice zeros
    unit = np.where(_exact_zero(mu, v_red, tau), 0.0, unit)
    return logmag, unit


def _exact_zero(mu, v_red, tau):
    """True where the reduced argument sits exactly on a zero of theta_mu."""
    z0 = {0: 0.5 * tau, 1: 0.0, 2: 0.5, 3: 0.5 + 0.5 * tau}[mu]
    d = v_red - z0
    hit = np.zeros(v_red.shape, dtype=bool)
    for m in (-1, 0, 1):
        for n in (-1, 0, 1):
            hit |= d == m + n * tau
    return hit


def theta_parts(mu, v, tau, method: str = "auto"):
    """Return ``(log_scale, unit)`` with ``theta = exp(log_scale) * unit``.

    ``unit`` has magnitude of order one (smaller near zeros of theta), so the
    pair represents values far outside the floating-point range.
    """
    mu = _check_mu(mu)
    tau = check_tau(tau)
    if method not in ("auto", "series", "transform"):
        raise ValueError(f"unknown method {method!r}")
    return _parts(mu, _as_complex_array(v), tau, method)


def theta_eval(mu, v, tau, method: str = "auto"):
    """Jacobi theta function ``theta_mu(v; tau)``.

    ``method`` selects the evaluation route: ``"auto"`` sums the series for
    ``Im(tau) >= 0.5`` and goes through ``tau -> -1/tau`` otherwise;
    ``"series"`` and ``"transform"`` force one route.
    """
    logmag, unit = theta_parts(mu, v, tau, method)
    out = np.exp(logmag) * unit
    return out[()] if out.ndim == 0 else out


def theta_log_abs(mu, v, tau, method: str = "auto"):
    """``log|theta_mu(v; tau)|``; ``-inf`` at exact zeros."""
    logmag, unit = theta_parts(mu, v, tau, method)
    with np.errstate(divide="ignore"):
        out = logmag + np.log(np.abs(unit))
    return out[()] if out.ndim == 0 else out


def imaginary_transform(mu, v, tau):
    """Evaluate ``theta_mu(v; tau)`` through Jacobi's imaginary transformation."""
    return theta_eval(mu, v, tau, method="transform")


def reduce_argument(mu, v, tau) -> ReducedArgument:
    """Shift ``v`` by ``m tau + n`` into the fundamental cell of the lattice."""
    mu = _check_mu(mu)
    tau = check_tau(tau)
    v = complex(v)
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise ValueError("theta argument must be finite")
    v_red, logpre, m, n = _reduce(mu, np.asarray(v, dtype=complex), tau)
    return ReducedArgument(complex(v_red), complex(np.exp(logpre)), (int(m), int(n)))


def theta1_product(v, tau):
    """``theta_1`` from its infinite product; no argument reduction."""
    tau = check_tau(tau)
    v = _as_complex_array(v)
    q = cmath.exp(1j * math.pi * tau)
    c = np.cos(2.0 * np.pi * v)
    out = 2.0 * cmath.exp(0.25j * math.pi * tau) * np.sin(np.pi * v)
    q2j = 1.0 + 0j
    for _ in range(MAX_TERMS):
        q2j *= q * q
        fac = (1.0 - 2.0 * q2j * c + q2j * q2j) * (1.0 - q2j)
        out = out * fac
        if np.all(np.abs(fac - 1.0) < _PRODUCT_EPS):
            break
    return out[()] if out.ndim == 0 else out


def log_dedekind_eta(tau, method: str = "auto") -> complex:
    """Logarithm of the Dedekind eta function (branch continuous from ``i inf``).

    ``method="product"`` always sums the product directly; ``"auto"`` goes
    through ``eta(-1/tau)`` when ``Im(tau) < 0.5``.
    """
    tau = check_tau(tau)
    if method not in ("auto", "product"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto" and tau.imag < TRANSFORM_THRESHOLD and abs(tau) < 1.0:
        tt = -1.0 / tau
        return log_dedekind_eta(tt) - 0.5 * cmath.log(-1j * tau)
    q2 = cmath.exp(2j * math.pi * tau)
    total = 1j * math.pi * tau / 12.0
    p = 1.0 + 0j
    terms = []
    for _ in range(MAX_TERMS):
        p *= q2
        terms.append(cmath.log(1.0 - p))
        if abs(p) < _ETA_EPS:
            break
    re = math.fsum(t.real for t in terms)
    im = math.fsum(t.imag for t in terms)
    return total + complex(re, im)


def dedekind_eta(tau, method: str = "auto") -> complex:
    """Dedekind eta ``e^{i pi tau/12} prod_{n>=1} (1 - e^{2 i pi n tau})``."""
    tau = check_tau(tau)
    val = cmath.exp(log_dedekind_eta(tau, method))
    if tau.real == 0.0:
        return complex(val.real, 0.0)
    return val


def theta1_prime_zero(tau) -> complex:
    """``d theta_1 / dv`` at ``v = 0``, equal to ``2 pi eta(tau)^3``."""
    return 2.0 * math.pi * dedekind_eta(tau) ** 3
