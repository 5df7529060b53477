"""Deterministic tensor-product quadrature on rectangles and intervals.

Integrands are called once on the full node grid (``f(X, Y)`` with broadcast
arrays) and reduced with compensated summation in row-major order, so a given
rule and node count always produces the same bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np

RULES = ("periodic_trapezoid", "gauss_legendre", "midpoint")


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    nx: int = 256
    ny: int = 128
    rule_x: str = "periodic_trapezoid"
    rule_y: str = "gauss_legendre"

    def __post_init__(self):
        if self.nx < 4 or self.ny < 4:
            raise ValueError(f"node counts must be >= 4, got ({self.nx}, {self.ny})")
        for rule in (self.rule_x, self.rule_y):
            if rule not in RULES:
                raise ValueError(f"unknown rule {rule!r}; expected one of {RULES}")

    def doubled(self, times: int = 1) -> "QuadratureSpec":
        return replace(self, nx=self.nx << times, ny=self.ny << times)


@dataclass(frozen=True)
class RefineResult:
    value: complex
    delta: float
    converged: bool
    levels: int


@lru_cache(maxsize=64)
def _reference_nodes(n: int, rule: str):
    if rule == "gauss_legendre":
        t, w = np.polynomial.legendre.leggauss(n)
        return (t + 1.0) / 2.0, w / 2.0
    if rule == "periodic_trapezoid":
        return np.arange(n) / n, np.full(n, 1.0 / n)
    if rule == "midpoint":
        return (np.arange(n) + 0.5) / n, np.full(n, 1.0 / n)
    raise ValueError(f"unknown rule {rule!r}")


def nodes(a: float, b: float, n: int, rule: str):
    """Nodes and weights of ``rule`` on ``[a, b]``."""
    t, w = _reference_nodes(int(n), rule)
    return a + (b - a) * t, (b - a) * w


def compensated_sum(values) -> complex:
    """Row-major compensated sum of a (complex) array."""
    flat = np.asarray(values).reshape(-1)
    if np.iscomplexobj(flat):
        return complex(math.fsum(flat.real.tolist()), math.fsum(flat.imag.tolist()))
    return math.fsum(flat.tolist())


def _check_finite(values, *coords):
    bad = ~np.isfinite(values)
    if np.any(bad):
        idx = tuple(int(i[0]) for i in np.nonzero(bad))
        where = ", ".join(f"{c[idx]:.6g}" for c in np.broadcast_arrays(*coords))
        raise QuadratureError(f"non-finite integrand value at node ({where})")


def integrate_rect(
    f: Callable, x_range, y_range, spec: QuadratureSpec | None = None
) -> complex:
    """Tensor-product estimate of ``int_a^b int_c^d f(x, y) dy dx``.

    ``f`` receives ``X`` with shape ``(nx, 1)`` and ``Y`` with shape ``(1, ny)``.
    """
    spec = spec or QuadratureSpec()
    xs, wx = nodes(*x_range, spec.nx, spec.rule_x)
    ys, wy = nodes(*y_range, spec.ny, spec.rule_y)
    X, Y = xs[:, None], ys[None, :]
    vals = np.broadcast_to(np.asarray(f(X, Y)), (spec.nx, spec.ny))
    _check_finite(vals, X, Y)
    return compensated_sum(vals * (wx[:, None] * wy[None, :]))


def integrate_interval(f: Callable, interval, n: int = 200, rule: str = "gauss_legendre"):
    """1D analogue of :func:`integrate_rect`."""
    if n < 4:
        raise ValueError(f"node count must be >= 4, got {n}")
    xs, w = nodes(*interval, n, rule)
    vals = np.broadcast_to(np.asarray(f(xs)), xs.shape)
    _check_finite(vals, xs)
    return compensated_sum(vals * w)


def refine_until(
    f: Callable, integrator: Callable, tol: float, max_doublings: int = 4
) -> RefineResult:
    """Double the node counts until successive estimates agree to ``tol``.

    ``integrator(f, level)`` must return the estimate with node counts scaled
    by ``2**level``.  Non-convergence is reported through ``converged`` rather
    than raised.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    prev = integrator(f, 0)
    for level in range(1, max_doublings + 1):
        cur = integrator(f, level)
        delta = abs(cur - prev)
        scale = max(abs(cur), abs(prev))
        if delta == 0.0 or delta <= tol * scale:
            return RefineResult(cur, delta / scale if scale else 0.0, True, level)
        prev = cur
    return RefineResult(cur, delta / scale if scale else 0.0, False, max_doublings)


def rect_integrator(x_range, y_range, spec: QuadratureSpec | None = None):
    """Adapter turning :func:`integrate_rect` into a ``refine_until`` integrator."""
    spec = spec or QuadratureSpec()

    def run(f, level):
        return integrate_rect(f, x_range, y_range, spec.doubled(level))

    return run


def interval_integrator(interval, n: int = 200, rule: str = "gauss_legendre"):
    def run(f, level):
        return integrate_interval(f, interval, n << level, rule)

    return run
