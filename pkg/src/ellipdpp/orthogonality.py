"""Orthogonality constants of the row functions M_j and their numerical checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import (
    QuadratureSpec,
    compensated_sum,
    integrate_interval,
    nodes,
)
from .roots import DomainGeometry, RootSystemSpec, m_function, m_matrix, offset_j, script_n
from .theta import theta_eval

DEFAULT_GRAM_SPEC = QuadratureSpec(nx=256, ny=128)


@dataclass(frozen=True)
class NormTable:
    spec: RootSystemSpec
    geom: DomainGeometry
    h: tuple[float, ...]

    def __post_init__(self):
        if len(self.h) != self.spec.n or not all(v > 0 for v in self.h):
            raise ValueError("norm table needs N strictly positive entries")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.h, dtype=float)


def _multiplier(spec: RootSystemSpec, j: int) -> int:
    """Factor on the A-type base norm for row ``j``."""
    if spec.letter == "A":
        return 1
    if spec.letter == "C":
        return 2
    if spec.letter == "B":
        return 4 if j == 1 else 2
    return 4 if j in (1, spec.n) else 2


def m_weight_y(spec: RootSystemSpec, geom: DomainGeometry, j: int, y):
    """``m_j(y) = int_0^L conj(M_j(x+iy)) M_j(x+iy) dx`` in closed form."""
    jj = float(offset_j(spec, j))
    nn = script_n(spec)
    L, tau = geom.L, geom.tau
    y = np.asarray(y, dtype=float)
    t2 = 2 * nn * tau

    def branch(sign):
        # sign=+1: e^{-4 pi J y/L} theta_2(2(J tau + i NN y/L)); sign=-1 the mirror
        return np.exp(-sign * 4 * np.pi * jj * y / L) * theta_eval(
            2, 2 * (jj * tau + sign * 1j * nn * y / L), t2
        )

    if spec.letter == "A":
        out = L * branch(+1)
    elif spec.letter in ("B", "D") and j == 1:
        out = 4 * L * theta_eval(2, 2j * nn * y / L, t2)
    else:
        out = L * (branch(-1) + branch(+1))
        if spec.letter == "D" and j == spec.n:
            out = 2 * out
    return out


def h_norm(spec: RootSystemSpec, geom: DomainGeometry, j: int) -> float:
    jj = float(offset_j(spec, j))
    nn = script_n(spec)
    im_tau = geom.W / geom.L
    base = geom.area / math.sqrt(2 * nn * im_tau)
    # e^{-2 tau pi i J^2/NN} with tau = i W/L
    return _multiplier(spec, j) * base * math.exp(2 * math.pi * im_tau * jj * jj / nn)


def h_norm_table(spec: RootSystemSpec, geom: DomainGeometry) -> NormTable:
    return NormTable(spec, geom, tuple(h_norm(spec, geom, j) for j in range(1, spec.n + 1)))


def gaussian_weight(spec: RootSystemSpec, geom: DomainGeometry, y):
    return np.exp(-2 * np.pi * script_n(spec) * np.asarray(y) ** 2 / geom.area)


def verify_x_orthogonality(
    spec, geom, j: int, k: int, y: float, nx: int = 256, scale: str = "row"
) -> float:
    """Residual of the x-integral against ``m_j(y) delta_jk``, relative to ``m_j(y)``.

    With ``scale="geometric"`` off-diagonal entries are divided by
    ``sqrt(m_j(y) m_k(y))`` instead, which stays meaningful when the rows
    differ by many orders of magnitude (large N or W/L).
    """
    if scale not in ("row", "geometric"):
        raise ValueError(f"unknown scale {scale!r}")
    xs, wx = nodes(0.0, geom.L, nx, "periodic_trapezoid")
    z = xs + 1j * y
    integrand = np.conj(m_function(spec, geom, j, z)) * m_function(spec, geom, k, z)
    val = compensated_sum(integrand * wx)
    mj = float(np.real(m_weight_y(spec, geom, j, y)))
    if j == k:
        return abs(val - mj) / abs(mj)
    if scale == "row":
        return abs(val) / abs(mj)
    mk = float(np.real(m_weight_y(spec, geom, k, y)))
    return abs(val) / math.sqrt(abs(mj * mk))


def gram_matrix(spec, geom, qspec: QuadratureSpec | None = None) -> np.ndarray:
    """``G_jk = int_Lambda e^{-2 pi NN y^2/(LW)} conj(M_j) M_k`` by tensor quadrature."""
    qspec = qspec or DEFAULT_GRAM_SPEC
    xs, wx = nodes(0.0, geom.L, qspec.nx, qspec.rule_x)
    ys, wy = nodes(0.0, geom.W, qspec.ny, qspec.rule_y)
    z = xs[:, None] + 1j * ys[None, :]
    w = wx[:, None] * wy[None, :] * gaussian_weight(spec, geom, ys)[None, :]
    mats = m_matrix(spec, geom, z)
    n = spec.n
    gram = np.empty((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            gram[a, b] = compensated_sum(np.conj(mats[a]) * mats[b] * w)
    return gram


def gram_residual(spec, geom, qspec: QuadratureSpec | None = None) -> float:
    """Max entrywise error of the Gram matrix against ``diag(h)``.

    Off-diagonal entries are scaled by ``sqrt(h_j h_k)``, diagonal ones by ``h_j``.
    """
    gram = gram_matrix(spec, geom, qspec)
    h = h_norm_table(spec, geom).as_array()
    scale = np.sqrt(np.outer(h, h))
    return float(np.max(np.abs(gram - np.diag(h)) / scale))


def verify_z_orthogonality(spec, geom, j: int, k: int, qspec: QuadratureSpec | None = None) -> float:
    """Residual of one weighted double integral against ``h_j delta_jk``."""
    qspec = qspec or DEFAULT_GRAM_SPEC
    xs, wx = nodes(0.0, geom.L, qspec.nx, qspec.rule_x)
    ys, wy = nodes(0.0, geom.W, qspec.ny, qspec.rule_y)
    z = xs[:, None] + 1j * ys[None, :]
    w = wx[:, None] * wy[None, :] * gaussian_weight(spec, geom, ys)[None, :]
    val = compensated_sum(np.conj(m_function(spec, geom, j, z)) * m_function(spec, geom, k, z) * w)
    hj, hk = h_norm(spec, geom, j), h_norm(spec, geom, k)
    target = hj if j == k else 0.0
    return abs(val - target) / math.sqrt(hj * hk)


def h_from_y_integral(spec, geom, j: int, n: int = 200) -> float:
    """``int_0^W e^{-2 pi NN y^2/(LW)} m_j(y) dy``; must equal ``h_j``."""
    val = integrate_interval(
        lambda y: gaussian_weight(spec, geom, y) * m_weight_y(spec, geom, j, y),
        (0.0, geom.W),
        n,
    )
    return float(np.real(val))
