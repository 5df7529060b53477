"""Doubly periodic weights, partition functions and correlation kernels.

For a family ``R_N`` on the torus ``[0, L) x i[0, W)`` the unnormalized weight is
``Q(z) = |C(z) W(z/L; tau)|^2`` and the point process is determinantal with the
projection kernel

    K(z, z') = exp(-pi NN (y^2 + y'^2)/(LW)) sum_n M_n(z) conj(M_n(z')) / h_n.

``Z`` is the closed-form constant with ``(1/N!) int Q = Z``, so ``Q/Z``
integrates to ``N!`` over the ordered configuration space and coincides with
``det[K(z_j, z_k)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .orthogonality import NormTable, h_norm_table
from .quadrature import QuadratureError, QuadratureSpec, rect_integrator, refine_until
from .roots import (
    RESIDUAL_FLOOR,
    DomainGeometry,
    RootSystemSpec,
    log_abs_macdonald_denominator,
    macdonald_denominator,
    m_function,
    script_n,
)
from .theta import log_dedekind_eta, theta_eval, theta_log_abs

# Lemma-level sign tables for q = C W under z_m -> z_m + L and z_m -> z_m + iW
_SGN_L = {"B": -1, "Bv": 1, "C": 1, "Cv": -1, "BC": -1, "D": 1}
_SGN_IW = {"A": 1, "B": -1, "Bv": -1, "C": 1, "Cv": 1, "BC": 1, "D": 1}
# kernel sign under an L shift of either argument; A gives (-1)^(NN+1), since
# e^{2 pi i J} = -1 for half-integer J while theta_2 contributes (-1)^NN
_KSGN_L = {"B": -1, "Cv": -1, "BC": -1, "Bv": 1, "C": 1, "D": 1}


@dataclass(frozen=True)
class ParityConstants:
    s: int
    s_tilde: int
    sgn_l: int
    sgn_iw: int

    @classmethod
    def for_spec(cls, spec: RootSystemSpec) -> "ParityConstants":
        odd = spec.n % 2 == 1
        if spec.family == "A":
            sgn_l = 1 if odd else -1
        else:
            sgn_l = _SGN_L[spec.family]
        return cls(3 if odd else 0, 1 if odd else 0, sgn_l, _SGN_IW[spec.family])


@dataclass(frozen=True)
class Configuration:
    """N points of the torus, wrapped into the fundamental rectangle."""

    points: tuple
    geom: DomainGeometry

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).reshape(-1)
        if pts.size == 0:
            raise ValueError("configuration needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("configuration points must be finite")
        object.__setattr__(self, "points", tuple(complex(p) for p in self.geom.wrap(pts)))

    @property
    def n(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=complex)


def _points(spec: RootSystemSpec, config) -> np.ndarray:
    z = config.as_array() if isinstance(config, Configuration) else np.asarray(config, dtype=complex)
    if z.shape[-1] != spec.n:
        raise ValueError(f"{spec} needs {spec.n} points, got {z.shape[-1]}")
    return z


def _gauss_exponent(spec, geom, z):
    return -math.pi * script_n(spec) * np.sum(z.imag**2, axis=-1) / geom.area


def weight_c(spec: RootSystemSpec, geom: DomainGeometry, config):
    """Prefactor ``C(z)``: Gaussian in the heights, times a theta factor for A."""
    z = _points(spec, config)
    out = np.exp(_gauss_exponent(spec, geom, z))
    if spec.family == "A":
        s = ParityConstants.for_spec(spec).s
        out = out * theta_eval(s, z.sum(axis=-1) / geom.L, geom.tau)
    return out


def q_lower(spec: RootSystemSpec, geom: DomainGeometry, config):
    """``q(z) = C(z) W(z/L; tau)`` at unwrapped points (quasi-periodic)."""
    z = _points(spec, config)
    return weight_c(spec, geom, z) * macdonald_denominator(spec, z / geom.L, geom.tau)


def log_weight_q(spec: RootSystemSpec, geom: DomainGeometry, config):
    """``log Q(z)``; ``-inf`` where two points collide."""
    z = _points(spec, config)
    out = 2 * _gauss_exponent(spec, geom, z)
    out = out + 2 * log_abs_macdonald_denominator(spec, z / geom.L, geom.tau)
    if spec.family == "A":
        s = ParityConstants.for_spec(spec).s
        out = out + 2 * theta_log_abs(s, z.sum(axis=-1) / geom.L, geom.tau)
    return out


def weight_q(spec: RootSystemSpec, geom: DomainGeometry, config):
    """``Q(z) = |C(z) W(z/L; tau)|^2``, doubly periodic and nonnegative."""
    return np.exp(log_weight_q(spec, geom, config))


def _rel(a, b) -> float:
    return float(abs(a - b) / max(abs(a), abs(b), RESIDUAL_FLOOR))


def quasi_periodicity_residual_q_lower(spec, geom, config, m: int) -> float:
    """Max relative residual of the two shift relations of ``q`` in ``z_m``."""
    if not 1 <= m <= spec.n:
        raise IndexError(f"shift index m = {m} outside 1..{spec.n}")
    z = _points(spec, config).astype(complex)
    par = ParityConstants.for_spec(spec)
    base = complex(q_lower(spec, geom, z))
    zl = z.copy()
    zl[m - 1] += geom.L
    zw = z.copy()
    zw[m - 1] += 1j * geom.W
    phase = np.exp(-2j * np.pi * script_n(spec) * z[m - 1].real / geom.L)
    r_l = _rel(complex(q_lower(spec, geom, zl)), par.sgn_l * base)
    r_w = _rel(complex(q_lower(spec, geom, zw)), par.sgn_iw * phase * base)
    return max(r_l, r_w)


def q_periodicity_residual(spec, geom, config) -> float:
    """Max relative change of ``Q`` under all 2N elementary lattice shifts."""
    z = _points(spec, config).astype(complex)
    base = float(weight_q(spec, geom, z))
    worst = 0.0
    for m in range(spec.n):
        for w in (geom.L, 1j * geom.W):
            zs = z.copy()
            zs[m] += w
            worst = max(worst, _rel(float(weight_q(spec, geom, zs)), base))
    return worst


_DELTA_TWICE = {"A": lambda n: -n, "B": lambda n: n - 2, "Bv": lambda n: n - 2,
                "C": lambda n: n, "Cv": lambda n: n, "BC": lambda n: n, "D": lambda n: n - 4}
_KAPPA = {
    "A": lambda n: (n - 1) * (n - 2),
    "B": lambda n: 2 * n * (n - 1),
    "C": lambda n: 2 * n * (n - 1),
    "Bv": lambda n: 2 * (n - 1) * (n + 1),
    "Cv": lambda n: (n - 1) * (2 * n - 1),
    "BC": lambda n: 2 * n * (n + 1),
    "D": lambda n: 2 * n * (n - 2),
}


def _log_g(family: str, n: int, tau: complex) -> complex:
    if family == "Bv":
        return 2 * (n - 1) * (log_dedekind_eta(2 * tau) - 2 * log_dedekind_eta(tau))
    if family == "Cv":
        return (n - 1) * (2 * log_dedekind_eta(tau / 2) - log_dedekind_eta(tau))
    if family == "BC":
        return 2 * n * (log_dedekind_eta(2 * tau) - 2 * log_dedekind_eta(tau))
    return 0.0


def log_partition_z(spec: RootSystemSpec, geom: DomainGeometry) -> float:
    n, fam, tau = spec.n, spec.family, geom.tau
    val = (
        _DELTA_TWICE[fam](n) / 2 * math.log(2)
        + n * math.log(geom.area)
        - n / 2 * math.log(script_n(spec) * tau.imag)
        + _KAPPA[fam](n) * log_dedekind_eta(tau)
        + _log_g(fam, n, tau)
    )
    return float(np.real(val))


def partition_z(spec: RootSystemSpec, geom: DomainGeometry) -> float:
    """Closed form ``Z = 2^delta (LW)^N (NN Im tau)^{-N/2} eta^kappa g``."""
    return math.exp(log_partition_z(spec, geom))


def density_p(spec: RootSystemSpec, geom: DomainGeometry, config):
    """``Q/Z``; integrates to ``N!`` over ordered configurations."""
    return np.exp(log_weight_q(spec, geom, config) - log_partition_z(spec, geom))


@dataclass(frozen=True)
class KernelContext:
    spec: RootSystemSpec
    geom: DomainGeometry
    norms: NormTable = field(default=None)

    def __post_init__(self):
        if self.norms is None:
            object.__setattr__(self, "norms", h_norm_table(self.spec, self.geom))
        elif self.norms.spec != self.spec or self.norms.geom != self.geom:
            raise ValueError("norm table belongs to a different family or domain")

    def features(self, z) -> np.ndarray:
        """``phi_n(z) = e^{-pi NN y^2/(LW)} M_n(z)/sqrt(h_n)``; shape ``(N,) + z.shape``."""
        z = np.asarray(z, dtype=complex)
        gauss = -math.pi * script_n(self.spec) * z.imag**2 / self.geom.area
        h = self.norms.as_array()
        return np.stack(
            [
                m_function(self.spec, self.geom, j, z, gauss - 0.5 * math.log(h[j - 1]))
                for j in range(1, self.spec.n + 1)
            ]
        )

    def kernel(self, z, zp):
        return kernel_eval(self, z, zp)


def kernel_eval(ctx: KernelContext, z, zp):
    """``K(z, z')``, broadcasting over ``z`` and ``z'``."""
    z, zp = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(zp, dtype=complex))
    fz, fzp = ctx.features(z), np.conj(ctx.features(zp))
    out = np.sum(fz * fzp, axis=0)
    return out[()] if out.ndim == 0 else out


def kernel_matrix(ctx: KernelContext, points) -> np.ndarray:
    """``[K(z_j, z_k)]`` for a list of points."""
    phi = ctx.features(np.asarray(points, dtype=complex).reshape(-1))
    return phi.T @ np.conj(phi)


def kernel_shift_signs(spec: RootSystemSpec) -> tuple[int, int]:
    """Signs of ``K`` under ``z -> z + L`` and ``z -> z + iW`` (before the phase)."""
    sgn_l = (-1) ** (script_n(spec) + 1) if spec.family == "A" else _KSGN_L[spec.family]
    return sgn_l, _SGN_IW[spec.family]


def kernel_quasi_periodicity_residual(ctx: KernelContext, z: complex, zp: complex) -> float:
    """Max relative residual of the shift relations of ``K`` in either argument."""
    spec, geom = ctx.spec, ctx.geom
    nn = script_n(spec)
    sgn_l, sgn_w = kernel_shift_signs(spec)
    z, zp = complex(z), complex(zp)
    base = complex(kernel_eval(ctx, z, zp))
    pairs = [
        (kernel_eval(ctx, z + geom.L, zp), sgn_l * base),
        (kernel_eval(ctx, z, zp + geom.L), sgn_l * base),
        (kernel_eval(ctx, z + 1j * geom.W, zp), sgn_w * np.exp(-2j * np.pi * nn * z.real / geom.L) * base),
        (kernel_eval(ctx, z, zp + 1j * geom.W), sgn_w * np.exp(2j * np.pi * nn * zp.real / geom.L) * base),
    ]
    return max(_rel(complex(a), complex(b)) for a, b in pairs)


def hermiticity_residual(ctx: KernelContext, z, zp) -> float:
    k1 = np.asarray(kernel_eval(ctx, z, zp))
    k2 = np.asarray(kernel_eval(ctx, zp, z))
    scale = np.maximum(np.abs(k1), RESIDUAL_FLOOR)
    return float(np.max(np.abs(k1 - np.conj(k2)) / scale))


IMAG_TOL = 1e-12


def correlation(ctx: KernelContext, points) -> float:
    """``det[K(z_j, z_k)]`` for ``1 <= N' <= N`` points."""
    pts = np.asarray(points, dtype=complex).reshape(-1)
    if not 1 <= pts.size <= ctx.spec.n:
        raise ValueError(f"need between 1 and {ctx.spec.n} points, got {pts.size}")
    mat = kernel_matrix(ctx, pts)
    det = complex(np.linalg.det(mat))
    # Hadamard bound for a positive semidefinite matrix
    scale = max(float(np.prod(np.abs(np.diag(mat)))), RESIDUAL_FLOOR)
    if abs(det.imag) > IMAG_TOL * scale:
        raise ArithmeticError(f"correlation has imaginary part {det.imag:.3e} (scale {scale:.3e})")
    return det.real


def intensity(ctx: KernelContext, z):
    """One-point function ``K(z, z)``."""
    phi = ctx.features(z)
    out = np.sum(np.abs(phi) ** 2, axis=0)
    return out[()] if out.ndim == 0 else out


def trace_integral(ctx: KernelContext, qspec: QuadratureSpec | None = None, tol: float = 1e-10):
    """``int_Lambda K(z, z) dz``; equals N for a projection kernel."""
    geom = ctx.geom
    res = refine_until(
        lambda x, y: intensity(ctx, x + 1j * y),
        rect_integrator((0.0, geom.L), (0.0, geom.W), qspec),
        tol,
    )
    return float(np.real(res.value))


def reproducing_integral(ctx: KernelContext, z, zp, qspec: QuadratureSpec | None = None, tol: float = 1e-10):
    """``int_Lambda K(z, w) K(w, z') dw`` by refined tensor quadrature."""
    fz = ctx.features(complex(z))
    fzp = np.conj(ctx.features(complex(zp)))

    def integrand(x, y):
        phi = ctx.features(x + 1j * y)
        left = np.tensordot(fz, np.conj(phi), axes=(0, 0))
        right = np.tensordot(fzp, phi, axes=(0, 0))
        return left * right

    geom = ctx.geom
    res = refine_until(integrand, rect_integrator((0.0, geom.L), (0.0, geom.W), qspec), tol, max_doublings=3)
    if not res.converged:
        raise QuadratureError(f"reproducing integral did not converge (delta {res.delta:.2e})")
    return res.value


def reproducing_residual(ctx: KernelContext, z, zp, qspec: QuadratureSpec | None = None) -> float:
    """``|int K(z,w) K(w,z') dw - K(z,z')| / |K(z,z')|`` (absolute when ``K`` vanishes)."""
    lhs = reproducing_integral(ctx, z, zp, qspec)
    rhs = complex(kernel_eval(ctx, complex(z), complex(zp)))
    gap = abs(lhs - rhs)
    return float(gap / abs(rhs)) if abs(rhs) > RESIDUAL_FLOOR else float(gap)


def det_consistency_residual(ctx: KernelContext, config) -> float:
    """Relative gap between ``det[K(z_j, z_k)]`` (N x N) and ``Q/Z``."""
    z = _points(ctx.spec, config)
    lhs = correlation(ctx, z)
    rhs = float(density_p(ctx.spec, ctx.geom, z))
    return _rel(lhs, rhs)
