"""Infinite-volume limits: strip kernels, Ginibre-like kernels and their g-functions.

With the density ``rho = N/(LW)`` fixed, the finite kernels converge as
``N, L -> oo`` to strip kernels periodic (up to a phase) in ``iW``; as
``W -> oo`` these converge to the Ginibre kernel (class A) and its sinh/cosh
variants (classes C, D).  Kernels are only defined up to gauge factors
``f(z')/f(z)``, so every comparison here is made on ``|K|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .dpp import KernelContext, kernel_eval
from .quadrature import QuadratureError, nodes
from .roots import DomainGeometry, RootSystemSpec, normalize_family, theta_letter
from .theta import theta_parts

LIMIT_CLASSES = ("A", "B", "C", "D")
GINIBRE_CLASSES = ("A", "C", "D")
_COLLAPSE = {"A": "A", "B": "B", "Bv": "B", "C": "C", "Cv": "C", "BC": "C", "D": "D"}
# strip class -> Ginibre class as W -> oo
GINIBRE_OF = {"A": "A", "B": "C", "C": "C", "D": "D"}

DEFAULT_LAMBDA_NODES = 200
LAMBDA_TOL = 1e-10


@dataclass(frozen=True)
class StripParams:
    rho: float
    width_w: float

    def __post_init__(self):
        for name in ("rho", "width_w"):
            val = float(getattr(self, name))
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be positive and finite, got {val!r}")
            object.__setattr__(self, name, val)

    @property
    def lam_max(self) -> float:
        return math.sqrt(self.rho) * self.width_w

    def geometry(self, n_particles: int) -> DomainGeometry:
        """Torus of the finite system with N points at this density and width."""
        return DomainGeometry(n_particles / (self.rho * self.width_w), self.width_w)


def limit_class(family: str) -> str:
    """Strip class a finite family converges to."""
    fam = family if family in LIMIT_CLASSES else normalize_family(family)
    return _COLLAPSE[fam]


def _check_class(cls: str, allowed=LIMIT_CLASSES) -> str:
    if cls not in allowed:
        raise ValueError(f"unknown class {cls!r}; expected one of {allowed}")
    return cls


def _theta_product(mu, v1, v2, tau, log_extra):
    """``exp(log_extra) theta_mu(v1) theta_mu(v2)`` combined in log space."""
    s1, u1 = theta_parts(mu, v1, tau)
    s2, u2 = theta_parts(mu, v2, tau)
    return np.exp(log_extra + s1 + s2) * u1 * u2


def _strip_integrand(cls, p: StripParams, z, zp, lam, with_scale: bool = False):
    """Integrand of the lambda representation; trailing axis runs over ``lam``.

    With ``with_scale`` also returns the size of the terms before they are
    combined, which sets the rounding floor where they cancel.
    """
    sr, w = math.sqrt(p.rho), p.width_w
    z = np.asarray(z, dtype=complex)[..., None]
    zb = np.conj(np.asarray(zp, dtype=complex))[..., None]
    if cls == "A":
        tau = 1j * p.rho * w * w
        val = _theta_product(
            2,
            sr * w * (1j * lam + sr * z),
            sr * w * (1j * lam - sr * zb),
            tau,
            -2 * np.pi * lam**2 + 2j * np.pi * sr * (z - zb) * lam,
        )
        return (val, np.abs(val)) if with_scale else val
    tau = 2j * p.rho * w * w
    mu = 1 if cls == "B" else 2
    first = _theta_product(
        mu,
        sr * w * (1j * lam + 2 * sr * z),
        sr * w * (1j * lam - 2 * sr * zb),
        tau,
        -np.pi * lam**2 + 2j * np.pi * sr * (z - zb) * lam,
    )
    second = _theta_product(
        mu,
        sr * w * (1j * lam + 2 * sr * z),
        sr * w * (1j * lam + 2 * sr * zb),
        tau,
        -np.pi * lam**2 + 2j * np.pi * sr * (z + zb) * lam,
    )
    val = first + second if cls == "D" else first - second
    return (val, np.abs(first) + np.abs(second)) if with_scale else val


def _strip_prefactor(cls, p: StripParams, z, zp):
    y2 = np.asarray(z).imag ** 2 + np.asarray(zp).imag ** 2
    if cls == "A":
        return math.sqrt(2) * p.rho * np.exp(-np.pi * p.rho * y2)
    sign = -1.0 if cls == "B" else 1.0
    return sign * p.rho * np.exp(-2 * np.pi * p.rho * y2)


def _gl_refined(integrand, interval, n, tol, max_doublings=3):
    """Gauss-Legendre on ``interval``, doubling ``n`` until successive estimates agree.

    ``integrand`` returns ``(values, scale)``.  Agreement means a relative
    change below ``tol``, or an absolute change at rounding level of
    ``int scale`` (values produced by cancellation).
    """
    prev = None
    for level in range(max_doublings + 1):
        lam, wts = nodes(*interval, n << level, "gauss_legendre")
        vals, scale = integrand(lam)
        cur = np.sum(vals * wts, axis=-1)
        floor = 1e-13 * np.sum(scale * wts, axis=-1)
        if prev is not None:
            gap = np.abs(cur - prev)
            if np.all((gap <= tol * np.abs(cur)) | (gap <= floor)):
                return cur
        prev = cur
    raise QuadratureError(f"lambda quadrature did not reach {tol:g} after {max_doublings} doublings")


def strip_kernel(cls: str, p: StripParams, z, zp, n: int = DEFAULT_LAMBDA_NODES, tol: float = LAMBDA_TOL):
    """Strip kernel ``K^R_{W,rho}(z, z')`` from its lambda-integral representation."""
    _check_class(cls)
    z = np.asarray(z, dtype=complex)
    zp = np.asarray(zp, dtype=complex)
    lo = 0.0 if cls == "A" else -p.lam_max
    val = _gl_refined(lambda lam: _strip_integrand(cls, p, z, zp, lam, True), (lo, p.lam_max), n, tol)
    out = _strip_prefactor(cls, p, z, zp) * val
    return out[()] if np.ndim(out) == 0 else out


def strip_shift_sign(cls: str) -> int:
    return -1 if cls == "B" else 1


def strip_phase_rate(cls: str) -> int:
    """Multiple of ``2 pi rho W x`` in the ``iW`` shift phase: 1 for A, 2 otherwise.

    It is the limit of ``NN/(N rho W) * rho W`` with ``NN/N -> 1`` or ``2``.
    """
    return 1 if cls == "A" else 2


def strip_quasi_periodicity_residual(cls: str, p: StripParams, z: complex, zp: complex) -> float:
    """Max relative residual of the two ``iW`` shift relations."""
    z, zp = complex(z), complex(zp)
    s = strip_shift_sign(cls)
    w = p.width_w
    k = 2j * np.pi * strip_phase_rate(cls) * p.rho * w
    base = complex(strip_kernel(cls, p, z, zp))
    pairs = [
        (strip_kernel(cls, p, z + 1j * w, zp), s * np.exp(-k * z.real) * base),
        (strip_kernel(cls, p, z, zp + 1j * w), s * np.exp(k * zp.real) * base),
    ]
    return max(float(abs(a - b) / max(abs(a), abs(b), 1e-30)) for a, b in pairs)


def g_strip(cls: str, p: StripParams, z, lam):
    """Strip g-function; its lambda-integral over ``(0, sqrt(rho) W)`` builds the kernel.

    For an array ``lam`` the result has shape ``z.shape + lam.shape``.
    """
    _check_class(cls)
    z = np.asarray(z, dtype=complex)
    lam = np.asarray(lam, dtype=float)
    if lam.ndim == 0:
        return _g_one(cls, p, z, float(lam))
    return _g_strip_nodes(cls, p, z, lam.ravel()).reshape(z.shape + lam.shape)


def _g_strip_nodes(cls, p, z, lam):
    """``g(z, lam_k)`` for a vector of nodes; shape ``z.shape + lam.shape``."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + lam.shape, dtype=complex)
    for k, lk in enumerate(lam):
        out[..., k] = _g_one(cls, p, z, float(lk))
    return out


def _g_one(cls, p, z, lam):
    sr, w = math.sqrt(p.rho), p.width_w
    if cls == "A":
        log_w = -np.pi * (p.rho * z.imag**2 + lam**2)
        return 2**0.25 * sr * theta_letter("A", lam / (sr * w), p.rho * w * z, 1j * p.rho * w * w, log_w)
    log_w = -np.pi * (2 * p.rho * z.imag**2 + lam**2 / 2)
    return sr * theta_letter(cls, lam / (2 * sr * w), 2 * p.rho * w * z, 2j * p.rho * w * w, log_w)


def g_strip_reconstruction(cls: str, p: StripParams, z, zp, n: int = DEFAULT_LAMBDA_NODES):
    """``int_0^{sqrt(rho) W} g(z, lam) conj(g(z', lam)) d lam`` by Gauss-Legendre."""
    _check_class(cls)
    lam, wts = nodes(0.0, p.lam_max, n, "gauss_legendre")
    gz = _g_strip_nodes(cls, p, np.asarray(z, dtype=complex), lam)
    gzp = _g_strip_nodes(cls, p, np.asarray(zp, dtype=complex), lam)
    out = np.sum(gz * np.conj(gzp) * wts, axis=-1)
    return out[()] if out.ndim == 0 else out


def strip_overlap(cls: str, p: StripParams, lam1: float, lam2: float, window: float, nx: int = 400, ny: int = 64):
    """Normalized Gaussian-windowed strip inner product of ``g(., lam1)`` and ``g(., lam2)``.

    The x-integral over the strip carries the weight ``exp(-x^2/(2 window^2))``;
    the result is divided by the geometric mean of the two windowed norms, so
    it is 1 for ``lam1 == lam2`` and decays with ``window`` otherwise.
    """
    xs, wx = nodes(-8 * window, 8 * window, nx, "gauss_legendre")
    ys, wy = nodes(0.0, p.width_w, ny, "gauss_legendre")
    z = xs[:, None] + 1j * ys[None, :]
    wgt = (wx * np.exp(-(xs**2) / (2 * window**2)))[:, None] * wy[None, :]
    g1 = _g_one(cls, p, z, float(lam1))
    g2 = _g_one(cls, p, z, float(lam2))
    cross = np.sum(np.conj(g1) * g2 * wgt)
    n1 = np.sum(np.abs(g1) ** 2 * wgt)
    n2 = np.sum(np.abs(g2) ** 2 * wgt)
    return float(abs(cross) / math.sqrt(n1 * n2))


def _test_pairs(seed: int, count: int, x_range, y_range):
    rng = np.random.default_rng(seed)
    u = rng.random((4, count))
    dx, dy = x_range[1] - x_range[0], y_range[1] - y_range[0]
    z = x_range[0] + dx * u[0] + 1j * (y_range[0] + dy * u[1])
    zp = x_range[0] + dx * u[2] + 1j * (y_range[0] + dy * u[3])
    return z, zp


def scan_test_pairs(p: StripParams, seed: int = 2024, count: int = 16):
    """Seeded pairs inside one period cell of the strip, ``|x| <= W/2``, ``0 <= y < W``."""
    return _test_pairs(seed, count, (-p.width_w / 2, p.width_w / 2), (0.0, p.width_w))


def ginibre_test_pairs(rho: float = 1.0, seed: int = 2024, count: int = 16):
    """Seeded pairs in the box ``|x|, |y| <= 1/sqrt(rho)`` around the origin.

    The strip kernel resembles the plane kernel only away from the strip
    edges, so strip-to-plane comparisons stay within a fixed box that does
    not grow with W.
    """
    half = 1 / math.sqrt(rho)
    return _test_pairs(seed, count, (-half, half), (-half, half))


def finite_kernel_abs(spec: RootSystemSpec, p: StripParams, z, zp):
    ctx = KernelContext(spec, p.geometry(spec.n))
    return np.abs(kernel_eval(ctx, z, zp))


def finite_to_strip_scan(family: str, ns, p: StripParams, test_points=None):
    """``sup | |K^{R_N}| - |K^R_{W,rho}| |`` over the test pairs, for each N."""
    cls = limit_class(family)
    z, zp = test_points if test_points is not None else scan_test_pairs(p)
    target = np.abs(strip_kernel(cls, p, z, zp))
    errors = []
    for n in ns:
        spec = RootSystemSpec(family, n)
        errors.append(float(np.max(np.abs(finite_kernel_abs(spec, p, z, zp) - target))))
    return errors


def ginibre_kernel(cls: str, rho: float, z, zp):
    """Ginibre kernel (A) and its sinh (C) / cosh (D) variants."""
    _check_class(cls, GINIBRE_CLASSES)
    z = np.asarray(z, dtype=complex)
    zp = np.asarray(zp, dtype=complex)
    if cls == "A":
        out = rho * np.exp(-np.pi * rho * (abs(z) ** 2 + abs(zp) ** 2) / 2 + np.pi * rho * z * np.conj(zp))
    else:
        damp = np.exp(-np.pi * rho * (abs(z) ** 2 + abs(zp) ** 2))
        arg = 2 * np.pi * rho * z * np.conj(zp)
        out = 2 * rho * damp * (np.sinh(arg) if cls == "C" else np.cosh(arg))
    return out[()] if out.ndim == 0 else out


def ginibre_density(cls: str, rho: float, z):
    """Closed-form one-point function ``rho (1 -/+ e^{-4 pi rho |z|^2})``."""
    _check_class(cls, GINIBRE_CLASSES)
    r2 = np.abs(np.asarray(z)) ** 2
    if cls == "A":
        return rho * np.ones_like(r2)
    sign = -1.0 if cls == "C" else 1.0
    return rho * (1 + sign * np.exp(-4 * np.pi * rho * r2))


def strip_to_ginibre_scan(cls: str, rho: float, widths, test_points):
    """``sup | |K^R_{W,rho}| - |K^{G(R)}_rho| |`` over the test pairs, for each W."""
    _check_class(cls)
    z, zp = test_points
    target = np.abs(ginibre_kernel(GINIBRE_OF[cls], rho, z, zp))
    return [
        float(np.max(np.abs(np.abs(strip_kernel(cls, StripParams(rho, w), z, zp)) - target)))
        for w in widths
    ]


_ML_CASES = {("N0", 0.0): None, ("even", 1.0): 0, ("odd", -1.0): 1}


def mittag_leffler_density(index_set: str, k: int, c: float, z):
    """``k sum_{j in I} |z|^{2j}/Gamma(j/k + (1+c)/k) e^{-|z|^{2k} + 2c log|z|}`` for k = 1."""
    key = (index_set, float(c))
    if k != 1 or key not in _ML_CASES:
        raise ValueError(
            f"unsupported parameters (set={index_set!r}, k={k}, c={c}); "
            "only (N0, 0), (even, 1), (odd, -1) with k = 1"
        )
    parity = _ML_CASES[key]
    r2 = np.abs(np.asarray(z, dtype=complex)) ** 2
    jmax = int(np.max(r2) + 12 * math.sqrt(np.max(r2) + 1) + 40)
    j = np.arange(jmax + 1, dtype=float)
    if parity is not None:
        j = j[j % 2 == parity]
    # log of |z|^{2j+2c}/Gamma(j+1+c) - |z|^2, with 0^0 = 1
    p = 2 * j + 2 * c
    with np.errstate(divide="ignore", invalid="ignore"):
        logr2 = np.log(r2)[..., None]
        log_pow = np.where(p == 0, 0.0, p / 2 * logr2)
    terms = np.exp(log_pow - gammaln(j + 1 + c) - r2[..., None])
    out = terms.sum(axis=-1)
    return out[()] if np.ndim(out) == 0 else out


ML_OF_CLASS = {"A": ("N0", 0.0), "C": ("even", 1.0), "D": ("odd", -1.0)}


def ginibre_density_ml(cls: str, rho: float, z):
    """Ginibre densities through the Mittag-Leffler profiles.

    ``rho_A(z) = rho * ml_{N0,0}(w)`` and ``rho_{C,D}(z) = 2 rho * ml(w)`` with
    ``w = sqrt(2 pi rho) z``.
    """
    _check_class(cls, GINIBRE_CLASSES)
    index_set, c = ML_OF_CLASS[cls]
    z = np.asarray(z, dtype=complex)
    if cls == "A":
        return rho * mittag_leffler_density(index_set, 1, c, math.sqrt(np.pi * rho) * z)
    return 2 * rho * mittag_leffler_density(index_set, 1, c, math.sqrt(2 * np.pi * rho) * z)


def g_plane(cls: str, rho: float, z, lam):
    """Plane g-functions whose lambda-integral reproduces the Ginibre kernels up to gauge."""
    _check_class(cls, GINIBRE_CLASSES)
    z = np.asarray(z, dtype=complex)
    lam = np.asarray(lam, dtype=float)
    if cls == "A":
        return 2**0.25 * rho**0.75 * np.exp(2 * np.pi * rho * z * lam - np.pi * rho * (z.real**2 + lam**2))
    if np.any(lam <= 0):
        raise ValueError("lambda must be positive for classes C and D")
    # sinh/cosh(a) e^{-b} written as (e^{a-b} -/+ e^{-a-b})/2 to avoid overflow
    a = 4 * np.pi * rho * z * lam
    b = 2 * np.pi * rho * (z.real**2 + lam**2)
    sign = -1.0 if cls == "C" else 1.0
    return 2**0.5 * rho**0.75 * (np.exp(a - b) + sign * np.exp(-a - b))


def g_plane_reconstruction(cls: str, rho: float, z, zp, half_width: float | None = None, n: int = 400):
    """``int_S g(z, lam) conj(g(z', lam)) d lam`` with ``S`` truncated to ``|lam| <= half_width``."""
    _check_class(cls, GINIBRE_CLASSES)
    half = half_width if half_width is not None else 6 / math.sqrt(rho)
    lo = -half if cls == "A" else 0.0
    lam, wts = nodes(lo, half, n, "gauss_legendre")
    z = np.asarray(z, dtype=complex)[..., None]
    zp = np.asarray(zp, dtype=complex)[..., None]
    out = np.sum(g_plane(cls, rho, z, lam) * np.conj(g_plane(cls, rho, zp, lam)) * wts, axis=-1)
    return out[()] if out.ndim == 0 else out


def plane_overlap(cls: str, rho: float, lam1: float, lam2: float, window: float, n: int = 400):
    """Normalized Gaussian-windowed plane inner product of two g-functions.

    The plane functions oscillate in y, so the window acts on y; x is
    integrated over the whole line (the integrand is Gaussian there).
    """
    xs, wx = nodes(-6 / math.sqrt(rho) - 2 * abs(lam1) - 2 * abs(lam2), 6 / math.sqrt(rho) + 2 * abs(lam1) + 2 * abs(lam2), n, "gauss_legendre")
    ys, wy = nodes(-8 * window, 8 * window, n, "gauss_legendre")
    z = xs[:, None] + 1j * ys[None, :]
    wgt = wx[:, None] * (wy * np.exp(-(ys**2) / (2 * window**2)))[None, :]
    g1 = g_plane(cls, rho, z, lam1)
    g2 = g_plane(cls, rho, z, lam2)
    cross = np.sum(np.conj(g1) * g2 * wgt)
    n1 = np.sum(np.abs(g1) ** 2 * wgt)
    n2 = np.sum(np.abs(g2) ** 2 * wgt)
    return float(abs(cross) / math.sqrt(n1 * n2))
