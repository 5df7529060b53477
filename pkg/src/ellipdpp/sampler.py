"""Exact sampling of the finite-N projection DPPs by the chain rule.

Each step draws a point from the squared norm of the feature vector's
component orthogonal to the already accepted points, by rejection against a
uniform proposal on the fundamental rectangle.  Proposals are generated in
fixed-size batches so that a seed determines the output bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .dpp import Configuration, KernelContext, intensity
from .quadrature import nodes

SINGULAR_TOL = 1e-12
MIN_EXPECTED = 5.0


class EnvelopeError(RuntimeError):
    """A proposal's conditional density exceeded the rejection envelope."""


class RejectionLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class SamplerOptions:
    seed: int = 0
    envelope_grid: int = 256
    envelope_safety: float = 1.5
    max_rejections: int = 10**6
    batch: int = 64

    def __post_init__(self):
        if not self.envelope_safety > 1:
            raise ValueError("envelope_safety must exceed 1")
        if self.max_rejections < 10**3:
            raise ValueError("max_rejections must be at least 1000")
        if self.envelope_grid < 8 or self.batch < 1:
            raise ValueError("envelope_grid >= 8 and batch >= 1 required")


def intensity_envelope(ctx: KernelContext, grid: int) -> float:
    """Maximum of ``K(z, z)`` over a ``grid x grid`` midpoint lattice."""
    xs, _ = nodes(0.0, ctx.geom.L, grid, "midpoint")
    ys, _ = nodes(0.0, ctx.geom.W, grid, "midpoint")
    return float(np.max(intensity(ctx, xs[:, None] + 1j * ys[None, :])))


class ProjectionSampler:
    """Chain-rule sampler bound to one kernel; owns its random generator."""

    def __init__(self, ctx: KernelContext, opts: SamplerOptions | None = None):
        self.ctx = ctx
        self.opts = opts or SamplerOptions()
        self.rng = np.random.default_rng(self.opts.seed)
        self.envelope = self.opts.envelope_safety * intensity_envelope(ctx, self.opts.envelope_grid)

    def _propose(self):
        geom, b = self.ctx.geom, self.opts.batch
        u = self.rng.random((3, b))
        z = geom.L * u[0] + 1j * geom.W * u[1]
        return z, u[2]

    def _next_point(self, basis: np.ndarray):
        tried = 0
        while tried < self.opts.max_rejections:
            z, u = self._propose()
            phi = self.ctx.features(z)  # (N, batch)
            resid = phi - basis.T @ (np.conj(basis) @ phi) if len(basis) else phi
            dens = np.sum(np.abs(resid) ** 2, axis=0)
            full = np.sum(np.abs(phi) ** 2, axis=0)
            if np.any(full > self.envelope):
                i = int(np.argmax(full))
                raise EnvelopeError(
                    f"K(z,z) = {full[i]:.6g} exceeds envelope {self.envelope:.6g} at z = {z[i]:.6g}"
                )
            accepted = np.nonzero(u * self.envelope < dens)[0]
            for i in accepted:
                # duplicate or numerically dependent point: skip to the next proposal
                if dens[i] > SINGULAR_TOL * full[i]:
                    return z[i], phi[:, i]
            tried += len(z)
        raise RejectionLimitError(
            f"no proposal accepted after {tried} tries; raise envelope_safety or check the kernel"
        )

    def sample(self) -> Configuration:
        n = self.ctx.spec.n
        basis = np.zeros((0, n), dtype=complex)
        pts = []
        for _ in range(n):
            z, phi = self._next_point(basis)
            # two Gram-Schmidt passes keep the basis orthonormal to rounding
            for _ in range(2):
                phi = phi - basis.T @ (np.conj(basis) @ phi) if len(basis) else phi
            basis = np.vstack([basis, phi / np.linalg.norm(phi)])
            pts.append(z)
        return Configuration(tuple(pts), self.ctx.geom)

    def sample_many(self, count: int) -> list[Configuration]:
        return [self.sample() for _ in range(count)]


def sample_configuration(ctx: KernelContext, opts: SamplerOptions | None = None) -> Configuration:
    return ProjectionSampler(ctx, opts).sample()


def sample_configurations(ctx: KernelContext, count: int, opts: SamplerOptions | None = None):
    return ProjectionSampler(ctx, opts).sample_many(count)


def histogram_counts(samples, bins) -> np.ndarray:
    """Point counts on a ``bx x by`` grid of the rectangle, shape ``(bx, by)``."""
    if not samples:
        raise ValueError("need at least one sample")
    geom = samples[0].geom
    if any(s.geom != geom for s in samples):
        raise ValueError("samples come from different geometries")
    pts = np.concatenate([s.as_array() for s in samples])
    counts, _, _ = np.histogram2d(
        pts.real, pts.imag, bins=bins, range=[[0.0, geom.L], [0.0, geom.W]]
    )
    return counts


def estimate_one_point(samples, bins=(16, 16)) -> np.ndarray:
    """Histogram estimate of ``rho(z)``; the grid integrates to N."""
    counts = histogram_counts(samples, bins)
    geom = samples[0].geom
    cell = geom.area / (bins[0] * bins[1])
    return counts / (len(samples) * cell)


def expected_counts(ctx: KernelContext, bins, n_samples: int, order: int = 6) -> np.ndarray:
    """``n_samples * int_cell K(z, z)`` per histogram cell by Gauss-Legendre."""
    bx, by = bins
    geom = ctx.geom
    t, w = np.polynomial.legendre.leggauss(order)
    t, w = (t + 1) / 2, w / 2
    dx, dy = geom.L / bx, geom.W / by
    x = (np.arange(bx)[:, None] + t[None, :]) * dx  # (bx, order)
    y = (np.arange(by)[:, None] + t[None, :]) * dy
    z = x[:, None, :, None] + 1j * y[None, :, None, :]
    vals = intensity(ctx, z)
    cell = np.einsum("abij,i,j->ab", vals, w, w) * dx * dy
    return n_samples * cell


@dataclass(frozen=True)
class ChiSquareReport:
    statistic: float
    dof: int
    p_value: float
    alpha: float
    passed: bool


def _merge_small(observed, expected):
    """Pool every bin with expected count below the threshold into one bin."""
    small = expected < MIN_EXPECTED
    if not np.any(small):
        return observed, expected
    obs = np.append(observed[~small], observed[small].sum())
    exp = np.append(expected[~small], expected[small].sum())
    if exp[-1] < MIN_EXPECTED and len(exp) > 1:
        # fold an undersized pool into the smallest remaining bin
        j = int(np.argmin(exp[:-1]))
        obs[j] += obs[-1]
        exp[j] += exp[-1]
        obs, exp = obs[:-1], exp[:-1]
    return obs, exp


def chi_square_report(empirical, expected, alpha: float = 1e-3) -> ChiSquareReport:
    """Pearson goodness of fit of binned counts; passes when ``p >= alpha``."""
    empirical = np.asarray(empirical, dtype=float)
    expected = np.asarray(expected, dtype=float)
    if empirical.shape != expected.shape:
        raise ValueError(f"shape mismatch {empirical.shape} vs {expected.shape}")
    obs, exp = _merge_small(empirical.ravel(), expected.ravel())
    keep = exp > 0
    obs, exp = obs[keep], exp[keep]
    stat = float(np.sum((obs - exp) ** 2 / exp))
    dof = max(len(exp) - 1, 1)
    p = float(stats.chi2.sf(stat, dof))
    return ChiSquareReport(stat, dof, p, alpha, p >= alpha)
