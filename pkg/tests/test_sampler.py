import numpy as np
import pytest

from ellipdpp.dpp import KernelContext, intensity, weight_q, partition_z
from ellipdpp.quadrature import QuadratureSpec, integrate_rect
from ellipdpp.roots import DomainGeometry, RootSystemSpec
from ellipdpp.sampler import (
    EnvelopeError,
    ProjectionSampler,
    RejectionLimitError,
    SamplerOptions,
    chi_square_report,
    estimate_one_point,
    expected_counts,
    histogram_counts,
    sample_configuration,
    sample_configurations,
)

GEOM = DomainGeometry(1.0, 1.0)


@pytest.fixture(scope="module")
def a4_samples():
    ctx = KernelContext(RootSystemSpec("A", 4), GEOM)
    return ctx, sample_configurations(ctx, 10_000, SamplerOptions(seed=7))


def test_options_validation():
    with pytest.raises(ValueError):
        SamplerOptions(envelope_safety=1.0)
    with pytest.raises(ValueError):
        SamplerOptions(max_rejections=10)


def test_deterministic():
    ctx = KernelContext(RootSystemSpec("C", 3), GEOM)
    a = sample_configurations(ctx, 5, SamplerOptions(seed=3))
    b = sample_configurations(ctx, 5, SamplerOptions(seed=3))
    c = sample_configurations(ctx, 5, SamplerOptions(seed=4))
    assert [s.points for s in a] == [s.points for s in b]
    assert [s.points for s in a] != [s.points for s in c]


def test_points_inside_and_distinct():
    spec = RootSystemSpec("BC", 3)
    ctx = KernelContext(spec, GEOM)
    for cfg in sample_configurations(ctx, 50, SamplerOptions(seed=1)):
        z = cfg.as_array()
        assert np.all((z.real >= 0) & (z.real < GEOM.L) & (z.imag >= 0) & (z.imag < GEOM.W))
        assert weight_q(spec, GEOM, z) > 0


def test_envelope_violation_raises():
    ctx = KernelContext(RootSystemSpec("A", 3), GEOM)
    sampler = ProjectionSampler(ctx, SamplerOptions(seed=0))
    sampler.envelope = 1e-3
    with pytest.raises(EnvelopeError):
        sampler.sample()


def test_rejection_limit():
    ctx = KernelContext(RootSystemSpec("A", 2), GEOM)
    sampler = ProjectionSampler(ctx, SamplerOptions(seed=0, max_rejections=1000, envelope_safety=1e9))
    with pytest.raises(RejectionLimitError):
        sampler.sample()


def test_a1_mean_height():
    ctx = KernelContext(RootSystemSpec("A", 1), DomainGeometry(1.0, 1.5))
    geom = ctx.geom
    samples = sample_configurations(ctx, 10_000, SamplerOptions(seed=11))
    ys = np.array([s.points[0].imag for s in samples])
    mean = integrate_rect(lambda x, y: y * intensity(ctx, x + 1j * y), (0, geom.L), (0, geom.W)).real
    second = integrate_rect(lambda x, y: y * y * intensity(ctx, x + 1j * y), (0, geom.L), (0, geom.W)).real
    stderr = np.sqrt((second - mean**2) / len(ys))
    assert abs(ys.mean() - mean) < 3 * stderr


def _torus_distance(a, b, geom):
    d = a - b
    dx = np.abs(d.real) % geom.L
    dy = np.abs(d.imag) % geom.W
    return np.hypot(np.minimum(dx, geom.L - dx), np.minimum(dy, geom.W - dy))


def _difference_density(spec, geom, delta, nz=24):
    """Law of z2 - z1 for an unordered pair: half of int Q(z, z + delta)/Z dz."""
    x = np.arange(nz) / nz
    z = (x[:, None] * geom.L + 1j * x[None, :] * geom.W).ravel()
    out = np.empty(delta.size)
    for k, chunk in enumerate(np.array_split(np.arange(delta.size), max(1, delta.size // 256))):
        d = delta.ravel()[chunk]
        pts = np.stack(np.broadcast_arrays(z[None, :], z[None, :] + d[:, None]), axis=-1)
        out[chunk] = weight_q(spec, geom, pts).mean(axis=1) * geom.area
    return out.reshape(delta.shape) / partition_z(spec, geom) / 2


def _annulus_mass(density, r0, r1, half=0.5, nr=8, nt=64, na=16):
    """int of density over {r0 <= |delta| <= r1} inside the square |Re|, |Im| <= half."""
    total = 0.0
    pieces = [(r0, min(r1, half)), (max(r0, half), r1)]
    for lo, hi in pieces:
        if hi <= lo:
            continue
        tr, wr = np.polynomial.legendre.leggauss(nr)
        r = lo + (hi - lo) * (tr + 1) / 2
        wr = wr * (hi - lo) / 2
        for rk, wk in zip(r, wr):
            if rk <= half:
                th = 2 * np.pi * np.arange(nt) / nt
                wt = np.full(nt, 2 * np.pi / nt)
            else:
                a = np.arccos(half / rk)
                ta, wa = np.polynomial.legendre.leggauss(na)
                arc = a + (np.pi / 2 - 2 * a) * (ta + 1) / 2
                th = np.concatenate([arc + q * np.pi / 2 for q in range(4)])
                wt = np.tile(wa * (np.pi / 2 - 2 * a) / 2, 4)
            total += wk * rk * np.sum(wt * density(rk * np.exp(1j * th)))
    return total


def test_d2_pair_distance():
    spec = RootSystemSpec("D", 2)
    ctx = KernelContext(spec, GEOM)
    samples = sample_configurations(ctx, 10_000, SamplerOptions(seed=5))
    d = np.array([_torus_distance(*s.points, GEOM) for s in samples])
    edges = np.linspace(0, np.hypot(GEOM.L, GEOM.W) / 2, 21)
    observed, _ = np.histogram(d, edges)
    density = lambda delta: _difference_density(spec, GEOM, delta)
    expected = np.array([_annulus_mass(density, a, b) for a, b in zip(edges, edges[1:])])
    assert expected.sum() == pytest.approx(1.0, rel=1e-4)
    expected *= len(samples)
    sigma = np.sqrt(np.maximum(expected, 1.0))
    assert np.all(np.abs(observed - expected) < 3 * sigma)


def test_single_sample_histogram_mass():
    ctx = KernelContext(RootSystemSpec("C", 3), GEOM)
    cfg = sample_configuration(ctx, SamplerOptions(seed=2))
    grid = estimate_one_point([cfg], (8, 8))
    assert grid.sum() * GEOM.area / 64 == pytest.approx(3.0)
    with pytest.raises(ValueError):
        histogram_counts([cfg, sample_configuration(KernelContext(RootSystemSpec("C", 3), DomainGeometry(2, 1)))], (4, 4))


def test_expected_counts_total():
    ctx = KernelContext(RootSystemSpec("C", 2), GEOM)
    assert expected_counts(ctx, (8, 8), 100).sum() == pytest.approx(200, rel=1e-8)


def test_chi_square_identical():
    exp = np.full((4, 4), 50.0)
    rep = chi_square_report(exp, exp)
    assert rep.statistic == 0 and rep.passed
    with pytest.raises(ValueError):
        chi_square_report(exp, np.ones((2, 2)))


def test_a4_intensity_and_chi_square(a4_samples):
    ctx, samples = a4_samples
    bins = (8, 8)
    observed = histogram_counts(samples, bins)
    expected = expected_counts(ctx, bins, len(samples))
    assert np.max(np.abs(observed - expected) / np.sqrt(expected)) < 4
    assert chi_square_report(observed, expected).passed


def test_negative_control_fails():
    ctx = KernelContext(RootSystemSpec("C", 4), GEOM)
    samples = sample_configurations(ctx, 2000, SamplerOptions(seed=9))
    observed = histogram_counts(samples, (8, 8))
    uniform = np.full((8, 8), observed.sum() / 64)
    assert not chi_square_report(observed, uniform).passed


def test_error_scales_with_sample_count(a4_samples):
    ctx, samples = a4_samples
    bins = (8, 8)
    errs = []
    for count in (2500, 10_000):
        obs = histogram_counts(samples[:count], bins)
        exp = expected_counts(ctx, bins, count)
        errs.append(np.sqrt(np.mean(((obs - exp) / count) ** 2)))
    assert 1.3 < errs[0] / errs[1] < 3.5


def test_empty_bins_near_c_zero():
    ctx = KernelContext(RootSystemSpec("C", 2), GEOM)
    exp = expected_counts(ctx, (32, 32), 1000)
    assert exp[0, 0] < 0.05 * exp.mean()
    assert exp[0, 0] < 5  # pooled by the chi-square merge
