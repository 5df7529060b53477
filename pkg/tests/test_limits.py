import math

import mpmath as mp
import numpy as np
import pytest
from conftest import mp_theta

from ellipdpp.limits import (
    GINIBRE_OF,
    LIMIT_CLASSES,
    StripParams,
    finite_kernel_abs,
    finite_to_strip_scan,
    g_plane,
    g_plane_reconstruction,
    g_strip,
    g_strip_reconstruction,
    ginibre_density,
    ginibre_density_ml,
    ginibre_kernel,
    ginibre_test_pairs,
    limit_class,
    mittag_leffler_density,
    plane_overlap,
    scan_test_pairs,
    strip_kernel,
    strip_overlap,
    strip_quasi_periodicity_residual,
    strip_to_ginibre_scan,
)
from ellipdpp.roots import RootSystemSpec
from ellipdpp.suites import monotone_violation

P1 = StripParams(1.0, 1.0)


def test_collapse_map():
    assert [limit_class(f) for f in ("A", "B", "Bv", "C", "Cv", "BC", "D")] == list("ABBCCCD")
    with pytest.raises(ValueError):
        strip_kernel("E", P1, 0, 0)
    with pytest.raises(ValueError):
        StripParams(0, 1)


@pytest.mark.parametrize("cls", ["B", "C"])
def test_b_c_vanish_at_origin(cls):
    assert abs(strip_kernel(cls, P1, 0.0, 0.0)) < 1e-10


def test_reflection_point_evaluates():
    # the two terms cancel identically at z = iW/2 for C
    val = strip_kernel("C", P1, 0.5j, 0.3 + 0.2j)
    assert np.isfinite(val)


def test_a_kernel_against_mpmath():
    z, zp = 0.2 + 0.1j, 0.1 + 0j
    rho, w = 1.0, 1.0
    tau = 1j * rho * w * w
    sr = math.sqrt(rho)

    def f(lam):
        return (
            mp.exp(-2 * mp.pi * lam**2 + 2j * mp.pi * sr * (z - np.conj(zp)) * lam)
            * mp_theta(2, sr * w * (1j * lam + sr * z), tau)
            * mp_theta(2, sr * w * (1j * lam - sr * np.conj(zp)), tau)
        )

    with mp.workdps(20):
        ref = complex(mp.quad(f, [0, sr * w / 2, sr * w]))
    ref *= math.sqrt(2) * rho * math.exp(-math.pi * rho * (z.imag**2 + zp.imag**2))
    assert abs(strip_kernel("A", P1, z, zp) - ref) < 1e-10 * abs(ref)


@pytest.mark.parametrize("cls", LIMIT_CLASSES)
def test_hermitian_and_diagonal(cls):
    z, zp = scan_test_pairs(P1, seed=1, count=8)
    k1 = strip_kernel(cls, P1, z, zp)
    k2 = strip_kernel(cls, P1, zp, z)
    assert np.max(np.abs(k1 - np.conj(k2)) / np.abs(k1)) < 1e-12
    d = strip_kernel(cls, P1, z, z)
    assert np.all(np.abs(d.imag) < 1e-12 * np.abs(d.real)) and np.all(d.real >= 0)


@pytest.mark.parametrize("cls", LIMIT_CLASSES)
def test_strip_quasi_periodicity(cls):
    z, zp = scan_test_pairs(P1, seed=3, count=10)
    assert max(strip_quasi_periodicity_residual(cls, P1, a, b) for a, b in zip(z, zp)) < 1e-8


def test_b_shift_sign_is_negative():
    z, zp = 0.13 + 0.3j, -0.2 + 0.6j
    phase = np.exp(-2j * np.pi * 2 * P1.rho * P1.width_w * z.real)
    lhs = strip_kernel("B", P1, z + 1j, zp)
    assert abs(lhs + phase * strip_kernel("B", P1, z, zp)) < 1e-10 * abs(lhs)


@pytest.mark.parametrize("cls", LIMIT_CLASSES)
def test_g_reconstruction(cls):
    z, zp = scan_test_pairs(P1, seed=4, count=6)
    ref = strip_kernel(cls, P1, z, zp)
    rec = g_strip_reconstruction(cls, P1, z, zp)
    assert np.max(np.abs(np.abs(rec) - np.abs(ref)) / np.abs(ref)) < 1e-8


def test_g_c_zero():
    assert abs(g_strip("C", P1, 0.0, 0.4)) == 0
    assert g_strip("A", P1, np.array([0.1, 0.2j]), np.array([0.1, 0.5, 0.9])).shape == (2, 3)


@pytest.mark.parametrize("cls", ["A", "C"])
def test_strip_overlap_decays(cls):
    vals = [strip_overlap(cls, P1, 0.3, 0.55, window) for window in (0.5, 1, 2, 4)]
    assert strip_overlap(cls, P1, 0.3, 0.3, 2) == pytest.approx(1.0)
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_finite_to_strip_a():
    errs = finite_to_strip_scan("A", (8, 16, 32, 64), P1)
    # already at rounding level for N = 8, so monotone only above the floor
    assert monotone_violation(errs) == 0.0
    assert errs[-1] < 1e-3


def test_finite_diagonal_converges():
    z, _ = scan_test_pairs(P1, seed=6, count=8)
    target = strip_kernel("D", P1, z, z).real
    errs = [np.max(np.abs(finite_kernel_abs(RootSystemSpec("D", n), P1, z, z) - target)) for n in (8, 16, 32, 64)]
    # first-order convergence: the effective density NN/(2LW) differs from rho by O(1/N)
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 1.8) & (ratios < 2.2))


def test_bv_collapses_to_b():
    z, zp = scan_test_pairs(P1)
    assert finite_to_strip_scan("Bv", (32,), P1, (z, zp))[0] < 2e-3


@pytest.mark.parametrize("cls", ["A", "C", "D"])
def test_ginibre_densities(cls):
    z = np.array([0, 0.3 + 0.1j, 1.2 - 0.7j])
    dens = ginibre_kernel(cls, 1.5, z, z).real
    assert np.allclose(dens, ginibre_density(cls, 1.5, z), rtol=1e-13, atol=0)
    assert np.allclose(ginibre_density_ml(cls, 1.5, z), ginibre_density(cls, 1.5, z), rtol=1e-12, atol=1e-15)


def test_ginibre_special_values():
    assert ginibre_density("A", 2.0, 0.7 + 0.1j) == 2.0
    assert ginibre_kernel("C", 2.0, 0, 0) == 0
    assert ginibre_kernel("D", 2.0, 0, 0).real == pytest.approx(4.0, rel=1e-15)
    z = math.sqrt(10 / 2.0)
    assert ginibre_density("C", 2.0, z) == pytest.approx(2.0 * (1 - math.exp(-40 * math.pi)), rel=1e-12)


def test_mittag_leffler():
    assert mittag_leffler_density("N0", 1, 0, 2.3 + 1j) == pytest.approx(1.0, rel=1e-13)
    assert mittag_leffler_density("even", 1, 1, 1.0) == pytest.approx(math.sinh(1) * math.exp(-1), rel=1e-13)
    assert mittag_leffler_density("odd", 1, -1, 1j) == pytest.approx(math.cosh(1) * math.exp(-1), rel=1e-13)
    rng = np.random.default_rng(0)
    w = rng.normal(size=100) + 1j * rng.normal(size=100)
    r2 = np.abs(w) ** 2
    assert np.allclose(mittag_leffler_density("even", 1, 1, w), np.sinh(r2) * np.exp(-r2), rtol=1e-12)
    with pytest.raises(ValueError):
        mittag_leffler_density("even", 2, 1, 1.0)


@pytest.mark.parametrize("cls", ["A", "D"])
def test_strip_to_ginibre_monotone(cls):
    errs = strip_to_ginibre_scan(cls, 1.0, (1, 2, 3, 4), ginibre_test_pairs())
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-4


def test_b_and_c_merge():
    z, zp = ginibre_test_pairs()
    p = StripParams(1.0, 4.0)
    assert np.max(np.abs(np.abs(strip_kernel("B", p, z, zp)) - np.abs(strip_kernel("C", p, z, zp)))) < 1e-4
    assert GINIBRE_OF["B"] == "C"


@pytest.mark.parametrize("cls", ["A", "C", "D"])
def test_plane_reconstruction(cls):
    rng = np.random.default_rng(2)
    z = rng.normal(size=5) * 0.6 + 1j * rng.normal(size=5) * 0.6
    zp = rng.normal(size=5) * 0.6 + 1j * rng.normal(size=5) * 0.6
    rec = np.abs(g_plane_reconstruction(cls, 1.0, z, zp))
    ref = np.abs(ginibre_kernel(cls, 1.0, z, zp))
    assert np.max(np.abs(rec - ref) / ref) < 1e-8


def test_plane_g_properties():
    assert g_plane("C", 1.0, 0.0, 0.5) == 0
    with pytest.raises(ValueError):
        g_plane("D", 1.0, 0.0, -0.5)
    vals = [plane_overlap("A", 1.0, 0.2, 0.5, w) for w in (1, 2, 4)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
