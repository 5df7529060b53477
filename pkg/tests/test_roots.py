import cmath
import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from conftest import mp_eta, mp_theta, random_points, rel

from ellipdpp.roots import (
    FAMILIES,
    DomainGeometry,
    FamilyError,
    RootSystemSpec,
    m_function,
    macdonald_denominator,
    macdonald_identity_residual,
    macdonald_lhs,
    offset_j,
    prefactor_a,
    script_n,
    theta_letter,
)
from ellipdpp.theta import theta_eval

MAX_N = {f: 4 if f == "D" else 3 for f in FAMILIES}


def mp_theta_letter(letter, sigma, z, tau):
    mu = 1 if letter == "B" else 2
    plus = mp.exp(2j * mp.pi * sigma * z) * mp_theta(mu, sigma * tau + z, tau)
    if letter == "A":
        return complex(plus)
    minus = mp.exp(-2j * mp.pi * sigma * z) * mp_theta(mu, sigma * tau - z, tau)
    return complex(plus + minus if letter == "D" else plus - minus)


@pytest.mark.parametrize(
    "family,n,expected",
    [("A", 3, 3), ("C", 3, 8), ("B", 1, 1), ("Bv", 2, 4), ("Cv", 2, 4), ("BC", 2, 5), ("D", 3, 4)],
)
def test_script_n(family, n, expected):
    assert script_n(RootSystemSpec(family, n)) == expected


@pytest.mark.parametrize(
    "family,j,expected",
    [("A", 1, Fraction(1, 2)), ("D", 1, 0), ("BC", 4, 4), ("Cv", 2, Fraction(3, 2)), ("Bv", 3, 2), ("C", 1, 1)],
)
def test_offsets(family, j, expected):
    assert offset_j(RootSystemSpec(family, 5), j) == expected


@pytest.mark.parametrize("family", FAMILIES)
def test_offsets_increasing(family):
    assert np.all(np.diff(RootSystemSpec(family, 6).offsets()) > 0)


def test_spec_errors():
    with pytest.raises(FamilyError):
        RootSystemSpec("D", 1)
    with pytest.raises(FamilyError):
        RootSystemSpec("E", 2)
    with pytest.raises(FamilyError):
        RootSystemSpec("A", 0)
    with pytest.raises(FamilyError):
        RootSystemSpec("A", 1.5)
    with pytest.raises(IndexError):
        offset_j(RootSystemSpec("A", 2), 3)
    with pytest.raises(ValueError):
        DomainGeometry(0, 1)
    assert RootSystemSpec("B∨", 2).family == "Bv"


def test_theta_letter_trivial_values():
    tau = 1.3j
    z = 0.21 + 0.17j
    assert abs(theta_letter("C", 0.37, 0.0, tau)) < 1e-15
    assert rel(theta_letter("B", 0.0, z, tau), 2 * theta_eval(1, z, tau)) < 1e-14


@pytest.mark.parametrize("letter", "ABCD")
def test_theta_letter_against_mpmath(letter):
    assert rel(theta_letter(letter, 0.3, 0.2 + 0.1j, 1.5j), mp_theta_letter(letter, 0.3, 0.2 + 0.1j, 1.5j)) < 1e-13


def test_m_function_against_mpmath():
    spec, geom = RootSystemSpec("A", 2), DomainGeometry(2, 1)
    z = 0.3 + 0.2j
    ref = mp_theta_letter("A", 0.25, 2 * z / 2, 2 * 0.5j)
    assert rel(m_function(spec, geom, 1, z), ref) < 1e-13


def test_m_function_b_first_row():
    spec, geom = RootSystemSpec("B", 3), DomainGeometry(1.5, 1)
    z = 0.4 + 0.3j
    nn = script_n(spec)
    assert rel(m_function(spec, geom, 1, z), 2 * theta_eval(1, nn * z / geom.L, nn * geom.tau)) < 1e-13
    assert abs(m_function(RootSystemSpec("C", 2), geom, 2, 0.0)) < 1e-14


def test_denominator_examples():
    tau = 0.9j
    a, b = 0.13 + 0.2j, -0.31 + 0.05j
    assert macdonald_denominator(RootSystemSpec("A", 1), [a], tau) == 1
    ref = mp_theta(1, b - a, tau) * mp_theta(1, b + a, tau)
    assert rel(macdonald_denominator(RootSystemSpec("D", 2), [a, b], tau), ref) < 1e-13
    assert abs(macdonald_denominator(RootSystemSpec("C", 2), [a, a], tau)) < 1e-14
    ref_bc = mp_theta(1, a, tau) * mp_theta(0, 2 * a, 2 * tau)
    assert rel(macdonald_denominator(RootSystemSpec("BC", 1), [a], tau), ref_bc) < 1e-13


def test_prefactor_examples():
    tau = 0.8j
    assert rel(prefactor_a(RootSystemSpec("A", 1), tau), cmath.exp(-1j * math.pi * tau / 4)) < 1e-14
    assert rel(prefactor_a(RootSystemSpec("D", 2), tau), 4 * cmath.exp(-1j * math.pi * tau / 2)) < 1e-14
    ref = cmath.exp(-1j * math.pi * tau / 3) / mp_eta(2 * tau)
    assert rel(prefactor_a(RootSystemSpec("BC", 1), tau), ref) < 1e-13


def test_a1_reduces_to_theta3():
    spec, geom = RootSystemSpec("A", 1), DomainGeometry(1.7, 1.1)
    z = 0.6 + 0.4j
    ref = prefactor_a(spec, geom.tau) * theta_eval(3, z / geom.L, geom.tau)
    assert rel(m_function(spec, geom, 1, z), ref) < 1e-12


def mp_macdonald_lhs(spec, geom, z):
    nn = script_n(spec)
    mat = mp.matrix(spec.n, spec.n)
    for j in range(1, spec.n + 1):
        sigma = mp.mpf(offset_j(spec, j).numerator) / offset_j(spec, j).denominator / nn
        for k in range(spec.n):
            mat[j - 1, k] = mp_theta_letter(spec.letter, sigma, nn * mp.mpc(z[k]) / geom.L, nn * geom.tau)
    return complex(mp.det(mat))


@pytest.mark.parametrize("family", FAMILIES)
def test_determinant_against_mpmath(family):
    spec = RootSystemSpec(family, 3)
    geom = DomainGeometry(1.0, 0.8)
    z = random_points(np.random.default_rng(7), geom, 3)
    assert rel(macdonald_lhs(spec, geom, z), mp_macdonald_lhs(spec, geom, z)) < 1e-11


@pytest.mark.parametrize("family", FAMILIES)
def test_macdonald_identity(family, geom):
    rng = np.random.default_rng(FAMILIES.index(family))
    lo = 2 if family == "D" else 1
    for n in range(lo, MAX_N[family] + 1):
        spec = RootSystemSpec(family, n)
        for _ in range(5):
            z = random_points(rng, geom, n)
            assert macdonald_identity_residual(spec, geom, z) < 1e-9


def test_c2_example():
    geom = DomainGeometry(3, 2)
    z = random_points(np.random.default_rng(1), geom, 2)
    assert macdonald_identity_residual(RootSystemSpec("C", 2), geom, z) < 1e-10


@pytest.mark.parametrize("family", FAMILIES)
def test_antisymmetry(family):
    spec = RootSystemSpec(family, 2)
    geom = DomainGeometry(1, 1)
    z = random_points(np.random.default_rng(3), geom, 2)
    assert rel(macdonald_lhs(spec, geom, z[::-1]), -macdonald_lhs(spec, geom, z)) < 1e-12


def test_repeated_point_residual_defined():
    geom = DomainGeometry(1, 1)
    z = np.array([0.3 + 0.4j, 0.3 + 0.4j])
    assert np.isfinite(macdonald_identity_residual(RootSystemSpec("B", 2), geom, z))
    assert abs(macdonald_lhs(RootSystemSpec("B", 2), geom, z)) < 1e-10


@pytest.mark.parametrize("family", FAMILIES)
def test_conjugation(family):
    n = 3
    spec = RootSystemSpec(family, n)
    geom = DomainGeometry(1.2, 0.9)
    z = random_points(np.random.default_rng(11), geom, 1, count=100)[:, 0]
    for j in range(1, n + 1):
        val = np.conj(m_function(spec, geom, j, z))
        if spec.letter == "A":
            ref = m_function(spec, geom, j, -np.conj(z))
        elif spec.letter == "C":
            ref = -m_function(spec, geom, j, np.conj(z))
        else:
            ref = m_function(spec, geom, j, np.conj(z))
        assert rel(val, ref, floor=1e-300) < 1e-12
