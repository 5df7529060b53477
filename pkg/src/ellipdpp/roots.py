"""The seven R_N-theta families and their Macdonald denominators.

Families are labelled ``A`` (A_{N-1}), ``B``, ``Bv`` (B_N dual), ``C``, ``Cv``
(C_N dual), ``BC`` and ``D``.  Points ``z`` live in the rectangle
``[0, L) x i[0, W)`` and the modular parameter is ``tau = iW/L``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .theta import check_tau, log_dedekind_eta, theta_eval, theta_parts

FAMILIES = ("A", "B", "Bv", "C", "Cv", "BC", "D")

# letter of the Theta function building each family's rows
LETTER = {"A": "A", "B": "B", "Bv": "B", "C": "C", "Cv": "C", "BC": "C", "D": "D"}

RESIDUAL_FLOOR = 1e-30


class FamilyError(ValueError):
    """Unknown family label or particle count outside its admissible range."""


def normalize_family(family: str) -> str:
    aliases = {"B∨": "Bv", "C∨": "Cv", "BV": "Bv", "CV": "Cv", "bv": "Bv", "cv": "Cv"}
    fam = aliases.get(family, family)
    if fam not in FAMILIES:
        raise FamilyError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return fam


@dataclass(frozen=True)
class RootSystemSpec:
    family: str
    n_particles: int

    def __post_init__(self):
        object.__setattr__(self, "family", normalize_family(self.family))
        n = self.n_particles
        if isinstance(n, bool) or int(n) != n:
            raise FamilyError(f"particle count must be an integer, got {n!r}")
        object.__setattr__(self, "n_particles", int(n))
        minimum = 2 if self.family == "D" else 1
        if self.n_particles < minimum:
            raise FamilyError(
                f"family {self.family} needs N >= {minimum}, got N = {self.n_particles}"
            )

    @property
    def n(self) -> int:
        return self.n_particles

    @property
    def letter(self) -> str:
        return LETTER[self.family]

    @property
    def script_n(self) -> int:
        return script_n(self)

    def offsets(self) -> np.ndarray:
        return np.array([float(offset_j(self, j)) for j in range(1, self.n + 1)])

    def __str__(self):
        return f"{self.family}_{self.n}"


@dataclass(frozen=True)
class DomainGeometry:
    length_l: float
    width_w: float

    def __post_init__(self):
        for name in ("length_l", "width_w"):
            val = float(getattr(self, name))
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be positive and finite, got {val!r}")
            object.__setattr__(self, name, val)

    @property
    def L(self) -> float:
        return self.length_l

    @property
    def W(self) -> float:
        return self.width_w

    @property
    def tau(self) -> complex:
        return 1j * self.width_w / self.length_l

    @property
    def area(self) -> float:
        return self.length_l * self.width_w

    def wrap(self, z):
        """Map points into ``[0, L) x i[0, W)``."""
        z = np.asarray(z, dtype=complex)
        x = np.mod(z.real, self.length_l)
        y = np.mod(z.imag, self.width_w)
        # mod can return the period itself for tiny negative inputs
        x = np.where(x >= self.length_l, 0.0, x)
        y = np.where(y >= self.width_w, 0.0, y)
        return x + 1j * y


def script_n(spec: RootSystemSpec) -> int:
    n = spec.n
    return {
        "A": n,
        "B": 2 * n - 1,
        "Bv": 2 * n,
        "Cv": 2 * n,
        "C": 2 * (n + 1),
        "BC": 2 * n + 1,
        "D": 2 * (n - 1),
    }[spec.family]


def offset_j(spec: RootSystemSpec, j: int) -> Fraction:
    if not 1 <= j <= spec.n:
        raise IndexError(f"row index j = {j} outside 1..{spec.n}")
    if spec.family in ("A", "Cv"):
        return Fraction(2 * j - 1, 2)
    if spec.family in ("B", "Bv", "D"):
        return Fraction(j - 1)
    return Fraction(j)


def theta_letter(letter: str, sigma: float, z, tau, log_offset=0.0):
    """The four Theta^{A,B,C,D}(sigma, z, tau) combinations of theta_1/theta_2.

    ``log_offset`` (broadcast against ``z``) multiplies the result by
    ``exp(log_offset)`` before exponentiation, so a decaying weight can
    cancel growth of the theta factors.
    """
    tau = check_tau(tau)
    z = np.asarray(z, dtype=complex)
    if letter not in ("A", "B", "C", "D"):
        raise ValueError(f"unknown letter {letter!r}")
    mu = 1 if letter == "B" else 2
    plus = _exp_theta(mu, 2j * np.pi * sigma * z + log_offset, sigma * tau + z, tau)
    if letter == "A":
        return plus
    minus = _exp_theta(mu, -2j * np.pi * sigma * z + log_offset, sigma * tau - z, tau)
    return plus + minus if letter == "D" else plus - minus


def _exp_theta(mu, log_factor, v, tau):
    """``exp(log_factor) * theta_mu(v; tau)`` without intermediate overflow."""
    scale, unit = theta_parts(mu, v, tau)
    out = np.exp(scale + log_factor) * unit
    return out[()] if out.ndim == 0 else out


def m_function(spec: RootSystemSpec, geom: DomainGeometry, j: int, z, log_offset=0.0):
    """Row function M_j(z) = Theta(J(j)/NN, NN z/L, NN tau), times ``exp(log_offset)``."""
    nn = script_n(spec)
    sigma = float(offset_j(spec, j)) / nn
    z = np.asarray(z, dtype=complex)
    return theta_letter(spec.letter, sigma, nn * z / geom.L, nn * geom.tau, log_offset)


def m_matrix(spec: RootSystemSpec, geom: DomainGeometry, z) -> np.ndarray:
    """Stack of M_1..M_N at the points ``z``; shape ``(N,) + z.shape``."""
    z = np.asarray(z, dtype=complex)
    return np.stack([m_function(spec, geom, j, z) for j in range(1, spec.n + 1)])


def _denominator_factors(family: str, xi: np.ndarray, tau: complex):
    """(mu, argument, modular parameter) triples whose product is W^{R_N}."""
    n = xi.shape[-1]
    factors = []
    if family != "A":
        single = {
            "B": [(1, xi, tau)],
            "Bv": [(1, 2 * xi, 2 * tau)],
            "C": [(1, 2 * xi, tau)],
            "Cv": [(1, xi, tau / 2)],
            "BC": [(1, xi, tau), (0, 2 * xi, 2 * tau)],
            "D": [],
        }[family]
        factors.extend(single)
    if n >= 2:
        jj, kk = np.triu_indices(n, k=1)
        diff = xi[..., kk] - xi[..., jj]
        factors.append((1, diff, tau))
        if family != "A":
            factors.append((1, xi[..., kk] + xi[..., jj], tau))
    return factors


def macdonald_denominator(spec: RootSystemSpec, xi, tau):
    """W^{R_N}(xi; tau); ``xi`` has trailing axis of length N."""
    tau = check_tau(tau)
    xi = np.asarray(xi, dtype=complex)
    if xi.shape[-1] != spec.n:
        raise ValueError(f"expected {spec.n} variables, got {xi.shape[-1]}")
    log_scale = np.zeros(xi.shape[:-1])
    unit = np.ones(xi.shape[:-1], dtype=complex)
    for mu, arg, t in _denominator_factors(spec.family, xi, tau):
        s, u = theta_parts(mu, arg, t)
        if s.ndim > log_scale.ndim:
            s, u = s.sum(axis=-1), u.prod(axis=-1)
        log_scale = log_scale + s
        unit = unit * u
    out = np.exp(log_scale) * unit
    return out[()] if out.ndim == 0 else out


def log_abs_macdonald_denominator(spec: RootSystemSpec, xi, tau):
    """``log|W^{R_N}(xi; tau)|``, safe for large N."""
    tau = check_tau(tau)
    xi = np.asarray(xi, dtype=complex)
    if xi.shape[-1] != spec.n:
        raise ValueError(f"expected {spec.n} variables, got {xi.shape[-1]}")
    total = np.zeros(xi.shape[:-1])
    with np.errstate(divide="ignore"):
        for mu, arg, t in _denominator_factors(spec.family, xi, tau):
            s, u = theta_parts(mu, arg, t)
            val = s + np.log(np.abs(u))
            if val.ndim > total.ndim:
                val = val.sum(axis=-1)
            total = total + val
    return total[()] if total.ndim == 0 else total


def log_prefactor_a(spec: RootSystemSpec, tau) -> complex:
    tau = check_tau(tau)
    n = spec.n
    pit = 1j * math.pi * tau
    le = log_dedekind_eta(tau)
    fam = spec.family
    if fam == "A":
        return -(2 * n - 1) * (2 * n + 1) * pit / 12 - (n - 1) * (n - 2) / 2 * le
    if fam == "B":
        return math.log(2) - n * (n - 1) * pit / 6 - n * (n - 1) * le
    if fam == "Bv":
        return (
            math.log(2)
            - (n - 1) * (2 * n - 1) * pit / 12
            - (n - 1) ** 2 * le
            - (n - 1) * log_dedekind_eta(2 * tau)
        )
    if fam == "C":
        return -n * (2 * n + 1) * pit / 12 - n * (n - 1) * le
    if fam == "Cv":
        return (
            -(2 * n - 1) * (2 * n + 1) * pit / 24
            - (n - 1) ** 2 * le
            - (n - 1) * log_dedekind_eta(tau / 2)
        )
    if fam == "BC":
        return -n * (n + 1) * pit / 6 - n * (n - 1) * le - n * log_dedekind_eta(2 * tau)
    return math.log(4) - n * (2 * n - 1) * pit / 12 - n * (n - 2) * le


def prefactor_a(spec: RootSystemSpec, tau) -> complex:
    """a^{R_N}(tau); real for purely imaginary tau."""
    tau = check_tau(tau)
    val = cmath.exp(log_prefactor_a(spec, tau))
    return complex(val.real, 0.0) if tau.real == 0 else val


def macdonald_rhs(spec: RootSystemSpec, geom: DomainGeometry, z):
    """Right-hand side of det[M_j(z_k)] = (phase) a(tau) [theta factor] W(z/L)."""
    z = np.asarray(z, dtype=complex)
    n = spec.n
    tau = geom.tau
    rhs = prefactor_a(spec, tau) * macdonald_denominator(spec, z / geom.L, tau)
    if spec.family == "A":
        total = z.sum(axis=-1) / geom.L
        if n % 2 == 0:
            rhs = rhs * (1j ** (n // 2)) * theta_eval(0, total, tau)
        else:
            rhs = rhs * (1j ** (-((n - 1) // 2))) * theta_eval(3, total, tau)
    elif spec.family in ("C", "Cv", "BC"):
        rhs = rhs * (1j ** (-n))
    return rhs


def macdonald_lhs(spec: RootSystemSpec, geom: DomainGeometry, z):
    """det[M_j(z_k)] by partially pivoted LU."""
    z = np.asarray(z, dtype=complex)
    mat = m_matrix(spec, geom, z)  # (N, ..., N)
    mat = np.moveaxis(mat, 0, -2)  # (..., j, k)
    return np.linalg.det(mat)


def relative_residual(a, b, floor: float = RESIDUAL_FLOOR) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return float(np.max(np.abs(a - b) / scale))


def macdonald_identity_residual(spec: RootSystemSpec, geom: DomainGeometry, z) -> float:
    """``|LHS - RHS| / max(|LHS|, |RHS|, 1e-30)`` for one configuration."""
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != spec.n:
        raise ValueError(f"expected {spec.n} points, got {z.shape[-1]}")
    return relative_residual(macdonald_lhs(spec, geom, z), macdonald_rhs(spec, geom, z))
