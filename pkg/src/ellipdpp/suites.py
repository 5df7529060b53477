"""Verification suites: named collections of residual checks with tolerances.

Each suite takes a seed and returns a :class:`RunReport`.  A case passes when
its residual is finite and does not exceed its tolerance.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import product
from math import factorial

import numpy as np

from . import limits as lim
from . import plasma as pl
from .dpp import (
    KernelContext,
    correlation,
    density_p,
    det_consistency_residual,
    hermiticity_residual,
    kernel_quasi_periodicity_residual,
    log_weight_q,
    partition_z,
    q_periodicity_residual,
    reproducing_residual,
    trace_integral,
)
from .orthogonality import gram_residual
from .quadrature import nodes
from .roots import FAMILIES, DomainGeometry, RootSystemSpec, macdonald_identity_residual
from .theta import theta1_product, theta_eval

ASPECTS = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class Case:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.residual) and self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {"name": self.name, "residual": self.residual, "tolerance": self.tolerance, "pass": self.passed}


@dataclass
class RunReport:
    suite: str
    seed: int
    cases: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def failures(self) -> list:
        return [c for c in self.cases if not c.passed]

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "suite": self.suite,
            "seed": self.seed,
            "pass": self.passed,
            "cases": [c.to_dict() for c in self.cases],
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b) / scale))


def _random_tau(rng, count, im_range=(0.3, 2.0)):
    return rng.uniform(-0.5, 0.5, count) + 1j * rng.uniform(*im_range, count)


def _random_cell_points(rng, tau, count):
    """Points ``a + b tau`` with ``|a|, |b| <= 1/2``."""
    return rng.uniform(-0.5, 0.5, count) + rng.uniform(-0.5, 0.5, count) * tau


def _random_config(rng, geom, n, count=None):
    shape = (n,) if count is None else (count, n)
    return geom.L * rng.random(shape) + 1j * geom.W * rng.random(shape)


def aspect_geometries(aspects=ASPECTS, length: float = 1.0):
    return [DomainGeometry(length, a * length) for a in aspects]


# --- theta -----------------------------------------------------------------

_ODD_ONE = {0: 0, 1: 1, 2: 1, 3: 0}
_ODD_TAU = {0: 1, 1: 1, 2: 0, 3: 0}


def theta_cases(seed: int, count: int = 1000) -> list[Case]:
    """Parity, quasi-periodicity, product-vs-series and imaginary-transform checks."""
    rng = np.random.default_rng(seed)
    cases = []
    taus = _random_tau(rng, count)
    v = _random_cell_points(rng, taus, count)
    for mu in range(4):
        sign = -1.0 if mu == 1 else 1.0
        worst = max(_rel(theta_eval(mu, -vi, t), sign * theta_eval(mu, vi, t)) for vi, t in zip(v, taus))
        cases.append(Case(f"parity theta_{mu}", worst, 1e-11))

    m = rng.integers(-3, 4, count)
    n = rng.integers(-3, 4, count)
    for mu in range(4):
        worst = 0.0
        for vi, t, mi, ni in zip(v, taus, m, n):
            factor = (-1.0) ** (mi * _ODD_ONE[mu] + ni * _ODD_TAU[mu]) * np.exp(
                -1j * np.pi * (2 * ni * vi + ni * ni * t)
            )
            worst = max(worst, _rel(theta_eval(mu, vi + mi + ni * t, t), factor * theta_eval(mu, vi, t)))
        cases.append(Case(f"quasi-periodicity theta_{mu}", worst, 1e-11))

    worst = max(_rel(theta1_product(vi, t), theta_eval(1, vi, t, "series")) for vi, t in zip(v, taus))
    cases.append(Case("product vs series theta_1", worst, 1e-11))

    taus_t = _random_tau(rng, count, (0.6, 1.4))
    vt = _random_cell_points(rng, taus_t, count)
    for mu in range(4):
        worst = max(
            _rel(theta_eval(mu, vi, t, "transform"), theta_eval(mu, vi, t, "series")) for vi, t in zip(vt, taus_t)
        )
        cases.append(Case(f"imaginary transform theta_{mu}", worst, 1e-11))
    return cases


# --- Macdonald identity ----------------------------------------------------


def macdonald_cases(seed: int, configs: int = 20) -> list[Case]:
    rng = np.random.default_rng(seed)
    cases = []
    for fam in FAMILIES:
        ns = (2, 3, 4) if fam == "D" else (1, 2, 3)
        for n, geom in product(ns, aspect_geometries()):
            spec = RootSystemSpec(fam, n)
            worst = max(
                macdonald_identity_residual(spec, geom, _random_config(rng, geom, n)) for _ in range(configs)
            )
            cases.append(Case(f"Macdonald {spec} W/L={geom.W / geom.L:g}", worst, 1e-9))
    return cases


# --- orthogonality ---------------------------------------------------------


def ortho_cases(seed: int, max_n: int = 4) -> list[Case]:
    del seed  # deterministic quadrature
    cases = []
    for fam in FAMILIES:
        ns = range(2, max_n + 1) if fam == "D" else range(1, max_n + 1)
        for n, geom in product(ns, aspect_geometries()):
            spec = RootSystemSpec(fam, n)
            cases.append(Case(f"Gram {spec} W/L={geom.W / geom.L:g}", gram_residual(spec, geom), 1e-8))
    return cases


# --- partition functions ---------------------------------------------------


def partition_quadrature(spec: RootSystemSpec, geom: DomainGeometry, nodes_per_dim: int) -> float:
    """``(1/N!) int Q`` by periodic trapezoid in every coordinate (N = 1 or 2)."""
    xs, wx = nodes(0.0, geom.L, nodes_per_dim, "periodic_trapezoid")
    ys, wy = nodes(0.0, geom.W, nodes_per_dim, "periodic_trapezoid")
    z = (xs[:, None] + 1j * ys[None, :]).ravel()
    w = (wx[:, None] * wy[None, :]).ravel()
    if spec.n == 1:
        return float(np.sum(w * np.exp(log_weight_q(spec, geom, z[:, None]))))
    if spec.n == 2:
        pts = np.stack(np.broadcast_arrays(z[:, None], z[None, :]), axis=-1)
        vals = np.exp(log_weight_q(spec, geom, pts))
        return float(np.einsum("i,ij,j->", w, vals, w) / 2)
    raise ValueError("tensor quadrature implemented for N = 1 and 2 only")


def partition_cases(seed: int) -> list[Case]:
    del seed
    cases = []
    for fam, geom in product(FAMILIES, aspect_geometries()):
        if fam == "D":
            continue
        spec = RootSystemSpec(fam, 1)
        val = partition_quadrature(spec, geom, 96)
        cases.append(Case(f"Z {spec} 2D W/L={geom.W / geom.L:g}", _rel(val, partition_z(spec, geom)), 1e-8))
    geom = DomainGeometry(1.0, 1.0)
    for fam in FAMILIES:
        spec = RootSystemSpec(fam, 2)
        val = partition_quadrature(spec, geom, 20)
        cases.append(Case(f"Z {spec} 4D", _rel(val, partition_z(spec, geom)), 1e-3))
    return cases


# --- DPP consistency -------------------------------------------------------


def dpp_cases(seed: int, configs: int = 50, max_n: int = 3, geom: DomainGeometry | None = None) -> list[Case]:
    rng = np.random.default_rng(seed)
    geom = geom or DomainGeometry(1.3, 1.0)
    cases = []
    for fam in FAMILIES:
        ns = range(2, max_n + 1) if fam == "D" else range(1, max_n + 1)
        for n in ns:
            spec = RootSystemSpec(fam, n)
            ctx = KernelContext(spec, geom)
            cases.append(Case(f"trace {spec}", abs(trace_integral(ctx) - n) / n, 1e-8))
            z, zp = _random_config(rng, geom, 2)
            cases.append(Case(f"reproducing {spec}", reproducing_residual(ctx, z, zp), 1e-6))
            cfgs = _random_config(rng, geom, n, configs)
            cases.append(
                Case(f"det K = Q/Z {spec}", max(det_consistency_residual(ctx, c) for c in cfgs), 1e-8)
            )
            cases.append(
                Case(f"q periodicity {spec}", max(q_periodicity_residual(spec, geom, c) for c in cfgs[:5]), 1e-10)
            )
            a, b = _random_config(rng, geom, 2)
            cases.append(Case(f"kernel quasi-periodicity {spec}", kernel_quasi_periodicity_residual(ctx, a, b), 1e-10))
            cases.append(Case(f"hermiticity {spec}", hermiticity_residual(ctx, a, b), 1e-12))
    return cases


def literal_det_ratio(spec: RootSystemSpec, geom: DomainGeometry, config) -> float:
    """``N! Q/Z`` divided by ``det[K]``; equals ``N!`` under the closed-form Z."""
    ctx = KernelContext(spec, geom)
    return float(factorial(spec.n) * density_p(spec, geom, config) / correlation(ctx, config))


# --- plasma ----------------------------------------------------------------


def plasma_cases(seed: int, configs: int = 20) -> list[Case]:
    cases = []
    for conv in pl.CONVENTIONS:
        for fam, n, geom in product("ACD", (2, 3), aspect_geometries()):
            fit = pl.fit_c_constant(fam, geom, n, configs, seed, conv)
            tag = f"{fam}_{n} W/L={geom.W / geom.L:g} [{conv}]"
            cases.append(Case(f"Q_plasma/Q constant {tag}", fit.spread, 1e-9))
            cases.append(Case(f"c closed form {tag}", fit.relative_error["quarter"], 1e-9))
            cases.append(Case(f"Z_plasma = c Z {tag}", pl.plasma_partition_residual(fam, geom, n, conv), 1e-10))
        for n in (2, 4, 10, 32):
            geom = pl.geometry_at_density(1.0, 1.0, n)
            fe = pl.free_energy_expansion("A", geom, n, conv)
            cases.append(Case(f"A free energy exact N={n} [{conv}]", abs(fe.residual), 1e-12))
        for fam in "CD":
            rows = pl.free_energy_scan(fam, 1.0, 1.3, convention=conv)
            n2 = [abs(r["N2_residual"]) for r in rows]
            cases.append(Case(f"{fam} free energy N^2 residual bound [{conv}]", max(n2), 1.0))
            cases.append(Case(f"{fam} free energy N^2 residual settling [{conv}]", abs(n2[-1] - n2[-2]) / n2[-1], 0.1))
    geom = DomainGeometry(1.0, 1.0)
    for fam in "AC":
        plasma = pl.PlasmaSpec.solvable(fam, 1, geom)
        xs, wx = nodes(0.0, geom.L, 64, "periodic_trapezoid")
        ys, wy = nodes(0.0, geom.W, 64, "periodic_trapezoid")
        total = sum(
            wx[i] * wy[k] * pl.boltzmann_weight(plasma, [xs[i] + 1j * ys[k]], fam == "A")
            for i in range(64)
            for k in range(64)
        )
        cases.append(Case(f"Z_plasma {fam}_1 by 2D quadrature", _rel(total, pl.plasma_partition(fam, geom, 1)), 1e-6))
    rng = np.random.default_rng(seed)
    for fam, n in product("ACD", (2, 3)):
        worst = max(pl.solvable_periodicity_residual(fam, geom, _random_config(rng, geom, n)) for _ in range(5))
        cases.append(Case(f"plasma weight periodicity {fam}_{n}", worst, 1e-10))
    return cases


# --- plasma identities and free-field checks -------------------------------


def identity_cases(seed: int, points: int = 10, grid: int = 1024) -> list[Case]:
    """Background integrals and potentials by quadrature, the theta identity,
    short-distance behavior and modular invariance."""
    rng = np.random.default_rng(seed)
    cases = []
    geom = DomainGeometry(1.5, 1.0)
    res = {"I-": 0.0, "I+": 0.0, "I0": 0.0}
    for _ in range(points):
        z = complex(_random_config(rng, geom, 1)[0])
        closed = pl.background_integrals(geom, z)
        quad = pl.background_integrals_quadrature(geom, z, grid)
        for key, c, q in zip(res, (closed.i_minus, closed.i_plus, closed.i_zero), quad):
            res[key] = max(res[key], abs(q - c.real) / abs(c.real))
    for key, val in res.items():
        cases.append(Case(f"Re {key} vs midpoint quadrature", val, 1e-4))
    for pot, nb in (("minus", 3), ("pm", 4), ("pm", 2)):
        plasma = pl.PlasmaSpec(pot, 3, nb, 2.0, geom)
        worst = 0.0
        for _ in range(5):
            z = complex(_random_config(rng, geom, 1)[0])
            worst = max(
                worst, abs(pl.background_potential_v(plasma, z) - pl.background_potential_quadrature(plasma, z))
            )
        cases.append(Case(f"V {pot} N^-={nb} vs quadrature", worst, 1e-3))
    for n in (2, 3, 4, 5):
        worst = max(pl.lemma_identity_residual(geom, n, _random_config(rng, geom, n)) for _ in range(20))
        cases.append(Case(f"theta identity N={n}", worst, 1e-11))
    z = 0.3 * geom.L + 0.4j * geom.W
    for pot in pl.POTENTIALS:
        gap = abs(pl.phi_regularized(pot, geom, z, z + 1e-4) + math.log(1e-4))
        cases.append(Case(f"Phi {pot} + log|z-z'| at 1e-4", float(gap), 1e-3))
    for t in (1.0, 2.0, 0.5, 0.3):
        cases.append(Case(f"modular invariance tau={t:g}i", pl.modular_invariance_residual(1j * t), 1e-12))
    return cases


# --- limits ----------------------------------------------------------------


def limit_cases(seed: int) -> list[Case]:
    """Limit checks on the library's fixed test sets; ``seed`` drives only the
    random Ginibre density points."""
    cases = []
    p1 = lim.StripParams(1.0, 1.0)
    for cls in "BC":
        cases.append(Case(f"strip {cls} kernel at (0,0)", abs(complex(lim.strip_kernel(cls, p1, 0.0, 0.0))), 1e-10))
    errs = lim.finite_to_strip_scan("A", (8, 16, 32, 64), p1)
    cases.append(Case("finite A_N -> strip, N=64", errs[-1], 1e-3))
    cases.append(Case("finite A_N -> strip, monotone above 1e-12", monotone_violation(errs), 0.0))
    pts = lim.scan_test_pairs(p1)
    for fam, target in (("Bv", "B"), ("Cv", "C"), ("BC", "C")):
        err = lim.finite_to_strip_scan(fam, (32,), p1, pts)[0]
        cases.append(Case(f"collapse {fam}_32 -> strip {target}", err, 2e-3))
    gpts = lim.ginibre_test_pairs(1.0)
    for cls in lim.LIMIT_CLASSES:
        err = lim.strip_to_ginibre_scan(cls, 1.0, (4.0,), gpts)[0]
        cases.append(Case(f"strip {cls} -> Ginibre {lim.GINIBRE_OF[cls]}, W=4", err, 1e-4))
    p4 = lim.StripParams(1.0, 4.0)
    z, zp = gpts
    gap = float(np.max(np.abs(np.abs(lim.strip_kernel("B", p4, z, zp)) - np.abs(lim.strip_kernel("C", p4, z, zp)))))
    cases.append(Case("strip |K^B| vs |K^C| at W=4", gap, 1e-4))
    rng = np.random.default_rng(seed)
    zs = rng.uniform(-2, 2, 100) + 1j * rng.uniform(-2, 2, 100)
    for cls in lim.GINIBRE_CLASSES:
        direct = np.real(lim.ginibre_kernel(cls, 1.0, zs, zs))
        cases.append(Case(f"Ginibre {cls} density closed form", _rel(direct, lim.ginibre_density(cls, 1.0, zs)), 1e-13))
        cases.append(
            Case(f"Ginibre {cls} density Mittag-Leffler", _rel(direct, lim.ginibre_density_ml(cls, 1.0, zs)), 1e-13)
        )
    cases.append(Case("Ginibre C density at 0", abs(float(lim.ginibre_density("C", 1.0, 0.0))), 1e-13))
    cases.append(Case("Ginibre D density at 0 minus 2 rho", abs(float(lim.ginibre_density("D", 1.0, 0.0)) - 2.0), 1e-13))
    return cases


MONOTONE_FLOOR = 1e-12


def monotone_violation(errors, floor: float = MONOTONE_FLOOR) -> float:
    """Largest increase between consecutive errors, ignoring values below ``floor``."""
    worst = 0.0
    for a, b in zip(errors, errors[1:]):
        if b > floor and b > a:
            worst = max(worst, b - a)
    return worst


SUITES = {
    "theta": theta_cases,
    "macdonald": macdonald_cases,
    "ortho": ortho_cases,
    "partition": partition_cases,
    "dpp": dpp_cases,
    "plasma": plasma_cases,
    "identities": identity_cases,
    "limits": limit_cases,
}


def run_suite(name: str, seed: int = 0, tol: float | None = None) -> RunReport:
    """Run one suite (or ``"all"``); ``tol`` overrides every case tolerance."""
    if name != "all" and name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; expected one of {sorted(SUITES)} or 'all'")
    start = time.perf_counter()
    names = list(SUITES) if name == "all" else [name]
    cases = []
    for nm in names:
        for c in SUITES[nm](seed):
            label = c.name if name != "all" else f"{nm}: {c.name}"
            cases.append(Case(label, c.residual, c.tolerance if tol is None else tol))
    return RunReport(name, seed, cases, time.perf_counter() - start)

