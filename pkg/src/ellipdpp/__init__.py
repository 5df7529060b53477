"""Elliptic determinantal point processes on the torus.

Modules: ``theta`` (Jacobi theta and Dedekind eta), ``roots`` (families and
Macdonald denominators), ``quadrature``, ``orthogonality``, ``dpp`` (weights,
partition functions, kernels), ``sampler``, ``limits`` (strip and plane
limits), ``plasma`` (solvable one-component plasmas), ``suites`` and ``cli``.
"""

from .dpp import Configuration, KernelContext, kernel_eval, partition_z, weight_q
from .roots import FAMILIES, DomainGeometry, FamilyError, RootSystemSpec

__version__ = "0.1.0"

__all__ = [
    "FAMILIES",
    "Configuration",
    "DomainGeometry",
    "FamilyError",
    "KernelContext",
    "RootSystemSpec",
    "kernel_eval",
    "partition_z",
    "weight_q",
]
