"""Toolkit for nonlocal population dynamics reduced to concentration
manifolds: kernel eigenpairs, exact homogeneous solutions, spectral and
grid solvers on the circle, a coupled manifold solver, a planar verifier,
large-time asymptotics, diagnostics, and a scenario-runner CLI."""

__version__ = "0.1.0"

from .kernel import CircleKernelParams, bessel_i, eigenvalue, eigenvalues
from .exact import HomogeneousModel, beta0, rho0, rho_lim, t_max, t_quasi_steady

__all__ = [
    "__version__",
    "CircleKernelParams", "bessel_i", "eigenvalue", "eigenvalues",
    "HomogeneousModel", "beta0", "rho0", "rho_lim", "t_max", "t_quasi_steady",
]
