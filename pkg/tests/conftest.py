import math

import numpy as np
import pytest

from nlfkpp.kernel import CircleKernelParams


@pytest.fixture
def unit_kernel():
    """b0 = 1, gamma = 1, R = 1, so mu = 1."""
    return CircleKernelParams(1.0, 1.0, 1.0)


def bessel_quadrature(j: int, mu: float, n: int = 40001) -> float:
    """Scaled modified Bessel e^{-mu} I_j(mu) by Simpson quadrature of
    (1/pi) int_0^pi e^{mu (cos t - 1)} cos(j t) dt; independent oracle."""
    from scipy.integrate import simpson

    t = np.linspace(0.0, math.pi, n)
    return simpson(np.exp(mu * (np.cos(t) - 1.0)) * np.cos(j * t), x=t) / math.pi


def eigenvalue_quadrature(j: int, params: CircleKernelParams,
                          n: int = 200000) -> float:
    """lambda_j = int b(s, 0) e^{-i j s} ds by the periodic rectangle rule."""
    s = -math.pi + 2.0 * math.pi * np.arange(n) / n
    mu = params.mu
    vals = params.b0 * np.exp(mu * (np.cos(s) - 1.0)) * np.cos(j * s)
    return float(2.0 * math.pi / n * np.sum(vals))
