"""Gaussian influence kernel restricted to a circle.

For points X(s) = (R cos s, R sin s) the planar Gaussian interaction
b0*exp(-|X(s)-X(s')|^2 / 2 gamma^2) collapses to a function of the angle
difference only,

    b(s, s') = b0 * exp(-mu * (1 - cos(s - s'))),     mu = R^2 / gamma^2,

whose integral-operator eigenfunctions are the Fourier modes
v_j(s) = e^{ijs}/sqrt(2 pi) with eigenvalues

    lambda_j = 2 pi b0 e^{-mu} I_|j|(mu),

I_j being the modified Bessel function of the first kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
SQRT_TWO_PI = math.sqrt(TWO_PI)

# largest argument for which the unscaled I_j(mu) fits in a double
_BESSEL_MU_MAX = 700.0


def wrap_angle(s):
    """Map angles to the canonical branch [-pi, pi)."""
    return (np.asarray(s) + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class CircleKernelParams:
    """Interaction strength b0, range gamma and circle radius R."""

    b0: float
    gamma: float
    R: float

    def __post_init__(self):
        if not (self.b0 > 0 and self.gamma > 0 and self.R > 0):
            raise ValueError(
                f"kernel parameters must be positive, got "
                f"b0={self.b0}, gamma={self.gamma}, R={self.R}"
            )

    @property
    def mu(self) -> float:
        return (self.R / self.gamma) ** 2


def _bessel_series(order: int, mu: float) -> float:
    """Ascending series for I_order(mu); all terms positive, no cancellation."""
    half = 0.5 * mu
    if half == 0.0:
        return 1.0 if order == 0 else 0.0
    log_t0 = order * math.log(half) - math.lgamma(order + 1)
    if log_t0 < -745.0:
        return 0.0
    term = math.exp(log_t0)
    total = term
    k = 0
    while True:
        k += 1
        term *= half * half / (k * (order + k))
        total += term
        # the underflow guard matters when total is subnormal: 1e-18 * total
        # rounds to zero and the relative test alone would never trigger
        if term == 0.0 or term < 1e-18 * total:
            return total


def _bessel_miller_scaled(order: int, mu: float) -> float:
    """e^{-mu} I_order(mu) by backward recurrence, normalized by
    I_0 + 2 sum_{k>=1} I_k = e^mu."""
    start = int(max(order, mu) + 10.0 * math.sqrt(max(mu, 10.0)) + 50)
    p_next = 0.0
    p_curr = 1e-300
    target = 0.0
    norm = 0.0
    for k in range(start, 0, -1):
        p_prev = p_next + (2.0 * k / mu) * p_curr
        p_next, p_curr = p_curr, p_prev
        if k - 1 == order:
            target = p_curr
        if k - 1 >= 1:
            norm += 2.0 * p_curr
        if abs(p_curr) > 1e250:
            p_curr *= 1e-250
            p_next *= 1e-250
            target *= 1e-250
            norm *= 1e-250
    norm += p_curr  # k = 0 term enters once
    # note: loop above double-counted nothing; p_curr now holds I_0 proxy
    return target / norm


def bessel_i_scaled(order: int, mu: float) -> float:
    """Exponentially scaled modified Bessel function e^{-mu} I_order(mu)."""
    order = _check_bessel_args(order, mu)
    if mu == 0.0:
        return 1.0 if order == 0 else 0.0
    if mu <= 2.0 * order:
        return _bessel_series(order, mu) * math.exp(-mu)
    return _bessel_miller_scaled(order, mu)


def bessel_i(order: int, mu: float) -> float:
    """Modified Bessel function of the first kind I_order(mu), mu >= 0."""
    order = _check_bessel_args(order, mu)
    if mu > _BESSEL_MU_MAX:
        raise OverflowError(f"bessel_i overflows for mu={mu} > {_BESSEL_MU_MAX}")
    if mu == 0.0:
        return 1.0 if order == 0 else 0.0
    if mu <= 2.0 * order:
        return _bessel_series(order, mu)
    return _bessel_miller_scaled(order, mu) * math.exp(mu)


def _check_bessel_args(order, mu) -> int:
    if mu < 0:
        raise ValueError(f"bessel_i requires mu >= 0, got {mu}")
    iorder = int(order)
    if iorder != order:
        raise ValueError(f"bessel_i requires an integer order, got {order}")
    return abs(iorder)  # I_{-n} = I_n for integer orders


def kernel_value(s, s_prime, params: CircleKernelParams):
    """b0 * exp(-mu (1 - cos(s - s'))); 2 pi periodic in both arguments."""
    delta = wrap_angle(np.asarray(s) - np.asarray(s_prime))
    return params.b0 * np.exp(-params.mu * (1.0 - np.cos(delta)))


def eigenvalue(j: int, params: CircleKernelParams) -> float:
    """Fredholm eigenvalue lambda_j = 2 pi b0 e^{-mu} I_|j|(mu)."""
    return TWO_PI * params.b0 * bessel_i_scaled(abs(int(j)), params.mu)


def eigenvalues(J: int, params: CircleKernelParams) -> np.ndarray:
    """lambda_j for j = -J..J as an array of length 2J + 1."""
    pos = np.array([eigenvalue(j, params) for j in range(J + 1)])
    return np.concatenate([pos[:0:-1], pos])


def default_truncation(params: CircleKernelParams) -> int:
    """Band limit past which the Bessel tail is negligible."""
    return math.ceil(8.0 * params.mu) + 20


def spectral_reconstruction(s, s_prime, J: int, params: CircleKernelParams):
    """Truncated Mercer sum sum_{|j|<=J} lambda_j v_j(s) v_j*(s')."""
    if J < 0:
        raise ValueError(f"truncation order must be >= 0, got {J}")
    delta = wrap_angle(np.asarray(s) - np.asarray(s_prime))
    total = eigenvalue(0, params) * np.ones_like(np.asarray(delta, dtype=float))
    for j in range(1, J + 1):
        total = total + 2.0 * eigenvalue(j, params) * np.cos(j * delta)
    return total / TWO_PI
