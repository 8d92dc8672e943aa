"""Coupled evolution of a sampled one-parameter manifold X(t,s) in R^n and
its density rho(t,s):

    drho/dt = rho(s) [ a(X(s),t) - kappa int_G b(X(s),X(s')) rho(s') ds' ],
    dX/dt   = V_x(X(s),t) + kappa int_G W_x(X(s),X(s'),t) rho(s') ds'.

The parameter domain G is a closed interval, sampled uniformly; the circle
case identifies the endpoints.  Integrals use the rectangle rule on the
periodic grid and the trapezoid rule otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .csvio import write_csv

BLOWUP_LIMIT = 1e12


@dataclass
class ManifoldState:
    s: np.ndarray       # parameter samples over G
    X: np.ndarray       # shape (n_samples, n_dim)
    rho: np.ndarray     # shape (n_samples,)
    t: float = 0.0
    periodic: bool = True

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        self.X = np.asarray(self.X, dtype=float)
        self.rho = np.asarray(self.rho, dtype=float)
        n = len(self.s)
        if self.X.ndim != 2 or self.X.shape[0] != n:
            raise ValueError(f"X must be (n_samples, n_dim), got {self.X.shape}")
        if self.rho.shape != (n,):
            raise ValueError(f"rho must have {n} samples, got {self.rho.shape}")
        if np.min(self.rho) < 0 and np.min(self.rho) < -1e-10 * max(
                float(np.max(self.rho)), 1e-300):
            raise ValueError(f"density is negative: min rho = {np.min(self.rho)}")
        gaps = np.linalg.norm(np.diff(self.X, axis=0), axis=1)
        if self.periodic:
            gaps = np.append(gaps, np.linalg.norm(self.X[0] - self.X[-1]))
        med = float(np.median(gaps))
        if med > 0 and float(np.max(gaps)) > 4.0 * med:
            raise ValueError(
                "manifold sampling is discontinuous: largest adjacent gap "
                f"{np.max(gaps):.3e} exceeds 4x the median spacing {med:.3e}"
            )

    @property
    def n_dim(self) -> int:
        return self.X.shape[1]

    def weights(self) -> np.ndarray:
        """Quadrature weights over G for the current sampling."""
        ds = self.s[1] - self.s[0]
        w = np.full(len(self.s), ds)
        if not self.periodic:
            w[0] *= 0.5
            w[-1] *= 0.5
        return w


@dataclass(frozen=True)
class ConvectionSpec:
    """Function-valued model data for the coupled system.

    a(x, t) -> rate; b(x, y) -> influence (vectorized over rows of y);
    V_x(x, t) -> velocity in R^n; W_x(x, y, t) -> nonlocal velocity
    contribution, summed against rho(y).  W_x defaults to zero.
    """

    a: Callable
    b: Callable
    kappa: float
    V_x: Optional[Callable] = None
    W_x: Optional[Callable] = None


def constant_rate(a: float) -> Callable:
    return lambda x, t: a


def gaussian_influence(b0: float, gamma: float) -> Callable:
    """b(x, y) = b0 exp(-|x - y|^2 / (2 gamma^2)), y vectorized over rows."""
    def b(x, y):
        d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
        return b0 * np.exp(-np.sum(d * d, axis=-1) / (2.0 * gamma**2))
    return b


def linear_drag(k0: float) -> Callable:
    return lambda x, t: -k0 * np.asarray(x, dtype=float)


BUILTIN_RATES = {"constant": constant_rate}
BUILTIN_INFLUENCES = {"gaussian": gaussian_influence}
BUILTIN_VELOCITIES = {"linear_drag": linear_drag}


def circle_state(R: float, N: int, rho_phi, t0: float = 0.0) -> ManifoldState:
    """Circle of radius R sampled at s_k = -pi + 2 pi k / N."""
    s = -math.pi + 2.0 * math.pi * np.arange(N) / N
    X = np.column_stack([R * np.cos(s), R * np.sin(s)])
    return ManifoldState(s, X, np.asarray(rho_phi(s), dtype=float), t0, True)


def _influence_matrix(spec: ConvectionSpec, X: np.ndarray) -> np.ndarray:
    """B[k, l] = b(X_k, X_l); broadcast when b supports it, loop otherwise."""
    try:
        B = np.asarray(spec.b(X[:, None, :], X[None, :, :]), dtype=float)
        if B.shape == (len(X), len(X)):
            return B
    except Exception:
        pass
    return np.array([spec.b(x, X) for x in X], dtype=float)


def _rates_vector(spec: ConvectionSpec, state: ManifoldState) -> np.ndarray:
    """a(X_k, t) for all samples; broadcast when a supports it."""
    try:
        r = np.asarray(spec.a(state.X, state.t), dtype=float)
        if r.ndim == 0:
            return np.full(len(state.s), float(r))
        if r.shape == (len(state.s),):
            return r
    except Exception:
        pass
    return np.array([spec.a(x, state.t) for x in state.X], dtype=float)


def ee_rhs(state: ManifoldState, spec: ConvectionSpec):
    """Returns (drho/dt, dX/dt) by rectangle/trapezoid quadrature over G."""
    w = state.weights()
    n = len(state.s)
    B = _influence_matrix(spec, state.X)
    competition = B @ (w * state.rho)
    rates = _rates_vector(spec, state)
    rho_dot = state.rho * (rates - spec.kappa * competition)
    X_dot = np.zeros_like(state.X)
    if spec.V_x is not None:
        try:
            vel = np.asarray(spec.V_x(state.X, state.t), dtype=float)
            if vel.shape != state.X.shape:
                raise ValueError
        except Exception:
            vel = np.array([spec.V_x(x, state.t) for x in state.X], dtype=float)
        X_dot += vel
    if spec.W_x is not None:
        for k in range(n):
            contrib = np.asarray(spec.W_x(state.X[k], state.X, state.t),
                                 dtype=float)
            X_dot[k] += spec.kappa * (w * state.rho) @ contrib
    if not (np.all(np.isfinite(rho_dot)) and np.all(np.isfinite(X_dot))):
        raise RuntimeError("model functions returned non-finite values")
    return rho_dot, X_dot


def integrate(state0: ManifoldState, spec: ConvectionSpec, t_end: float,
              dt: float, store_every: int = 1):
    """Fixed-step RK4 on the coupled (rho, X) system.

    Returns (times, rho history, X history) with shapes (n_stored,),
    (n_stored, N) and (n_stored, N, n_dim).
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    n_steps = int(round((t_end - state0.t) / dt))
    rho = state0.rho.copy()
    X = state0.X.copy()
    t = float(state0.t)
    times, rho_hist, X_hist = [t], [rho.copy()], [X.copy()]

    def f(r, x, t_now):
        st = ManifoldState.__new__(ManifoldState)
        st.s, st.X, st.rho, st.t, st.periodic = state0.s, x, r, t_now, state0.periodic
        return ee_rhs(st, spec)

    for i in range(n_steps):
        kr1, kx1 = f(rho, X, t)
        kr2, kx2 = f(rho + 0.5 * dt * kr1, X + 0.5 * dt * kx1, t + 0.5 * dt)
        kr3, kx3 = f(rho + 0.5 * dt * kr2, X + 0.5 * dt * kx2, t + 0.5 * dt)
        kr4, kx4 = f(rho + dt * kr3, X + dt * kx3, t + dt)
        rho = rho + (dt / 6.0) * (kr1 + 2 * kr2 + 2 * kr3 + kr4)
        X = X + (dt / 6.0) * (kx1 + 2 * kx2 + 2 * kx3 + kx4)
        t = state0.t + (i + 1) * dt
        if np.max(np.abs(rho)) > BLOWUP_LIMIT or np.max(np.abs(X)) > BLOWUP_LIMIT:
            raise RuntimeError(f"manifold integration blew up at t={t}")
        rho = np.where((rho < 0) & (rho > -1e-10 * max(np.max(rho), 1e-300)),
                       0.0, rho)
        if (i + 1) % store_every == 0 or i == n_steps - 1:
            times.append(t)
            rho_hist.append(rho.copy())
            X_hist.append(X.copy())
    return np.array(times), np.array(rho_hist), np.array(X_hist)


def initial_correspondence(state: ManifoldState):
    """Zero moment m = int rho ds and first moment xbar = m^{-1} int X rho ds."""
    w = state.weights()
    m = float(np.sum(w * state.rho))
    if m <= 0:
        raise ValueError(f"total mass must be positive, got {m}")
    xbar = (w * state.rho) @ state.X / m
    return m, xbar


def trajectory_to_csv(path, times, s, rho_hist, X_hist) -> None:
    """Rows (t, s, x1, ..., xn, rho) for every stored time and sample."""
    n_t, n_s = rho_hist.shape
    n_dim = X_hist.shape[2]
    t_col = np.repeat(times, n_s)
    s_col = np.tile(s, n_t)
    cols = [t_col, s_col]
    header = ["t", "s"] + [f"x{d + 1}" for d in range(n_dim)] + ["rho"]
    for d in range(n_dim):
        cols.append(X_hist[:, :, d].reshape(-1))
    cols.append(rho_hist.reshape(-1))
    write_csv(path, header, cols)
