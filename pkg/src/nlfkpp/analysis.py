"""Profile diagnostics shared by the solvers: peak counting on periodic
grids, homogeneity, norms, steady-state detection and empirical order."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NEVER_STEADY = -1.0


def count_peaks(profile, prominence: float = 0.05) -> int:
    """Strict local maxima on the periodic grid with relative prominence.

    A maximum counts only if it exceeds both flanking minima (found by
    walking downhill with periodic wrap) by at least prominence * mean.
    Plateau maxima of equal neighbours are collapsed to a single peak.
    """
    rho = np.asarray(profile, dtype=float)
    n = len(rho)
    if n < 8:
        raise ValueError(f"profile too short for peak counting: {n} < 8")
    mean = float(np.mean(rho))
    if mean <= 0:
        return 0
    threshold = prominence * mean
    left = np.roll(rho, 1)
    right = np.roll(rho, -1)
    # collapse plateaus: a candidate is the left edge of a flat top
    cand = np.flatnonzero((rho > left) & (rho >= right))
    count = 0
    for k in cand:
        # skip interior/right edges of plateaus
        if rho[(k + 1) % n] == rho[k]:
            m = (k + 1) % n
            while rho[m] == rho[k]:
                m = (m + 1) % n
            if rho[m] > rho[k]:
                continue
        lo_l = rho[k]
        i = k
        while True:
            i = (i - 1) % n
            if rho[i] > lo_l:
                break
            lo_l = min(lo_l, rho[i])
            if i == k:
                break
        lo_r = rho[k]
        i = k
        while True:
            i = (i + 1) % n
            if rho[i] > lo_r:
                break
            lo_r = min(lo_r, rho[i])
            if i == k:
                break
        if rho[k] - max(lo_l, lo_r) >= threshold:
            count += 1
    return count


def homogeneity(profile) -> float:
    """(max - min) / mean; zero for a flat profile."""
    rho = np.asarray(profile, dtype=float)
    mean = float(np.mean(rho))
    if mean == 0.0:
        raise ValueError("homogeneity undefined for zero-mean profile")
    return float((np.max(rho) - np.min(rho)) / mean)


def linf(a, b=None) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.max(np.abs(a if b is None else a - np.asarray(b))))


def l2(a, b=None, ds: float = 1.0) -> float:
    a = np.asarray(a, dtype=float)
    d = a if b is None else a - np.asarray(b)
    return float(math.sqrt(ds * np.sum(d * d)))


def relative_linf(a, b) -> float:
    """max|a - b| / max|b|."""
    b = np.asarray(b, dtype=float)
    scale = float(np.max(np.abs(b)))
    if scale == 0.0:
        raise ValueError("reference profile is identically zero")
    return linf(a, b) / scale


def steady_state_time(times, profiles, tol: float) -> float:
    """First stored time with max_k |drho/dt| < tol (backward difference).

    A constant input is steady from the start and returns times[0].
    Returns the NEVER_STEADY sentinel (-1.0) when the tolerance is never met.
    """
    t = np.asarray(times, dtype=float)
    rho = np.asarray(profiles, dtype=float)
    if rho.shape[0] != len(t):
        raise ValueError("times and profiles disagree in length")
    if len(t) < 2:
        raise ValueError("need at least two stored times")
    if np.max(np.abs(rho[1] - rho[0])) / (t[1] - t[0]) < tol:
        # flat from the first interval; report the initial time
        if np.max(np.abs(rho - rho[0])) == 0.0:
            return float(t[0])
    for i in range(1, len(t)):
        rate = np.max(np.abs(rho[i] - rho[i - 1])) / (t[i] - t[i - 1])
        if rate < tol:
            return float(t[i])
    return NEVER_STEADY


def richardson_order(e_coarse: float, e_fine: float, ratio: float) -> float:
    """Empirical order log(e_coarse/e_fine) / log(ratio)."""
    if e_coarse <= 0 or e_fine <= 0:
        raise ValueError("errors must be positive for an order estimate")
    if ratio <= 1:
        raise ValueError(f"refinement ratio must exceed 1, got {ratio}")
    return math.log(e_coarse / e_fine) / math.log(ratio)


@dataclass(frozen=True)
class ProfileDiagnostics:
    n_peaks: int
    homogeneity: float
    mass: float
    linf: float
    l2: float


def diagnose(profile, ds: float, prominence: float = 0.05) -> ProfileDiagnostics:
    rho = np.asarray(profile, dtype=float)
    return ProfileDiagnostics(
        n_peaks=count_peaks(rho, prominence),
        homogeneity=homogeneity(rho),
        mass=float(ds * np.sum(rho)),
        linf=linf(rho),
        l2=l2(rho, ds=ds),
    )
