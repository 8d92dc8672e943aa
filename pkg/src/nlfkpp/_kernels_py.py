"""Pure-numpy twin of the compiled hot kernels in ``_kernels.pyx``.

Selected at import time by :mod:`nlfkpp.backends` when the extension is
unavailable or when ``NLFKPP_BACKEND=python`` is set.
"""

import numpy as np


def circulant_apply(row, rho, ds):
    """out[k] = ds * sum_l row[(k - l) mod N] * rho[l]."""
    row = np.asarray(row, dtype=float)
    rho = np.asarray(rho, dtype=float)
    n = row.shape[0]
    k = np.arange(n)
    mat = row[(k[:, None] - k[None, :]) % n]
    return ds * (mat @ rho)


def quadratic_coupling(beta, lam):
    """out[j] = sum_l lam[l] * beta[j-l] * beta[l], band-truncated."""
    beta = np.asarray(beta, dtype=complex)
    lam = np.asarray(lam, dtype=float)
    m = beta.shape[0]
    big_j = (m - 1) // 2
    # full linear convolution of beta with lam*beta, then keep the band
    full = np.convolve(beta, lam * beta)
    return full[big_j : big_j + m]
