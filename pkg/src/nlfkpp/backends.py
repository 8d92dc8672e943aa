"""Backend selection for the hot kernels.

Prefers the compiled Cython extension; falls back to the numpy twin.
``NLFKPP_BACKEND=python`` forces the fallback (useful for benchmarking and
for debugging the extension).
"""

import os

from . import _kernels_py

if os.environ.get("NLFKPP_BACKEND", "").lower() == "python":
    _impl = _kernels_py
    HAVE_COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        HAVE_COMPILED = True
    except ImportError:
        _impl = _kernels_py
        HAVE_COMPILED = False

circulant_apply = _impl.circulant_apply
quadratic_coupling = _impl.quadratic_coupling

__all__ = ["circulant_apply", "quadratic_coupling", "HAVE_COMPILED"]
