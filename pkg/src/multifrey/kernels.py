"""Kernel selection.

The compiled extension is used when it was built and importable; otherwise
the pure-Python reference implementations are used.  Setting the environment
variable ``MULTIFREY_PURE=1`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"

if os.environ.get("MULTIFREY_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback

charsum_log = _impl.charsum_log
charsum_prime = _impl.charsum_prime
resultant_modp = _impl.resultant_modp
charpoly_modp = _impl.charpoly_modp

ZERO_LOG = _fallback.ZERO_LOG

__all__ = [
    "BACKEND",
    "ZERO_LOG",
    "charsum_log",
    "charsum_prime",
    "resultant_modp",
    "charpoly_modp",
]
