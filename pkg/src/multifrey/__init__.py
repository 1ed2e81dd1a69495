"""Multi-Frey elimination for x^7 + y^7 = d z^p over Q(zeta_7)^+."""

from __future__ import annotations

from importlib.metadata import PackageNotFoundError, version

from .kernels import BACKEND

try:
    __version__ = version("multifrey")
except PackageNotFoundError:  # running from a source checkout
    __version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
