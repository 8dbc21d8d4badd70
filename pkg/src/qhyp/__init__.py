"""Numerical tools for quaternionic hyperbolic space.

Submodules: :mod:`quaternion`, :mod:`hspace`, :mod:`spgroup`, :mod:`xratio`,
:mod:`jorgensen`, :mod:`collars`, :mod:`spectrum`; :mod:`cli` wraps them.
"""

from .errors import QHypError
from .quaternion import Quaternion
from .spgroup import SpMatrix, classify, loxodromic_data, validate

__version__ = "0.1.0"

__all__ = ["QHypError", "Quaternion", "SpMatrix", "classify", "loxodromic_data", "validate"]
