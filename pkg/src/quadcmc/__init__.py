"""Numerical and exact checks for constant mean curvature hypersurfaces of
the sphere whose support functions satisfy ell_v = lambda f_v.

Modules: ``geometry`` (charts, normals, shape operators), ``families``
(umbilical slices, Clifford products, the non-CMC product example),
``support`` (support-function calculus), ``geodesics`` (integral curves of
v^T and their closed forms), ``exact`` (rational polynomial lemma),
``spectral`` (Clifford spectra and index bounds) and ``cli``.
"""

from .errors import BadSpec, QuadCmcError
from .families import CliffordSpec, UmbilicalSpec, make_clifford, make_family, make_umbilical
from .geometry import ChartPoint, Hypersurface

__version__ = "0.1.0"

__all__ = [
    "BadSpec",
    "ChartPoint",
    "CliffordSpec",
    "Hypersurface",
    "QuadCmcError",
    "UmbilicalSpec",
    "make_clifford",
    "make_family",
    "make_umbilical",
]
