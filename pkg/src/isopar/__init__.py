"""Numerical verification of isoparametric polynomial geometry on spheres.

Submodules: symmat (symmetric-function kernel), clifford (Clifford systems
and complex structures), polyfam (the two polynomial families), spherelevel
(frames, spectra and level projection on the unit sphere), hopf (circle
action invariants), riccati (normal-geodesic evolution), cli (verification
commands).
"""

from . import clifford, hopf, monomials, polyfam, riccati, spherelevel, symmat

__all__ = [
    "clifford",
    "hopf",
    "monomials",
    "polyfam",
    "riccati",
    "spherelevel",
    "symmat",
]

__version__ = "0.1.0"
