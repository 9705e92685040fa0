"""Spectral toolkit for the generalized Rabi model.

Locates the exceptional (quasi-exactly-solvable) part of the spectrum through
Gaudin/Richardson-type Bethe ansatz equations, evaluates weak- and
strong-coupling analytic approximations for the regular part, and verifies
everything against brute-force diagonalization in a truncated Fock basis.
"""

__version__ = "0.1.0"

from . import bethe, cli, fock, special, strongpert, weakpert
from .core import ModelParams, ReducedParams, ShiftedEnergy, invert, mirror, reduce

__all__ = [
    "ModelParams",
    "ReducedParams",
    "ShiftedEnergy",
    "invert",
    "mirror",
    "reduce",
    "bethe",
    "cli",
    "fock",
    "special",
    "strongpert",
    "weakpert",
    "__version__",
]
