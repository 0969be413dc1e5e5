"""Quantum light read by quantum and by classical-like detectors.

Submodules:

* ``fock``: truncated Fock-space states, beam splitter, exact moments.
* ``quasiprob``: Husimi Q, Wigner function, classical ensembles.
* ``detectors``: continuous-number and quadrature detector statistics.
* ``inversion``: inversion kernels, inferred joint distributions.
* ``experiments``: scenario runner and command-line interface.
"""

from . import detectors, fock, inversion, quasiprob
from .errors import (
    DeconvolutionError,
    DomainError,
    GridCoverageError,
    SemiquantumError,
    ToleranceError,
    TruncationError,
)

__version__ = "0.1.0"

__all__ = [
    "DeconvolutionError",
    "DomainError",
    "GridCoverageError",
    "SemiquantumError",
    "ToleranceError",
    "TruncationError",
    "detectors",
    "fock",
    "inversion",
    "quasiprob",
]
