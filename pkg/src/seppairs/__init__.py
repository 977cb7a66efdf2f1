"""Separated pairs of subspaces and of submodules over finite C*-algebras."""

__version__ = "0.1.0"

from .errors import InternalInconsistency, PreconditionFailed, SepPairsError
from .hilbert_core import DEFAULT_TOL, Subspace, Tolerance

__all__ = [
    "__version__",
    "DEFAULT_TOL",
    "InternalInconsistency",
    "PreconditionFailed",
    "SepPairsError",
    "Subspace",
    "Tolerance",
]
