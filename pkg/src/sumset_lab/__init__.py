"""Finite experiments on sumsets, perturbed prime-like sequences and decompositions."""
from .errors import DomainError, InvariantError
from .intset import FiniteIntegerSet, SymmetricSet, difference_set, sumset
from .seeding import SEED_MIX_ID, SeedStream
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["DomainError", "InvariantError", "FiniteIntegerSet", "SymmetricSet",
           "difference_set", "sumset", "SEED_MIX_ID", "SeedStream", "BACKEND",
           "__version__"]
