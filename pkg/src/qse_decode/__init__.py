"""Post-processing error decoding with stabilizer projectors and subspace expansions."""

from .pauli import PauliString, PauliSum, commutes, multiply, to_dense, weight

__all__ = [
    "PauliString",
    "PauliSum",
    "commutes",
    "multiply",
    "to_dense",
    "weight",
]
