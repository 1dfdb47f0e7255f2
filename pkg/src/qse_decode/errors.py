"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Operands act on different numbers of qubits."""


class LabelError(ValueError):
    """A Pauli label string could not be parsed."""


class ResourceLimit(ValueError):
    """A dense realization would exceed the configured qubit maximum."""


class CodeValidationError(ValueError):
    """A code definition violates the stabilizer-code invariants."""


class SyndromeCollision(ValueError):
    """Two correctable errors map to the same syndrome."""


class PreparationError(RuntimeError):
    """Logical state preparation failed (seed state has no code-space support)."""


class NoCodeSupport(RuntimeError):
    """The projected state weight c fell below the cutoff; the ratio is undefined."""


class ContractViolation(ValueError):
    """An operation was called outside its stated contract."""


class EmptySubspace(RuntimeError):
    """Every overlap-matrix eigenvector was discarded; no subspace remains."""
