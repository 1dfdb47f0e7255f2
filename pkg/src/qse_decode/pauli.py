"""Exact n-qubit Pauli arithmetic.

A Pauli operator is stored as a pair of bit masks (x, z) plus a phase from
{+1, +i, -1, -i}.  Bit q of each mask refers to qubit q, and qubit 0 is the
leftmost character of a string label as well as the most significant tensor
factor of the dense realization, so the label "XZZXI" reads left-to-right
like the printed operator.

The phase is defined relative to the Hermitian single-qubit basis {I, X, Y, Z}:
a PauliString equals phase * (sigma_0 tensor ... tensor sigma_{n-1}).  A qubit
with both bits set is a Y; internally products are tracked in the X^x Z^z
convention (Y = i XZ) with a Z4 exponent, which keeps multiplication exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractViolation, DimensionMismatch, LabelError, ResourceLimit

MAX_DENSE_QUBITS = 12

_PHASES = (1, 1j, -1, -1j)
_PHASE_LABELS = {"+": 0, "": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}
_PHASE_PREFIX = {0: "", 1: "+i", 2: "-", 3: "-i"}

_SINGLE = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (1, 1): np.array([[0, -1j], [1j, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
}
_CHARS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli with exact phase tracking.

    Attributes:
        n_qubits: number of qubits.
        x: bit mask of X components (bit q = qubit q).
        z: bit mask of Z components.
        phase_k: exponent k in {0,1,2,3}; the operator is i^k times the
            Hermitian tensor product selected by (x, z).
    """

    n_qubits: int
    x: int
    z: int
    phase_k: int = 0

    def __post_init__(self):
        if self.n_qubits <= 0:
            raise LabelError("a PauliString needs at least one qubit")
        mask = (1 << self.n_qubits) - 1
        if self.x & ~mask or self.z & ~mask:
            raise LabelError("bit mask exceeds n_qubits")
        if self.phase_k not in (0, 1, 2, 3):
            raise LabelError("phase exponent must be in {0,1,2,3}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse a label like "XZZXI", "-YY" or "+iXZ"."""
        text = label.strip()
        k = 0
        for prefix in ("+i", "-i", "i", "+", "-"):
            if text.startswith(prefix):
                k = _PHASE_LABELS[prefix]
                text = text[len(prefix):]
                break
        if not text:
            raise LabelError(f"empty Pauli label: {label!r}")
        x = z = 0
        for q, ch in enumerate(text):
            if ch not in _BITS:
                raise LabelError(f"invalid character {ch!r} in label {label!r}")
            xb, zb = _BITS[ch]
            x |= xb << q
            z |= zb << q
        return cls(len(text), x, z, k)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0, 0)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, kind: str) -> "PauliString":
        """The Pauli `kind` ("X", "Y" or "Z") acting on one qubit."""
        if not 0 <= qubit < n_qubits:
            raise DimensionMismatch(f"qubit {qubit} outside range 0..{n_qubits - 1}")
        xb, zb = _BITS[kind]
        return cls(n_qubits, xb << qubit, zb << qubit, 0)

    # -- views -------------------------------------------------------------

    @property
    def x_bits(self) -> tuple:
        return tuple((self.x >> q) & 1 for q in range(self.n_qubits))

    @property
    def z_bits(self) -> tuple:
        return tuple((self.z >> q) & 1 for q in range(self.n_qubits))

    @property
    def phase(self) -> complex:
        return _PHASES[self.phase_k]

    @property
    def is_hermitian(self) -> bool:
        return self.phase_k in (0, 2)

    def label(self) -> str:
        chars = "".join(
            _CHARS[(self.x >> q) & 1, (self.z >> q) & 1] for q in range(self.n_qubits)
        )
        return _PHASE_PREFIX[self.phase_k] + chars

    def __str__(self) -> str:
        return self.label()

    def with_phase(self, k: int) -> "PauliString":
        return PauliString(self.n_qubits, self.x, self.z, k % 4)

    def bare(self) -> "PauliString":
        """The same operator with phase +1."""
        return self if self.phase_k == 0 else self.with_phase(0)

    def key(self) -> tuple:
        """Phase-free identity of the operator, used for merging sums."""
        return (self.x, self.z)

    # -- algebra -----------------------------------------------------------

    def _xz_exponent(self) -> int:
        # exponent of i when the operator is written as i^k X^x Z^z
        n_y = (self.x & self.z).bit_count()
        return (self.phase_k + n_y) % 4

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def adjoint(self) -> "PauliString":
        k = self.phase_k if self.phase_k in (0, 2) else (4 - self.phase_k) % 4
        return self.with_phase(k)


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact operator product a.b, accumulated phase included."""
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatch(
            f"cannot multiply Paulis on {a.n_qubits} and {b.n_qubits} qubits"
        )
    # In the X^x Z^z convention, moving Z^za past X^xb costs (-1)^(za.xb).
    k = a._xz_exponent() + b._xz_exponent() + 2 * (a.z & b.x).bit_count()
    x = a.x ^ b.x
    z = a.z ^ b.z
    n_y = (x & z).bit_count()
    return PauliString(a.n_qubits, x, z, (k - n_y) % 4)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the symplectic form sum_q (a.x*b.z + a.z*b.x) vanishes mod 2."""
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatch(
            f"cannot compare Paulis on {a.n_qubits} and {b.n_qubits} qubits"
        )
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) % 2 == 0


def weight(a: PauliString) -> int:
    """Number of qubits on which the operator acts non-trivially."""
    return (a.x | a.z).bit_count()


@lru_cache(maxsize=None)
def _dense_string(ps: PauliString, max_qubits: int) -> np.ndarray:
    if ps.n_qubits > max_qubits:
        raise ResourceLimit(
            f"dense realization of {ps.n_qubits} qubits exceeds the limit of {max_qubits}"
        )
    out = np.array([[1.0 + 0j]])
    for q in range(ps.n_qubits):
        out = np.kron(out, _SINGLE[(ps.x >> q) & 1, (ps.z >> q) & 1])
    out = ps.phase * out
    out.flags.writeable = False
    return out


def to_dense(op, max_qubits: int = MAX_DENSE_QUBITS) -> np.ndarray:
    """Dense 2^n x 2^n matrix of a PauliString or PauliSum."""
    if isinstance(op, PauliString):
        return _dense_string(op, max_qubits)
    if isinstance(op, PauliSum):
        dim = 2 ** op.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for coeff, ps in op.terms:
            out += coeff * _dense_string(ps, max_qubits)
        return out
    raise TypeError(f"cannot densify {type(op).__name__}")


class PauliSum:
    """A complex-weighted sum of PauliStrings on a common qubit count.

    Construction canonicalizes: operator phases are folded into coefficients,
    duplicate operators merged, exact-zero coefficients dropped, and terms
    sorted by (x_bits, z_bits) so equal sums print identically.
    """

    __slots__ = ("n_qubits", "terms")

    def __init__(self, terms, n_qubits: int | None = None):
        terms = list(terms)
        if not terms and n_qubits is None:
            raise ValueError("an empty PauliSum needs an explicit n_qubits")
        if n_qubits is None:
            n_qubits = terms[0][1].n_qubits
        merged: dict = {}
        order: dict = {}
        for coeff, ps in terms:
            if ps.n_qubits != n_qubits:
                raise DimensionMismatch("mixed qubit counts in PauliSum")
            c = complex(coeff) * ps.phase
            merged[ps.key()] = merged.get(ps.key(), 0j) + c
            order[ps.key()] = ps.bare()
        kept = [
            (c, order[k])
            for k, c in merged.items()
            if c != 0
        ]
        kept.sort(key=lambda item: (item[1].x_bits, item[1].z_bits))
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "terms", tuple(kept))

    def __setattr__(self, name, value):
        raise AttributeError("PauliSum is immutable")

    @classmethod
    def from_label(cls, label: str, coeff: complex = 1.0) -> "PauliSum":
        return cls([(coeff, PauliString.from_label(label))])

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls([(coeff, PauliString.identity(n_qubits))])

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls([], n_qubits=n_qubits)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if self.n_qubits != other.n_qubits:
            raise DimensionMismatch("cannot add sums on different qubit counts")
        return PauliSum(list(self.terms) + list(other.terms), n_qubits=self.n_qubits)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + other.scale(-1.0)

    def scale(self, factor: complex) -> "PauliSum":
        return PauliSum(
            [(factor * c, ps) for c, ps in self.terms], n_qubits=self.n_qubits
        )

    def __matmul__(self, other) -> "PauliSum":
        if isinstance(other, PauliString):
            other = PauliSum([(1.0, other)])
        out = []
        for ca, pa in self.terms:
            for cb, pb in other.terms:
                out.append((ca * cb, multiply(pa, pb)))
        return PauliSum(out, n_qubits=self.n_qubits)

    def adjoint(self) -> "PauliSum":
        return PauliSum(
            [(np.conj(c), ps) for c, ps in self.terms], n_qubits=self.n_qubits
        )

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c, _ in self.terms)

    def coefficient(self, ps: PauliString) -> complex:
        target = ps.key()
        for c, op in self.terms:
            if op.key() == target:
                return c * ps.phase.conjugate() if ps.phase_k else c
        return 0j

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliSum)
            and self.n_qubits == other.n_qubits
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        if not self.terms:
            return f"PauliSum(0, n_qubits={self.n_qubits})"
        parts = [f"({c:+.6g})*{ps.label()}" for c, ps in self.terms]
        return " + ".join(parts)


def hermitian_or_raise(obs: PauliSum, what: str = "observable") -> PauliSum:
    if not obs.is_hermitian():
        raise ContractViolation(f"{what} must be Hermitian")
    return obs
