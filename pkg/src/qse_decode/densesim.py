"""Dense density-matrix simulation for desk-scale systems.

All channels are realized as explicit Kraus sums over dense 2^n matrices,
which is exact and fast for the n <= 5 regime this package targets.  Every
operation is a pure function; returned arrays are marked read-only so states
can be shared between workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import StabilizerCode, hierarchy_group
from .errors import DimensionMismatch, PreparationError
from .pauli import PauliString, PauliSum, to_dense

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = -1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class StateVector:
    """A normalized pure state on n qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2 ** self.n_qubits:
            raise DimensionMismatch("amplitude vector length is not 2^n")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state vector norm {norm} deviates from 1")
        object.__setattr__(self, "amplitudes", _freeze(amps.copy()))

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """A Hermitian, trace-one, PSD operator on n qubits (within tolerances)."""

    n_qubits: int
    data: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.data, dtype=complex)
        dim = 2 ** self.n_qubits
        if mat.shape != (dim, dim):
            raise DimensionMismatch(f"expected a {dim}x{dim} matrix, got {mat.shape}")
        object.__setattr__(self, "data", _freeze(mat.copy()))

    def validate(self) -> "DensityMatrix":
        mat = self.data
        if np.abs(mat - mat.conj().T).max() > HERMITICITY_TOL:
            raise ValueError("density matrix is not Hermitian within tolerance")
        if abs(np.trace(mat).real - 1.0) > TRACE_TOL or abs(np.trace(mat).imag) > TRACE_TOL:
            raise ValueError("density matrix trace deviates from 1")
        if np.linalg.eigvalsh(mat).min() < PSD_TOL:
            raise ValueError("density matrix has a negative eigenvalue beyond tolerance")
        return self


def _as_matrix(rho) -> np.ndarray:
    return rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho)


def prepare_logical_state(code: StabilizerCode, theta: float = 0.0, phi: float = 0.0) -> StateVector:
    """cos(theta/2)|0_L> + e^{i phi} sin(theta/2)|1_L> for a k=1 code.

    |0_L> is the normalized projection of |0...0> by the full code projector
    and |1_L> = X_L |0_L>, which fixes the usual Bloch-sphere conventions for
    the logical X/Y/Z expectations.
    """
    if code.k != 1:
        raise ValueError("logical Bloch-angle preparation needs a k=1 code")
    dim = 2 ** code.n
    seed = np.zeros(dim, dtype=complex)
    seed[0] = 1.0
    proj = code_projector_matrix(code, code.m)
    zero_l = proj @ seed
    norm = np.linalg.norm(zero_l)
    if norm < 1e-12:
        raise PreparationError("|0...0> has no support in the code space")
    zero_l /= norm
    one_l = to_dense(code.logical_x[0]) @ zero_l
    amps = np.cos(theta / 2.0) * zero_l + np.exp(1j * phi) * np.sin(theta / 2.0) * one_l
    return StateVector(code.n, amps)


def code_projector_matrix(code: StabilizerCode, l: int) -> np.ndarray:
    """Dense (1/2^l) sum of the level-l hierarchy elements."""
    group = hierarchy_group(code, l)
    dim = 2 ** code.n
    out = np.zeros((dim, dim), dtype=complex)
    for g in group:
        out += to_dense(g)
    return out / (2 ** l)


def apply_unitary(rho: DensityMatrix, u: np.ndarray) -> DensityMatrix:
    mat = _as_matrix(rho)
    if u.shape != mat.shape:
        raise DimensionMismatch("unitary and state dimensions differ")
    return DensityMatrix(rho.n_qubits, u @ mat @ u.conj().T)


def apply_pauli(rho: DensityMatrix, p: PauliString) -> DensityMatrix:
    """P rho P^dagger; the stored phase cancels so only (x, z) matter."""
    if p.n_qubits != rho.n_qubits:
        raise DimensionMismatch("Pauli and state qubit counts differ")
    u = to_dense(p.bare())
    return DensityMatrix(rho.n_qubits, u @ rho.data @ u.conj().T)


def depolarize_each(rho: DensityMatrix, p: float, qubits=None) -> DensityMatrix:
    """Single-qubit depolarizing channel applied to each listed qubit in order.

    E_p(rho) = (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z); the totally
    mixed state is reached at p = 3/4.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability {p} outside [0, 1]")
    if qubits is None:
        qubits = range(rho.n_qubits)
    mat = rho.data
    n = rho.n_qubits
    for q in qubits:
        acc = (1.0 - p) * mat
        for kind in "XYZ":
            u = to_dense(PauliString.single(n, q, kind))
            acc = acc + (p / 3.0) * (u @ mat @ u)
        mat = acc
    return DensityMatrix(n, mat)


def global_depolarize(rho: DensityMatrix, w: float) -> DensityMatrix:
    """(1-w) rho + w I / 2^n."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"mixing probability {w} outside [0, 1]")
    dim = 2 ** rho.n_qubits
    return DensityMatrix(rho.n_qubits, (1.0 - w) * rho.data + (w / dim) * np.eye(dim))


def expectation(rho: DensityMatrix, obs) -> complex:
    """Tr[rho obs] for a PauliString, PauliSum, or dense matrix."""
    if isinstance(obs, (PauliString, PauliSum)):
        if obs.n_qubits != rho.n_qubits:
            raise DimensionMismatch("observable and state qubit counts differ")
        obs = to_dense(obs)
    elif obs.shape != rho.data.shape:
        raise DimensionMismatch("observable and state dimensions differ")
    return complex(np.trace(rho.data @ obs))


def fidelity(rho: DensityMatrix, psi: StateVector) -> float:
    """<psi| rho |psi> for a pure reference state."""
    if psi.n_qubits != rho.n_qubits:
        raise DimensionMismatch("state and reference qubit counts differ")
    val = psi.amplitudes.conj() @ rho.data @ psi.amplitudes
    return float(val.real)


def depolarizing_kraus(p: float) -> list:
    """Single-qubit Kraus operators of E_p, mainly for completeness checks."""
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    z = np.diag([1.0 + 0j, -1.0])
    return [
        np.sqrt(1.0 - p) * np.eye(2, dtype=complex),
        np.sqrt(p / 3.0) * x,
        np.sqrt(p / 3.0) * y,
        np.sqrt(p / 3.0) * z,
    ]
