"""Quantum subspace expansion: relaxed projectors via a generalized eigenproblem.

Given expansion operators M_i, a target Hamiltonian and a state rho, build
H_ij = Tr[M_i^dag H M_j rho] and S_ij = Tr[M_i^dag M_j rho], solve HC = SCE by
canonical diagonalization (diagonalize S, discard near-null directions,
diagonalize H in the whitened basis), and read off the optimal coefficient
vector.  The corrected state is P_c rho P_c^dag normalized, with
P_c = sum_i c_i M_i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import StabilizerCode, hierarchy_group
from .densesim import DensityMatrix, StateVector, fidelity
from .errors import ContractViolation, DimensionMismatch, EmptySubspace
from .pauli import PauliString, PauliSum, commutes, multiply, to_dense
from .projection import code_hamiltonian

EPSILON_RELATIVE = 1e-10


@dataclass(frozen=True)
class QseProblem:
    """Expansion operators, target operator, and the state they act on."""

    expansion_ops: tuple
    target: PauliSum
    state: DensityMatrix

    def __post_init__(self):
        n = self.state.n_qubits
        if self.target.n_qubits != n:
            raise DimensionMismatch("target and state qubit counts differ")
        for op in self.expansion_ops:
            if op.n_qubits != n:
                raise DimensionMismatch("expansion operator qubit count differs")
        if not self.target.is_hermitian():
            raise ContractViolation("QSE target must be Hermitian")


@dataclass(frozen=True)
class QseSolution:
    """Subspace matrices, retained eigenpairs, and the chosen ground solution."""

    h_matrix: np.ndarray
    s_matrix: np.ndarray
    retained_rank: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns are coefficient vectors in the M_i basis
    coefficients: np.ndarray  # ground column
    ground_energy: float

    @property
    def c_norm(self) -> float:
        """c^dag S c of the ground solution; 1 by construction."""
        c = self.coefficients
        return float(np.real(c.conj() @ self.s_matrix @ c))


def _target_commutes_with_ops(target: PauliSum, ops) -> bool:
    return all(
        commutes(term, op) for _, term in target.terms for op in ops
    )


def build_qse_matrices(problem: QseProblem) -> tuple:
    """(H, S) with H_ij = Tr[M_i^dag H_t M_j rho] and S_ij = Tr[M_i^dag M_j rho].

    When every expansion operator commutes with the target, the two-sided
    trace reduces to the single product M_k = M_i^dag M_j, so each matrix
    element is an expectation of one Pauli times the target; distinct products
    are evaluated once and reused.  Otherwise the full two-sided form is used.
    """
    ops = problem.expansion_ops
    rho = problem.state.data
    n_ops = len(ops)
    target_dense = to_dense(problem.target) if len(problem.target) else None
    h = np.zeros((n_ops, n_ops), dtype=complex)
    s = np.zeros((n_ops, n_ops), dtype=complex)
    if _target_commutes_with_ops(problem.target, ops):
        cache: dict = {}
        for i in range(n_ops):
            for j in range(n_ops):
                prod = multiply(ops[i].adjoint(), ops[j])
                key = (prod.x, prod.z, prod.phase_k)
                if key not in cache:
                    dense = to_dense(prod)
                    s_val = np.trace(dense @ rho)
                    h_val = (
                        np.trace(target_dense @ dense @ rho)
                        if target_dense is not None
                        else 0j
                    )
                    cache[key] = (h_val, s_val)
                h[i, j], s[i, j] = cache[key]
    else:
        dense_ops = [to_dense(op) for op in ops]
        for i in range(n_ops):
            for j in range(n_ops):
                left = dense_ops[i].conj().T
                s[i, j] = np.trace(left @ dense_ops[j] @ rho)
                if target_dense is not None:
                    h[i, j] = np.trace(left @ target_dense @ dense_ops[j] @ rho)
    return h, s


def canonical_solve(h: np.ndarray, s: np.ndarray, epsilon: float = EPSILON_RELATIVE) -> QseSolution:
    """Solve HC = SCE by whitening S and discarding near-null directions.

    Eigenvectors of S with eigenvalue below epsilon * max(eigenvalue) are
    dropped; the returned coefficient vectors satisfy c^dag S c = 1.  The
    ground column is the smallest eigenvalue; under degeneracy the tie breaks
    toward the largest overlap with the uniform coefficient direction, which
    keeps the pure-projector limit continuous.
    """
    h = np.asarray(h, dtype=complex)
    s = np.asarray(s, dtype=complex)
    if h.shape != s.shape or h.shape[0] != h.shape[1]:
        raise DimensionMismatch("H and S must be square and equal-sized")
    evals, evecs = np.linalg.eigh(s)
    cut = epsilon * max(evals.max(), 0.0)
    keep = evals > cut
    if not keep.any():
        raise EmptySubspace("all overlap eigenvalues fell below the cutoff")
    basis = evecs[:, keep] / np.sqrt(evals[keep])
    h_reduced = basis.conj().T @ h @ basis
    h_reduced = (h_reduced + h_reduced.conj().T) / 2.0
    energies, vectors = np.linalg.eigh(h_reduced)
    coeff_columns = basis @ vectors
    ground = _pick_ground(energies, coeff_columns)
    return QseSolution(
        h_matrix=h,
        s_matrix=s,
        retained_rank=int(keep.sum()),
        eigenvalues=energies,
        eigenvectors=coeff_columns,
        coefficients=coeff_columns[:, ground],
        ground_energy=float(energies[ground]),
    )


def _pick_ground(energies: np.ndarray, columns: np.ndarray, tol: float = 1e-9) -> int:
    lowest = energies[0]
    tied = [i for i, e in enumerate(energies) if e <= lowest + tol * max(1.0, abs(lowest))]
    if len(tied) == 1:
        return tied[0]
    uniform = np.ones(columns.shape[0]) / np.sqrt(columns.shape[0])
    overlaps = [abs(uniform @ columns[:, i]) for i in tied]
    return tied[int(np.argmax(overlaps))]


def relaxed_projector(ops, coefficients) -> np.ndarray:
    out = coefficients[0] * to_dense(ops[0])
    for c, op in zip(coefficients[1:], ops[1:]):
        out = out + c * to_dense(op)
    return out


def qse_correct(problem: QseProblem, epsilon: float = EPSILON_RELATIVE) -> tuple:
    """Solve the subspace problem and materialize the corrected state.

    Returns (solution, corrected_state) where the state is
    P_c rho P_c^dag / Tr[P_c rho P_c^dag] for the ground coefficients.
    """
    h, s = build_qse_matrices(problem)
    solution = canonical_solve(h, s, epsilon)
    p_c = relaxed_projector(problem.expansion_ops, solution.coefficients)
    mat = p_c @ problem.state.data @ p_c.conj().T
    norm = float(np.trace(mat).real)
    state = DensityMatrix(problem.state.n_qubits, mat / norm)
    return solution, state


def encode_logical(op: PauliSum, code: StabilizerCode) -> PauliSum:
    """Rewrite a k-qubit operator over the code's logical Paulis.

    Per logical qubit i: X -> X_i, Z -> Z_i, Y -> i X_i Z_i, extended
    multiplicatively over qubits and linearly over terms.
    """
    if op.n_qubits != code.k:
        raise DimensionMismatch(
            f"operator acts on {op.n_qubits} qubits, code has k = {code.k}"
        )
    out = []
    for coeff, term in op.terms:
        encoded = PauliString.identity(code.n)
        phase = complex(coeff)
        for i in range(code.k):
            xb = (term.x >> i) & 1
            zb = (term.z >> i) & 1
            if xb and zb:  # Y = i X Z
                encoded = multiply(encoded, multiply(code.logical_x[i], code.logical_z[i]))
                phase *= 1j
            elif xb:
                encoded = multiply(encoded, code.logical_x[i])
            elif zb:
                encoded = multiply(encoded, code.logical_z[i])
        out.append((phase, encoded))
    return PauliSum(out, n_qubits=code.n)


def _logical_basis(code: StabilizerCode) -> list:
    """Identity plus the logical X, Y, Z of each logical qubit."""
    ops = [PauliString.identity(code.n)]
    for i in range(code.k):
        x = code.logical_x[i]
        z = code.logical_z[i]
        y = multiply(x, z).with_phase((multiply(x, z).phase_k + 1) % 4)  # i*X*Z
        ops.extend([x.bare(), y.bare(), z.bare()])
    return ops


@dataclass(frozen=True)
class TwoStageResult:
    energy: float
    corrected_state: DensityMatrix
    spectrum: np.ndarray
    stage1: QseSolution
    stage2: QseSolution


def two_stage_logical_qse(
    rho: DensityMatrix,
    code: StabilizerCode,
    problem_h_logical: PauliSum,
    expansion=None,
    epsilon: float = EPSILON_RELATIVE,
) -> TwoStageResult:
    """Correct physical errors with the code Hamiltonian, then diagonalize the
    encoded problem Hamiltonian over logical operators.

    Stage 1 runs QSE with the code Hamiltonian over the check part of the
    expansion set (operators commuting with every generator and logical).
    Stage 2 rebuilds matrix elements of the encoded problem Hamiltonian over
    the logical-operator part (identity plus any supplied logical Paulis) on
    the stage-1 corrected state and diagonalizes; the ground column gives the
    energy, the full small spectrum exposes excited states.
    """
    if expansion is None:
        expansion = hierarchy_group(code, code.m) + _logical_basis(code)[1:]
    check_ops, logical_ops = [], [PauliString.identity(code.n)]
    for op in expansion:
        if any(not commutes(op, g) for g in code.generators):
            raise ContractViolation(
                f"expansion operator {op.label()} anticommutes with a generator"
            )
        logicals = list(code.logical_x) + list(code.logical_z)
        if all(commutes(op, lop) for lop in logicals):
            check_ops.append(op)
        elif (op.x, op.z) != (0, 0):
            logical_ops.append(op.bare())
    if not check_ops:
        check_ops = [PauliString.identity(code.n)]
    stage1_problem = QseProblem(
        expansion_ops=tuple(check_ops),
        target=code_hamiltonian(code),
        state=rho,
    )
    stage1, rho1 = qse_correct(stage1_problem, epsilon)
    stage2_problem = QseProblem(
        expansion_ops=tuple(logical_ops),
        target=problem_h_logical,
        state=rho1,
    )
    h2, s2 = build_qse_matrices(stage2_problem)
    stage2 = canonical_solve(h2, s2, epsilon)
    p_c = relaxed_projector(stage2_problem.expansion_ops, stage2.coefficients)
    mat = p_c @ rho1.data @ p_c.conj().T
    norm = float(np.trace(mat).real)
    corrected = DensityMatrix(code.n, mat / norm)
    return TwoStageResult(
        energy=stage2.ground_energy,
        corrected_state=corrected,
        spectrum=stage2.eigenvalues,
        stage1=stage1,
        stage2=stage2,
    )


@dataclass(frozen=True)
class SymmetryQseResult:
    energy: float
    corrected_state: DensityMatrix
    fidelity: float | None
    solution: QseSolution


def symmetry_hierarchy(generators, l: int) -> list:
    """Products of subsets of the first l symmetry generators."""
    if not 0 <= l <= len(generators):
        raise ValueError(f"level l={l} outside [0, {len(generators)}]")
    n = generators[0].n_qubits if generators else None
    if n is None:
        raise ValueError("need at least one generator (or use l = 0 with a state)")
    elements = [PauliString.identity(n)]
    for i in range(l):
        gen = generators[i]
        elements = elements + [multiply(e, gen) for e in elements]
    return elements


def symmetry_qse(
    rho: DensityMatrix,
    generators,
    problem_h: PauliSum,
    l: int,
    reference: StateVector | None = None,
    epsilon: float = EPSILON_RELATIVE,
) -> SymmetryQseResult:
    """QSE over products of (approximate) symmetry generators of problem_h.

    Generators need not commute with problem_h; when they do not, the full
    two-sided matrix elements are used automatically.
    """
    generators = [g.bare() for g in generators]
    if generators:
        ops = symmetry_hierarchy(generators, l)
    else:
        ops = [PauliString.identity(rho.n_qubits)]
    problem = QseProblem(expansion_ops=tuple(ops), target=problem_h, state=rho)
    solution, corrected = qse_correct(problem, epsilon)
    fid = fidelity(corrected, reference) if reference is not None else None
    return SymmetryQseResult(
        energy=solution.ground_energy,
        corrected_state=corrected,
        fidelity=fid,
        solution=solution,
    )
