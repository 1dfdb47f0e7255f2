"""Exact projector and recovery corrections for stabilizer codes.

The code-space projector at level l is the uniform sum of the level-l
hierarchy elements; error-subspace projectors carry syndrome signs.  These
dense implementations are the reference decoder and the oracle that the
stochastic sampler is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .codes import StabilizerCode, SyndromeTable, hierarchy_group
from .densesim import DensityMatrix
from .errors import ContractViolation, DimensionMismatch, NoCodeSupport
from .pauli import PauliString, PauliSum, commutes, to_dense

C_CUTOFF = 1e-12


@dataclass(frozen=True)
class CorrectionResult:
    """Corrected expectation, its normalization, and optional corrected state."""

    value: float
    c: float
    numerator: float
    corrected_state: DensityMatrix | None = None


@lru_cache(maxsize=None)
def code_projector(code: StabilizerCode, l: int) -> np.ndarray:
    """Dense level-l projector (1/2^l) * sum of hierarchy elements, read-only."""
    dim = 2 ** code.n
    out = np.zeros((dim, dim), dtype=complex)
    for g in hierarchy_group(code, l):
        out += to_dense(g)
    out /= 2 ** l
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def error_projector(code: StabilizerCode, syn: tuple) -> np.ndarray:
    """Projector onto the syndrome-`syn` subspace: prod_j (I + (-1)^{s_j} S_j)/2."""
    if len(syn) != code.m:
        raise DimensionMismatch(f"syndrome length {len(syn)} != m = {code.m}")
    dim = 2 ** code.n
    out = np.eye(dim, dtype=complex)
    for bit, gen in zip(syn, code.generators):
        sign = -1.0 if bit else 1.0
        out = out @ ((np.eye(dim) + sign * to_dense(gen)) / 2.0)
    out.flags.writeable = False
    return out


def _check_commuting_observable(obs: PauliSum, code: StabilizerCode, l: int) -> None:
    group = hierarchy_group(code, l)
    for _, term in obs.terms:
        for g in group:
            if not commutes(term, g):
                raise ContractViolation(
                    f"observable term {term.label()} anticommutes with group "
                    f"element {g.label()}; pass allow_noncommuting=True for the "
                    "two-sided form"
                )


def corrected_expectation(
    rho: DensityMatrix,
    gamma: PauliSum,
    code: StabilizerCode,
    l: int,
    keep_state: bool = False,
    allow_noncommuting: bool = False,
    c_cutoff: float = C_CUTOFF,
) -> CorrectionResult:
    """Projector-corrected expectation Tr[P rho P Gamma] / Tr[P rho].

    The observable must commute with every group element used (the reduction
    to single group products relies on it); the general two-sided trace is
    available behind allow_noncommuting.
    """
    if gamma.n_qubits != rho.n_qubits:
        raise DimensionMismatch("observable and state qubit counts differ")
    if not gamma.is_hermitian():
        raise ContractViolation("corrected_expectation needs a Hermitian observable")
    if not allow_noncommuting:
        _check_commuting_observable(gamma, code, l)
    proj = code_projector(code, l)
    projected = proj @ rho.data @ proj
    c = float(np.trace(proj @ rho.data).real)
    numerator = float(np.trace(projected @ to_dense(gamma)).real)
    if c < c_cutoff:
        raise NoCodeSupport(f"state has no support in code space (c = {c:.3e})")
    state = None
    if keep_state:
        state = DensityMatrix(rho.n_qubits, projected / c)
    return CorrectionResult(value=numerator / c, c=c, numerator=numerator, corrected_state=state)


def corrected_state(
    rho: DensityMatrix, code: StabilizerCode, l: int, c_cutoff: float = C_CUTOFF
) -> tuple:
    """(P rho P / c, c) without an observable, for fidelity-style figures."""
    proj = code_projector(code, l)
    projected = proj @ rho.data @ proj
    c = float(np.trace(proj @ rho.data).real)
    if c < c_cutoff:
        raise NoCodeSupport(f"state has no support in code space (c = {c:.3e})")
    return DensityMatrix(rho.n_qubits, projected / c), c


def recovery_corrected_expectation(
    rho: DensityMatrix,
    gamma: PauliSum,
    code: StabilizerCode,
    table: SyndromeTable,
    keep_state: bool = False,
    c_cutoff: float = C_CUTOFF,
) -> CorrectionResult:
    """Recovery-augmented correction over the table's error subspaces.

    value = (1/c) sum_i Tr[R_i P_i rho P_i R_i^dag Gamma], c = sum_i Tr[P_i rho].
    """
    if not gamma.is_hermitian():
        raise ContractViolation("recovery correction needs a Hermitian observable")
    dim = 2 ** rho.n_qubits
    gamma_dense = to_dense(gamma)
    acc = np.zeros((dim, dim), dtype=complex)
    c = 0.0
    for syn, rec in table.entries.items():
        proj = error_projector(code, syn)
        sector = proj @ rho.data @ proj
        c += float(np.trace(proj @ rho.data).real)
        u = to_dense(rec)
        acc += u @ sector @ u.conj().T
    numerator = float(np.trace(acc @ gamma_dense).real)
    if c < c_cutoff:
        raise NoCodeSupport(f"state has no support in recovered space (c = {c:.3e})")
    state = DensityMatrix(rho.n_qubits, acc / c) if keep_state else None
    return CorrectionResult(value=numerator / c, c=c, numerator=numerator, corrected_state=state)


def recovered_state(
    rho: DensityMatrix, code: StabilizerCode, table: SyndromeTable, c_cutoff: float = C_CUTOFF
) -> tuple:
    """(sum_i R_i P_i rho P_i R_i^dag / c, c) for fidelity-style figures."""
    dim = 2 ** rho.n_qubits
    acc = np.zeros((dim, dim), dtype=complex)
    c = 0.0
    for syn, rec in table.entries.items():
        proj = error_projector(code, syn)
        sector = proj @ rho.data @ proj
        c += float(np.trace(proj @ rho.data).real)
        u = to_dense(rec)
        acc += u @ sector @ u.conj().T
    if c < c_cutoff:
        raise NoCodeSupport(f"state has no support in recovered space (c = {c:.3e})")
    return DensityMatrix(rho.n_qubits, acc / c), c


def code_hamiltonian(code: StabilizerCode, l: int | None = None) -> PauliSum:
    """Negative sum of the first l stabilizer generators.

    Its ground space at l = m is exactly the code space; at lower l it is the
    joint +1 eigenspace of the generators used, which matches the level-l
    projector hierarchy.
    """
    if l is None:
        l = code.m
    if not 0 <= l <= code.m:
        raise ValueError(f"level l={l} outside [0, {code.m}]")
    if l == 0:
        return PauliSum.zero(code.n)
    return PauliSum([(-1.0, g) for g in code.generators[:l]])
