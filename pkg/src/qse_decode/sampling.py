"""Stochastic shot sampling for projector and recovery corrections.

Each estimator enumerates its sampling cells (a group element chi, an
observable term j, and for recovery an error index alpha), draws cells from a
categorical distribution, and simulates single-shot +-1 outcomes from the
exact Bernoulli parameter of the sampled Pauli.  Estimates are unbiased for
the unnormalized corrected numerator; with the identity observable they
estimate the normalization c.

Variance bookkeeping follows the binomial convention in which a single-Pauli
estimator has per-shot variance gamma_tilde^2 p_plus (1 - p_plus), i.e. one
quarter of the variance of the +-1 outcome values.  All randomness comes from
a seeded PCG64 generator; sweep drivers derive per-point substreams from
(master seed, point index) so parallel execution cannot change results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import StabilizerCode, SyndromeTable, hierarchy_group
from .densesim import DensityMatrix
from .errors import ContractViolation, DimensionMismatch
from .pauli import PauliString, PauliSum, commutes, multiply, to_dense, weight
from .projection import code_projector


@dataclass(frozen=True)
class SamplingDecomposition:
    """Observable split as gamma_tilde * sum_j gamma_j * (signed Pauli)."""

    gamma_tilde: float
    terms: tuple  # of (gamma_j, PauliString with sign in its phase)

    def reconstruct(self, n_qubits: int) -> PauliSum:
        return PauliSum(
            [(self.gamma_tilde * g, op) for g, op in self.terms], n_qubits=n_qubits
        )


@dataclass(frozen=True)
class EstimatorReport:
    scheme: str
    seed: int
    sample_count: int
    estimate: float
    empirical_variance: float
    predicted_variance: float | None = None
    p_plus: float | None = None
    n_eff: float | None = None


def decompose_for_sampling(obs: PauliSum) -> SamplingDecomposition:
    """Normalize coefficients into a distribution, folding signs into phases."""
    if not obs.is_hermitian():
        raise ContractViolation("sampling decomposition needs a Hermitian observable")
    if len(obs) == 0:
        raise ValueError("cannot decompose the zero operator for sampling")
    gamma_tilde = float(sum(abs(c.real) for c, _ in obs.terms))
    terms = []
    for c, op in obs.terms:
        sign_phase = 0 if c.real >= 0 else 2
        terms.append((abs(c.real) / gamma_tilde, op.with_phase(sign_phase)))
    return SamplingDecomposition(gamma_tilde=gamma_tilde, terms=tuple(terms))


def _exact_expectation(rho: DensityMatrix, op: PauliString) -> float:
    return float(np.trace(rho.data @ to_dense(op)).real)


def sample_pauli_outcome(rho: DensityMatrix, p: PauliString, rng) -> int:
    """One +-1 outcome of measuring the signed Pauli p on rho."""
    if not p.is_hermitian:
        raise ContractViolation(f"cannot measure non-Hermitian phase {p.label()}")
    if p.n_qubits != rho.n_qubits:
        raise DimensionMismatch("Pauli and state qubit counts differ")
    p_plus = np.clip((1.0 + _exact_expectation(rho, p)) / 2.0, 0.0, 1.0)
    return 1 if rng.random() < p_plus else -1


@dataclass(frozen=True)
class _CellTable:
    """Sampling cells with proposal probabilities and importance weights."""

    operators: tuple
    target: np.ndarray  # the measure being estimated; sums to c-like mass
    proposal: np.ndarray  # categorical distribution actually drawn from
    weights: np.ndarray  # target / proposal, applied per outcome

    def expectations(self, rho: DensityMatrix) -> np.ndarray:
        return np.array([_exact_expectation(rho, op) for op in self.operators])


def _projection_cells(code, l, decomposition) -> _CellTable:
    group = hierarchy_group(code, l)
    ops, target = [], []
    for chi_op in group:
        for gamma_j, term in decomposition.terms:
            ops.append(multiply(term, chi_op))
            target.append(gamma_j / len(group))
    target = np.array(target)
    return _CellTable(
        operators=tuple(ops),
        target=target,
        proposal=target.copy(),
        weights=np.ones(len(ops)),
    )


def _check_group_commutation(code, l, decomposition) -> None:
    group = hierarchy_group(code, l)
    for _, term in decomposition.terms:
        for g in group:
            if not commutes(term, g):
                raise ContractViolation(
                    f"observable term {term.label()} anticommutes with group "
                    f"element {g.label()}"
                )


def _run(rho, cells: _CellTable, decomposition, n_samples, seed, scheme) -> EstimatorReport:
    if n_samples <= 0:
        raise ValueError("n_samples must be positive")
    rng = np.random.default_rng(seed)
    exps = cells.expectations(rho)
    p_plus_cell = np.clip((1.0 + exps) / 2.0, 0.0, 1.0)
    idx = rng.choice(len(cells.operators), size=n_samples, p=cells.proposal)
    outcomes = np.where(rng.random(n_samples) < p_plus_cell[idx], 1.0, -1.0)
    gt = decomposition.gamma_tilde
    values = gt * cells.weights[idx] * outcomes
    estimate = float(values.mean())
    empirical_variance = float(values.var() / 4.0)
    mean_exact = float(np.dot(cells.target, exps))
    second_moment = float(np.dot(cells.target, cells.weights))
    predicted = gt * gt * (second_moment - mean_exact ** 2) / 4.0
    p_plus = float(np.dot(cells.proposal, p_plus_cell))
    drawn_w = cells.weights[idx]
    n_eff = float(drawn_w.sum() ** 2 / np.dot(drawn_w, drawn_w))
    return EstimatorReport(
        scheme=scheme,
        seed=seed,
        sample_count=n_samples,
        estimate=estimate,
        empirical_variance=empirical_variance,
        predicted_variance=predicted,
        p_plus=p_plus,
        n_eff=n_eff,
    )


def uniform_estimator(
    rho: DensityMatrix,
    code: StabilizerCode,
    l: int,
    obs: PauliSum,
    n_samples: int,
    seed: int,
) -> EstimatorReport:
    """Uniform cell sampling; unbiased for Tr[P rho P Gamma] at level l."""
    decomposition = decompose_for_sampling(obs)
    _check_group_commutation(code, l, decomposition)
    cells = _projection_cells(code, l, decomposition)
    return _run(rho, cells, decomposition, n_samples, seed, "uniform")


def importance_estimator(
    rho: DensityMatrix,
    code: StabilizerCode,
    l: int,
    obs: PauliSum,
    n_samples: int,
    seed: int,
    p_weight: float,
) -> EstimatorReport:
    """Sample chi proportionally to (1 - p_weight)^{W_chi}, reweighted to stay
    unbiased for the same numerator as the uniform scheme."""
    if not 0.0 <= p_weight < 1.0:
        raise ValueError("p_weight must lie in [0, 1)")
    decomposition = decompose_for_sampling(obs)
    _check_group_commutation(code, l, decomposition)
    group = hierarchy_group(code, l)
    chi_score = np.array([(1.0 - p_weight) ** weight(g) for g in group])
    chi_prob = chi_score / chi_score.sum()
    ops, target, proposal = [], [], []
    for chi_op, qc in zip(group, chi_prob):
        for gamma_j, term in decomposition.terms:
            ops.append(multiply(term, chi_op))
            target.append(gamma_j / len(group))
            proposal.append(gamma_j * qc)
    target = np.array(target)
    proposal = np.array(proposal)
    proposal /= proposal.sum()
    cells = _CellTable(
        operators=tuple(ops),
        target=target,
        proposal=proposal,
        weights=target / proposal,
    )
    return _run(rho, cells, decomposition, n_samples, seed, "importance")


def recovery_estimator(
    rho: DensityMatrix,
    code: StabilizerCode,
    obs: PauliSum,
    table: SyndromeTable,
    b: np.ndarray | None,
    n_samples: int,
    seed: int,
) -> EstimatorReport:
    """Sample (chi, j, alpha) and measure R_a^dag Gamma_j S_chi R_a.

    Unbiased for sum_alpha Tr[R_a P_a rho P_a R_a^dag Gamma]: drawing alpha
    with probability b_alpha is importance sampling over the error sum, so
    outcomes carry a 1/b_alpha weight.  The syndrome signs of P_alpha emerge
    from the exact Pauli product.  Defaults to the table's declared priors,
    else uniform.
    """
    decomposition = decompose_for_sampling(obs)
    _check_group_commutation(code, code.m, decomposition)
    entries = list(table.entries.items())
    if b is None:
        b = np.array(table.priors) if table.priors is not None else None
    if b is None:
        b = np.full(len(entries), 1.0 / len(entries))
    b = np.asarray(b, dtype=float)
    if b.shape[0] != len(entries) or (b <= 0).any() or abs(b.sum() - 1.0) > 1e-9:
        raise ValueError("b must be a positive distribution over the table errors")
    group = hierarchy_group(code, code.m)
    ops, target, proposal, weights = [], [], [], []
    for (syn, rec), b_a in zip(entries, b):
        rec_adj = rec.adjoint()
        for chi_op in group:
            for gamma_j, term in decomposition.terms:
                sampled = multiply(multiply(rec_adj, multiply(term, chi_op)), rec)
                ops.append(sampled)
                target.append(gamma_j / len(group))
                proposal.append(gamma_j * b_a / len(group))
                weights.append(1.0 / b_a)
    cells = _CellTable(
        operators=tuple(ops),
        target=np.array(target),
        proposal=np.array(proposal),
        weights=np.array(weights),
    )
    return _run(rho, cells, decomposition, n_samples, seed, "recovery")


def direct_measurement_variance(rho: DensityMatrix, obs: PauliSum) -> float:
    """Per-shot variance of measuring the observable without any projection,
    in the same binomial convention as the estimators."""
    decomposition = decompose_for_sampling(obs)
    p_plus = 0.0
    for gamma_j, term in decomposition.terms:
        p_plus += gamma_j * (1.0 + _exact_expectation(rho, term)) / 2.0
    gt = decomposition.gamma_tilde
    return gt * gt * p_plus * (1.0 - p_plus)


def chi_marginals(rho: DensityMatrix, code: StabilizerCode, l: int, obs: PauliSum):
    """Exhaustive chi-marginalization check data for the uniform scheme.

    For every observable term j and outcome x, returns the enumerated marginal
    sum_chi p_{chi,j,x} next to the closed form
    (1/2) (1 + x Tr[rho Gamma_j P]) gamma_j, which reduces to
    (1/2) (1 + x Tr[rho P]) for the identity observable.
    """
    decomposition = decompose_for_sampling(obs)
    group = hierarchy_group(code, l)
    proj = code_projector(code, l)
    rows = []
    for j, (gamma_j, term) in enumerate(decomposition.terms):
        t_j = float(np.trace(rho.data @ to_dense(term) @ proj).real)
        for x in (1, -1):
            enumerated = 0.0
            for chi_op in group:
                e = _exact_expectation(rho, multiply(term, chi_op))
                q_x = (1.0 + x * e) / 2.0
                enumerated += (gamma_j / len(group)) * q_x
            closed = 0.5 * (1.0 + x * t_j) * gamma_j
            rows.append((j, x, enumerated, closed))
    return rows
