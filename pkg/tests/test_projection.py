"""Projection and recovery correction tests against brute-force dense algebra."""

import itertools

import numpy as np
import pytest

from qse_decode.codes import build_syndrome_table, bundled_code, syndrome
from qse_decode.densesim import DensityMatrix, fidelity, prepare_logical_state
from qse_decode.errors import ContractViolation, NoCodeSupport
from qse_decode.pauli import PauliString, PauliSum, multiply, to_dense
from qse_decode.projection import (
    code_projector,
    corrected_expectation,
    corrected_state,
    error_projector,
    recovered_state,
    recovery_corrected_expectation,
)


@pytest.fixture(scope="module")
def five():
    return bundled_code("five_one_three")


@pytest.fixture(scope="module")
def psi(five):
    return prepare_logical_state(five, 2 * np.pi / 5, np.pi / 3)


def weight_k_paulis(n, k):
    """All Paulis of exact weight k on n qubits (phase +1)."""
    out = []
    for sites in itertools.combinations(range(n), k):
        for kinds in itertools.product("XYZ", repeat=k):
            op = PauliString.identity(n)
            for q, kind in zip(sites, kinds):
                op = multiply(op, PauliString.single(n, q, kind))
            out.append(op.bare())
    return out


def mix_with_error(psi, error, p):
    rho = psi.to_density().data
    u = to_dense(error.bare())
    return DensityMatrix(psi.n_qubits, (1 - p) * rho + p * (u @ rho @ u.conj().T))


class TestCodeProjector:
    def test_l0_identity(self, five):
        assert np.allclose(code_projector(five, 0), np.eye(32))

    def test_idempotent_all_levels(self, five):
        for l in range(5):
            proj = code_projector(five, l)
            assert np.allclose(proj @ proj, proj, atol=1e-12)
            assert np.allclose(proj, proj.conj().T, atol=1e-12)

    def test_full_trace_is_two(self, five):
        assert abs(np.trace(code_projector(five, 4)).real - 2.0) < 1e-12


class TestErrorProjector:
    def test_zero_syndrome_is_code_projector(self, five):
        assert np.allclose(
            error_projector(five, (0, 0, 0, 0)), code_projector(five, 4), atol=1e-12
        )

    def test_resolution_of_identity(self, five):
        total = sum(
            error_projector(five, syn)
            for syn in itertools.product((0, 1), repeat=4)
        )
        assert np.allclose(total, np.eye(32), atol=1e-12)

    def test_projects_errored_state(self, five, psi):
        for e in weight_k_paulis(5, 1)[:6]:
            syn = syndrome(five, e)
            proj = error_projector(five, syn)
            vec = to_dense(e) @ psi.amplitudes
            assert np.allclose(proj @ vec, vec, atol=1e-12)

    def test_idempotent_hermitian(self, five):
        proj = error_projector(five, (1, 0, 1, 1))
        assert np.allclose(proj @ proj, proj, atol=1e-12)
        assert np.allclose(proj, proj.conj().T, atol=1e-12)


class TestCorrectedExpectation:
    def test_code_state_untouched(self, five, psi):
        rho = psi.to_density()
        obs = PauliSum([(1.0, five.logical_z[0])])
        res = corrected_expectation(rho, obs, five, 4)
        assert abs(res.c - 1.0) < 1e-10
        assert abs(res.value - np.cos(2 * np.pi / 5)) < 1e-10

    def test_single_error_removed_exactly(self, five, psi):
        obs = PauliSum([(1.0, five.logical_z[0])])
        clean = float(np.cos(2 * np.pi / 5))
        for e in weight_k_paulis(5, 1):
            for p in (0.1, 0.3, 0.5):
                rho = mix_with_error(psi, e, p)
                res = corrected_expectation(rho, obs, five, 4)
                assert abs(res.value - clean) < 1e-10
                assert abs(res.c - (1 - p)) < 1e-10

    def test_totally_mixed(self, five):
        rho = DensityMatrix(5, np.eye(32) / 32)
        obs = PauliSum([(1.0, five.logical_z[0])])
        res = corrected_expectation(rho, obs, five, 4)
        assert abs(res.value) < 1e-12
        assert abs(res.c - 1.0 / 16) < 1e-12

    def test_matches_brute_force(self, five, psi):
        rng = np.random.default_rng(43)
        obs = PauliSum([(0.7, five.logical_z[0]), (-0.2, five.logical_x[0])])
        for l in range(5):
            w = rng.uniform(0.1, 0.9)
            from qse_decode.densesim import global_depolarize

            rho = global_depolarize(psi.to_density(), w)
            res = corrected_expectation(rho, obs, five, l, keep_state=True)
            proj = code_projector(five, l)
            brute = proj @ rho.data @ proj
            c = np.trace(brute).real
            assert abs(res.c - c) < 1e-12
            assert abs(res.value - np.trace(brute @ to_dense(obs)).real / c) < 1e-10
            assert np.allclose(res.corrected_state.data, brute / c, atol=1e-12)

    def test_monotone_support(self, five, psi):
        from qse_decode.densesim import depolarize_each

        rho = depolarize_each(psi.to_density(), 0.3)
        obs = PauliSum([(1.0, five.logical_z[0])])
        cs = [corrected_expectation(rho, obs, five, l).c for l in range(5)]
        for lo, hi in zip(cs[1:], cs[:-1]):
            assert lo <= hi + 1e-12

    def test_noncommuting_rejected(self, five, psi):
        bad = PauliSum([(1.0, PauliString.single(5, 0, "X"))])
        with pytest.raises(ContractViolation):
            corrected_expectation(psi.to_density(), bad, five, 4)
        # the two-sided escape hatch accepts it
        res = corrected_expectation(
            psi.to_density(), bad, five, 4, allow_noncommuting=True
        )
        assert np.isfinite(res.value)

    def test_no_support_raises(self, five, psi):
        err = PauliString.single(5, 0, "X")
        rho = mix_with_error(psi, err, 1.0)  # fully errored: projector kills it
        obs = PauliSum([(1.0, five.logical_z[0])])
        with pytest.raises(NoCodeSupport):
            corrected_expectation(rho, obs, five, 4)

    def test_weight_up_to_2_errors_removed(self, five, psi):
        # every weight-1 or weight-2 error anticommutes with some stabilizer
        from qse_decode.codes import syndrome as syn_of

        for k in (1, 2):
            for e in weight_k_paulis(5, k):
                assert any(syn_of(five, e))
                rho = mix_with_error(psi, e, 0.35)
                state, c = corrected_state(rho, five, 4)
                assert abs(fidelity(state, psi) - 1.0) < 1e-10


class TestRecovery:
    def test_code_state(self, five, psi):
        table = build_syndrome_table(five)
        obs = PauliSum([(1.0, five.logical_z[0])])
        res = recovery_corrected_expectation(psi.to_density(), obs, five, table)
        assert abs(res.c - 1.0) < 1e-10
        assert abs(res.value - np.cos(2 * np.pi / 5)) < 1e-10

    def test_single_error_recovered_with_full_c(self, five, psi):
        table = build_syndrome_table(five)
        obs = PauliSum([(1.0, five.logical_z[0])])
        rho = mix_with_error(psi, PauliString.single(5, 0, "X"), 0.3)
        res = recovery_corrected_expectation(rho, obs, five, table, keep_state=True)
        assert abs(res.c - 1.0) < 1e-10
        assert abs(res.value - np.cos(2 * np.pi / 5)) < 1e-10
        assert abs(fidelity(res.corrected_state, psi) - 1.0) < 1e-10

    def test_weight2_error_misfires(self, five, psi):
        table = build_syndrome_table(five)
        e = multiply(PauliString.single(5, 0, "X"), PauliString.single(5, 1, "X"))
        rho = mix_with_error(psi, e.bare(), 0.3)
        res = recovery_corrected_expectation(rho, PauliSum([(1.0, five.logical_z[0])]), five, table, keep_state=True)
        assert abs(res.c - 1.0) < 1e-10  # all mass recovered...
        assert fidelity(res.corrected_state, psi) < 1.0 - 1e-6  # ...but wrongly

    def test_identity_table_equals_projection(self, five, psi):
        from qse_decode.densesim import depolarize_each

        table = build_syndrome_table(five, errors=[])
        rho = depolarize_each(psi.to_density(), 0.25)
        obs = PauliSum([(1.0, five.logical_z[0])])
        rec = recovery_corrected_expectation(rho, obs, five, table)
        proj = corrected_expectation(rho, obs, five, 4)
        assert abs(rec.value - proj.value) < 1e-12
        assert abs(rec.c - proj.c) < 1e-12

    def test_recovery_equivalent_representative(self, five, psi):
        # replacing a recovery by (recovery * stabilizer) changes nothing
        from qse_decode.codes import SyndromeTable
        from qse_decode.densesim import depolarize_each

        table = build_syndrome_table(five)
        entries = dict(table.entries)
        syn = (0, 0, 0, 1)
        entries[syn] = multiply(entries[syn], five.generators[0]).bare()
        altered = SyndromeTable(code=five, entries=entries, errors=table.errors)
        rho = depolarize_each(psi.to_density(), 0.3)
        obs = PauliSum([(1.0, five.logical_z[0])])
        a = recovery_corrected_expectation(rho, obs, five, table)
        b = recovery_corrected_expectation(rho, obs, five, altered)
        assert abs(a.value - b.value) < 1e-12
        assert abs(a.c - b.c) < 1e-12
