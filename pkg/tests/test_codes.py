"""Tests for code loading, hierarchies, syndromes, and recovery tables."""

import itertools

import numpy as np
import pytest

from qse_decode.codes import (
    StabilizerCode,
    build_syndrome_table,
    bundled_code,
    hierarchy_group,
    load_code,
    syndrome,
)
from qse_decode.errors import CodeValidationError, SyndromeCollision
from qse_decode.pauli import PauliString, commutes, multiply, to_dense


@pytest.fixture(scope="module")
def five():
    return bundled_code("five_one_three")


class TestLoadCode:
    def test_bundled_five_qubit(self, five):
        assert (five.n, five.k, five.d, five.m) == (5, 1, 3, 4)
        labels = [g.label() for g in five.generators]
        assert labels == ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
        assert five.logical_x[0].label() == "XXXXX"
        assert five.logical_z[0].label() == "ZZZZZ"

    def test_trivial_code(self):
        code = bundled_code("trivial_1q")
        assert (code.n, code.k, code.m) == (1, 1, 0)

    def test_k_zero_rejected(self):
        text = "n 2\nk 0\nstabilizer XX\nstabilizer ZZ\n"
        with pytest.raises(CodeValidationError):
            load_code(text)

    def test_noncommuting_generators_rejected(self):
        text = "n 2\nk 1\nstabilizer XI\nlogical_x IX\nlogical_z IZ\n"
        code = load_code(text)  # fine: XI commutes with itself and logicals
        assert code.m == 1
        bad = "n 1\nk 1\nstabilizer X\nlogical_x X\nlogical_z Z\n"
        with pytest.raises(CodeValidationError):
            load_code(bad)

    def test_dependent_generators_rejected(self):
        # XX*ZZ = -YY up to phase; adding their product makes a dependent triple
        text = (
            "n 4\nk 1\n"
            "stabilizer XXII\nstabilizer ZZII\nstabilizer YYII\n"
            "logical_x IIIX\nlogical_z IIIZ\n"
        )
        with pytest.raises(CodeValidationError, match="independent"):
            load_code(text)

    def test_malformed_line_names_lineno(self):
        text = "n 5\nk 1\nstabilizer XQZXI\n"
        with pytest.raises(CodeValidationError, match="line 3"):
            load_code(text)

    def test_error_directives_with_priors(self):
        text = (
            "n 1\nk 1\nlogical_x X\nlogical_z Z\n"
            "error I 0.9\nerror X 0.05\nerror Y 0.03\nerror Z 0.02\n"
        )
        code = load_code(text)
        assert len(code.error_set) == 4
        assert code.error_priors() == [0.9, 0.05, 0.03, 0.02]


class TestHierarchy:
    def test_l0_is_identity(self, five):
        group = hierarchy_group(five, 0)
        assert group == [PauliString.identity(5)]

    def test_l1(self, five):
        group = hierarchy_group(five, 1)
        assert group == [PauliString.identity(5), five.generators[0]]

    def test_l4_closed_under_products(self, five):
        group = hierarchy_group(five, 4)
        assert len(group) == 16
        assert len({g.key() for g in group}) == 16
        members = {(g.x, g.z, g.phase_k) for g in group}
        for a, b in itertools.product(group, group):
            prod = multiply(a, b)
            assert (prod.x, prod.z, prod.phase_k) in members

    def test_nonidentity_elements_have_weight_4(self, five):
        from qse_decode.pauli import weight

        group = hierarchy_group(five, 4)
        weights = sorted(weight(g) for g in group)
        assert weights == [0] + [4] * 15

    def test_elements_commute_with_logicals(self, five):
        for l in range(5):
            for g in hierarchy_group(five, l):
                assert commutes(g, five.logical_x[0])
                assert commutes(g, five.logical_z[0])

    def test_out_of_range(self, five):
        with pytest.raises(ValueError):
            hierarchy_group(five, 5)


class TestSyndrome:
    def test_identity_syndrome(self, five):
        assert syndrome(five, PauliString.identity(5)) == (0, 0, 0, 0)

    def test_x0_syndrome(self, five):
        e = PauliString.single(5, 0, "X")
        assert syndrome(five, e) == (0, 0, 0, 1)

    def test_symplectic_oracle(self, five):
        rng = np.random.default_rng(23)
        for _ in range(100):
            e = PauliString(5, int(rng.integers(0, 32)), int(rng.integers(0, 32)))
            syn = syndrome(five, e)
            for j, g in enumerate(five.generators):
                form = sum(
                    ex * gz + ez * gx
                    for ex, ez, gx, gz in zip(e.x_bits, e.z_bits, g.x_bits, g.z_bits)
                )
                assert syn[j] == form % 2

    def test_weight1_syndromes_bijective(self, five):
        errors = [
            PauliString.single(5, q, kind) for q in range(5) for kind in "XYZ"
        ]
        syns = {syndrome(five, e) for e in errors}
        assert len(syns) == 15
        assert (0, 0, 0, 0) not in syns

    def test_syndrome_of_product_is_xor(self, five):
        rng = np.random.default_rng(29)
        for _ in range(100):
            e1 = PauliString(5, int(rng.integers(0, 32)), int(rng.integers(0, 32)))
            e2 = PauliString(5, int(rng.integers(0, 32)), int(rng.integers(0, 32)))
            s1, s2 = syndrome(five, e1), syndrome(five, e2)
            s12 = syndrome(five, multiply(e1, e2))
            assert s12 == tuple(a ^ b for a, b in zip(s1, s2))


class TestSyndromeTable:
    def test_empty_error_list(self, five):
        table = build_syndrome_table(five, errors=[])
        assert len(table) == 1
        assert table.recovery((0, 0, 0, 0)) == PauliString.identity(5)

    def test_full_weight1_table(self, five):
        table = build_syndrome_table(five)
        assert len(table) == 16
        for syn, rec in table.entries.items():
            assert syndrome(five, rec) == syn

    def test_collision_detected(self, five):
        x0 = PauliString.single(5, 0, "X")
        collider = multiply(x0, five.generators[0])  # same syndrome as X0
        with pytest.raises(SyndromeCollision):
            build_syndrome_table(five, errors=[x0, collider.bare()])

    def test_recovery_times_error_commutes_with_generators(self, five):
        table = build_syndrome_table(five)
        for e in five.correctable_errors():
            rec = table.recovery(syndrome(five, e))
            for g in five.generators:
                assert commutes(multiply(rec, e), g)


class TestProjectorFromHierarchy:
    def test_full_group_sums_to_projector(self, five):
        group = hierarchy_group(five, 4)
        p = sum(to_dense(g) for g in group) / 16.0
        assert np.allclose(p @ p, p, atol=1e-12)
        assert np.allclose(p, p.conj().T, atol=1e-12)
        assert abs(np.trace(p) - 2.0) < 1e-12
