"""End-to-end tests for the experiment driver and its file formats."""

import csv

import numpy as np
import pytest

from qse_decode.cli import (
    SweepConfig,
    bundled_hamiltonian_path,
    cmd_estimate,
    cmd_molecule,
    cmd_threshold,
    cmd_transversal_x,
    find_crossover,
    load_hamiltonian,
    main,
)
from qse_decode.codes import bundled_code
from qse_decode.densesim import DensityMatrix, fidelity, prepare_logical_state
from qse_decode.pauli import PauliSum, to_dense
from qse_decode.sampling import decompose_for_sampling


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def small_config(tmp_path, name, **overrides):
    defaults = dict(
        p_min=0.05,
        p_max=0.9,
        steps=12,
        drop_trials=3,
        workers=2,
        out_path=str(tmp_path / name),
        seed=11,
    )
    defaults.update(overrides)
    return SweepConfig(**defaults)


class TestThreshold:
    def test_smoke_and_header(self, tmp_path):
        config = small_config(tmp_path, "thr.csv")
        rows, crossover = cmd_threshold(config)
        data = read_rows(config.out_path)
        assert len(data) == 12
        assert set(data[0]) >= {"p", "physical", "bare", "l1", "l2", "l3", "l4"}
        assert crossover is not None

    def test_byte_determinism(self, tmp_path):
        a = small_config(tmp_path, "a.csv", workers=1)
        b = small_config(tmp_path, "b.csv", workers=4)
        cmd_threshold(a)
        cmd_threshold(b)
        assert open(a.out_path, "rb").read() == open(b.out_path, "rb").read()

    def test_hierarchy_ordering_non_increasing(self, tmp_path):
        config = small_config(tmp_path, "ord.csv")
        cmd_threshold(config)
        for row in read_rows(config.out_path):
            infs = [float(row[f"l{l}"]) for l in (1, 2, 3, 4)]
            for tighter, looser in zip(infs[1:], infs[:-1]):
                assert tighter <= looser + 1e-9

    def test_p_zero_row_clean(self, tmp_path):
        config = small_config(tmp_path, "zero.csv", p_min=0.0, p_max=0.4, steps=3)
        rows, _ = cmd_threshold(config)
        first = rows[0]
        assert first[0] == 0.0
        for val in first[1:]:
            assert abs(val) < 1e-10

    def test_totally_mixed_point_matches_dense_oracle(self, tmp_path):
        # at p = 3/4 the state is I/32: c = 1/16 and corrected fidelity is 1/2
        config = small_config(tmp_path, "mix.csv", p_min=0.75, p_max=0.9, steps=2)
        rows, _ = cmd_threshold(config)
        row = rows[0]
        five = bundled_code("five_one_three")
        psi = prepare_logical_state(five, config.state_theta, config.state_phi)
        from qse_decode.projection import corrected_state

        state, c = corrected_state(
            DensityMatrix(5, np.eye(32) / 32), five, 4
        )
        assert abs(c - 1.0 / 16.0) < 1e-12
        oracle_inf = 1.0 - fidelity(state, psi)
        l4 = row[3 + 3]
        assert abs(l4 - oracle_inf) < 1e-10
        assert abs(oracle_inf - 0.5) < 1e-12

    def test_crossover_grid_stability(self, tmp_path):
        coarse = small_config(tmp_path, "coarse.csv", p_min=0.3, p_max=0.7, steps=20,
                              drop_trials=1)
        fine = small_config(tmp_path, "fine.csv", p_min=0.3, p_max=0.7, steps=40,
                            drop_trials=1)
        _, p_coarse = cmd_threshold(coarse)
        _, p_fine = cmd_threshold(fine)
        spacing = (0.7 - 0.3) / 19
        assert abs(p_coarse - p_fine) <= spacing


class TestTransversalX:
    def test_exact_at_p_zero(self, tmp_path):
        config = small_config(tmp_path, "tx0.csv", p_min=0.0, p_max=0.3, steps=2)
        rows, _ = cmd_transversal_x(config)
        for val in rows[0][1:]:
            assert abs(val) < 1e-10

    def test_bare_dominates_corrected(self, tmp_path):
        config = small_config(tmp_path, "txd.csv")
        cmd_transversal_x(config)
        for row in read_rows(config.out_path):
            bare = float(row["bare"])
            for l in (1, 2, 3, 4):
                assert bare >= float(row[f"l{l}"]) - 1e-9


class TestMolecule:
    def test_smoke(self, tmp_path):
        config = small_config(tmp_path, "mol.csv", steps=6)
        rows, peak = cmd_molecule(config)
        data = read_rows(config.out_path)
        assert len(data) == 6
        assert peak >= 1.0
        for row in data:
            assert float(row["improvement_full"]) >= 1.0

    def test_level_zero_equals_bare(self, tmp_path):
        config = small_config(tmp_path, "mol0.csv", steps=4)
        cmd_molecule(config)
        for row in read_rows(config.out_path):
            assert abs(float(row["l0_fidelity"]) - float(row["bare_fidelity"])) < 1e-10

    def test_noiseless_point(self, tmp_path):
        config = small_config(tmp_path, "molz.csv", p_min=0.0, p_max=0.5, steps=2)
        rows, _ = cmd_molecule(config)
        first = rows[0]
        # columns: p, bare_f, bare_inf, then (f, inf, energy) per level
        assert abs(first[1] - 1.0) < 1e-10
        for idx in (3, 6, 9, 12):
            assert abs(first[idx] - 1.0) < 1e-9

    def test_energy_bounded_below_by_exact(self, tmp_path):
        config = small_config(tmp_path, "mole.csv", steps=5)
        cmd_molecule(config)
        h = load_hamiltonian(bundled_hamiltonian_path())
        e0 = np.linalg.eigvalsh(to_dense(h)).min()
        for row in read_rows(config.out_path):
            for l in range(4):
                assert float(row[f"l{l}_energy"]) >= e0 - 1e-9

    def test_dump_matrices(self, tmp_path):
        config = small_config(tmp_path, "mold.csv", steps=2, dump_matrices=True)
        cmd_molecule(config)
        import os

        for level in range(4):
            for name in ("H", "S"):
                assert os.path.exists(f"{config.out_path}.l{level}.{name}.csv")


class TestHamiltonianFile:
    def test_bundled_loads_15_terms(self):
        h = load_hamiltonian(bundled_hamiltonian_path())
        assert len(h) == 15
        assert h.n_qubits == 4
        assert h.is_hermitian()

    def test_decomposition_round_trip(self):
        h = load_hamiltonian(bundled_hamiltonian_path())
        d = decompose_for_sampling(h)
        assert d.gamma_tilde == pytest.approx(
            sum(abs(c.real) for c, _ in h.terms), abs=0
        )
        rebuilt = d.reconstruct(4)
        assert [op for _, op in rebuilt.terms] == [op for _, op in h.terms]
        for (ca, _), (cb, _) in zip(rebuilt.terms, h.terms):
            assert ca == pytest.approx(cb, rel=1e-15)

    def test_bad_file_rejected(self, tmp_path):
        path = tmp_path / "bad.ham"
        path.write_text("XX 0.5 extra\n")
        with pytest.raises(ValueError):
            load_hamiltonian(path)


class TestEstimate:
    @pytest.mark.parametrize("scheme", ["uniform", "importance", "recovery"])
    def test_within_three_sigma_of_oracle(self, tmp_path, scheme):
        config = small_config(tmp_path, f"est_{scheme}.csv", p_min=0.2)
        report, oracle = cmd_estimate(config, scheme, 100_000)
        sigma = np.sqrt(4.0 * report.empirical_variance / report.sample_count)
        assert abs(report.estimate - oracle) < 3 * sigma + 1e-9

    def test_csv_schema(self, tmp_path):
        config = small_config(tmp_path, "est.csv", p_min=0.2)
        cmd_estimate(config, "uniform", 10_000)
        rows = read_rows(config.out_path)
        assert list(rows[0]) == [
            "scheme", "seed", "n_samples", "estimate",
            "empirical_variance", "predicted_variance", "p_plus", "oracle",
        ]

    def test_noiseless_variance_matches_direct(self, tmp_path):
        from qse_decode.sampling import direct_measurement_variance

        config = small_config(tmp_path, "estz.csv", p_min=0.0)
        report, _ = cmd_estimate(config, "uniform", 20_000)
        five = bundled_code("five_one_three")
        psi = prepare_logical_state(five, config.state_theta, config.state_phi)
        direct = direct_measurement_variance(
            psi.to_density(), PauliSum([(1.0, five.logical_z[0])])
        )
        assert report.predicted_variance == pytest.approx(direct, abs=1e-12)


class TestMain:
    def test_cli_threshold(self, tmp_path, capsys):
        out = tmp_path / "cli.csv"
        code = main([
            "threshold", "--p-min", "0.3", "--p-max", "0.7", "--steps", "8",
            "--drop-trials", "2", "--out", str(out), "--workers", "1",
        ])
        assert code == 0
        assert out.exists()
        assert "pseudo-threshold" in capsys.readouterr().out

    def test_cli_estimate(self, tmp_path):
        out = tmp_path / "cli_est.csv"
        assert main([
            "estimate", "--scheme", "importance", "--shots", "5000",
            "--p-min", "0.1", "--out", str(out),
        ]) == 0
        assert out.exists()


class TestCrossoverHelper:
    def test_simple_crossing(self):
        ps = [0.1, 0.2, 0.4, 0.8]
        encoded = [0.01, 0.05, 0.5, 0.9]
        physical = [0.066, 0.13, 0.26, 0.53]
        p_star = find_crossover(ps, encoded, physical)
        assert 0.2 < p_star < 0.4

    def test_no_crossing(self):
        ps = [0.1, 0.2]
        assert find_crossover(ps, [0.001, 0.002], [0.07, 0.13]) is None
