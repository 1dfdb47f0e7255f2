"""Command-line driver for the paper-style experiments.

Subcommands:
  threshold     level-by-level pseudo-threshold sweep for a logical state
  transversal-x the same sweep after a noisy transversal logical X
  molecule      symmetry-expansion mitigation of a molecular ground state
  estimate      one stochastic-estimator run against its dense oracle

Each command writes a CSV with a fixed header (documented in docs/formats.md)
and is byte-deterministic given the same configuration and seed.  Sweep rows
are computed with per-point seeds derived from (master seed, grid index), so
the thread pool cannot change any output.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .codes import StabilizerCode, build_syndrome_table, hierarchy_group, load_code_file
from .densesim import (
    DensityMatrix,
    StateVector,
    apply_pauli,
    depolarize_each,
    fidelity,
    prepare_logical_state,
)
from .errors import EmptySubspace, NoCodeSupport
from .pauli import PauliString, PauliSum, to_dense
from .projection import (
    code_hamiltonian,
    corrected_expectation,
    corrected_state,
    recovery_corrected_expectation,
)
from .qse import QseProblem, qse_correct, symmetry_qse
from .sampling import (
    direct_measurement_variance,
    importance_estimator,
    recovery_estimator,
    uniform_estimator,
)

DEFAULT_THETA = 2.0 * math.pi / 5.0
DEFAULT_PHI = math.pi / 3.0


@dataclass
class SweepConfig:
    p_min: float = 0.01
    p_max: float = 0.9
    steps: int = 60
    levels: tuple = (1, 2, 3, 4)
    state_theta: float = DEFAULT_THETA
    state_phi: float = DEFAULT_PHI
    code_path: str | None = None
    out_path: str = "sweep.csv"
    seed: int = 7
    drop_count: int = 2
    drop_trials: int = 20
    workers: int = 4
    dump_matrices: bool = False

    def __post_init__(self):
        if self.p_min > self.p_max:
            raise ValueError("p_min must not exceed p_max")
        if self.steps < 2:
            raise ValueError("steps must be at least 2")

    def grid(self) -> np.ndarray:
        if self.p_min <= 0.0:
            return np.linspace(self.p_min, self.p_max, self.steps)
        return np.geomspace(self.p_min, self.p_max, self.steps)


def load_config_code(config: SweepConfig) -> StabilizerCode:
    if config.code_path is None:
        ref = resources.files("qse_decode").joinpath("data/codes/five_one_three.code")
        from .codes import load_code

        return load_code(ref.read_text(encoding="utf-8"))
    return load_code_file(config.code_path)


def bundled_hamiltonian_path() -> str:
    ref = resources.files("qse_decode").joinpath(
        "data/hamiltonians/h2_sto3g_1p50.ham"
    )
    return str(ref)


def load_hamiltonian(path) -> PauliSum:
    """One `<label> <real coefficient>` per line; '#' starts a comment."""
    terms = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected '<label> <coefficient>'")
            terms.append((float(parts[1]), PauliString.from_label(parts[0])))
    if not terms:
        raise ValueError(f"{path} contains no terms")
    return PauliSum(terms)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12e}"


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def find_crossover(ps, encoded, physical) -> float | None:
    """First p where the encoded log-infidelity rises above the physical one,
    linearly interpolated in log p."""
    floor = 1e-300
    diffs = [
        math.log(max(e, floor)) - math.log(max(f, floor))
        for e, f in zip(encoded, physical)
    ]
    for i in range(len(ps) - 1):
        if not (math.isfinite(diffs[i]) and math.isfinite(diffs[i + 1])):
            continue
        if diffs[i] < 0.0 <= diffs[i + 1]:
            x0, x1 = math.log(ps[i]), math.log(ps[i + 1])
            t = diffs[i] / (diffs[i] - diffs[i + 1])
            return math.exp(x0 + t * (x1 - x0))
    return None


def _drop_eligible(level: int, drop_count: int) -> bool:
    return (2 ** level - 1) > drop_count


def _sweep_row(code, psi, reference, p, index, config, gate=None):
    """One grid point: bare, per-level, starred-replica, physical infidelities."""
    rho = psi.to_density()
    if gate is not None:
        rho = apply_pauli(rho, gate)
    rho = depolarize_each(rho, p)
    row = [p, 2.0 * p / 3.0, 1.0 - fidelity(rho, reference)]
    level_infs = {}
    for level in config.levels:
        try:
            state, _ = corrected_state(rho, code, level)
            level_infs[level] = 1.0 - fidelity(state, reference)
        except (NoCodeSupport, EmptySubspace):
            warnings.warn(f"level {level} at p={p}: no code-space support")
            level_infs[level] = float("nan")
        row.append(level_infs[level])
    for level in config.levels:
        if not _drop_eligible(level, config.drop_count):
            continue
        group = hierarchy_group(code, level)
        target = code_hamiltonian(code, level)
        vals = []
        for trial in range(config.drop_trials):
            rng = np.random.default_rng([config.seed, index, level, trial])
            drop = set(
                rng.choice(
                    np.arange(1, 2 ** level), size=config.drop_count, replace=False
                ).tolist()
            )
            ops = tuple(op for i, op in enumerate(group) if i not in drop)
            try:
                _, state = qse_correct(QseProblem(ops, target, rho))
                vals.append(1.0 - fidelity(state, reference))
            except (EmptySubspace, NoCodeSupport):
                vals.append(float("nan"))
        vals = np.array(vals)
        row.extend([float(np.mean(vals)), float(np.min(vals)), float(np.max(vals))])
    return row


def _sweep_header(config) -> list:
    header = ["p", "physical", "bare"]
    header += [f"l{level}" for level in config.levels]
    for level in config.levels:
        if _drop_eligible(level, config.drop_count):
            header += [
                f"l{level}_star_mean",
                f"l{level}_star_min",
                f"l{level}_star_max",
            ]
    return header


def _run_sweep(config: SweepConfig, gate_label: str | None):
    code = load_config_code(config)
    for level in config.levels:
        if not 0 <= level <= code.m:
            raise ValueError(f"level {level} outside [0, {code.m}]")
    psi = prepare_logical_state(code, config.state_theta, config.state_phi)
    gate = None
    reference = psi
    if gate_label is not None:
        gate = PauliString.from_label(gate_label)
        reference = StateVector(code.n, to_dense(gate) @ psi.amplitudes)
    ps = config.grid()

    def point(i):
        return _sweep_row(code, psi, reference, float(ps[i]), i, config, gate)

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        rows = list(pool.map(point, range(len(ps))))
    write_csv(config.out_path, _sweep_header(config), rows)
    top_level = max(config.levels)
    col = 3 + list(config.levels).index(top_level)
    crossover = find_crossover(
        [r[0] for r in rows], [r[col] for r in rows], [r[1] for r in rows]
    )
    return rows, crossover


def cmd_threshold(config: SweepConfig):
    """Depolarize a prepared logical state and sweep every correction level."""
    rows, crossover = _run_sweep(config, gate_label=None)
    _print_crossover(crossover, max(config.levels))
    return rows, crossover


def cmd_transversal_x(config: SweepConfig):
    """Same sweep after a transversal X on every qubit; fidelity against the
    logical X applied to the ideal state."""
    code = load_config_code(config)
    rows, crossover = _run_sweep(config, gate_label="X" * code.n)
    _print_crossover(crossover, max(config.levels))
    return rows, crossover


def _print_crossover(crossover, level):
    if crossover is None:
        print(f"l={level} curve never crosses the physical curve on this grid")
    else:
        print(f"pseudo-threshold crossover (l={level} vs physical): p* = {crossover:.4f}")


def cmd_molecule(config: SweepConfig, hamiltonian_path=None, generator_labels=None):
    """Depolarize the exact molecular ground state; symmetry QSE per level."""
    if hamiltonian_path is None:
        hamiltonian_path = bundled_hamiltonian_path()
    if generator_labels is None:
        generator_labels = ["ZIZI", "IZIZ", "XXXX"]
    hamiltonian = load_hamiltonian(hamiltonian_path)
    generators = [PauliString.from_label(lbl) for lbl in generator_labels]
    for g in generators:
        if g.n_qubits != hamiltonian.n_qubits:
            raise ValueError(f"generator {g.label()} does not match the Hamiltonian")
    dense_h = to_dense(hamiltonian)
    evals, evecs = np.linalg.eigh(dense_h)
    ground = StateVector(hamiltonian.n_qubits, evecs[:, 0])
    levels = list(range(len(generators) + 1))
    ps = config.grid()

    def point(i):
        p = float(ps[i])
        rho = depolarize_each(ground.to_density(), p)
        bare_f = fidelity(rho, ground)
        row = [p, bare_f, 1.0 - bare_f]
        infs = {}
        for level in levels:
            try:
                result = symmetry_qse(rho, generators, hamiltonian, level, reference=ground)
                f_l = result.fidelity
                row.extend([f_l, 1.0 - f_l, result.energy])
                infs[level] = 1.0 - f_l
            except (EmptySubspace, NoCodeSupport):
                warnings.warn(f"level {level} at p={p}: empty subspace")
                row.extend([float("nan")] * 3)
                infs[level] = float("nan")
        full_inf = infs[levels[-1]]
        bare_inf = 1.0 - bare_f
        if full_inf == 0.0:
            ratio = float("inf") if bare_inf > 0 else 1.0
        else:
            ratio = bare_inf / full_inf
        row.append(ratio)
        return row

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        rows = list(pool.map(point, range(len(ps))))
    header = ["p", "bare_fidelity", "bare_infidelity"]
    for level in levels:
        header += [f"l{level}_fidelity", f"l{level}_infidelity", f"l{level}_energy"]
    header.append("improvement_full")
    write_csv(config.out_path, header, rows)
    if config.dump_matrices:
        _dump_qse_matrices(config, generators, hamiltonian, ground, levels, float(ps[0]))
    ratios = [r[-1] for r in rows]
    peak = max(ratios)
    print(f"exact ground energy: {evals[0]:.10f}")
    print(f"peak infidelity improvement at full level: {peak:.3f}x")
    return rows, peak


def _dump_qse_matrices(config, generators, hamiltonian, ground, levels, p):
    """Write the subspace H and S matrices at the first grid point per level."""
    from .qse import build_qse_matrices, symmetry_hierarchy

    rho = depolarize_each(ground.to_density(), p)
    for level in levels:
        ops = symmetry_hierarchy(generators, level) if generators else []
        if not ops:
            ops = [PauliString.identity(hamiltonian.n_qubits)]
        h, s = build_qse_matrices(
            QseProblem(tuple(ops), hamiltonian, rho)
        )
        for name, mat in (("H", h), ("S", s)):
            path = f"{config.out_path}.l{level}.{name}.csv"
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                for row in mat:
                    fh.write(",".join(f"{v.real:.12e}{v.imag:+.12e}j" for v in row) + "\n")


def cmd_estimate(config: SweepConfig, scheme: str, n_samples: int,
                 observable_label: str | None = None, p_weight: float = 0.3):
    """Run one estimator on the configured noisy state next to its oracle."""
    if scheme not in ("uniform", "importance", "recovery"):
        raise ValueError(f"unknown scheme {scheme!r}")
    code = load_config_code(config)
    psi = prepare_logical_state(code, config.state_theta, config.state_phi)
    rho = depolarize_each(psi.to_density(), config.p_min)
    if observable_label is None:
        obs = PauliSum([(1.0, code.logical_z[0])])
    else:
        obs = PauliSum([(1.0, PauliString.from_label(observable_label))])
    level = max(config.levels)
    if scheme == "uniform":
        report = uniform_estimator(rho, code, level, obs, n_samples, config.seed)
        oracle = corrected_expectation(rho, obs, code, level).numerator
    elif scheme == "importance":
        report = importance_estimator(
            rho, code, level, obs, n_samples, config.seed, p_weight
        )
        oracle = corrected_expectation(rho, obs, code, level).numerator
    else:
        table = build_syndrome_table(code)
        report = recovery_estimator(rho, code, obs, table, None, n_samples, config.seed)
        oracle = recovery_corrected_expectation(rho, obs, code, table).numerator
    header = [
        "scheme", "seed", "n_samples", "estimate",
        "empirical_variance", "predicted_variance", "p_plus", "oracle",
    ]
    row = [
        report.scheme, report.seed, report.sample_count, report.estimate,
        report.empirical_variance, report.predicted_variance, report.p_plus, oracle,
    ]
    with open(config.out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        fh.write(",".join(v if isinstance(v, str) else _fmt(v) for v in row) + "\n")
    print(
        f"{scheme}: estimate = {report.estimate:.6f}, oracle = {oracle:.6f}, "
        f"direct-measurement variance = {direct_measurement_variance(rho, obs):.6f}"
    )
    return report, oracle


def _parse_levels(text: str) -> tuple:
    return tuple(int(tok) for tok in text.split(",") if tok != "")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qse-decode",
        description="Post-processing error decoding experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("threshold", "pseudo-threshold sweep"),
        ("transversal-x", "sweep after a noisy transversal logical X"),
        ("molecule", "symmetry-QSE mitigation of a molecular ground state"),
        ("estimate", "stochastic estimator vs dense oracle"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--p-min", type=float, default=0.01)
        p.add_argument("--p-max", type=float, default=0.9)
        p.add_argument("--steps", type=int, default=60)
        p.add_argument("--levels", type=_parse_levels, default=(1, 2, 3, 4))
        p.add_argument("--theta", type=float, default=DEFAULT_THETA)
        p.add_argument("--phi", type=float, default=DEFAULT_PHI)
        p.add_argument("--code", type=str, default=None)
        p.add_argument("--out", type=str, default=f"{name.replace('-', '_')}.csv")
        p.add_argument("--seed", type=int, default=7)
        p.add_argument("--drop-count", type=int, default=2)
        p.add_argument("--drop-trials", type=int, default=20)
        p.add_argument("--workers", type=int, default=4)
        p.add_argument("--dump-matrices", action="store_true")
        if name == "molecule":
            p.add_argument("--hamiltonian", type=str, default=None)
            p.add_argument("--generators", type=str, default="ZIZI,IZIZ,XXXX")
        if name == "estimate":
            p.add_argument("--scheme", type=str, default="uniform",
                           choices=("uniform", "importance", "recovery"))
            p.add_argument("--shots", type=int, default=100_000)
            p.add_argument("--observable", type=str, default=None)
            p.add_argument("--p-weight", type=float, default=0.3)
    return parser


def config_from_args(args) -> SweepConfig:
    return SweepConfig(
        p_min=args.p_min,
        p_max=args.p_max,
        steps=args.steps,
        levels=tuple(args.levels),
        state_theta=args.theta,
        state_phi=args.phi,
        code_path=args.code,
        out_path=args.out,
        seed=args.seed,
        drop_count=args.drop_count,
        drop_trials=args.drop_trials,
        workers=args.workers,
        dump_matrices=args.dump_matrices,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = config_from_args(args)
    if args.command == "threshold":
        cmd_threshold(config)
    elif args.command == "transversal-x":
        cmd_transversal_x(config)
    elif args.command == "molecule":
        generators = [tok for tok in args.generators.split(",") if tok]
        cmd_molecule(config, args.hamiltonian, generators)
    elif args.command == "estimate":
        cmd_estimate(config, args.scheme, args.shots, args.observable, args.p_weight)
    else:  # pragma: no cover
        raise AssertionError(args.command)
    return 0


if __name__ == "__main__":
    sys.exit(main())
