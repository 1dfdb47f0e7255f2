"""Stabilizer code definitions, check-operator hierarchies, and syndrome tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .errors import CodeValidationError, DimensionMismatch, SyndromeCollision
from .pauli import PauliString, commutes, multiply


@dataclass(frozen=True)
class StabilizerCode:
    """An [[n, k, d]] stabilizer code.

    Generators are kept in listing order; the check-operator hierarchy and all
    syndrome bit vectors follow that order.  The distance is unvalidated
    metadata.
    """

    n: int
    k: int
    generators: tuple
    logical_x: tuple
    logical_z: tuple
    d: int | None = None
    error_set: tuple = field(default=(), compare=False)

    @property
    def m(self) -> int:
        return len(self.generators)

    def __post_init__(self):
        validate_code(self)

    def correctable_errors(self) -> list:
        """Declared error list, or {identity} + all weight-1 Paulis by default."""
        if self.error_set:
            return [e for e, _ in self.error_set]
        errors = [PauliString.identity(self.n)]
        for q in range(self.n):
            for kind in "XYZ":
                errors.append(PauliString.single(self.n, q, kind))
        return errors

    def error_priors(self) -> list | None:
        """Priors parallel to error_set when every entry carries one."""
        if self.error_set and all(p is not None for _, p in self.error_set):
            return [p for _, p in self.error_set]
        return None


def _gf2_rank(rows: list) -> int:
    rank = 0
    rows = [r for r in rows if r]
    while rows:
        pivot = rows.pop()
        if pivot == 0:
            continue
        rank += 1
        low = pivot & -pivot
        rows = [r ^ pivot if r & low else r for r in rows]
        rows = [r for r in rows if r]
    return rank


def validate_code(code: StabilizerCode) -> None:
    n, k, m = code.n, code.k, code.m
    if k < 1:
        raise CodeValidationError(f"k must be >= 1, got {k}")
    if len(code.logical_x) != k or len(code.logical_z) != k:
        raise CodeValidationError(
            f"expected {k} logical_x and logical_z operators, got "
            f"{len(code.logical_x)} and {len(code.logical_z)}"
        )
    if n - m != k:
        raise CodeValidationError(f"n - m = {n - m} does not match k = {k}")
    for ops, name in ((code.generators, "stabilizer"), (code.logical_x, "logical_x"),
                      (code.logical_z, "logical_z")):
        for op in ops:
            if op.n_qubits != n:
                raise CodeValidationError(f"{name} {op.label()} is not on {n} qubits")
            if not op.is_hermitian:
                raise CodeValidationError(f"{name} {op.label()} has a non-real phase")
    gens = code.generators
    for i in range(m):
        for j in range(i + 1, m):
            if not commutes(gens[i], gens[j]):
                raise CodeValidationError(
                    f"generators {gens[i].label()} and {gens[j].label()} anticommute"
                )
    for i in range(k):
        for g in gens:
            for lop, name in ((code.logical_x[i], "logical_x"), (code.logical_z[i], "logical_z")):
                if not commutes(lop, g):
                    raise CodeValidationError(
                        f"{name} {lop.label()} anticommutes with generator {g.label()}"
                    )
        if commutes(code.logical_x[i], code.logical_z[i]):
            raise CodeValidationError(
                f"logical pair {i} must anticommute: "
                f"{code.logical_x[i].label()} vs {code.logical_z[i].label()}"
            )
        for j in range(k):
            if j == i:
                continue
            for a, b in ((code.logical_x[i], code.logical_x[j]),
                         (code.logical_x[i], code.logical_z[j]),
                         (code.logical_z[i], code.logical_z[j])):
                if not commutes(a, b):
                    raise CodeValidationError(
                        f"logical operators {a.label()} and {b.label()} anticommute"
                    )
    # independence over GF(2): symplectic rows (x | z) as 2n-bit integers
    rows = [(g.x << n) | g.z for g in gens]
    if _gf2_rank(rows) != m:
        raise CodeValidationError("generators are not independent over GF(2)")


def load_code(text: str) -> StabilizerCode:
    """Parse the plain-text code format (one directive per line)."""
    n = k = d = None
    gens, lx, lz, errors = [], [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind, args = parts[0], parts[1:]
        try:
            if kind == "n":
                n = int(args[0])
            elif kind == "k":
                k = int(args[0])
            elif kind == "d":
                d = int(args[0])
            elif kind == "stabilizer":
                gens.append(PauliString.from_label(args[0]))
            elif kind == "logical_x":
                lx.append(PauliString.from_label(args[0]))
            elif kind == "logical_z":
                lz.append(PauliString.from_label(args[0]))
            elif kind == "error":
                prior = float(args[1]) if len(args) > 1 else None
                errors.append((PauliString.from_label(args[0]), prior))
            else:
                raise CodeValidationError(f"unknown directive {kind!r}")
        except (IndexError, ValueError) as exc:
            raise CodeValidationError(f"line {lineno}: {raw.strip()!r}: {exc}") from exc
    if n is None or k is None:
        raise CodeValidationError("code file must declare n and k")
    try:
        return StabilizerCode(
            n=n, k=k, d=d,
            generators=tuple(gens),
            logical_x=tuple(lx),
            logical_z=tuple(lz),
            error_set=tuple(errors),
        )
    except CodeValidationError:
        raise
    except DimensionMismatch as exc:
        raise CodeValidationError(str(exc)) from exc


def load_code_file(path) -> StabilizerCode:
    with open(path, "r", encoding="utf-8") as fh:
        return load_code(fh.read())


def bundled_code(name: str) -> StabilizerCode:
    """Load one of the shipped code files by stem, e.g. "five_one_three"."""
    ref = resources.files("qse_decode").joinpath(f"data/codes/{name}.code")
    return load_code(ref.read_text(encoding="utf-8"))


def hierarchy_group(code: StabilizerCode, l: int) -> list:
    """The 2^l products of subsets of the first l generators, exact phases kept.

    Expanding prod_{i<=l} (I + S_i) term by term; element chi multiplies the
    generators whose bit is set in chi, so index 0 is the identity.
    """
    if not 0 <= l <= code.m:
        raise ValueError(f"level l={l} outside [0, {code.m}]")
    elements = [PauliString.identity(code.n)]
    for i in range(l):
        gen = code.generators[i]
        elements = elements + [multiply(e, gen) for e in elements]
    return elements


def syndrome(code: StabilizerCode, e: PauliString) -> tuple:
    """Bit j is 1 iff e anticommutes with generator j."""
    if e.n_qubits != code.n:
        raise DimensionMismatch(
            f"error on {e.n_qubits} qubits against a {code.n}-qubit code"
        )
    return tuple(0 if commutes(e, g) else 1 for g in code.generators)


@dataclass(frozen=True)
class SyndromeTable:
    """Map from syndrome bit vectors to recovery Paulis.

    Recoveries equal the error operators themselves (Paulis are self-inverse
    up to phase), so applying the recovery returns the flagged subspace to the
    code space.
    """

    code: StabilizerCode
    entries: dict
    errors: tuple
    priors: tuple | None = None

    def recovery(self, syn: tuple) -> PauliString | None:
        return self.entries.get(tuple(syn))

    def __len__(self) -> int:
        return len(self.entries)


def build_syndrome_table(code: StabilizerCode, errors=None, priors=None) -> SyndromeTable:
    """Table over the given errors (defaults to the code's correctable set).

    The identity is always included.  Distinct errors with equal syndromes are
    rejected rather than silently decoded to one representative.
    """
    if errors is None:
        errors = code.correctable_errors()
        if priors is None:
            priors = code.error_priors()
    errors = list(errors)
    identity = PauliString.identity(code.n)
    if identity.key() not in {e.key() for e in errors}:
        errors = [identity] + errors
        if priors is not None:
            raise ValueError("priors supplied without an identity entry")
    seen: dict = {}
    entries: dict = {}
    for e in errors:
        syn = syndrome(code, e)
        if syn in entries:
            raise SyndromeCollision(
                f"errors {seen[syn].label()} and {e.label()} share syndrome {syn}"
            )
        entries[syn] = e.bare()
        seen[syn] = e
    if priors is not None:
        if len(priors) != len(errors):
            raise ValueError("priors must parallel the error list")
        total = float(sum(priors))
        priors = tuple(p / total for p in priors)
    return SyndromeTable(
        code=code,
        entries=entries,
        errors=tuple(e.bare() for e in errors),
        priors=priors,
    )
