"""Generate the bundled H2 qubit Hamiltonian data file.

Minimal-basis (STO-3G) H2 at a chosen bond length: analytic one- and
two-electron integrals over contracted s-type Gaussians, symmetry-determined
RHF orbitals (gerade/ungerade combinations), Jordan-Wigner transform with
even-odd (alpha on even qubits, beta on odd) spin-orbital ordering, and a
Pauli decomposition of the dense Fock-space Hamiltonian.

Cross-checks before writing:
  * dense ground energy equals the 2x2 configuration-interaction energy,
  * the Hamiltonian commutes exactly with the alpha/beta parity operators,
  * particle-number expectation of the ground state is 2.

Run:  python3 scripts/make_h2_hamiltonian.py [bond_length_angstrom] [out_path]
"""

import math
import sys

import numpy as np

BOHR_PER_ANGSTROM = 1.0 / 0.529177210903

# STO-3G hydrogen 1s: exponents and contraction coefficients
STO3G_EXPS = [3.42525091, 0.62391373, 0.16885540]
STO3G_COEFS = [0.15432897, 0.53532814, 0.44463454]


def boys_f0(x):
    if x < 1e-12:
        return 1.0 - x / 3.0
    return 0.5 * math.sqrt(math.pi / x) * math.erf(math.sqrt(x))


def primitive_norm(alpha):
    return (2.0 * alpha / math.pi) ** 0.75


def overlap_prim(a, b, ra, rb):
    p = a + b
    ab2 = np.dot(ra - rb, ra - rb)
    return (math.pi / p) ** 1.5 * math.exp(-a * b / p * ab2)


def kinetic_prim(a, b, ra, rb):
    p = a + b
    ab2 = np.dot(ra - rb, ra - rb)
    mu = a * b / p
    return mu * (3.0 - 2.0 * mu * ab2) * (math.pi / p) ** 1.5 * math.exp(-mu * ab2)


def nuclear_prim(a, b, ra, rb, rc):
    p = a + b
    ab2 = np.dot(ra - rb, ra - rb)
    rp = (a * ra + b * rb) / p
    pc2 = np.dot(rp - rc, rp - rc)
    return -2.0 * math.pi / p * math.exp(-a * b / p * ab2) * boys_f0(p * pc2)


def eri_prim(a, b, c, d, ra, rb, rc, rd):
    p = a + b
    q = c + d
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    ab2 = np.dot(ra - rb, ra - rb)
    cd2 = np.dot(rc - rd, rc - rd)
    pq2 = np.dot(rp - rq, rp - rq)
    pref = 2.0 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))
    return (
        pref
        * math.exp(-a * b / p * ab2)
        * math.exp(-c * d / q * cd2)
        * boys_f0(p * q / (p + q) * pq2)
    )


def contracted(fn, centers, *indices):
    """Contract a primitive integral over the STO-3G expansion."""
    total = 0.0
    prims = [(e, c * primitive_norm(e)) for e, c in zip(STO3G_EXPS, STO3G_COEFS)]
    idx_centers = [centers[i] for i in indices]

    def rec(depth, exps, weight):
        nonlocal total
        if depth == len(indices):
            total += weight * fn(*exps, *idx_centers)
            return
        for e, w in prims:
            rec(depth + 1, exps + [e], weight * w)

    rec(0, [], 1.0)
    return total


def ao_integrals(r_bohr):
    centers = [np.zeros(3), np.array([0.0, 0.0, r_bohr])]
    nb = 2
    s = np.zeros((nb, nb))
    t = np.zeros((nb, nb))
    v = np.zeros((nb, nb))
    for i in range(nb):
        for j in range(nb):
            s[i, j] = contracted(overlap_prim, centers, i, j)
            t[i, j] = contracted(kinetic_prim, centers, i, j)
            for rc in centers:
                v[i, j] += contracted(
                    lambda a, b, ra, rb: nuclear_prim(a, b, ra, rb, rc), centers, i, j
                )
    eri = np.zeros((nb, nb, nb, nb))
    for i in range(nb):
        for j in range(nb):
            for k in range(nb):
                for l in range(nb):
                    eri[i, j, k, l] = contracted(eri_prim, centers, i, j, k, l)
    return s, t + v, eri


def mo_integrals(r_bohr):
    s, h_ao, eri_ao = ao_integrals(r_bohr)
    s12 = s[0, 1]
    cg = 1.0 / math.sqrt(2.0 * (1.0 + s12))
    cu = 1.0 / math.sqrt(2.0 * (1.0 - s12))
    c = np.array([[cg, cu], [cg, -cu]])
    h_mo = c.T @ h_ao @ c
    assert abs(h_mo[0, 1]) < 1e-12, "g/u symmetry should zero the off-diagonal"
    eri_mo = np.einsum("pi,qj,rk,sl,pqrs->ijkl", c, c, c, c, eri_ao, optimize=True)
    e_nuc = 1.0 / r_bohr
    return h_mo, eri_mo, e_nuc


def jw_lowering(n_qubits, p):
    """Dense annihilation operator a_p with Z strings on earlier qubits."""
    z = np.diag([1.0, -1.0]).astype(complex)
    lower = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |0><1|
    eye = np.eye(2, dtype=complex)
    out = np.array([[1.0 + 0j]])
    for q in range(n_qubits):
        if q < p:
            out = np.kron(out, z)
        elif q == p:
            out = np.kron(out, lower)
        else:
            out = np.kron(out, eye)
    return out


def fock_hamiltonian(h_mo, eri_mo, e_nuc):
    """Dense 16x16 Hamiltonian with even-odd spin-orbital ordering.

    Qubit 2p is spatial orbital p with alpha spin, qubit 2p+1 is beta.
    Chemist-notation assembly: H = E_nuc + sum h_PQ a+_P a_Q
    + (1/2) sum (PQ|RS) a+_P a+_R a_S a_Q with spin deltas.
    """
    n_so = 4
    spatial = [0, 0, 1, 1]
    spin = [0, 1, 0, 1]
    a_ops = [jw_lowering(n_so, p) for p in range(n_so)]
    dim = 2 ** n_so
    h = e_nuc * np.eye(dim, dtype=complex)
    for pq in range(n_so):
        for qq in range(n_so):
            if spin[pq] != spin[qq]:
                continue
            coeff = h_mo[spatial[pq], spatial[qq]]
            if abs(coeff) > 1e-14:
                h += coeff * a_ops[pq].conj().T @ a_ops[qq]
    for pq in range(n_so):
        for qq in range(n_so):
            if spin[pq] != spin[qq]:
                continue
            for rq in range(n_so):
                for sq in range(n_so):
                    if spin[rq] != spin[sq]:
                        continue
                    coeff = eri_mo[spatial[pq], spatial[qq], spatial[rq], spatial[sq]]
                    if abs(coeff) < 1e-14:
                        continue
                    h += 0.5 * coeff * (
                        a_ops[pq].conj().T
                        @ a_ops[rq].conj().T
                        @ a_ops[sq]
                        @ a_ops[qq]
                    )
    return h


def pauli_decompose(h):
    from qse_decode.pauli import PauliString, to_dense

    n = 4
    terms = []
    for x in range(16):
        for z in range(16):
            ps = PauliString(n, x, z)
            coeff = np.trace(to_dense(ps) @ h) / 16.0
            if abs(coeff) > 1e-12:
                assert abs(coeff.imag) < 1e-12
                terms.append((ps.label(), float(coeff.real)))
    return terms


def verify(h, h_mo, eri_mo, e_nuc, terms):
    from qse_decode.pauli import PauliString, to_dense

    # 2x2 CI over (g^2, u^2) is the exact singlet problem for this system
    hg, hu = h_mo[0, 0], h_mo[1, 1]
    jgg = eri_mo[0, 0, 0, 0]
    juu = eri_mo[1, 1, 1, 1]
    kgu = eri_mo[0, 1, 0, 1]
    ci = np.array([[2 * hg + jgg, kgu], [kgu, 2 * hu + juu]]) + e_nuc * np.eye(2)
    e_ci = np.linalg.eigvalsh(ci).min()
    evals, evecs = np.linalg.eigh(h)
    e_fci = evals.min()
    assert abs(e_fci - e_ci) < 1e-10, (e_fci, e_ci)

    # reconstruction from the written terms is exact
    recon = sum(c * to_dense(PauliString.from_label(lbl)) for lbl, c in terms)
    assert np.abs(recon - h).max() < 1e-10

    # exact alpha/beta parity symmetries; total-X is not a symmetry
    for lbl in ("ZIZI", "IZIZ"):
        par = to_dense(PauliString.from_label(lbl))
        assert np.abs(par @ h - h @ par).max() < 1e-10
    xxxx = to_dense(PauliString.from_label("XXXX"))
    assert np.abs(xxxx @ h - h @ xxxx).max() > 1e-6

    # ground state holds two particles
    num = sum(
        jw_lowering(4, p).conj().T @ jw_lowering(4, p) for p in range(4)
    )
    ground = evecs[:, 0]
    n_expect = (ground.conj() @ num @ ground).real
    assert abs(n_expect - 2.0) < 1e-8
    e_rhf = 2 * hg + jgg + e_nuc
    return e_fci, e_rhf


def main():
    r_angstrom = float(sys.argv[1]) if len(sys.argv) > 1 else 1.50
    out_path = (
        sys.argv[2]
        if len(sys.argv) > 2
        else "src/qse_decode/data/hamiltonians/h2_sto3g_1p50.ham"
    )
    r_bohr = r_angstrom * BOHR_PER_ANGSTROM
    h_mo, eri_mo, e_nuc = mo_integrals(r_bohr)
    h = fock_hamiltonian(h_mo, eri_mo, e_nuc)
    terms = pauli_decompose(h)
    e_fci, e_rhf = verify(h, h_mo, eri_mo, e_nuc, terms)
    lines = [
        "# H2 molecule, STO-3G minimal basis, bond length "
        f"{r_angstrom:.2f} angstrom ({r_bohr:.10f} bohr).",
        "# Restricted Hartree-Fock orbitals (gerade/ungerade), Jordan-Wigner",
        "# transform, even-odd spin-orbital ordering: qubit 2p = orbital p alpha,",
        "# qubit 2p+1 = orbital p beta.  Nuclear repulsion included in the",
        "# identity coefficient.  Energies in hartree.",
        f"# Generated by scripts/make_h2_hamiltonian.py; E_RHF = {e_rhf:.10f},",
        f"# E_FCI (dense diagonalization) = {e_fci:.10f}.",
    ]
    for lbl, coeff in terms:
        lines.append(f"{lbl} {coeff:.16e}")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(terms)} terms to {out_path}")
    print(f"E_RHF = {e_rhf:.10f}  E_FCI = {e_fci:.10f}  E_nuc = {e_nuc:.10f}")


if __name__ == "__main__":
    main()
