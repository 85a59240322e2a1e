#!/usr/bin/env python3
"""From an FCIDUMP file to a qubit Hamiltonian and its exact spectrum.

Walks the full ingestion path on the minimal-basis hydrogen molecule:
parse the integrals, map them onto qubits with the alternating
alpha/beta layout, and diagonalize inside the (N, Sz) symmetry sectors.
"""

from spinvqe import (
    PauliString,
    build_qubit_hamiltonian,
    casci_energy,
    parse_fcidump,
    sector_basis,
    sector_spectrum,
)

H2_FCIDUMP = """\
&FCI NORB=2, NELEC=2, MS2=0,
&END
 0.6747527484570061 1 1 1 1
 0.6634581794290802 1 1 2 2
 0.1812876358123322 2 1 2 1
 0.6976513465939586 2 2 2 2
-1.2524635735648981 1 1 0 0
-0.4759487152209648 2 2 0 0
 0.7137539936876182 0 0 0 0
"""

ints = parse_fcidump(H2_FCIDUMP)
print(f"active space: {ints.n_orb} orbitals, {ints.n_electrons} electrons")
print(f"core energy:  {ints.core_energy:+.10f} Hartree")

# Two spatial orbitals become four qubits (qubit 2p = alpha of orbital p).
hamiltonian = build_qubit_hamiltonian(ints)
print(f"\nqubit Hamiltonian: {len(hamiltonian)} Pauli terms on "
      f"{hamiltonian.n_qubits} qubits")
print("largest terms (coefficient, letters with most-significant qubit first):")
terms = sorted(hamiltonian.sorted_terms(), key=lambda t: -abs(t[2]))
for x, z, c in terms[:6]:
    print(f"  {c.real:+.6f}  {PauliString(4, x, z).letters()}")

# The Hamiltonian conserves N and Sz, so the 16-dimensional space splits
# into small sectors; (N=2, Sz=0) holds the chemistry.
basis = sector_basis(4, 2, 0)
print(f"\n(N=2, Sz=0) sector dimension: {basis.size}")
spectrum = sector_spectrum(hamiltonian, 2, 0)
for energy, s2 in zip(spectrum.eigenvalues, spectrum.s_squared):
    print(f"  E = {energy:+.10f} Hartree   <S^2> = {s2:.6f}")

print(f"\nlowest singlet (FCI): {casci_energy(ints, 2, 0):+.10f} Hartree")
print(f"lowest triplet (FCI): {casci_energy(ints, 2, 1):+.10f} Hartree")
