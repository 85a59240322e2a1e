import numpy as np
import pytest

from reference import dense_hamiltonian
from spinvqe.exact import (
    EmptySectorError,
    NoSpinStateError,
    casci_energy,
    restricted_matrix,
    sector_basis,
    sector_dimensions,
    sector_spectrum,
)
from spinvqe.integrals import (
    ActiveSpaceIntegrals,
    OrbitalRotation,
    load_fcidump,
    random_integrals,
    rotate_integrals,
)
from spinvqe.mapping import build_qubit_hamiltonian
from spinvqe.statevector import ket_index


def test_sector_basis_small_cases():
    # 2 orbitals (4 qubits), N=2, Sz=0: one alpha (even qubit) and one
    # beta (odd qubit) electron -> 4 strings, enumerated exhaustively
    basis = sector_basis(4, 2, 0)
    expected = sorted(
        ket_index(ket) for ket in ("1100", "1001", "0110", "0011")
    )
    assert sorted(int(b) for b in basis) == expected

    assert [int(b) for b in sector_basis(2, 2, 0)] == [ket_index("11")]
    assert [int(b) for b in sector_basis(4, 0, 0)] == [0]


def test_sector_basis_empty_sector():
    with pytest.raises(EmptySectorError):
        sector_basis(4, 1, 0)  # one electron cannot have Sz = 0


def test_sector_dimensions_partition_full_space():
    for n in (2, 4, 6):
        dims = sector_dimensions(n)
        assert sum(dims.values()) == 1 << n


def test_restricted_matrix_is_hermitian_block(rng):
    ints = random_integrals(2, 1, 1, rng)
    ham = build_qubit_hamiltonian(ints)
    basis = sector_basis(4, 2, 0)
    mat = restricted_matrix(ham, basis, 4)
    assert np.max(np.abs(mat - mat.conj().T)) <= 1e-12


def test_sector_spectrum_matches_full_diagonalization(rng):
    ints = random_integrals(2, 1, 1, rng)
    ham = build_qubit_hamiltonian(ints)
    full = np.linalg.eigvalsh(ham.to_dense())
    collected = []
    for n_elec in range(5):
        for two_sz in range(-n_elec, n_elec + 1, 2):
            try:
                spec = sector_spectrum(ham, n_elec, two_sz)
            except EmptySectorError:
                continue
            collected.extend(spec.eigenvalues)
    assert np.max(np.abs(np.sort(collected) - full)) <= 1e-10


def test_casci_single_orbital_closed_form():
    ints = ActiveSpaceIntegrals(
        n_orb=1, n_alpha=1, n_beta=1, core_energy=0.0,
        h=np.array([[-1.0]]), g=np.full((1, 1, 1, 1), 0.5),
    )
    assert casci_energy(ints, 2, 0) == pytest.approx(-1.5)


def test_casci_matches_lowest_singlet_of_full_space(h2_integrals):
    ham = build_qubit_hamiltonian(h2_integrals)
    spec = sector_spectrum(ham, 2, 0)
    singlets = spec.eigenvalues[np.abs(spec.s_squared) < 1e-6]
    assert casci_energy(h2_integrals, 2, 0) == pytest.approx(
        float(singlets.min()), abs=1e-10
    )
    # independent fermionic CI cross-check over the same sector
    fermi = np.linalg.eigvalsh(dense_hamiltonian(h2_integrals))
    assert abs(casci_energy(h2_integrals, 2, 0) - fermi[0]) <= 1e-10


def test_casci_rotation_invariance(rng):
    ints = random_integrals(2, 1, 1, rng)
    rotated = rotate_integrals(
        ints, OrbitalRotation.from_upper(rng.uniform(-0.5, 0.5, size=(2, 2)))
    )
    for spin in (0, 1):
        assert casci_energy(rotated, 2, spin) == pytest.approx(
            casci_energy(ints, 2, spin), abs=1e-9
        )


def test_casci_no_state_of_requested_spin():
    ints = ActiveSpaceIntegrals(
        n_orb=1, n_alpha=1, n_beta=1, core_energy=0.0,
        h=np.array([[-1.0]]), g=np.full((1, 1, 1, 1), 0.5),
    )
    with pytest.raises((NoSpinStateError, EmptySectorError)):
        casci_energy(ints, 2, 2)


def test_spin_labels_are_near_integers(rng, toy4_integrals):
    ham = build_qubit_hamiltonian(toy4_integrals)
    spec = sector_spectrum(ham, 4, 0)
    allowed = np.array([s * (s + 1) for s in range(5)], dtype=float)
    for s2 in spec.s_squared:
        assert np.min(np.abs(allowed - s2)) <= 1e-8


def test_sparse_path_agrees_with_dense(toy4_integrals):
    import spinvqe.exact as exact_mod

    ham = build_qubit_hamiltonian(toy4_integrals)
    dense = sector_spectrum(ham, 4, 0)  # dimension 36, ARPACK applies
    original = exact_mod.DENSE_QUBIT_CAP
    try:
        exact_mod.DENSE_QUBIT_CAP = 2  # force the iterative branch
        sparse = sector_spectrum(ham, 4, 0, n_lowest=3)
    finally:
        exact_mod.DENSE_QUBIT_CAP = original
    assert sparse.eigenvalues.size == 3
    assert np.max(np.abs(sparse.eigenvalues - dense.eigenvalues[:3])) <= 1e-8
    assert np.max(np.abs(sparse.s_squared - dense.s_squared[:3])) <= 1e-6
