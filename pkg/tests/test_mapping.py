import numpy as np
import pytest

from reference import dense_annihilation, dense_hamiltonian, dense_number, dense_s2
from spinvqe.integrals import ActiveSpaceIntegrals, random_integrals
from spinvqe.mapping import (
    build_qubit_hamiltonian,
    build_spin_observables,
    jw_lowering,
    jw_number,
    jw_raising,
)
from spinvqe.pauli import PauliSum
from spinvqe.statevector import expectation, from_ket


def test_lowering_base_case():
    op = jw_lowering(0, 1)
    # (X + iY)/2
    assert op.coefficient(1, 0) == pytest.approx(0.5)
    assert op.coefficient(1, 1) == pytest.approx(0.5j)


def test_lowering_with_parity_string():
    op = jw_lowering(1, 2)
    # Z on qubit 0, (X + iY)/2 on qubit 1
    assert op.coefficient(0b10, 0b01) == pytest.approx(0.5)
    assert op.coefficient(0b10, 0b11) == pytest.approx(0.5j)


def test_raising_is_adjoint():
    op = jw_raising(1, 2)
    assert op.coefficient(0b10, 0b01) == pytest.approx(0.5)
    assert op.coefficient(0b10, 0b11) == pytest.approx(-0.5j)


def test_index_out_of_range():
    with pytest.raises(ValueError):
        jw_lowering(2, 2)
    with pytest.raises(ValueError):
        jw_number(-1, 2)


def test_ladder_operators_match_dense():
    for n in (1, 2, 4):
        for j in range(n):
            got = jw_lowering(j, n).to_dense()
            assert np.max(np.abs(got - dense_annihilation(j, n))) < 1e-14


def test_car_algebra():
    # {a_j, a+_k} = delta_jk I and {a_j, a_k} = 0, symbolically
    n = 6
    identity = PauliSum.identity(n)
    for j in range(n):
        for k in range(n):
            aj = jw_lowering(j, n)
            ak = jw_lowering(k, n)
            ck = jw_raising(k, n)
            anti = aj * ck + ck * aj
            anti.prune()
            if j == k:
                diff = anti - identity
                diff.prune()
                assert len(diff) == 0
            else:
                assert len(anti) == 0
            zero = aj * ak + ak * aj
            zero.prune()
            assert len(zero) == 0


def one_orbital_instance():
    return ActiveSpaceIntegrals(
        n_orb=1, n_alpha=1, n_beta=1, core_energy=0.0,
        h=np.array([[-1.0]]), g=np.full((1, 1, 1, 1), 0.5),
    )


def test_hamiltonian_single_orbital_diagonal():
    ham = build_qubit_hamiltonian(one_orbital_instance())
    dense = ham.to_dense()
    assert np.max(np.abs(dense - np.diag(np.diag(dense)))) < 1e-12
    diag = np.real(np.diag(dense))
    assert diag[0b00] == pytest.approx(0.0)
    assert diag[0b01] == pytest.approx(-1.0)
    assert diag[0b10] == pytest.approx(-1.0)
    assert diag[0b11] == pytest.approx(-1.5)


def test_hamiltonian_zero_integrals_is_scaled_identity():
    ints = ActiveSpaceIntegrals(
        n_orb=2, n_alpha=1, n_beta=1, core_energy=0.75,
        h=np.zeros((2, 2)), g=np.zeros((2,) * 4),
    )
    ham = build_qubit_hamiltonian(ints)
    assert len(ham) == 1
    assert ham.coefficient(0, 0) == pytest.approx(0.75)


def test_hamiltonian_is_hermitian(rng):
    ints = random_integrals(2, 1, 1, rng)
    ham = build_qubit_hamiltonian(ints)
    assert ham.max_imag_coefficient() <= 1e-12


def test_isospectral_with_fermionic_ci(rng):
    for _ in range(5):
        ints = random_integrals(2, 1, 1, rng)
        qubit = np.linalg.eigvalsh(build_qubit_hamiltonian(ints).to_dense())
        fermi = np.linalg.eigvalsh(dense_hamiltonian(ints))
        assert np.max(np.abs(qubit - fermi)) <= 1e-9


def test_hamiltonian_commutes_with_number(rng):
    ints = random_integrals(2, 1, 1, rng)
    ham = build_qubit_hamiltonian(ints)
    _, _, number = build_spin_observables(2)
    comm = ham * number - number * ham
    comm.prune()
    assert len(comm) == 0


def test_spin_observables_commute():
    s2, sz, _ = build_spin_observables(3)
    comm = s2 * sz - sz * s2
    comm.prune()
    assert len(comm) == 0


def test_spin_observables_match_dense():
    for m in (1, 2):
        s2, sz, number = build_spin_observables(m)
        assert np.max(np.abs(s2.to_dense() - dense_s2(m))) < 1e-12
        assert np.max(np.abs(number.to_dense() - dense_number(2 * m))) < 1e-12
        assert sz.is_hermitian(1e-14)


def test_spin_values_on_singlet_ket():
    s2, sz, number = build_spin_observables(5)
    state = from_ket("1111110000")
    assert expectation(state, s2) == pytest.approx(0.0, abs=1e-12)
    assert expectation(state, sz) == pytest.approx(0.0, abs=1e-12)
    assert expectation(state, number) == pytest.approx(6.0)


def test_spin_values_on_quintet_ket():
    s2, sz, number = build_spin_observables(5)
    state = from_ket("1110101010")
    assert expectation(state, s2) == pytest.approx(6.0)
    assert expectation(state, sz) == pytest.approx(2.0)
    assert expectation(state, number) == pytest.approx(6.0)


def test_spin_values_on_triplet_superposition():
    s2, _, _ = build_spin_observables(5)
    inv = 1.0 / np.sqrt(2.0)
    a = from_ket("1111001010")
    b = from_ket("1111100010")
    state = a
    state.amplitudes = inv * a.amplitudes - inv * b.amplitudes
    assert expectation(state, s2) == pytest.approx(2.0, abs=1e-12)
