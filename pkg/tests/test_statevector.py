import numpy as np
import pytest

from spinvqe.mapping import build_spin_observables
from spinvqe.pauli import PauliSum
from spinvqe.statevector import (
    StateVector,
    apply_pauli_sum,
    basis_state,
    expectation,
    from_ket,
    inner_product,
    ket_index,
    ket_string,
    load_state,
    random_state,
    reduced_density,
    save_state,
    set_deterministic_reduction,
    zero_state,
)


def test_ket_conventions():
    assert ket_index("10") == 1
    assert ket_index("01") == 2
    assert ket_index("1110101010") == 0b0101010111
    assert ket_string(1, 2) == "10"


def test_identity_application_scales():
    state = random_state(3, np.random.default_rng(1))
    out = apply_pauli_sum(state, PauliSum.identity(3, 2.0 - 1.0j))
    assert np.allclose(out.amplitudes, (2.0 - 1.0j) * state.amplitudes)


def test_x_flips_qubit():
    op = PauliSum(1)
    op.add_term(1, 0, 1.0)
    out = apply_pauli_sum(zero_state(1), op)
    assert out.amplitudes[1] == pytest.approx(1.0)
    assert out.amplitudes[0] == pytest.approx(0.0)


def test_apply_matches_dense_matrix(rng):
    n = 6
    for _ in range(10):
        op = PauliSum(n)
        for _ in range(8):
            op.add_term(int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)),
                        complex(rng.normal(), rng.normal()))
        state = random_state(n, rng)
        got = apply_pauli_sum(state, op).amplitudes
        want = op.to_dense() @ state.amplitudes
        assert np.max(np.abs(got - want)) <= 1e-12


def test_streaming_path_matches_compiled(rng, monkeypatch):
    import spinvqe.statevector as sv

    n = 5
    op = PauliSum(n)
    for _ in range(12):
        op.add_term(int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)),
                    complex(rng.normal(), rng.normal()))
    state = random_state(n, rng)
    compiled = apply_pauli_sum(state, op).amplitudes
    monkeypatch.setattr(sv, "_COMPILED_BUDGET", 1)
    streamed = apply_pauli_sum(state, op).amplitudes
    assert np.max(np.abs(compiled - streamed)) < 1e-13


def test_expectation_of_number_operator():
    _, _, number = build_spin_observables(5)
    assert expectation(zero_state(10), number) == pytest.approx(0.0)
    assert expectation(from_ket("1110101010"), number) == pytest.approx(6.0)


def test_expectation_rejects_non_hermitian():
    op = PauliSum(1)
    op.add_term(1, 0, 1.0j)
    with pytest.raises(ValueError, match="hermitian"):
        expectation(zero_state(1), op)


def test_expectation_above_ground_state(rng):
    from spinvqe.integrals import random_integrals
    from spinvqe.mapping import build_qubit_hamiltonian

    ints = random_integrals(2, 1, 1, rng)
    ham = build_qubit_hamiltonian(ints)
    e_min = float(np.linalg.eigvalsh(ham.to_dense())[0])
    for _ in range(100):
        state = random_state(4, rng)
        assert expectation(state, ham) >= e_min - 1e-10


def test_inner_product_properties(rng):
    a = random_state(4, rng)
    b = random_state(4, rng)
    assert inner_product(a, a) == pytest.approx(1.0)
    assert inner_product(a, b) == pytest.approx(np.conj(inner_product(b, a)), abs=1e-14)


def test_reference_kets_are_orthogonal():
    a = from_ket("1111110000")
    b = from_ket("1110101010")
    assert inner_product(a, b) == 0.0


def test_deterministic_flag_round_trip(rng):
    op = PauliSum(3)
    for _ in range(6):
        op.add_term(int(rng.integers(0, 8)), int(rng.integers(0, 8)),
                    complex(rng.normal(), 0.0))
    state = random_state(3, rng)
    try:
        set_deterministic_reduction(True)
        first = expectation(state, op)
        second = expectation(state, op)
    finally:
        set_deterministic_reduction(False)
    assert first == second


def test_reduced_density_doubly_occupied_orbital():
    rho = reduced_density(from_ket("1111110000"), [1])
    assert np.allclose(rho, np.diag([0.0, 0.0, 0.0, 1.0]))


def test_reduced_density_alpha_single():
    rho = reduced_density(from_ket("1110101010"), [2])
    assert np.allclose(rho, np.diag([0.0, 1.0, 0.0, 0.0]))


def test_reduced_density_triplet_superposition_orbital2():
    inv = 1.0 / np.sqrt(2.0)
    state = from_ket("1111001010")
    state.amplitudes = inv * (
        from_ket("1111001010").amplitudes - from_ket("1111100010").amplitudes
    )
    eigs = np.sort(np.linalg.eigvalsh(reduced_density(state, [2])))[::-1]
    assert np.allclose(eigs, [0.5, 0.5, 0.0, 0.0], atol=1e-12)


def test_reduced_density_properties(rng):
    for _ in range(10):
        state = random_state(8, rng)
        orbitals = list(rng.choice(4, size=2, replace=False))
        rho = reduced_density(state, [int(o) for o in orbitals])
        assert abs(np.trace(rho) - 1.0) <= 1e-13
        assert np.max(np.abs(rho - rho.conj().T)) <= 1e-13
        eigs = np.linalg.eigvalsh(rho)
        assert eigs.min() >= -1e-12
        assert eigs.max() <= 1.0 + 1e-12
        assert abs(eigs.sum() - 1.0) <= 1e-12


def test_reduced_density_validates_indices():
    state = zero_state(4)
    with pytest.raises(ValueError):
        reduced_density(state, [0, 0])
    with pytest.raises(ValueError):
        reduced_density(state, [2])
    with pytest.raises(ValueError):
        reduced_density(state, [])


def test_snapshot_round_trip(tmp_path, rng):
    state = random_state(5, rng)
    path = tmp_path / "state.svec"
    save_state(state, path)
    back = load_state(path)
    assert back.n_qubits == 5
    assert back.dtype == np.complex128
    assert np.array_equal(back.amplitudes, state.amplitudes)


def test_snapshot_f32_round_trip(tmp_path, rng):
    state = random_state(4, rng, dtype=np.complex64)
    path = tmp_path / "state32.svec"
    save_state(state, path)
    back = load_state(path)
    assert back.dtype == np.complex64
    assert np.array_equal(back.amplitudes, state.amplitudes)


def test_snapshot_rejects_truncation(tmp_path, rng):
    state = random_state(3, rng)
    path = tmp_path / "state.svec"
    save_state(state, path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-8])
    with pytest.raises(ValueError, match="length"):
        load_state(path)


def test_norm_check():
    state = zero_state(2)
    state.amplitudes = state.amplitudes * 2.0
    with pytest.raises(ValueError, match="norm"):
        state.check_normalized()
