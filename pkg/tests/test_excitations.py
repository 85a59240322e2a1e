import numpy as np
import pytest
from scipy.linalg import expm

from reference import dense_annihilation, dense_generator
from spinvqe.excitations import (
    DOUBLE,
    PAIR_DOUBLE,
    SINGLE,
    ExcitationGenerator,
    apply_excitation_exponential,
    apply_generator,
    one_body_transition,
)
from spinvqe.statevector import from_ket, random_state, zero_state


def random_generator(kind, n_qubits, rng):
    if kind == SINGLE:
        s, t = rng.choice(n_qubits, size=2, replace=False)
        return ExcitationGenerator(SINGLE, (int(s),), (int(t),))
    if kind == DOUBLE:
        picks = rng.choice(n_qubits, size=4, replace=False)
        return ExcitationGenerator(
            DOUBLE,
            tuple(sorted(int(v) for v in picks[:2])),
            tuple(sorted(int(v) for v in picks[2:])),
        )
    p, q = rng.choice(n_qubits // 2, size=2, replace=False)
    return ExcitationGenerator(PAIR_DOUBLE, (int(p),), (int(q),))


def test_generator_validation():
    with pytest.raises(ValueError):
        ExcitationGenerator(SINGLE, (1,), (1,))
    with pytest.raises(ValueError):
        ExcitationGenerator(DOUBLE, (2, 1), (3, 4))
    with pytest.raises(ValueError):
        ExcitationGenerator(DOUBLE, (1, 2), (2, 3))
    with pytest.raises(ValueError):
        ExcitationGenerator("triple", (1,), (2,))


def test_theta_zero_is_identity(rng):
    state = random_state(6, rng)
    gen = ExcitationGenerator(SINGLE, (0,), (3,))
    out = apply_excitation_exponential(state, gen, 0.0)
    assert np.array_equal(out.amplitudes, state.amplitudes)


def test_single_quarter_turn_moves_occupation():
    # |10> -> |01> under the 0 -> 1 excitation at theta = pi/2; the sign
    # is fixed by the parity convention, verified against the dense oracle.
    gen = ExcitationGenerator(SINGLE, (0,), (1,))
    state = from_ket("10")
    out = apply_excitation_exponential(state, gen, np.pi / 2.0)
    dense = expm((np.pi / 2.0) * dense_generator(gen, 2)) @ state.amplitudes
    assert np.max(np.abs(out.amplitudes - dense)) < 1e-12
    assert abs(out.amplitudes[ket_index_of("01")]) == pytest.approx(1.0)


def ket_index_of(ket):
    from spinvqe.statevector import ket_index

    return ket_index(ket)


@pytest.mark.parametrize("kind", [SINGLE, DOUBLE, PAIR_DOUBLE])
def test_exponential_matches_dense_expm(kind, rng):
    n = 8
    for _ in range(25):
        gen = random_generator(kind, n, rng)
        theta = float(rng.uniform(-np.pi, np.pi))
        state = random_state(n, rng)
        got = apply_excitation_exponential(state, gen, theta).amplitudes
        want = expm(theta * dense_generator(gen, n)) @ state.amplitudes
        assert np.max(np.abs(got - want)) <= 1e-12


@pytest.mark.parametrize("kind", [SINGLE, DOUBLE, PAIR_DOUBLE])
def test_generator_action_matches_dense(kind, rng):
    n = 6
    for _ in range(10):
        gen = random_generator(kind, n, rng)
        state = random_state(n, rng)
        got = apply_generator(state, gen).amplitudes
        want = dense_generator(gen, n) @ state.amplitudes
        assert np.max(np.abs(got - want)) <= 1e-13


@pytest.mark.parametrize("kind", [SINGLE, DOUBLE, PAIR_DOUBLE])
def test_unitarity_round_trip(kind, rng):
    n = 8
    for _ in range(10):
        gen = random_generator(kind, n, rng)
        theta = float(rng.uniform(-2.0, 2.0))
        state = random_state(n, rng)
        there = apply_excitation_exponential(state, gen, theta)
        back = apply_excitation_exponential(there, gen, -theta)
        assert np.max(np.abs(back.amplitudes - state.amplitudes)) <= 1e-12
        assert abs(there.norm() - 1.0) <= 1e-13


def test_generator_cubed_is_minus_generator(rng):
    # A^3 = -A is what makes the sin/cos polynomial exact
    n = 6
    for kind in (SINGLE, DOUBLE, PAIR_DOUBLE):
        gen = random_generator(kind, n, rng)
        a = dense_generator(gen, n)
        assert np.max(np.abs(a @ a @ a + a)) < 1e-12


def test_float32_support(rng):
    state = random_state(6, rng, dtype=np.complex64)
    gen = ExcitationGenerator(PAIR_DOUBLE, (0,), (2,))
    out = apply_excitation_exponential(state, gen, 0.37)
    assert out.dtype == np.complex64
    assert abs(out.norm() - 1.0) < 1e-5


def test_indices_out_of_range():
    state = zero_state(4)
    gen = ExcitationGenerator(SINGLE, (0,), (7,))
    with pytest.raises(ValueError):
        apply_excitation_exponential(state, gen, 0.1)


def test_one_body_transition_matches_dense(rng):
    n = 6
    state = random_state(n, rng)
    for _ in range(20):
        i, j = (int(v) for v in rng.integers(0, n, size=2))
        got = one_body_transition(state, i, j).amplitudes
        want = dense_annihilation(i, n).T @ dense_annihilation(j, n) @ state.amplitudes
        assert np.max(np.abs(got - want)) <= 1e-13
