import numpy as np
import pytest

from spinvqe.ansatz import (
    KUPCCGSD,
    UCCGSD,
    AnsatzSpec,
    build_reference_T0,
    compile_ansatz,
)
from spinvqe.integrals import load_fcidump, random_integrals
from spinvqe.mapping import build_qubit_hamiltonian
from spinvqe.pauli import PauliSum
from spinvqe.statevector import inner_product
from spinvqe.vqe import (
    AdamParams,
    SaVqeProblem,
    ScheduleParams,
    VqeDivergenceError,
    run_vqe,
    sa_energy,
    sa_gradient,
    schedule_rate,
)

FAST_SCHEDULE = ScheduleParams(initial=5e-2, end=1e-2, boundary=200, width=200)


def test_schedule_defaults():
    params = ScheduleParams()
    assert schedule_rate(0, params) == pytest.approx(1e-2, abs=1e-15)
    assert schedule_rate(34999, params) == pytest.approx(1e-2, abs=1e-15)
    assert schedule_rate(35000, params) == pytest.approx(1e-2, abs=1e-15)
    # direct evaluation: 0.009 * (1 - 5000/10000)^2 + 0.001
    assert schedule_rate(40000, params) == pytest.approx(0.00325, abs=1e-15)
    assert schedule_rate(45000, params) == pytest.approx(1e-3, abs=1e-15)
    assert schedule_rate(10**6, params) == pytest.approx(1e-3, abs=1e-15)


def test_schedule_validation():
    with pytest.raises(ValueError):
        ScheduleParams(initial=1e-3, end=1e-2)
    with pytest.raises(ValueError):
        ScheduleParams(width=0)
    with pytest.raises(ValueError):
        schedule_rate(-1, ScheduleParams())


def _problem(ints, spins, spec=None, weights=None, **kw):
    program = compile_ansatz(
        spec or AnsatzSpec(flavor=KUPCCGSD, k=2),
        ints.n_orb,
        ints.n_alpha,
        ints.n_beta,
    )
    refs = [build_reference_T0(ints.n_orb, ints.n_electrons, s) for s in spins]
    if weights is None:
        weights = np.full(len(spins), 1.0 / len(spins))
    return SaVqeProblem(
        hamiltonian=build_qubit_hamiltonian(ints),
        references=refs,
        weights=weights,
        program=program,
        **kw,
    )


def test_sa_energy_identity_hamiltonian():
    program = compile_ansatz(AnsatzSpec(flavor=KUPCCGSD, k=1), 2, 1, 1)
    problem = SaVqeProblem(
        hamiltonian=PauliSum.identity(4, 0.625),
        references=[build_reference_T0(2, 2, 0)],
        weights=np.array([1.0]),
        program=program,
    )
    e_avg, energies = sa_energy(np.zeros(program.n_parameters), problem)
    assert e_avg == pytest.approx(0.625)
    assert energies[0] == pytest.approx(0.625)


def test_sa_energy_uniform_weights_is_mean(rng, toy4_integrals):
    problem = _problem(toy4_integrals, [0, 1, 2])
    theta = rng.uniform(-0.3, 0.3, size=problem.program.n_parameters)
    e_avg, energies = sa_energy(theta, problem)
    assert e_avg == pytest.approx(float(np.mean(energies)), abs=1e-14)


def test_sa_energy_bounded_by_sector_minima(rng, h2_integrals):
    from spinvqe.exact import casci_energy

    problem = _problem(h2_integrals, [0, 1])
    exact = [casci_energy(h2_integrals, 2, s) for s in (0, 1)]
    bound = float(np.dot(problem.weights, exact))
    for _ in range(10):
        theta = rng.uniform(-1.0, 1.0, size=problem.program.n_parameters)
        e_avg, _ = sa_energy(theta, problem)
        assert e_avg >= bound - 1e-9


def test_gradient_matches_finite_differences(rng, h2_integrals):
    problem = _problem(h2_integrals, [0, 1])
    n = problem.program.n_parameters
    h = 1e-5
    for _ in range(3):
        theta = rng.uniform(-0.5, 0.5, size=n)
        grad = sa_gradient(theta, problem)
        fd = np.empty(n)
        for i in range(n):
            up = theta.copy()
            up[i] += h
            down = theta.copy()
            down[i] -= h
            fd[i] = (sa_energy(up, problem)[0] - sa_energy(down, problem)[0]) / (2 * h)
        scale = max(np.max(np.abs(fd)), 1e-12)
        assert np.max(np.abs(grad - fd)) / scale <= 1e-6


def test_gradient_zero_for_redundant_rotations_at_reference(h2_integrals):
    # occupied-occupied and empty-empty generalized rotations annihilate a
    # closed-shell determinant, so their slopes vanish at theta = 0
    problem = _problem(h2_integrals, [0], spec=AnsatzSpec(flavor=UCCGSD))
    program = problem.program
    grad = sa_gradient(np.zeros(program.n_parameters), problem)
    occupied = {0, 1}
    for gen, slot in zip(program.generators, program.slots):
        if gen.kind == "single":
            src, tgt = gen.sources[0], gen.targets[0]
            if (src in occupied) == (tgt in occupied):
                assert abs(grad[slot]) <= 1e-12


def test_gradient_of_tied_slot_is_sum_of_partials(rng, h2_integrals):
    from spinvqe.ansatz import TYING_PAPER_COUNT

    tied_problem = _problem(
        h2_integrals, [0],
        spec=AnsatzSpec(flavor=KUPCCGSD, k=1, tying=TYING_PAPER_COUNT),
    )
    free_problem = _problem(
        h2_integrals, [0], spec=AnsatzSpec(flavor=KUPCCGSD, k=1)
    )
    tied = tied_problem.program
    free = free_problem.program
    theta_tied = rng.uniform(-0.4, 0.4, size=tied.n_parameters)
    theta_free = theta_tied[np.asarray(tied.slots)]
    assert theta_free.size == free.n_parameters
    g_tied = sa_gradient(theta_tied, tied_problem)
    g_free = sa_gradient(theta_free, free_problem)
    accumulated = np.zeros(tied.n_parameters)
    for free_slot, tied_slot in enumerate(tied.slots):
        accumulated[tied_slot] += g_free[free_slot]
    assert np.max(np.abs(accumulated - g_tied)) <= 1e-10


def test_run_vqe_single_orbital_closed_form(one_orbital_fcidump_path):
    ints = load_fcidump(one_orbital_fcidump_path)
    program = compile_ansatz(AnsatzSpec(flavor=KUPCCGSD, k=1), 2, 1, 1)
    # pad to two orbitals so the ansatz has something to rotate
    import numpy as np

    from spinvqe.integrals import ActiveSpaceIntegrals

    h = np.zeros((2, 2))
    h[0, 0] = ints.h[0, 0]
    h[1, 1] = 1.0  # push the second orbital well above
    g = np.zeros((2,) * 4)
    g[0, 0, 0, 0] = ints.g[0, 0, 0, 0]
    padded = ActiveSpaceIntegrals(
        n_orb=2, n_alpha=1, n_beta=1, core_energy=0.0, h=h, g=g
    )
    problem = SaVqeProblem(
        hamiltonian=build_qubit_hamiltonian(padded),
        references=[build_reference_T0(2, 2, 0)],
        weights=np.array([1.0]),
        program=program,
        tolerance=1e-9,
        max_steps=3000,
        window=30,
    )
    result = run_vqe(problem, FAST_SCHEDULE)
    assert result.converged
    assert result.energy_avg == pytest.approx(-1.5, abs=1e-6)


def test_run_vqe_h2_reaches_fci(h2_integrals):
    from spinvqe.exact import casci_energy

    problem = _problem(
        h2_integrals, [0],
        weights=np.array([1.0]),
        tolerance=1e-9,
        max_steps=4000,
        window=30,
    )
    e_fci = casci_energy(h2_integrals, 2, 0)
    result = run_vqe(problem, FAST_SCHEDULE)
    assert result.converged
    assert result.energy_avg >= e_fci - 1e-9
    assert result.energy_avg - e_fci <= 1.6e-3


def test_run_vqe_traces_and_orthogonality(toy4_integrals):
    problem = _problem(
        toy4_integrals, [0, 1, 2],
        spec=AnsatzSpec(flavor=KUPCCGSD, k=1),
        max_steps=300, tolerance=1e-8, window=25,
    )
    result = run_vqe(problem, FAST_SCHEDULE)
    trace = result.trace.arrays()
    assert np.all(np.diff(trace["step"]) > 0)
    assert trace["max_overlap"].max() <= 1e-10
    assert np.max(np.abs(trace["n_electrons"] - 4.0)) <= 1e-10
    expected_sz = np.array([0.0, 1.0, 2.0])
    assert np.max(np.abs(trace["s_z"] - expected_sz)) <= 1e-10
    # windowed minimum of the averaged energy never increases
    e = trace["energy_avg"]
    window = 50
    mins = [e[max(0, i - window): i + 1].min() for i in range(e.size)]
    assert np.all(np.diff(mins) <= 1e-12)


def test_run_vqe_final_states_stay_orthogonal(toy4_integrals):
    from spinvqe.ansatz import apply_ansatz

    problem = _problem(
        toy4_integrals, [0, 1, 2],
        spec=AnsatzSpec(flavor=KUPCCGSD, k=1),
        max_steps=150,
    )
    result = run_vqe(problem, FAST_SCHEDULE)
    states = [
        apply_ansatz(r.to_statevector(), problem.program, result.theta)
        for r in problem.references
    ]
    for i in range(3):
        for j in range(i + 1, 3):
            assert abs(inner_product(states[i], states[j])) <= 1e-10


def test_per_state_energies_respect_sector_minima(toy4_integrals):
    from spinvqe.exact import sector_spectrum

    ham = build_qubit_hamiltonian(toy4_integrals)
    sector_min = np.array([
        float(sector_spectrum(ham, 4, 2 * s).eigenvalues[0]) for s in (0, 1, 2)
    ])
    problem = _problem(
        toy4_integrals, [0, 1, 2],
        spec=AnsatzSpec(flavor=KUPCCGSD, k=1),
        max_steps=200,
    )
    result = run_vqe(problem, FAST_SCHEDULE)
    energies = result.trace.arrays()["energy_states"]
    assert np.all(energies >= sector_min[None, :] - 1e-9)


def test_run_vqe_float32(h2_integrals):
    problem = _problem(
        h2_integrals, [0],
        weights=np.array([1.0]),
        spec=AnsatzSpec(flavor=KUPCCGSD, k=1),
        max_steps=600,
        tolerance=1e-6,
        window=25,
        dtype=np.complex64,
    )
    result32 = run_vqe(problem, FAST_SCHEDULE)
    problem64 = _problem(
        h2_integrals, [0],
        weights=np.array([1.0]),
        spec=AnsatzSpec(flavor=KUPCCGSD, k=1),
        max_steps=600,
        tolerance=1e-6,
        window=25,
    )
    result64 = run_vqe(problem64, FAST_SCHEDULE)
    assert abs(result32.energy_avg - result64.energy_avg) <= 1e-4


def test_nan_guard(h2_integrals):
    ham = build_qubit_hamiltonian(h2_integrals)
    ham.add_term(0, 0, float("nan"))
    program = compile_ansatz(AnsatzSpec(flavor=KUPCCGSD, k=1), 2, 1, 1)
    problem = SaVqeProblem(
        hamiltonian=ham,
        references=[build_reference_T0(2, 2, 0)],
        weights=np.array([1.0]),
        program=program,
        max_steps=10,
    )
    with pytest.raises(VqeDivergenceError) as excinfo:
        run_vqe(problem, FAST_SCHEDULE)
    assert excinfo.value.trace is not None


def test_problem_validation(h2_integrals):
    program = compile_ansatz(AnsatzSpec(flavor=KUPCCGSD, k=1), 2, 1, 1)
    ham = build_qubit_hamiltonian(h2_integrals)
    refs = [build_reference_T0(2, 2, 0), build_reference_T0(2, 2, 1)]
    with pytest.raises(ValueError, match="sum to 1"):
        SaVqeProblem(ham, refs, np.array([0.7, 0.7]), program)
    with pytest.raises(ValueError, match="one weight"):
        SaVqeProblem(ham, refs, np.array([1.0]), program)
    with pytest.raises(ValueError, match="orthogonal"):
        SaVqeProblem(ham, [refs[0], refs[0]], np.array([0.5, 0.5]), program)
