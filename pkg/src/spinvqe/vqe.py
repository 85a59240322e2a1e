"""State-averaged VQE driver: objective, adjoint gradients, ADAM loop.

The gradient is computed by reverse accumulation through the generator
product (one forward pass, one backward sweep per reference state), which
is exact on a statevector and costs O(n_generators * 2**n) per state.  A
finite-difference cross-check lives in the test suite.

The learning rate follows a polynomial ramp-down: flat at the initial rate
until a boundary step, then a power-law interpolation over a transition
window, then flat at the end rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ansatz import AnsatzProgram, ReferenceState
from .excitations import _exp_inplace, apply_generator
from .mapping import build_spin_observables
from .pauli import PauliSum
from .statevector import StateVector, apply_pauli_sum, expectation, inner_product


@dataclass(frozen=True)
class ScheduleParams:
    """Polynomial learning-rate schedule parameters.

    rate(t) = initial                                     for t < boundary
            = (I - E) (1 - (t - B)/T)**P + E              for B <= t < B + T
            = end                                         for t >= B + T
    """

    initial: float = 1e-2
    end: float = 1e-3
    boundary: int = 35000
    width: int = 10000
    power: float = 2.0

    def __post_init__(self) -> None:
        if not (self.initial > self.end > 0.0):
            raise ValueError("need initial > end > 0")
        if self.boundary < 0 or self.width <= 0 or self.power < 1.0:
            raise ValueError("need boundary >= 0, width > 0, power >= 1")


def schedule_rate(t: int, params: ScheduleParams) -> float:
    """Exact piecewise evaluation of the polynomial schedule."""
    if t < 0:
        raise ValueError("step must be non-negative")
    if t < params.boundary:
        return params.initial
    if t >= params.boundary + params.width:
        return params.end
    frac = 1.0 - (t - params.boundary) / params.width
    return (params.initial - params.end) * frac**params.power + params.end


@dataclass(frozen=True)
class AdamParams:
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class SaVqeProblem:
    """A state-averaged objective: one Hamiltonian, shared program, fixed
    weights over mutually orthogonal reference states."""

    hamiltonian: PauliSum
    references: list[ReferenceState]
    weights: np.ndarray
    program: AnsatzProgram
    tolerance: float = 1e-7
    max_steps: int = 50000
    window: int = 50
    dtype: type = np.complex128

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (len(self.references),):
            raise ValueError("one weight per reference state")
        if np.any(self.weights < 0.0) or np.any(self.weights > 1.0):
            raise ValueError("weights must lie in [0, 1]")
        if abs(float(np.sum(self.weights)) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        states = [r.to_statevector(self.dtype) for r in self.references]
        for i in range(len(states)):
            for j in range(i + 1, len(states)):
                if abs(inner_product(states[i], states[j])) > 1e-12:
                    raise ValueError(f"reference states {i} and {j} are not orthogonal")

    @property
    def n_states(self) -> int:
        return len(self.references)

    def reference_statevectors(self) -> list[StateVector]:
        return [r.to_statevector(self.dtype) for r in self.references]


@dataclass
class VqeTrace:
    """Per-step optimization record; one row per traced step."""

    step: list[int] = field(default_factory=list)
    learning_rate: list[float] = field(default_factory=list)
    energy_avg: list[float] = field(default_factory=list)
    energy_states: list[np.ndarray] = field(default_factory=list)
    s_squared: list[np.ndarray] = field(default_factory=list)
    s_z: list[np.ndarray] = field(default_factory=list)
    n_electrons: list[np.ndarray] = field(default_factory=list)
    max_overlap: list[float] = field(default_factory=list)

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "step": np.asarray(self.step, dtype=np.int64),
            "learning_rate": np.asarray(self.learning_rate),
            "energy_avg": np.asarray(self.energy_avg),
            "energy_states": np.asarray(self.energy_states),
            "s_squared": np.asarray(self.s_squared),
            "s_z": np.asarray(self.s_z),
            "n_electrons": np.asarray(self.n_electrons),
            "max_overlap": np.asarray(self.max_overlap),
        }


@dataclass
class VqeResult:
    """Converged (or best-so-far) state-averaged optimization result.

    ``theta`` is the parameter vector at the lowest traced averaged energy,
    which keeps macro-level energies monotone even through late ADAM
    transients; for converged runs it coincides with the final iterate to
    within the tolerance.
    """

    energies: np.ndarray
    energy_avg: float
    theta: np.ndarray
    converged: bool
    n_steps: int
    trace: VqeTrace


class VqeDivergenceError(RuntimeError):
    """Raised when the objective turns non-finite; carries the trace so the
    caller can dump it for diagnosis."""

    def __init__(self, message: str, trace: VqeTrace):
        super().__init__(message)
        self.trace = trace


def _forward(reference: StateVector, program: AnsatzProgram, angles: np.ndarray) -> StateVector:
    out = reference.copy()
    for gen, ang in zip(program.generators, angles):
        _exp_inplace(out.amplitudes, gen, float(ang), program.n_qubits)
    return out


def sa_energy(theta: np.ndarray, problem: SaVqeProblem) -> tuple[float, np.ndarray]:
    """Averaged and per-state energies for the shared parameter vector."""
    theta = np.asarray(theta, dtype=np.float64)
    program = problem.program
    if theta.shape != (program.n_parameters,):
        raise ValueError("parameter length mismatch")
    angles = theta[np.asarray(program.slots, dtype=np.int64)]
    energies = np.empty(problem.n_states)
    for i, ref in enumerate(problem.reference_statevectors()):
        state = _forward(ref, program, angles)
        energies[i] = expectation(state, problem.hamiltonian)
    return float(np.dot(problem.weights, energies)), energies


def sa_gradient(theta: np.ndarray, problem: SaVqeProblem) -> np.ndarray:
    """d E_avg / d theta via the adjoint backward sweep."""
    _, _, grad, _ = _energies_and_gradient(theta, problem, keep_states=False)
    return grad


def _energies_and_gradient(
    theta: np.ndarray, problem: SaVqeProblem, keep_states: bool = False
):
    theta = np.asarray(theta, dtype=np.float64)
    program = problem.program
    if theta.shape != (program.n_parameters,):
        raise ValueError("parameter length mismatch")
    slots = np.asarray(program.slots, dtype=np.int64)
    angles = theta[slots]
    grad = np.zeros(program.n_parameters)
    energies = np.empty(problem.n_states)
    finals: list[StateVector] = []

    for i, ref in enumerate(problem.reference_statevectors()):
        phi = _forward(ref, program, angles)
        if keep_states:
            finals.append(phi.copy())
        lam = apply_pauli_sum(phi, problem.hamiltonian)
        energies[i] = expectation(phi, problem.hamiltonian)
        weight = problem.weights[i]
        # Backward sweep: phi tracks U_j..U_1|ref>, lam tracks the adjoint
        # of everything to its left; dE/dtheta_j = 2 Re <lam| A_j |phi_j>.
        for j in range(len(program) - 1, -1, -1):
            gen = program.generators[j]
            a_phi = apply_generator(phi, gen)
            partial = 2.0 * float(
                np.real(np.vdot(lam.amplitudes, a_phi.amplitudes))
            )
            grad[slots[j]] += weight * partial
            ang = -float(angles[j])
            _exp_inplace(phi.amplitudes, gen, ang, program.n_qubits)
            _exp_inplace(lam.amplitudes, gen, ang, program.n_qubits)

    e_avg = float(np.dot(problem.weights, energies))
    return e_avg, energies, grad, finals


def _monitors(states: list[StateVector], observables) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    s2_op, sz_op, n_op = observables
    s2 = np.array([expectation(s, s2_op) for s in states])
    sz = np.array([expectation(s, sz_op) for s in states])
    ne = np.array([expectation(s, n_op) for s in states])
    overlap = 0.0
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            overlap = max(overlap, abs(inner_product(states[i], states[j])))
    return s2, sz, ne, overlap


def run_vqe(
    problem: SaVqeProblem,
    schedule: ScheduleParams | None = None,
    adam: AdamParams | None = None,
    theta0: np.ndarray | None = None,
    trace_every: int = 1,
) -> VqeResult:
    """ADAM optimization of the state-averaged energy with trace recording.

    Convergence requires every consecutive-step change of the averaged
    energy across the trailing window to stay within the tolerance.  A
    non-finite objective aborts with the trace attached.
    """
    schedule = schedule or ScheduleParams()
    adam = adam or AdamParams()
    program = problem.program
    theta = (
        np.zeros(program.n_parameters)
        if theta0 is None
        else np.array(theta0, dtype=np.float64)
    )
    if theta.shape != (program.n_parameters,):
        raise ValueError("theta0 length mismatch")

    observables = build_spin_observables(program.n_qubits // 2)
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    trace = VqeTrace()
    recent: list[float] = []
    best_e = np.inf
    best_theta = theta.copy()
    best_energies = None
    converged = False
    steps_done = 0

    for t in range(problem.max_steps):
        want_trace = (t % trace_every) == 0
        e_avg, energies, grad, states = _energies_and_gradient(
            theta, problem, keep_states=want_trace
        )
        if not np.isfinite(e_avg) or not np.all(np.isfinite(grad)):
            raise VqeDivergenceError(
                f"non-finite objective at step {t}", trace
            )
        lr = schedule_rate(t, schedule)
        if want_trace:
            s2, sz, ne, overlap = _monitors(states, observables)
            trace.step.append(t)
            trace.learning_rate.append(lr)
            trace.energy_avg.append(e_avg)
            trace.energy_states.append(energies.copy())
            trace.s_squared.append(s2)
            trace.s_z.append(sz)
            trace.n_electrons.append(ne)
            trace.max_overlap.append(overlap)
        if e_avg < best_e:
            best_e = e_avg
            best_theta = theta.copy()
            best_energies = energies.copy()
        steps_done = t + 1

        recent.append(e_avg)
        if len(recent) > problem.window + 1:
            recent.pop(0)
        if len(recent) == problem.window + 1:
            deltas = np.abs(np.diff(recent))
            if np.all(deltas <= problem.tolerance):
                converged = True
                break

        m = adam.beta1 * m + (1.0 - adam.beta1) * grad
        v = adam.beta2 * v + (1.0 - adam.beta2) * grad * grad
        m_hat = m / (1.0 - adam.beta1 ** (t + 1))
        v_hat = v / (1.0 - adam.beta2 ** (t + 1))
        theta = theta - lr * m_hat / (np.sqrt(v_hat) + adam.eps)

    if best_energies is None:
        best_e, best_energies = sa_energy(best_theta, problem)

    return VqeResult(
        energies=best_energies,
        energy_avg=float(best_e),
        theta=best_theta,
        converged=converged,
        n_steps=steps_done,
        trace=trace,
    )
