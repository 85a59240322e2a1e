"""Orbital-optimized outer loop: RDM extraction, orbital gradient, macros.

The coupled (theta, kappa) minimization is solved by first-order
alternation: converge the circuit parameters at fixed orbitals, extract
state-averaged density matrices, take one damped gradient step in the
orbital-rotation parameters with a backtracking halving search, rotate the
working integrals, rebuild the qubit Hamiltonian and repeat.  Backtracking
is evaluated on the fixed-RDM energy of the rotated integrals, which is
exactly the averaged energy the next macro starts from (same states, new
Hamiltonian), so macro-end energies are non-increasing by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ansatz import AnsatzProgram, ReferenceState, apply_ansatz
from .excitations import one_body_transition
from .integrals import (
    ActiveSpaceIntegrals,
    OrbitalRotation,
    energy_from_rdms,
    expm_antisymmetric,
    rotate_integrals,
)
from .mapping import build_qubit_hamiltonian
from .statevector import StateVector
from .vqe import AdamParams, SaVqeProblem, ScheduleParams, VqeResult, run_vqe

#: Total transition-vector storage allowed before the 2-RDM assembly
#: switches from cached rows to blocked recomputation.
_RDM_CACHE_BUDGET_BYTES = 1 << 29


@dataclass
class RdmPair:
    """Spin-summed one- and two-particle reduced density matrices.

    ``gamma[p, q] = sum_s <a+_ps a_qs>`` and ``big_gamma[p, q, r, s]``
    holds the spin-summed ``<a+_p a+_r a_s a_q>``, matching the index
    convention of the two-electron integrals.
    """

    gamma: np.ndarray
    big_gamma: np.ndarray

    def __post_init__(self) -> None:
        self.gamma = np.asarray(self.gamma, dtype=np.float64)
        self.big_gamma = np.asarray(self.big_gamma, dtype=np.float64)

    @property
    def n_orb(self) -> int:
        return self.gamma.shape[0]

    def validate(self, n_electrons: int | None = None, tol: float = 1e-9) -> None:
        g1, g2 = self.gamma, self.big_gamma
        if np.max(np.abs(g1 - g1.T)) > tol:
            raise ValueError("1-RDM is not symmetric")
        evals = np.linalg.eigvalsh(g1)
        if evals.min() < -1e-10 or evals.max() > 2.0 + 1e-10:
            raise ValueError(f"1-RDM occupations outside [0, 2]: {evals}")
        n = float(np.trace(g1))
        if n_electrons is not None and abs(n - n_electrons) > 1e-10:
            raise ValueError(f"1-RDM trace {n} != {n_electrons}")
        if np.max(np.abs(g2 - g2.transpose(2, 3, 0, 1))) > tol:
            raise ValueError("2-RDM violates pair-exchange symmetry")
        if np.max(np.abs(g2 - g2.transpose(1, 0, 3, 2))) > tol:
            raise ValueError("2-RDM violates hermitian symmetry")
        contracted = np.einsum("pqrr->pq", g2)
        if np.max(np.abs(contracted - (n - 1.0) * g1)) > tol:
            raise ValueError("2-RDM partial trace does not reproduce (N-1) gamma")


def compute_rdms(state: StateVector) -> RdmPair:
    """Spin-orbital RDMs assembled from transition vectors, spin-summed.

    Uses <a+_p a+_r a_s a_q> = <(a+_q a_p psi)|(a+_r a_s psi)> minus the
    normal-ordering correction delta_qr <a+_p a_s> within a spin channel.
    """
    n = state.n_qubits
    m = n // 2
    dim = 1 << n
    cache_rows = 2 * m * m * dim * 16 <= _RDM_CACHE_BUDGET_BYTES

    rows: dict[tuple[int, int], np.ndarray] = {}

    def row(sigma: int, a: int) -> np.ndarray:
        """Stack of a+_{a sigma} a_{b sigma} |psi> over b; shape (m, dim)."""
        key = (sigma, a)
        got = rows.get(key)
        if got is not None:
            return got
        block = np.empty((m, dim), dtype=np.complex128)
        for b in range(m):
            block[b] = one_body_transition(
                state, 2 * a + sigma, 2 * b + sigma
            ).amplitudes.astype(np.complex128)
        if cache_rows:
            rows[key] = block
        return block

    psi = state.amplitudes.astype(np.complex128)
    # gso[sigma, p, s] = <a+_{p sigma} a_{s sigma}>
    gso = np.empty((2, m, m), dtype=np.complex128)
    for sigma in (0, 1):
        for p in range(m):
            gso[sigma, p] = row(sigma, p) @ psi.conj()
    gamma = gso[0] + gso[1]

    big = np.zeros((m, m, m, m), dtype=np.complex128)
    for sigma in (0, 1):
        for q in range(m):
            bra = row(sigma, q).conj()
            for tau in (0, 1):
                for r in range(m):
                    block = bra @ row(tau, r).T  # [p, s]
                    big[:, q, r, :] += block
                    if sigma == tau and q == r:
                        big[:, q, r, :] -= gso[sigma]

    # gamma is hermitian and big obeys Gamma*[p,q,r,s] = Gamma[q,p,s,r] as
    # operator identities, so the real parts keep every permutational
    # symmetry and carry the full contraction content against real,
    # 8-fold-symmetric integrals (imaginary parts cancel pairwise there).
    pair = RdmPair(gamma=gamma.real, big_gamma=big.real)
    pair.gamma = 0.5 * (pair.gamma + pair.gamma.T)
    return pair


def sa_rdms(rdms: list[RdmPair], weights: np.ndarray) -> RdmPair:
    """Element-wise weighted average of per-state density matrices."""
    weights = np.asarray(weights, dtype=np.float64)
    if len(rdms) != weights.size:
        raise ValueError("one weight per RDM pair")
    m = rdms[0].n_orb
    for pair in rdms:
        if pair.n_orb != m:
            raise ValueError("RDM dimensions differ")
    gamma = sum(w * pair.gamma for w, pair in zip(weights, rdms))
    big = sum(w * pair.big_gamma for w, pair in zip(weights, rdms))
    return RdmPair(gamma=gamma, big_gamma=big)


def orbital_gradient(ints: ActiveSpaceIntegrals, rdms: RdmPair) -> np.ndarray:
    """Gradient of the fixed-RDM energy with respect to kappa at kappa = 0.

    Rotating the integrals forward is the same contraction as rotating the
    density matrices backward, so the derivative assembles from the four
    one-index contractions of g with the 2-RDM plus the one-body commutator.
    Antisymmetric by construction; validated against finite differences in
    the tests.
    """
    if rdms.n_orb != ints.n_orb:
        raise ValueError("RDM dimension does not match integrals")
    h, g = ints.h, ints.g
    gamma, big = rdms.gamma, rdms.big_gamma
    z = (gamma @ h - h @ gamma).T
    z = z + 0.5 * (
        np.einsum("abcd,ebcd->ae", g, big, optimize=True)
        + np.einsum("abcd,aecd->be", g, big, optimize=True)
        + np.einsum("abcd,abed->ce", g, big, optimize=True)
        + np.einsum("abcd,abce->de", g, big, optimize=True)
    )
    return z - z.T


@dataclass(frozen=True)
class OrbitalOptConfig:
    step_size: float = 0.1
    max_macros: int = 100
    energy_tol: float = 1e-7
    gradient_tol: float = 1e-5
    max_backtracks: int = 20


@dataclass
class MacroTrace:
    """Per-macro record: energies around the orbital step and step sizes."""

    macro: list[int] = field(default_factory=list)
    energy_pre: list[float] = field(default_factory=list)
    energy_post: list[float] = field(default_factory=list)
    gradient_max: list[float] = field(default_factory=list)
    kappa_step_norm: list[float] = field(default_factory=list)

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "macro": np.asarray(self.macro, dtype=np.int64),
            "energy_pre": np.asarray(self.energy_pre),
            "energy_post": np.asarray(self.energy_post),
            "gradient_max": np.asarray(self.gradient_max),
            "kappa_step_norm": np.asarray(self.kappa_step_norm),
        }


@dataclass
class SpinStateResult:
    """Converged data for one spin state."""

    spin: int
    energy: float
    theta: np.ndarray
    rdms: RdmPair
    state: StateVector


@dataclass
class OoVqeResult:
    converged: bool
    status: str
    energies: np.ndarray
    energy_avg: float
    theta: np.ndarray
    integrals: ActiveSpaceIntegrals
    rotation_total: np.ndarray
    kappa_total: np.ndarray
    spin_states: list[SpinStateResult]
    macro_trace: MacroTrace
    vqe_results: list[VqeResult]


def run_oo_vqe(
    ints: ActiveSpaceIntegrals,
    references: list[ReferenceState],
    weights: np.ndarray,
    program: AnsatzProgram,
    schedule: ScheduleParams | None = None,
    adam: AdamParams | None = None,
    tolerance: float = 1e-7,
    max_steps: int = 50000,
    window: int = 50,
    oo: OrbitalOptConfig | None = None,
    dtype=np.complex128,
    trace_every: int = 1,
    theta0: np.ndarray | None = None,
) -> OoVqeResult:
    """Alternate circuit optimization and damped orbital-gradient steps.

    Stops when both the macro-to-macro averaged-energy change and the
    orbital gradient fall under their tolerances, or at the macro cap;
    exhausting the backtracking halvings returns best-so-far results with
    a non-converged status.
    """
    oo = oo or OrbitalOptConfig()
    m = ints.n_orb
    work = ints
    u_total = np.eye(m)
    theta = theta0
    macro_trace = MacroTrace()
    vqe_results: list[VqeResult] = []
    status = "max_macros"
    converged = False
    last_pre = None
    result = None

    for macro in range(oo.max_macros):
        hamiltonian = build_qubit_hamiltonian(work)
        problem = SaVqeProblem(
            hamiltonian=hamiltonian,
            references=references,
            weights=weights,
            program=program,
            tolerance=tolerance,
            max_steps=max_steps,
            window=window,
            dtype=dtype,
        )
        result = run_vqe(problem, schedule, adam, theta0=theta, trace_every=trace_every)
        vqe_results.append(result)
        theta = result.theta

        states = [
            apply_ansatz(ref.to_statevector(dtype), program, theta)
            for ref in references
        ]
        per_state = [compute_rdms(s) for s in states]
        averaged = sa_rdms(per_state, weights)
        e_pre = result.energy_avg
        grad = orbital_gradient(work, averaged)
        grad_max = float(np.max(np.abs(grad)))

        if last_pre is not None and abs(e_pre - last_pre) <= oo.energy_tol and grad_max <= oo.gradient_tol:
            converged = True
            status = "converged"
            macro_trace.macro.append(macro)
            macro_trace.energy_pre.append(e_pre)
            macro_trace.energy_post.append(e_pre)
            macro_trace.gradient_max.append(grad_max)
            macro_trace.kappa_step_norm.append(0.0)
            break
        last_pre = e_pre

        eta = oo.step_size
        accepted = None
        for _ in range(oo.max_backtracks):
            kappa = OrbitalRotation.from_upper(-eta * grad)
            candidate = rotate_integrals(work, kappa)
            e_post = energy_from_rdms(candidate, averaged.gamma, averaged.big_gamma)
            if e_post <= e_pre:
                accepted = (kappa, candidate, e_post)
                break
            eta *= 0.5
        if accepted is None:
            status = "backtracking_exhausted"
            macro_trace.macro.append(macro)
            macro_trace.energy_pre.append(e_pre)
            macro_trace.energy_post.append(e_pre)
            macro_trace.gradient_max.append(grad_max)
            macro_trace.kappa_step_norm.append(0.0)
            break

        kappa, work, e_post = accepted
        u_total = u_total @ expm_antisymmetric(kappa.kappa)
        macro_trace.macro.append(macro)
        macro_trace.energy_pre.append(e_pre)
        macro_trace.energy_post.append(e_post)
        macro_trace.gradient_max.append(grad_max)
        macro_trace.kappa_step_norm.append(float(np.linalg.norm(kappa.kappa)))

    assert result is not None
    states = [
        apply_ansatz(ref.to_statevector(dtype), program, theta) for ref in references
    ]
    per_state = [compute_rdms(s) for s in states]
    spin_states = [
        SpinStateResult(
            spin=ref.target_spin,
            energy=float(result.energies[i]),
            theta=theta.copy(),
            rdms=per_state[i],
            state=states[i],
        )
        for i, ref in enumerate(references)
    ]
    kappa_total = OrbitalRotation.from_orthogonal(u_total).kappa

    return OoVqeResult(
        converged=converged,
        status=status,
        energies=result.energies,
        energy_avg=result.energy_avg,
        theta=theta,
        integrals=work,
        rotation_total=u_total,
        kappa_total=kappa_total,
        spin_states=spin_states,
        macro_trace=macro_trace,
        vqe_results=vqe_results,
    )
