"""spinvqe: statevector engine for spin-state energetics.

Computes singlet/triplet/quintet energies of an active-space electronic
Hamiltonian with a state-averaged, orbital-optimized variational quantum
eigensolver over unitary pair coupled-cluster circuits, plus orbital-entropy
multi-reference diagnostics and an exact sector-diagonalization reference.
"""

from .ansatz import (
    AnsatzProgram,
    AnsatzSpec,
    ReferenceState,
    apply_ansatz,
    build_reference,
    build_reference_T0,
    build_reference_T1,
    compile_ansatz,
)
from .diagnostics import (
    DiagnosticsReport,
    diagnostics_report,
    mutual_information,
    one_orbital_eigenvalues,
    one_orbital_entropy,
    two_orbital_entropy,
    z_s1,
)
from .exact import (
    SectorSpectrum,
    casci_energy,
    restricted_matrix,
    sector_basis,
    sector_spectrum,
)
from .excitations import (
    ExcitationGenerator,
    apply_excitation_exponential,
    apply_generator,
    one_body_transition,
)
from .integrals import (
    ActiveSpaceIntegrals,
    FcidumpError,
    OrbitalRotation,
    energy_from_rdms,
    expm_antisymmetric,
    load_fcidump,
    parse_fcidump,
    random_integrals,
    rotate_integrals,
)
from .mapping import (
    build_qubit_hamiltonian,
    build_spin_observables,
    jw_lowering,
    jw_number,
    jw_raising,
)
from .orbital_opt import (
    MacroTrace,
    OoVqeResult,
    OrbitalOptConfig,
    RdmPair,
    SpinStateResult,
    compute_rdms,
    orbital_gradient,
    run_oo_vqe,
    sa_rdms,
)
from .pauli import PauliString, PauliSum
from .statevector import (
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
from .vqe import (
    AdamParams,
    SaVqeProblem,
    ScheduleParams,
    VqeDivergenceError,
    VqeResult,
    VqeTrace,
    run_vqe,
    sa_energy,
    sa_gradient,
    schedule_rate,
)

__version__ = "0.1.0"
