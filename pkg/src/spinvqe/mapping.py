"""Jordan-Wigner mapping of fermionic operators onto qubits.

Spin-orbital layout, used everywhere in this package: qubit ``2p`` hosts the
alpha spin orbital of spatial orbital ``p`` and qubit ``2p + 1`` the beta one
(alternating alpha/beta).  Annihilating spin orbital ``j`` maps to

    a_j -> Z_0 x ... x Z_{j-1} x (X_j + i Y_j) / 2

which lowers the occupation of qubit ``j`` and tracks fermionic parity with
the Z chain.  The mapping is isospectral, so the qubit Hamiltonian built here
shares its spectrum with the second-quantized active-space Hamiltonian.
"""

from __future__ import annotations

import numpy as np

from .integrals import ActiveSpaceIntegrals
from .pauli import PauliSum


def jw_lowering(j: int, n_qubits: int) -> PauliSum:
    """Qubit image of the annihilation operator a_j."""
    if not 0 <= j < n_qubits:
        raise ValueError(f"spin orbital {j} outside [0, {n_qubits})")
    zchain = (1 << j) - 1
    bit = 1 << j
    out = PauliSum(n_qubits)
    out.add_term(bit, zchain, 0.5)            # Z...Z X_j
    out.add_term(bit, zchain | bit, 0.5j)     # Z...Z Y_j
    return out


def jw_raising(j: int, n_qubits: int) -> PauliSum:
    """Qubit image of the creation operator a+_j; same Z chain, conjugate
    phase on the Y component."""
    return jw_lowering(j, n_qubits).adjoint()


def jw_number(j: int, n_qubits: int) -> PauliSum:
    """Occupation-number operator n_j = (I - Z_j) / 2."""
    if not 0 <= j < n_qubits:
        raise ValueError(f"spin orbital {j} outside [0, {n_qubits})")
    out = PauliSum(n_qubits)
    out.add_term(0, 0, 0.5)
    out.add_term(0, 1 << j, -0.5)
    return out


def build_qubit_hamiltonian(ints: ActiveSpaceIntegrals) -> PauliSum:
    """Map the active-space Hamiltonian to a hermitian Pauli sum.

    The operator assembled is

        sum_pq h[p,q] a+_ps a_qs
        + 1/2 sum_pqrs g[p,q,r,s] a+_ps a+_rt a_st a_qs  + core

    with implicit sums over the spin channels s, t.  Terms below the prune
    threshold are dropped after accumulation.
    """
    m = ints.n_orb
    n = 2 * m
    lower = [jw_lowering(j, n) for j in range(n)]
    raise_ = [op.adjoint() for op in lower]

    ham = PauliSum.identity(n, complex(ints.core_energy))

    h = ints.h
    for p in range(m):
        for q in range(m):
            c = h[p, q]
            if c == 0.0:
                continue
            for s in (0, 1):
                ham.add_scaled_product(raise_[2 * p + s], lower[2 * q + s], c)

    # Pair products reused across the quartic loop.
    create_pair = {}
    annihilate_pair = {}
    for a in range(n):
        for b in range(n):
            if a == b:
                continue  # a+_a a+_a = 0 and a_a a_a = 0
            create_pair[(a, b)] = raise_[a] * raise_[b]
            annihilate_pair[(a, b)] = lower[a] * lower[b]

    g = ints.g
    for p in range(m):
        for q in range(m):
            for r in range(m):
                for s in range(m):
                    c = 0.5 * g[p, q, r, s]
                    if c == 0.0:
                        continue
                    for sp in (0, 1):
                        i = 2 * p + sp
                        j = 2 * q + sp
                        for tp in (0, 1):
                            k = 2 * r + tp
                            l = 2 * s + tp
                            if i == k or j == l:
                                continue
                            ham.add_scaled_product(
                                create_pair[(i, k)], annihilate_pair[(l, j)], c
                            )

    ham.prune()
    residue = ham.max_imag_coefficient()
    if residue > 1e-12:
        raise ValueError(f"qubit Hamiltonian has imaginary residue {residue:.2e}")
    return ham


def build_spin_observables(n_orb: int) -> tuple[PauliSum, PauliSum, PauliSum]:
    """Qubit operators for S^2, S_z and the electron number N.

    S^2 is assembled as S- S+ + S_z (S_z + 1) from the fermionic ladder
    operators S+ = sum_p a+_pa a_pb and then mapped, so its expectation
    values on occupation kets match the textbook unpaired-electron formula
    exactly.
    """
    if n_orb < 1:
        raise ValueError("need at least one orbital")
    n = 2 * n_orb

    s_plus = PauliSum.zero(n)
    for p in range(n_orb):
        s_plus.add_scaled_product(jw_raising(2 * p, n), jw_lowering(2 * p + 1, n), 1.0)
    s_minus = s_plus.adjoint()

    s_z = PauliSum.zero(n)
    for p in range(n_orb):
        # (n_alpha - n_beta) / 2 = (Z_beta - Z_alpha) / 4 per orbital
        s_z.add_term(0, 1 << (2 * p + 1), 0.25)
        s_z.add_term(0, 1 << (2 * p), -0.25)

    s_squared = s_minus * s_plus
    s_squared += s_z * s_z
    s_squared += s_z
    s_squared.prune()

    number = PauliSum.zero(n)
    number.add_term(0, 0, 0.5 * n)
    for j in range(n):
        number.add_term(0, 1 << j, -0.5)

    s_z.prune()
    number.prune()
    return s_squared, s_z, number
