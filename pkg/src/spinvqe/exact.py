"""Exact reference solver: sector-restricted diagonalization.

The qubit Hamiltonian conserves electron number and S_z, so its matrix is
block diagonal over (N, S_z) sectors; restricting to one sector keeps the
dense eigensolve desk-sized.  Spin selection is post hoc: eigenvectors are
filtered by their measured S^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrals import ActiveSpaceIntegrals
from .mapping import build_qubit_hamiltonian, build_spin_observables
from .pauli import PauliSum
from .statevector import _U64, _indices, _parity

DENSE_QUBIT_CAP = 16
SPARSE_QUBIT_CAP = 24
SPIN_FILTER_TOL = 1e-6


class EmptySectorError(ValueError):
    pass


class NoSpinStateError(ValueError):
    pass


def _alpha_mask(n_qubits: int) -> int:
    mask = 0
    for q in range(0, n_qubits, 2):
        mask |= 1 << q
    return mask


def sector_basis(n_qubits: int, n_electrons: int, two_sz: int) -> np.ndarray:
    """Basis indices with the given electron count and 2 S_z = n_a - n_b."""
    idx = _indices(n_qubits)
    total = np.bitwise_count(idx).astype(np.int64)
    n_alpha = np.bitwise_count(idx & _U64(_alpha_mask(n_qubits))).astype(np.int64)
    sel = (total == n_electrons) & ((2 * n_alpha - total) == two_sz)
    basis = idx[sel]
    if basis.size == 0:
        raise EmptySectorError(
            f"no basis states with N={n_electrons}, 2Sz={two_sz} on {n_qubits} qubits"
        )
    return np.sort(basis)


def restricted_matrix(op: PauliSum, basis: np.ndarray, n_qubits: int) -> np.ndarray:
    """Dense matrix of a Pauli sum restricted to a basis-index subset."""
    dim = basis.size
    position = np.full(1 << n_qubits, -1, dtype=np.int64)
    position[basis.astype(np.int64)] = np.arange(dim)
    out = np.zeros((dim, dim), dtype=np.complex128)
    cols = np.arange(dim)
    for x, z, c in op.sorted_terms():
        phase = (1j) ** ((x & z).bit_count() % 4)
        amp = (c * phase) * (1.0 - 2.0 * _parity(basis, z))
        rows_full = (basis ^ _U64(x)).astype(np.int64)
        rows = position[rows_full]
        ok = rows >= 0
        np.add.at(out, (rows[ok], cols[ok]), amp[ok])
    return out


@dataclass
class SectorSpectrum:
    """Eigenvalues (ascending) of one (N, S_z) sector with per-level S^2."""

    n_electrons: int
    two_sz: int
    eigenvalues: np.ndarray
    s_squared: np.ndarray
    eigenvectors: np.ndarray | None = None
    basis: np.ndarray | None = None


def sector_spectrum(
    hamiltonian: PauliSum,
    n_electrons: int,
    two_sz: int,
    keep_vectors: bool = False,
    n_lowest: int | None = None,
) -> SectorSpectrum:
    """Diagonalize the Hamiltonian inside one (N, S_z) sector.

    Dense up to DENSE_QUBIT_CAP qubits; beyond that a sparse iterative
    solve returns the lowest ``n_lowest`` levels (default 6).
    """
    n = hamiltonian.n_qubits
    basis = sector_basis(n, n_electrons, two_sz)
    s2_op, _, _ = build_spin_observables(n // 2)

    if n <= DENSE_QUBIT_CAP:
        mat = restricted_matrix(hamiltonian, basis, n)
        herm = float(np.max(np.abs(mat - mat.conj().T)))
        if herm > 1e-12:
            raise ValueError(f"restricted Hamiltonian not hermitian: {herm:.2e}")
        evals, evecs = np.linalg.eigh(mat)
        if n_lowest is not None:
            evals = evals[:n_lowest]
            evecs = evecs[:, : n_lowest]
    elif n <= SPARSE_QUBIT_CAP:
        from scipy.sparse import coo_matrix
        from scipy.sparse.linalg import eigsh

        dim = basis.size
        position = np.full(1 << n, -1, dtype=np.int64)
        position[basis.astype(np.int64)] = np.arange(dim)
        rows_all, cols_all, vals_all = [], [], []
        cols = np.arange(dim)
        for x, z, c in hamiltonian.sorted_terms():
            phase = (1j) ** ((x & z).bit_count() % 4)
            amp = (c * phase) * (1.0 - 2.0 * _parity(basis, z))
            rows = position[(basis ^ _U64(x)).astype(np.int64)]
            ok = rows >= 0
            rows_all.append(rows[ok])
            cols_all.append(cols[ok])
            vals_all.append(amp[ok])
        mat = coo_matrix(
            (np.concatenate(vals_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
            shape=(dim, dim),
        ).tocsr()
        k = min(n_lowest or 6, dim - 1)
        if k < 1 or k >= dim - 1:
            # ARPACK needs k < dim - 1; tiny sectors go dense instead
            evals, evecs = np.linalg.eigh(mat.toarray())
            if n_lowest is not None:
                evals = evals[:n_lowest]
                evecs = evecs[:, :n_lowest]
        else:
            evals, evecs = eigsh(mat, k=k, which="SA")
            order = np.argsort(evals)
            evals, evecs = evals[order], evecs[:, order]
    else:
        raise ValueError(f"{n} qubits exceeds the {SPARSE_QUBIT_CAP}-qubit solver cap")

    s2_mat = restricted_matrix(s2_op, basis, n)
    s2_vals = np.real(np.einsum("ib,ij,jb->b", evecs.conj(), s2_mat, evecs))
    return SectorSpectrum(
        n_electrons=n_electrons,
        two_sz=two_sz,
        eigenvalues=np.real(evals),
        s_squared=s2_vals,
        eigenvectors=evecs if keep_vectors else None,
        basis=basis if keep_vectors else None,
    )


def casci_energy(
    ints: ActiveSpaceIntegrals,
    n_electrons: int,
    spin: int,
    hamiltonian: PauliSum | None = None,
) -> float:
    """Lowest eigenvalue with S^2 = S(S+1) in the (N, S_z = S) sector."""
    ham = hamiltonian if hamiltonian is not None else build_qubit_hamiltonian(ints)
    spec = sector_spectrum(ham, n_electrons, 2 * spin)
    target = spin * (spin + 1)
    for energy, s2 in zip(spec.eigenvalues, spec.s_squared):
        if abs(s2 - target) <= SPIN_FILTER_TOL:
            return float(energy)
    raise NoSpinStateError(
        f"no state with S={spin} in sector (N={n_electrons}, Sz={spin})"
    )


def sector_dimensions(n_qubits: int) -> dict[tuple[int, int], int]:
    """Dimension of every (N, 2Sz) sector; they partition the full space."""
    idx = _indices(n_qubits)
    total = np.bitwise_count(idx).astype(np.int64)
    n_alpha = np.bitwise_count(idx & _U64(_alpha_mask(n_qubits))).astype(np.int64)
    out: dict[tuple[int, int], int] = {}
    for n_elec, two_sz in zip(total, 2 * n_alpha - total):
        key = (int(n_elec), int(two_sz))
        out[key] = out.get(key, 0) + 1
    return out
