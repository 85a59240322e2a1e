"""Entropy-based multi-reference diagnostics of converged states.

One-orbital spectra come from two independent routes that must agree: a
closed-form readout of diagonal occupation expectations, and the eigenvalues
of the partially traced orbital density matrix.  Entropies use natural
logarithms; the normalized mean one-orbital entropy lands in [0, 1] by
construction (ln 4 is the one-orbital maximum).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import StateVector, _U64, _indices, reduced_density

#: Eigenvalues may stray this far outside [0, 1] before we call it a bug.
EIGENVALUE_TOL = 1e-12

#: Printed alongside reports: the normalization compares against the
#: one-orbital maximum, which is only a calibrated scale when electron and
#: orbital counts are comparable; treat values for lopsided active spaces
#: as qualitative.
NORMALIZATION_NOTE = (
    "normalized one-orbital entropy assumes comparable electron and orbital "
    "counts; treat values for strongly unbalanced active spaces as qualitative"
)


def _occupation_probabilities(state: StateVector, orbital: int) -> tuple[float, float, float]:
    """(<n_alpha>, <n_beta>, <n_alpha n_beta>) for one orbital, read off the
    amplitude magnitudes; no operator machinery involved."""
    n = state.n_qubits
    if not 0 <= orbital < n // 2:
        raise ValueError(f"orbital {orbital} outside [0, {n // 2})")
    probs = np.abs(state.amplitudes.astype(np.complex128)) ** 2
    idx = _indices(n)
    occ_a = ((idx >> _U64(2 * orbital)) & _U64(1)).astype(bool)
    occ_b = ((idx >> _U64(2 * orbital + 1)) & _U64(1)).astype(bool)
    na = float(probs[occ_a].sum())
    nb = float(probs[occ_b].sum())
    nab = float(probs[occ_a & occ_b].sum())
    return na, nb, nab


def one_orbital_eigenvalues(state: StateVector, orbital: int) -> np.ndarray:
    """Spectrum of the one-orbital density in the basis
    {vac, alpha, beta, alpha-beta}, from occupation expectations:

        (1 - n_a - n_b + n_ab,  n_a - n_ab,  n_b - n_ab,  n_ab)

    Valid for states with definite electron number and S_z (everything
    this engine produces): there the one-orbital density is diagonal in
    the occupation basis, so these values are its eigenvalues and match
    the partial-trace route exactly.
    """
    na, nb, nab = _occupation_probabilities(state, orbital)
    omega = np.array([1.0 - na - nb + nab, na - nab, nb - nab, nab])
    if omega.min() < -EIGENVALUE_TOL or omega.max() > 1.0 + EIGENVALUE_TOL:
        raise ValueError(f"one-orbital eigenvalues outside [0, 1]: {omega}")
    if abs(omega.sum() - 1.0) > 1e-12:
        raise ValueError("one-orbital eigenvalues do not sum to 1")
    return omega


def entropy_of_spectrum(eigenvalues: np.ndarray, tol: float = EIGENVALUE_TOL) -> float:
    """Shannon entropy (nats) with the 0 ln 0 = 0 convention.

    Eigenvalues are clipped to [0, 1] within ``tol``; larger violations
    signal a trace or phase bug upstream and raise.
    """
    w = np.asarray(eigenvalues, dtype=np.float64)
    if w.min() < -tol or w.max() > 1.0 + tol:
        raise ValueError(f"spectrum outside [0, 1] beyond tolerance: {w}")
    w = np.clip(w, 0.0, 1.0)
    nz = w[w > 0.0]
    return float(-np.sum(nz * np.log(nz)))


def one_orbital_entropy(state: StateVector, orbital: int) -> float:
    return entropy_of_spectrum(one_orbital_eigenvalues(state, orbital))


def two_orbital_entropy(state: StateVector, i: int, j: int) -> float:
    """Entropy of the 16-dimensional two-orbital reduced density."""
    rho = reduced_density(state, [i, j])
    eigs = np.linalg.eigvalsh(rho)
    return entropy_of_spectrum(eigs, tol=1e-10)


def z_s1(state: StateVector, n_orb: int | None = None) -> float:
    """Mean one-orbital entropy normalized by ln 4; lands in [0, 1]."""
    m = state.n_qubits // 2 if n_orb is None else n_orb
    if m < 1:
        raise ValueError("need at least one orbital")
    total = sum(one_orbital_entropy(state, i) for i in range(m))
    return total / (m * np.log(4.0))


def mutual_information(state: StateVector, n_orb: int | None = None) -> np.ndarray:
    """Orbital-pair mutual information matrix (nats).

    I[i, j] = (s_i + s_j - s_ij) / 2 off the diagonal, zero on it;
    symmetric and non-negative up to roundoff.
    """
    m = state.n_qubits // 2 if n_orb is None else n_orb
    if m < 2:
        raise ValueError("mutual information needs at least two orbitals")
    s1 = np.array([one_orbital_entropy(state, i) for i in range(m)])
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            s2 = two_orbital_entropy(state, i, j)
            out[i, j] = out[j, i] = 0.5 * (s1[i] + s1[j] - s2)
    return out


@dataclass
class DiagnosticsReport:
    """Per-state entropy diagnostics for a labeled active space."""

    label: str
    one_orbital_entropies: np.ndarray
    z_s1: float
    mutual_information: np.ndarray
    note: str = NORMALIZATION_NOTE

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "s1": [float(v) for v in self.one_orbital_entropies],
            "z_s1": float(self.z_s1),
            "mutual_information": [
                [float(v) for v in row] for row in self.mutual_information
            ],
            "note": self.note,
        }


def diagnostics_report(state: StateVector, label: str = "") -> DiagnosticsReport:
    m = state.n_qubits // 2
    s1 = np.array([one_orbital_entropy(state, i) for i in range(m)])
    return DiagnosticsReport(
        label=label,
        one_orbital_entropies=s1,
        z_s1=float(s1.sum() / (m * np.log(4.0))),
        mutual_information=mutual_information(state, m) if m >= 2 else np.zeros((m, m)),
    )
