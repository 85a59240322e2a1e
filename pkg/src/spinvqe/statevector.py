"""Dense statevector engine: Pauli application, expectations, partial traces.

Amplitudes live in a flat array of length 2**n; bit ``q`` of a basis index
is the occupation of qubit ``q``.  Occupation kets are written with qubit 0
leftmost, so the string ``"1110"`` is the basis state with qubits 0, 1 and 2
occupied.

Kernels are data-parallel over basis indices: each Pauli term turns into an
index permutation (its X mask) and a diagonal phase vector (its Z mask), so
repeated applications of the same operator reuse a compiled group table.
A module-level switch pins the term reduction order for bitwise-reproducible
runs.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .pauli import PauliSum

_U64 = np.uint64

#: dtype keyed by the precision names used in run configurations.
PRECISION_DTYPES = {"f64": np.complex128, "f32": np.complex64}

#: Compiled Pauli tables are kept only while group_count * 2**n stays under
#: this element budget; larger operators fall back to streaming application.
_COMPILED_BUDGET = 1 << 26

_deterministic_reduction = False


def set_deterministic_reduction(flag: bool) -> None:
    """Pin Pauli-term reduction to sorted order for reproducible runs."""
    global _deterministic_reduction
    _deterministic_reduction = bool(flag)


def deterministic_reduction() -> bool:
    return _deterministic_reduction


def norm_tolerance(dtype) -> float:
    return 1e-5 if np.dtype(dtype) == np.complex64 else 1e-12


def _indices(n_qubits: int) -> np.ndarray:
    return np.arange(1 << n_qubits, dtype=_U64)


def _parity(idx: np.ndarray, mask: int) -> np.ndarray:
    return np.bitwise_count(idx & _U64(mask)).astype(np.uint8) & np.uint8(1)


def _signs(idx: np.ndarray, mask: int) -> np.ndarray:
    return 1.0 - 2.0 * _parity(idx, mask)


@dataclass
class StateVector:
    """2**n complex amplitudes over qubits in alternating alpha/beta order."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude array length is not 2**n_qubits")
        if self.amplitudes.dtype not in (np.complex64, np.complex128):
            self.amplitudes = self.amplitudes.astype(np.complex128)

    @property
    def dtype(self):
        return self.amplitudes.dtype

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def astype(self, dtype) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.astype(dtype))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def check_normalized(self) -> "StateVector":
        dev = abs(self.norm() - 1.0)
        tol = norm_tolerance(self.dtype)
        if dev > tol:
            raise ValueError(f"state norm deviates from 1 by {dev:.2e} (tol {tol:.0e})")
        return self


def zero_state(n_qubits: int, dtype=np.complex128) -> StateVector:
    amps = np.zeros(1 << n_qubits, dtype=dtype)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def basis_state(n_qubits: int, index: int, dtype=np.complex128) -> StateVector:
    if not 0 <= index < (1 << n_qubits):
        raise ValueError("basis index out of range")
    amps = np.zeros(1 << n_qubits, dtype=dtype)
    amps[index] = 1.0
    return StateVector(n_qubits, amps)


def ket_index(ket: str) -> int:
    """Basis index of an occupation ket written with qubit 0 leftmost."""
    index = 0
    for q, char in enumerate(ket):
        if char == "1":
            index |= 1 << q
        elif char != "0":
            raise ValueError(f"occupation ket may only contain 0/1, got {char!r}")
    return index


def ket_string(index: int, n_qubits: int) -> str:
    return "".join("1" if (index >> q) & 1 else "0" for q in range(n_qubits))


def from_ket(ket: str, dtype=np.complex128) -> StateVector:
    return basis_state(len(ket), ket_index(ket), dtype=dtype)


def random_state(n_qubits: int, rng: np.random.Generator, dtype=np.complex128) -> StateVector:
    amps = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    amps /= np.linalg.norm(amps)
    return StateVector(n_qubits, amps.astype(dtype))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """Sesquilinear product <a|b>."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit count mismatch")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


# ---------------------------------------------------------------------------
# Pauli-sum application
# ---------------------------------------------------------------------------

def _compiled_groups(op: PauliSum, dtype) -> list[tuple[int, np.ndarray]] | None:
    """Group terms by X mask into (flip mask, diagonal weight vector) pairs.

    The weight vector folds every Z mask and the i**|x & z| letter phase of
    its group into one diagonal, evaluated at the input index, so applying a
    group is one gather plus one multiply.  Returns None when the table
    would blow the memory budget.
    """
    n = op.n_qubits
    key = (op._version, np.dtype(dtype), _deterministic_reduction)
    cached = op._cache.get("groups")
    if cached is not None and cached[0] == key:
        return cached[1]

    terms = op.sorted_terms() if _deterministic_reduction else list(op.terms())
    x_masks = {x for x, _, _ in terms}
    if len(x_masks) * (1 << n) > _COMPILED_BUDGET:
        return None

    idx = _indices(n)
    groups: dict[int, np.ndarray] = {}
    for x, z, c in terms:
        phase = (1j) ** ((x & z).bit_count() % 4)
        vec = groups.get(x)
        if vec is None:
            vec = np.zeros(1 << n, dtype=np.complex128)
            groups[x] = vec
        vec += (c * phase) * _signs(idx, z)
    table = [(x, groups[x].astype(dtype)) for x in groups]
    op._cache["groups"] = (key, table)
    return table


def apply_pauli_sum(state: StateVector, op: PauliSum) -> StateVector:
    """Linear action of a Pauli sum; the result is not normalized."""
    if op.n_qubits != state.n_qubits:
        raise ValueError("operator and state qubit counts differ")
    psi = state.amplitudes
    idx = _indices(state.n_qubits)
    out = np.zeros_like(psi)
    table = _compiled_groups(op, psi.dtype)
    if table is not None:
        for x, weights in table:
            scaled = weights * psi
            if x == 0:
                out += scaled
            else:
                out += scaled[idx ^ _U64(x)]
        return StateVector(state.n_qubits, out)

    terms = op.sorted_terms() if _deterministic_reduction else list(op.terms())
    for x, z, c in terms:
        phase = (1j) ** ((x & z).bit_count() % 4)
        scaled = (c * phase) * _signs(idx, z) * psi
        if x == 0:
            out += scaled
        else:
            out += scaled[idx ^ _U64(x)]
    return StateVector(state.n_qubits, out)


def expectation(state: StateVector, op: PauliSum, imag_tol: float | None = None) -> float:
    """Real expectation value <psi|op|psi> of a hermitian Pauli sum."""
    if not op.is_hermitian():
        raise ValueError("expectation requires a hermitian operator")
    applied = apply_pauli_sum(state, op)
    value = complex(np.vdot(state.amplitudes, applied.amplitudes))
    if imag_tol is None:
        imag_tol = 1e-10 if state.dtype == np.complex128 else 1e-4
    scale = max(1.0, abs(value))
    if abs(value.imag) > imag_tol * scale:
        raise ValueError(f"expectation has imaginary residue {value.imag:.2e}")
    return value.real


# ---------------------------------------------------------------------------
# Orbital reduced densities
# ---------------------------------------------------------------------------

def reduced_density(state: StateVector, spatial_orbitals: list[int]) -> np.ndarray:
    """Reduced density matrix of one or two spatial orbitals.

    The occupation basis per orbital is {vac, alpha, beta, alpha-beta}, so
    the result is 4x4 for one orbital and 16x16 for two (first listed
    orbital is the low pair of basis bits).  Fermionic antisymmetry is
    handled by reordering the target modes to the front with the parity
    sign of jumping occupied non-target modes before tracing; without those
    signs the off-diagonal blocks come out wrong for entangled states.
    """
    n = state.n_qubits
    m = n // 2
    if len(spatial_orbitals) not in (1, 2):
        raise ValueError("reduced_density takes one or two orbital indices")
    if len(set(spatial_orbitals)) != len(spatial_orbitals):
        raise ValueError("orbital indices must be distinct")
    for orb in spatial_orbitals:
        if not 0 <= orb < m:
            raise ValueError(f"orbital {orb} outside [0, {m})")

    targets = [q for orb in spatial_orbitals for q in (2 * orb, 2 * orb + 1)]
    rest = [q for q in range(n) if q not in targets]
    position = {q: k for k, q in enumerate(targets + rest)}

    idx = _indices(n)
    inversions = np.zeros(1 << n, dtype=np.uint8)
    for m1 in range(n):
        for m2 in range(m1 + 1, n):
            if position[m1] > position[m2]:
                occ_both = ((idx >> _U64(m1)) & (idx >> _U64(m2))) & _U64(1)
                inversions ^= occ_both.astype(np.uint8)
    signs = 1.0 - 2.0 * inversions

    tau = np.zeros(1 << n, dtype=np.int64)
    for k, q in enumerate(targets):
        tau |= (((idx >> _U64(q)) & _U64(1)) << _U64(k)).astype(np.int64)
    rho_rest = np.zeros(1 << n, dtype=np.int64)
    for k, q in enumerate(rest):
        rho_rest |= (((idx >> _U64(q)) & _U64(1)) << _U64(k)).astype(np.int64)

    block = np.zeros((1 << len(targets), 1 << len(rest)), dtype=np.complex128)
    block[tau, rho_rest] = signs * state.amplitudes.astype(np.complex128)
    rho = block @ block.conj().T
    return rho


# ---------------------------------------------------------------------------
# Binary snapshots
# ---------------------------------------------------------------------------

_SNAPSHOT_HEADER = struct.Struct("<II")
_PRECISION_FLAGS = {np.dtype(np.complex128): 0, np.dtype(np.complex64): 1}
_FLAG_DTYPES = {0: np.dtype("<c16"), 1: np.dtype("<c8")}


def save_state(state: StateVector, path) -> None:
    """Write a snapshot: header (n_qubits, precision flag) then raw
    little-endian amplitudes.  Flag 0 is complex128, 1 is complex64."""
    flag = _PRECISION_FLAGS[np.dtype(state.dtype)]
    with open(path, "wb") as fh:
        fh.write(_SNAPSHOT_HEADER.pack(state.n_qubits, flag))
        fh.write(state.amplitudes.astype(_FLAG_DTYPES[flag]).tobytes())


def load_state(path) -> StateVector:
    with open(path, "rb") as fh:
        raw = fh.read(_SNAPSHOT_HEADER.size)
        if len(raw) != _SNAPSHOT_HEADER.size:
            raise ValueError("snapshot truncated before header end")
        n_qubits, flag = _SNAPSHOT_HEADER.unpack(raw)
        if flag not in _FLAG_DTYPES:
            raise ValueError(f"unknown precision flag {flag}")
        dtype = _FLAG_DTYPES[flag]
        data = fh.read()
    expected = (1 << n_qubits) * dtype.itemsize
    if len(data) != expected:
        raise ValueError("snapshot payload length does not match header")
    amps = np.frombuffer(data, dtype=dtype).astype(
        np.complex128 if flag == 0 else np.complex64
    )
    return StateVector(n_qubits, amps)
