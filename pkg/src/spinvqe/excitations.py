"""Matrix-free excitation generators and their exact exponentials.

Every generator g implemented here moves one occupation pattern to another
(g**2 = 0), so the anti-hermitian combination A = g - g+ satisfies
A**3 = -A on the whole space and

    exp(theta A) = 1 + sin(theta) A + (1 - cos(theta)) A**2

is exact, not a truncation.  Each application enumerates the affected
basis-index pairs with bitmasks and applies a two-level rotation with
precomputed Jordan-Wigner parity signs; no operator matrix is ever built.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import StateVector, _U64, _indices, _parity

SINGLE = "single"
DOUBLE = "double"
PAIR_DOUBLE = "pair_double"

_KINDS = (SINGLE, DOUBLE, PAIR_DOUBLE)


@dataclass(frozen=True)
class ExcitationGenerator:
    """Normal-ordered excitation generator g, identified by index tuples.

    kind 'single':       g = a+_t a_s             (spin-orbital s -> t)
    kind 'double':       g = a+_t1 a+_t2 a_s2 a_s1  (spin orbitals, all four
                         distinct; targets and sources stored ascending)
    kind 'pair_double':  g = a+_ta a+_tb a_sb a_sa  (moves the electron pair
                         of spatial orbital s to spatial orbital t)

    Sources/targets of singles and doubles are spin-orbital indices; the
    pair double uses spatial-orbital indices.
    """

    kind: str
    sources: tuple[int, ...]
    targets: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        expect = 2 if self.kind == DOUBLE else 1
        if len(self.sources) != expect or len(self.targets) != expect:
            raise ValueError(f"{self.kind} takes {expect} source/target index(es)")
        touched = set(self.sources) | set(self.targets)
        if len(touched) != 2 * expect:
            raise ValueError("source and target indices must be distinct")
        if self.kind == DOUBLE:
            if self.sources != tuple(sorted(self.sources)) or self.targets != tuple(
                sorted(self.targets)
            ):
                raise ValueError("double indices must be stored ascending")
        if any(i < 0 for i in touched):
            raise ValueError("negative index")

    def qubit_support(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(source qubits, target qubits) in annihilation/creation order."""
        if self.kind == SINGLE:
            return (self.sources[0],), (self.targets[0],)
        if self.kind == DOUBLE:
            return self.sources, self.targets
        s, t = self.sources[0], self.targets[0]
        return (2 * s, 2 * s + 1), (2 * t, 2 * t + 1)

    def max_qubit(self) -> int:
        src, tgt = self.qubit_support()
        return max(src + tgt)


def _pair_indices(gen: ExcitationGenerator, n_qubits: int):
    """Index set I1 (sources occupied, targets empty), its image I2 = I1 ^ flip,
    and the sign s(i) = <i'| (g - g+) |i> for i in I1."""
    src, tgt = gen.qubit_support()
    if gen.max_qubit() >= n_qubits:
        raise ValueError("generator indices exceed qubit count")
    src_mask = 0
    for q in src:
        src_mask |= 1 << q
    tgt_mask = 0
    for q in tgt:
        tgt_mask |= 1 << q
    flip = src_mask | tgt_mask

    idx = _indices(n_qubits)
    sel = ((idx & _U64(src_mask)) == _U64(src_mask)) & ((idx & _U64(tgt_mask)) == 0)
    i1 = idx[sel]
    i2 = i1 ^ _U64(flip)

    if gen.kind == PAIR_DOUBLE:
        # adjacent alpha/beta qubits: the two parity factors cancel exactly
        signs = np.ones(i1.shape, dtype=np.float64)
        return i1, i2, signs

    # Sequential application of g right to left: annihilate ascending source
    # order reversed (a_s1 first for doubles), then create descending.
    parity = np.zeros(i1.shape, dtype=np.uint8)
    current = i1.copy()
    order = [("ann", q) for q in src] + [("cre", q) for q in reversed(tgt)]
    for _, q in order:
        below = (1 << q) - 1
        parity ^= _parity(current, below)
        current = current ^ _U64(1 << q)
    signs = 1.0 - 2.0 * parity
    return i1, i2, signs


def apply_generator(state: StateVector, gen: ExcitationGenerator) -> StateVector:
    """A |psi> with A = g - g+; linear, returns an unnormalized state."""
    i1, i2, signs = _pair_indices(gen, state.n_qubits)
    psi = state.amplitudes
    out = np.zeros_like(psi)
    s = signs.astype(psi.real.dtype)
    out[i2] = s * psi[i1]
    out[i1] = -s * psi[i2]
    return StateVector(state.n_qubits, out)


def apply_excitation_exponential(
    state: StateVector, gen: ExcitationGenerator, theta: float
) -> StateVector:
    """Exactly unitary action of exp(theta (g - g+)) on the state."""
    out = state.copy()
    _exp_inplace(out.amplitudes, gen, theta, state.n_qubits)
    return out.check_normalized()


def _exp_inplace(psi: np.ndarray, gen: ExcitationGenerator, theta: float, n_qubits: int) -> None:
    if theta == 0.0:
        return
    i1, i2, signs = _pair_indices(gen, n_qubits)
    c = np.cos(theta)
    s = np.sin(theta) * signs.astype(psi.real.dtype)
    u = psi[i1]
    v = psi[i2]
    psi[i1] = c * u - s * v
    psi[i2] = c * v + s * u


def one_body_transition(state: StateVector, create: int, annihilate: int) -> StateVector:
    """a+_i a_j |psi> for spin orbitals i, j; matrix-free with JW parity."""
    n = state.n_qubits
    if not (0 <= create < n and 0 <= annihilate < n):
        raise ValueError("spin-orbital index out of range")
    psi = state.amplitudes
    idx = _indices(n)
    out = np.zeros_like(psi)
    if create == annihilate:
        occ = ((idx >> _U64(create)) & _U64(1)).astype(bool)
        out[occ] = psi[occ]
        return StateVector(n, out)
    sel = (((idx >> _U64(annihilate)) & _U64(1)) == 1) & (
        ((idx >> _U64(create)) & _U64(1)) == 0
    )
    i1 = idx[sel]
    parity = _parity(i1, (1 << annihilate) - 1)
    moved = i1 ^ _U64(1 << annihilate)
    parity ^= _parity(moved, (1 << create) - 1)
    signs = (1.0 - 2.0 * parity).astype(psi.real.dtype)
    out[moved ^ _U64(1 << create)] = signs * psi[i1]
    return StateVector(n, out)
