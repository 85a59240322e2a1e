"""Reference states and unitary coupled-cluster generator programs.

Reference determinants follow the restricted open-shell pattern: paired
orbitals first, then singly occupied alpha orbitals.  The two reference
families differ only for the triplet: family T0 uses one determinant per
spin state, family T1 replaces the triplet determinant with a two-branch
superposition carrying static correlation from the start.

Compiled programs are ordered generator lists with parameter-slot bindings.
Within a layer the order is all singles (lexicographic in (p, q, spin))
followed by all pair doubles (lexicographic in (p, q)); compiling the same
specification twice yields the identical program.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .excitations import (
    DOUBLE,
    PAIR_DOUBLE,
    SINGLE,
    ExcitationGenerator,
    _exp_inplace,
)
from .statevector import StateVector, from_ket, ket_string

UCCSD = "uccsd"
UCCGSD = "uccgsd"
KUPCCGSD = "kupccgsd"

TYING_INDEPENDENT = "independent"
TYING_PAPER_COUNT = "paper-count"

_FLAVORS = (UCCSD, UCCGSD, KUPCCGSD)
_TYINGS = (TYING_INDEPENDENT, TYING_PAPER_COUNT)


@dataclass(frozen=True)
class AnsatzSpec:
    """Ansatz family, repetition count and parameter-tying scheme.

    ``tying='independent'`` gives one parameter per generator.  The
    'paper-count' scheme ties the alpha- and beta-channel copies of each
    first-layer generalized single to a shared slot, removing exactly
    M(M-1) parameters from a k-layer pair ansatz.  NOTE: this particular
    tie is a reconstruction; published operator/parameter tallies for the
    pair ansatz fix only the total count, not which slots are shared, and
    spin-channel sharing is the unique choice that both reproduces the
    tallies and keeps the tied rotations non-degenerate (the two channels
    commute, so the tied pair composes into one spin-summed rotation
    instead of cancelling).

    ``spin_adapted_singles`` extends that spin-channel tie to every layer,
    which makes all singles spin-summed and hence exactly total-spin
    preserving.
    """

    flavor: str = KUPCCGSD
    k: int = 1
    spin_adapted_singles: bool = False
    tying: str = TYING_INDEPENDENT

    def __post_init__(self) -> None:
        if self.flavor not in _FLAVORS:
            raise ValueError(f"unknown ansatz flavor {self.flavor!r}")
        if self.tying not in _TYINGS:
            raise ValueError(f"unknown tying scheme {self.tying!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.flavor in (UCCSD, UCCGSD) and self.k != 1:
            raise ValueError(f"{self.flavor} supports k=1 only")


@dataclass(frozen=True)
class AnsatzProgram:
    """Compiled generator sequence with parameter-slot bindings."""

    n_qubits: int
    generators: tuple[ExcitationGenerator, ...]
    layers: tuple[int, ...]
    slots: tuple[int, ...]
    n_parameters: int

    def __post_init__(self) -> None:
        if len(self.generators) != len(self.layers) or len(self.generators) != len(self.slots):
            raise ValueError("generators, layers and slots must align")
        used = set(self.slots)
        if self.n_parameters and used != set(range(self.n_parameters)):
            raise ValueError("every parameter slot must be referenced")

    def __len__(self) -> int:
        return len(self.generators)


@dataclass(frozen=True)
class ReferenceState:
    """Normalized combination of occupation kets with common quantum numbers."""

    n_orb: int
    kets: tuple[tuple[str, complex], ...]
    target_spin: int
    n_electrons: int

    def __post_init__(self) -> None:
        if not self.kets:
            raise ValueError("reference needs at least one ket")
        norm = sum(abs(c) ** 2 for _, c in self.kets)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError("reference coefficients are not normalized")
        counts = {self._spin_counts(ket) for ket, _ in self.kets}
        if len(counts) != 1:
            raise ValueError("all kets must share (n_alpha, n_beta)")

    def _spin_counts(self, ket: str) -> tuple[int, int]:
        na = sum(1 for q, c in enumerate(ket) if c == "1" and q % 2 == 0)
        nb = sum(1 for q, c in enumerate(ket) if c == "1" and q % 2 == 1)
        return na, nb

    @property
    def n_alpha(self) -> int:
        return self._spin_counts(self.kets[0][0])[0]

    @property
    def n_beta(self) -> int:
        return self._spin_counts(self.kets[0][0])[1]

    def to_statevector(self, dtype=np.complex128) -> StateVector:
        sv = from_ket(self.kets[0][0], dtype=dtype)
        sv.amplitudes *= 0.0
        for ket, coeff in self.kets:
            sv.amplitudes[_index_of(ket)] += coeff
        return sv.check_normalized()


def _index_of(ket: str) -> int:
    from .statevector import ket_index

    return ket_index(ket)


def _occupation_ket(n_orb: int, paired: int, alpha_singles: list[int]) -> str:
    occ = 0
    for p in range(paired):
        occ |= 1 << (2 * p)
        occ |= 1 << (2 * p + 1)
    for p in alpha_singles:
        occ |= 1 << (2 * p)
    return ket_string(occ, 2 * n_orb)


def _check_feasible(n_orb: int, n_electrons: int, spin: int, highest_orbital: int) -> None:
    if n_electrons % 2 != 0:
        raise ValueError("reference construction requires an even electron count")
    if spin not in (0, 1, 2):
        raise ValueError("target spin must be 0, 1 or 2")
    if n_electrons - 2 * spin < 0:
        raise ValueError(f"spin {spin} needs at least {2 * spin} electrons")
    if highest_orbital > n_orb:
        raise ValueError(
            f"spin {spin} with {n_electrons} electrons needs {highest_orbital} orbitals, "
            f"have {n_orb}"
        )
    if n_electrons > 2 * n_orb:
        raise ValueError("more electrons than spin orbitals")


def build_reference_T0(n_orb: int, n_electrons: int, spin: int) -> ReferenceState:
    """Single restricted determinant: paired electrons first, then 2S
    alpha-singly-occupied orbitals; an exact S^2 and S_z eigenstate."""
    paired = (n_electrons - 2 * spin) // 2
    _check_feasible(n_orb, n_electrons, spin, paired + 2 * spin)
    singles = list(range(paired, paired + 2 * spin))
    ket = _occupation_ket(n_orb, paired, singles)
    return ReferenceState(n_orb, ((ket, 1.0 + 0.0j),), spin, n_electrons)


def build_reference_T1(n_orb: int, n_electrons: int, spin: int) -> ReferenceState:
    """Reference family with a multi-reference triplet.

    For spin 1 the state is the antisymmetric combination of the two
    determinants that spread the unpaired pair over three orbitals,
    (|k+1, k+2 singly> - |k, k+2 singly>)/sqrt(2) on top of k paired
    orbitals; still an exact S^2 = 2 eigenstate since each branch is one.
    Spins 0 and 2 fall back to the single-determinant construction.
    """
    if spin != 1:
        return build_reference_T0(n_orb, n_electrons, spin)
    paired = (n_electrons - 2) // 2
    _check_feasible(n_orb, n_electrons, spin, paired + 3)
    inv = 1.0 / np.sqrt(2.0)
    ket_a = _occupation_ket(n_orb, paired, [paired + 1, paired + 2])
    ket_b = _occupation_ket(n_orb, paired, [paired, paired + 2])
    return ReferenceState(
        n_orb, ((ket_a, inv + 0.0j), (ket_b, -inv + 0.0j)), spin, n_electrons
    )


def build_reference(family: str, n_orb: int, n_electrons: int, spin: int) -> ReferenceState:
    if family == "T0":
        return build_reference_T0(n_orb, n_electrons, spin)
    if family == "T1":
        return build_reference_T1(n_orb, n_electrons, spin)
    raise ValueError(f"unknown reference family {family!r}")


# ---------------------------------------------------------------------------
# Program compilation
# ---------------------------------------------------------------------------

def _t0_occupied_spin_orbitals(n_orb: int, n_alpha: int, n_beta: int) -> list[int]:
    occ = [2 * p for p in range(n_alpha)]
    occ += [2 * p + 1 for p in range(n_beta)]
    return sorted(occ)


def compile_ansatz(
    spec: AnsatzSpec, n_orb: int, n_alpha: int, n_beta: int
) -> AnsatzProgram:
    """Compile an ansatz specification into a deterministic generator program.

    For the k-layer pair ansatz each layer holds spin-resolved generalized
    singles for every ordered spatial pair in both spin channels plus a
    pair double for every ordered spatial pair: 3 M (M-1) generators per
    layer.  The occupied/virtual partition of the non-generalized flavor is
    read off the single-determinant reference for (n_alpha, n_beta).
    """
    if n_orb < 1:
        raise ValueError("need at least one orbital")
    if not (0 <= n_beta <= n_alpha and 0 < n_alpha + n_beta <= 2 * n_orb):
        raise ValueError("invalid electron counts")
    # a single orbital admits no excitations; the program is legitimately empty

    generators: list[ExcitationGenerator] = []
    layers: list[int] = []
    slot_keys: list[tuple] = []

    def singles_tied(layer: int) -> bool:
        if spec.spin_adapted_singles:
            return True
        return spec.tying == TYING_PAPER_COUNT and layer == 0

    if spec.flavor == KUPCCGSD:
        for layer in range(spec.k):
            tied = singles_tied(layer)
            for p in range(n_orb):
                for q in range(n_orb):
                    if p == q:
                        continue
                    for sigma in (0, 1):
                        generators.append(
                            ExcitationGenerator(
                                SINGLE, (2 * p + sigma,), (2 * q + sigma,)
                            )
                        )
                        layers.append(layer)
                        key = (layer, "s", p, q) if tied else (layer, "s", p, q, sigma)
                        slot_keys.append(key)
            for p in range(n_orb):
                for q in range(n_orb):
                    if p == q:
                        continue
                    generators.append(ExcitationGenerator(PAIR_DOUBLE, (p,), (q,)))
                    layers.append(layer)
                    slot_keys.append((layer, "d", p, q))
    else:
        occupied = _t0_occupied_spin_orbitals(n_orb, n_alpha, n_beta)
        all_so = list(range(2 * n_orb))
        if spec.flavor == UCCSD:
            occ = occupied
            virt = [j for j in all_so if j not in occupied]
            single_pairs = [
                (i, a) for i in occ for a in virt if i % 2 == a % 2
            ]
            occ_pairs = [(i, j) for i in occ for j in occ if i < j]
            virt_pairs = [(a, b) for a in virt for b in virt if a < b]
            double_pairs = [
                (ij, ab)
                for ij in occ_pairs
                for ab in virt_pairs
                if (ij[0] % 2 + ij[1] % 2) == (ab[0] % 2 + ab[1] % 2)
            ]
        else:  # generalized: no occupied/virtual distinction
            single_pairs = [
                (i, a)
                for i in all_so
                for a in all_so
                if i != a and i % 2 == a % 2
            ]
            so_pairs = [(i, j) for i in all_so for j in all_so if i < j]
            double_pairs = [
                (ij, ab)
                for ij in so_pairs
                for ab in so_pairs
                if ij < ab
                and not (set(ij) & set(ab))
                and (ij[0] % 2 + ij[1] % 2) == (ab[0] % 2 + ab[1] % 2)
            ]
        tied = spec.spin_adapted_singles
        for i, a in sorted(single_pairs):
            generators.append(ExcitationGenerator(SINGLE, (i,), (a,)))
            layers.append(0)
            key = (0, "s", i // 2, a // 2) if tied else (0, "s", i, a)
            slot_keys.append(key)
        for ij, ab in sorted(double_pairs):
            generators.append(ExcitationGenerator(DOUBLE, ij, ab))
            layers.append(0)
            slot_keys.append((0, "d", ij, ab))

    slot_of: dict[tuple, int] = {}
    slots = []
    for key in slot_keys:
        if key not in slot_of:
            slot_of[key] = len(slot_of)
        slots.append(slot_of[key])

    return AnsatzProgram(
        n_qubits=2 * n_orb,
        generators=tuple(generators),
        layers=tuple(layers),
        slots=tuple(slots),
        n_parameters=len(slot_of),
    )


def apply_ansatz(state: StateVector, program: AnsatzProgram, theta: np.ndarray) -> StateVector:
    """Apply the compiled generator exponentials in program order."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (program.n_parameters,):
        raise ValueError(
            f"parameter vector has length {theta.size}, program needs {program.n_parameters}"
        )
    if program.n_qubits != state.n_qubits:
        raise ValueError("program and state qubit counts differ")
    out = state.copy()
    amps = out.amplitudes
    for gen, slot in zip(program.generators, program.slots):
        _exp_inplace(amps, gen, float(theta[slot]), program.n_qubits)
    return out.check_normalized()
