"""Pauli-string algebra on paired bitmasks.

A Pauli string over ``n`` qubits is stored as two integer bitmasks
``(x, z)``: bit ``q`` of ``x`` marks an X factor on qubit ``q``, bit ``q``
of ``z`` marks a Z factor, and a bit set in both marks Y.  The encoded
operator is the literal tensor product of those letters, so every bare
string is hermitian and all phase bookkeeping lives in the complex
coefficient.  Products, adjoints and commutators then reduce to word-level
bit operations on arbitrary-precision Python integers.

The textual dump format used by :meth:`PauliSum.dumps` writes one term per
line as ``coeff_re coeff_im letters`` with the most-significant qubit
(largest index) leftmost in the letter string.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

#: Terms with |coefficient| below this are dropped during pruning.
PRUNE_THRESHOLD = 1e-12

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128),
}


def product_phase(x1: int, z1: int, x2: int, z2: int) -> complex:
    """Phase picked up when multiplying the strings (x1,z1) * (x2,z2).

    Derived from the ``i**|x&z| * X^x * Z^z`` normal form of a letter
    string; the result is always a fourth root of unity.
    """
    x3 = x1 ^ x2
    z3 = z1 ^ z2
    k = (
        (x1 & z1).bit_count()
        + (x2 & z2).bit_count()
        - (x3 & z3).bit_count()
        + 2 * (z1 & x2).bit_count()
    ) % 4
    return _I_POW[k]


@dataclass(frozen=True)
class PauliString:
    """A single weighted Pauli string.

    Attributes
    ----------
    n_qubits : int
        Number of qubits the string acts on.
    x, z : int
        Bitmasks selecting X and Z letters (both set selects Y).
    coefficient : complex
        Scalar weight in front of the letter tensor product.
    """

    n_qubits: int
    x: int
    z: int
    coefficient: complex = 1.0 + 0.0j

    def __post_init__(self) -> None:
        limit = 1 << self.n_qubits
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("bitmask exceeds qubit count")

    @classmethod
    def from_letters(cls, letters: str, coefficient: complex = 1.0) -> "PauliString":
        """Build from a letter string with the most-significant qubit first."""
        x = z = 0
        n = len(letters)
        for pos, letter in enumerate(letters):
            try:
                bx, bz = _LETTER_TO_BITS[letter]
            except KeyError:
                raise ValueError(f"unknown Pauli letter {letter!r}") from None
            q = n - 1 - pos
            x |= bx << q
            z |= bz << q
        return cls(n, x, z, complex(coefficient))

    def letters(self) -> str:
        """Letter string, most-significant qubit first."""
        return "".join(
            _BITS_TO_LETTER[((self.x >> q) & 1, (self.z >> q) & 1)]
            for q in reversed(range(self.n_qubits))
        )

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not isinstance(other, PauliString):
            return NotImplemented
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit count mismatch")
        phase = product_phase(self.x, self.z, other.x, other.z)
        return PauliString(
            self.n_qubits,
            self.x ^ other.x,
            self.z ^ other.z,
            self.coefficient * other.coefficient * phase,
        )

    def adjoint(self) -> "PauliString":
        """Hermitian conjugate; letters are self-adjoint so only the
        coefficient is conjugated."""
        return PauliString(self.n_qubits, self.x, self.z, self.coefficient.conjugate())

    def to_sum(self) -> "PauliSum":
        out = PauliSum(self.n_qubits)
        out.add_term(self.x, self.z, self.coefficient)
        return out


class PauliSum:
    """Weighted sum of Pauli strings with unique letter patterns.

    Terms live in a dict keyed by ``(x, z)``; accumulation merges
    coincident strings so no two stored terms share letters.  Mutating
    operations bump an internal version counter used by downstream
    compilation caches.
    """

    __slots__ = ("n_qubits", "_terms", "_version", "_cache")

    def __init__(self, n_qubits: int):
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        self.n_qubits = n_qubits
        self._terms: dict[tuple[int, int], complex] = {}
        self._version = 0
        self._cache: dict = {}

    # -- construction ---------------------------------------------------

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    @classmethod
    def identity(cls, n_qubits: int, coefficient: complex = 1.0) -> "PauliSum":
        out = cls(n_qubits)
        out.add_term(0, 0, coefficient)
        return out

    @classmethod
    def from_strings(cls, strings: Iterable[PauliString]) -> "PauliSum":
        strings = list(strings)
        if not strings:
            raise ValueError("empty iterable; use PauliSum.zero instead")
        out = cls(strings[0].n_qubits)
        for s in strings:
            if s.n_qubits != out.n_qubits:
                raise ValueError("qubit count mismatch")
            out.add_term(s.x, s.z, s.coefficient)
        return out

    def copy(self) -> "PauliSum":
        out = PauliSum(self.n_qubits)
        out._terms = dict(self._terms)
        return out

    # -- mutation -------------------------------------------------------

    def add_term(self, x: int, z: int, coefficient: complex) -> None:
        key = (x, z)
        acc = self._terms.get(key, 0.0) + coefficient
        if acc == 0.0:
            self._terms.pop(key, None)
        else:
            self._terms[key] = acc
        self._version += 1

    def prune(self, threshold: float = PRUNE_THRESHOLD) -> "PauliSum":
        """Drop terms with |coefficient| < threshold, in place."""
        dead = [k for k, c in self._terms.items() if abs(c) < threshold]
        for k in dead:
            del self._terms[k]
        self._version += 1
        return self

    def add_scaled_product(self, a: "PauliSum", b: "PauliSum", scale: complex = 1.0) -> None:
        """Accumulate ``scale * a * b`` into this sum without temporaries.

        This is the hot path of Hamiltonian assembly; keep it tight.
        """
        if a.n_qubits != self.n_qubits or b.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        terms = self._terms
        for (x1, z1), c1 in a._terms.items():
            c1s = c1 * scale
            for (x2, z2), c2 in b._terms.items():
                key = (x1 ^ x2, z1 ^ z2)
                coeff = c1s * c2 * product_phase(x1, z1, x2, z2)
                acc = terms.get(key, 0.0) + coeff
                if acc == 0.0:
                    terms.pop(key, None)
                else:
                    terms[key] = acc
        self._version += 1

    # -- arithmetic -----------------------------------------------------

    def __iadd__(self, other: "PauliSum | PauliString") -> "PauliSum":
        if isinstance(other, PauliString):
            if other.n_qubits != self.n_qubits:
                raise ValueError("qubit count mismatch")
            self.add_term(other.x, other.z, other.coefficient)
            return self
        if not isinstance(other, PauliSum):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        for key, c in other._terms.items():
            acc = self._terms.get(key, 0.0) + c
            if acc == 0.0:
                self._terms.pop(key, None)
            else:
                self._terms[key] = acc
        self._version += 1
        return self

    def __add__(self, other: "PauliSum | PauliString") -> "PauliSum":
        out = self.copy()
        out += other
        return out

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        out = self.copy()
        out += (-1.0) * other
        return out

    def __mul__(self, other: "PauliSum | complex") -> "PauliSum":
        if isinstance(other, PauliSum):
            out = PauliSum(self.n_qubits)
            out.add_scaled_product(self, other)
            return out
        coeff = complex(other)
        out = PauliSum(self.n_qubits)
        for key, c in self._terms.items():
            out._terms[key] = c * coeff
        out._version += 1
        return out

    def __rmul__(self, other: complex) -> "PauliSum":
        return self.__mul__(other)

    def adjoint(self) -> "PauliSum":
        out = PauliSum(self.n_qubits)
        for key, c in self._terms.items():
            out._terms[key] = c.conjugate()
        out._version += 1
        return out

    # -- inspection -----------------------------------------------------

    def __len__(self) -> int:
        return len(self._terms)

    def terms(self) -> Iterator[tuple[int, int, complex]]:
        """Iterate (x, z, coefficient) in insertion order."""
        for (x, z), c in self._terms.items():
            yield x, z, c

    def sorted_terms(self) -> list[tuple[int, int, complex]]:
        """Terms sorted by (x, z); the deterministic reduction order."""
        return [(x, z, self._terms[(x, z)]) for (x, z) in sorted(self._terms)]

    def coefficient(self, x: int, z: int) -> complex:
        return self._terms.get((x, z), 0.0 + 0.0j)

    def max_imag_coefficient(self) -> float:
        if not self._terms:
            return 0.0
        return max(abs(c.imag) for c in self._terms.values())

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        """All stored strings are self-adjoint, so hermiticity reduces to
        real coefficients."""
        return self.max_imag_coefficient() <= tol

    def to_dense(self) -> np.ndarray:
        """Dense matrix via letter-wise Kronecker products.

        Independent of the bitmask statevector kernels, which makes it a
        useful small-scale cross-check; exponential memory, keep n small.
        """
        dim = 1 << self.n_qubits
        out = np.zeros((dim, dim), dtype=np.complex128)
        for (x, z), c in self._terms.items():
            letters = PauliString(self.n_qubits, x, z).letters()
            mat = np.ones((1, 1), dtype=np.complex128)
            for letter in letters:
                mat = np.kron(mat, _PAULI_MATRICES[letter])
            out += c * mat
        return out

    # -- textual dump ---------------------------------------------------

    def dumps(self) -> str:
        lines = []
        for x, z, c in self.sorted_terms():
            letters = PauliString(self.n_qubits, x, z).letters()
            lines.append(f"{c.real!r} {c.imag!r} {letters}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def loads(cls, text: str, n_qubits: int | None = None) -> "PauliSum":
        strings = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            re_part, im_part, letters = line.split()
            strings.append(
                PauliString.from_letters(letters, complex(float(re_part), float(im_part)))
            )
        if not strings:
            if n_qubits is None:
                raise ValueError("empty dump needs an explicit qubit count")
            return cls.zero(n_qubits)
        out = cls.from_strings(strings)
        if n_qubits is not None and out.n_qubits != n_qubits:
            raise ValueError("qubit count mismatch")
        return out

    def __repr__(self) -> str:
        return f"PauliSum(n_qubits={self.n_qubits}, n_terms={len(self._terms)})"
