"""Active-space electron integrals: parsing, validation, contraction, rotation.

Two-electron integrals use the chemists' convention ``g[p, q, r, s] = (pq|rs)``
paired with the operator order ``a+_p a+_r a_s a_q``, so the electronic energy
of a state with spin-summed density matrices ``gamma`` and ``Gamma`` is

    E = sum_pq h[p,q] gamma[p,q] + 1/2 sum_pqrs g[p,q,r,s] Gamma[p,q,r,s] + core

FCIDUMP producers vary in their conventions; the reader below assumes the
standard Molpro layout, which stores (ij|kl) with 1-based indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

SYMMETRY_TOL = 1e-12
#: Two entries for the same canonical integral must agree to this.
DUPLICATE_TOL = 1e-12


class FcidumpError(ValueError):
    """Malformed FCIDUMP content; message carries the offending line number."""


@dataclass
class ActiveSpaceIntegrals:
    """Effective one- and two-electron integrals of an active space.

    Attributes
    ----------
    n_orb : int
        Number of active spatial orbitals.
    n_alpha, n_beta : int
        Active electron counts per spin channel.
    core_energy : float
        Constant shift in Hartree; absorbs nuclear repulsion and the
        inactive-shell contributions.
    h : ndarray, shape (M, M)
        Effective one-electron integrals, symmetric.
    g : ndarray, shape (M, M, M, M)
        Two-electron integrals (pq|rs), 8-fold symmetric.
    orbsym : tuple of int, optional
        Orbital symmetry labels carried through from the file; unused.
    isym : int, optional
        Wavefunction symmetry label carried through from the file; unused.
    """

    n_orb: int
    n_alpha: int
    n_beta: int
    core_energy: float
    h: np.ndarray
    g: np.ndarray
    orbsym: tuple[int, ...] | None = None
    isym: int | None = None

    def __post_init__(self) -> None:
        self.h = np.asarray(self.h, dtype=np.float64)
        self.g = np.asarray(self.g, dtype=np.float64)
        m = self.n_orb
        if self.h.shape != (m, m):
            raise ValueError(f"h has shape {self.h.shape}, expected {(m, m)}")
        if self.g.shape != (m, m, m, m):
            raise ValueError(f"g has shape {self.g.shape}, expected 4x{m}")
        n = self.n_alpha + self.n_beta
        if not (0 < n <= 2 * m):
            raise ValueError(f"electron count {n} outside (0, {2 * m}]")
        if self.n_alpha < self.n_beta:
            raise ValueError("n_alpha must be >= n_beta")

    @property
    def n_electrons(self) -> int:
        return self.n_alpha + self.n_beta

    def validate_symmetry(self, tol: float = SYMMETRY_TOL) -> None:
        """Check h symmetry and the 8-fold symmetry of g."""
        if np.max(np.abs(self.h - self.h.T)) > tol:
            raise ValueError("one-electron integrals are not symmetric")
        g = self.g
        for image in (
            g.transpose(1, 0, 2, 3),
            g.transpose(0, 1, 3, 2),
            g.transpose(2, 3, 0, 1),
        ):
            if np.max(np.abs(g - image)) > tol:
                raise ValueError("two-electron integrals violate 8-fold symmetry")


@dataclass
class OrbitalRotation:
    """Antisymmetric orbital-rotation parameters.

    Only the strictly upper triangle is independent; the full matrix is
    reconstructed as ``kappa - kappa.T`` so antisymmetry holds exactly.
    """

    kappa: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    @classmethod
    def from_upper(cls, upper: np.ndarray) -> "OrbitalRotation":
        """Build from any matrix by keeping its strictly upper triangle."""
        upper = np.asarray(upper, dtype=np.float64)
        tri = np.triu(upper, k=1)
        return cls(kappa=tri - tri.T)

    @classmethod
    def from_orthogonal(cls, u: np.ndarray) -> "OrbitalRotation":
        """Principal matrix logarithm of a special-orthogonal matrix."""
        from scipy.linalg import logm

        k = logm(np.asarray(u, dtype=np.float64))
        k = np.real(k)
        return cls.from_upper(k)

    def __post_init__(self) -> None:
        self.kappa = np.asarray(self.kappa, dtype=np.float64)
        tri = np.triu(self.kappa, k=1)
        self.kappa = tri - tri.T

    @property
    def n_orb(self) -> int:
        return self.kappa.shape[0]

    def matrix(self) -> np.ndarray:
        """Orthogonal rotation matrix exp(kappa)."""
        return expm_antisymmetric(self.kappa)


def expm_antisymmetric(kappa: np.ndarray) -> np.ndarray:
    """Exponential of a real antisymmetric matrix via eigendecomposition.

    ``1j * kappa`` is hermitian, so exp(kappa) = V diag(exp(-i w)) V+ with
    an exactly unitary eigenbasis; the result is orthogonal to machine
    precision, which the composition invariants rely on.
    """
    kappa = np.asarray(kappa, dtype=np.float64)
    if np.max(np.abs(kappa + kappa.T), initial=0.0) > 1e-12:
        raise ValueError("kappa is not antisymmetric")
    if kappa.size == 0:
        return np.eye(0)
    w, v = np.linalg.eigh(1j * kappa)
    u = (v * np.exp(-1j * w)) @ v.conj().T
    residue = np.max(np.abs(u.imag))
    if residue > 1e-12:
        raise ValueError(f"rotation matrix has imaginary residue {residue:.2e}")
    return np.real(u)


def energy_from_rdms(
    ints: ActiveSpaceIntegrals, gamma: np.ndarray, big_gamma: np.ndarray
) -> float:
    """Contract integrals with spin-summed density matrices.

    Parameters
    ----------
    gamma : ndarray, shape (M, M)
        Spin-summed 1-RDM, ``gamma[p, q] = <a+_p a_q>``.
    big_gamma : ndarray, shape (M, M, M, M)
        Spin-summed 2-RDM with ``<a+_p a+_r a_s a_q>`` stored at
        ``[p, q, r, s]``, matching the index convention of ``g``.

    Returns
    -------
    float
        Electronic energy in Hartree, including the core shift.
    """
    m = ints.n_orb
    gamma = np.asarray(gamma, dtype=np.float64)
    big_gamma = np.asarray(big_gamma, dtype=np.float64)
    if gamma.shape != (m, m) or big_gamma.shape != (m, m, m, m):
        raise ValueError("density matrix dimensions do not match n_orb")
    one = float(np.sum(ints.h * gamma))
    two = 0.5 * float(np.sum(ints.g * big_gamma))
    return one + two + ints.core_energy


def rotate_integrals(ints: ActiveSpaceIntegrals, rot: OrbitalRotation) -> ActiveSpaceIntegrals:
    """Similarity-transform the integrals by the orbital rotation exp(kappa).

    ``h' = U.T h U`` and the matching four-index transform of ``g``, applied
    one index at a time.  The core energy is untouched and the result keeps
    all symmetry invariants of the input.
    """
    if rot.n_orb != ints.n_orb:
        raise ValueError("rotation dimension does not match n_orb")
    u = rot.matrix()
    h = u.T @ ints.h @ u
    g = ints.g
    g = np.tensordot(u, g, axes=([0], [0]))          # a <- p
    g = np.tensordot(u, g, axes=([0], [1])).transpose(1, 0, 2, 3)
    g = np.tensordot(u, g, axes=([0], [2])).transpose(1, 2, 0, 3)
    g = np.tensordot(u, g, axes=([0], [3])).transpose(1, 2, 3, 0)
    out = ActiveSpaceIntegrals(
        n_orb=ints.n_orb,
        n_alpha=ints.n_alpha,
        n_beta=ints.n_beta,
        core_energy=ints.core_energy,
        h=0.5 * (h + h.T),
        g=g,
        orbsym=ints.orbsym,
        isym=ints.isym,
    )
    out.validate_symmetry(tol=1e-9)
    return out


# ---------------------------------------------------------------------------
# FCIDUMP parsing
# ---------------------------------------------------------------------------

def _eightfold_images(i: int, j: int, k: int, l: int) -> tuple[tuple[int, int, int, int], ...]:
    return (
        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
    )


def _parse_header(lines: list[str]) -> tuple[dict, int]:
    """Parse the &FCI namelist; returns (fields, index of first body line)."""
    header_tokens: list[str] = []
    end_line = None
    for lineno, line in enumerate(lines):
        stripped = line.strip()
        if lineno == 0:
            if not stripped.upper().startswith("&FCI"):
                raise FcidumpError("line 1: missing &FCI header")
            stripped = stripped[4:]
        if "&END" in stripped.upper() or stripped.rstrip().endswith("/") or stripped == "/":
            idx = stripped.upper().find("&END")
            if idx < 0:
                idx = stripped.rfind("/")
            header_tokens.append(stripped[:idx])
            end_line = lineno
            break
        header_tokens.append(stripped)
    if end_line is None:
        raise FcidumpError("header is not terminated by &END or /")

    text = " ".join(header_tokens).replace("=", " = ")
    tokens = [t for t in text.replace(",", " ").split() if t]
    fields: dict[str, list[str]] = {}
    key = None
    i = 0
    while i < len(tokens):
        if i + 1 < len(tokens) and tokens[i + 1] == "=":
            key = tokens[i].upper()
            fields[key] = []
            i += 2
            continue
        if tokens[i] == "=":
            i += 1
            continue
        if key is None:
            raise FcidumpError(f"header token {tokens[i]!r} outside any KEY=VALUE pair")
        fields[key].append(tokens[i])
        i += 1

    def ints_of(name: str) -> list[int]:
        try:
            return [int(v) for v in fields[name]]
        except (KeyError, ValueError):
            raise FcidumpError(f"header field {name} missing or non-integer") from None

    out = {}
    for name in ("NORB", "NELEC", "MS2"):
        if name not in fields or not fields[name]:
            if name == "MS2":
                out["MS2"] = 0
                continue
            raise FcidumpError(f"header field {name} missing")
        out[name] = ints_of(name)[0]
    if "ORBSYM" in fields and fields["ORBSYM"]:
        out["ORBSYM"] = tuple(ints_of("ORBSYM"))
    if "ISYM" in fields and fields["ISYM"]:
        out["ISYM"] = ints_of("ISYM")[0]
    return out, end_line + 1


def parse_fcidump(text: str) -> ActiveSpaceIntegrals:
    """Parse FCIDUMP text into fully symmetry-expanded integrals.

    Body lines read ``value i j k l`` with 1-based indices: ``(i j 0 0)``
    is a one-electron integral, ``(0 0 0 0)`` the core energy, anything
    else a two-electron integral (ij|kl).  Each stored entry is expanded
    to its full symmetry orbit; two entries that land in the same orbit
    must agree to ``DUPLICATE_TOL`` (last-write-wins would hide producer
    bugs, so it is an error instead).
    """
    lines = text.splitlines()
    header, body_start = _parse_header(lines)
    m = header["NORB"]
    if m < 1:
        raise FcidumpError("NORB must be positive")
    nelec = header["NELEC"]
    ms2 = header["MS2"]
    if ms2 < 0:
        raise FcidumpError("MS2 < 0 unsupported; relabel the spin channels")
    if (nelec + ms2) % 2 != 0:
        raise FcidumpError("NELEC and MS2 have inconsistent parity")
    n_alpha = (nelec + ms2) // 2
    n_beta = (nelec - ms2) // 2
    if n_beta < 0:
        raise FcidumpError("MS2 exceeds NELEC")

    h = np.zeros((m, m))
    g = np.zeros((m, m, m, m))
    core = 0.0
    seen_one: dict[tuple[int, int], tuple[float, int]] = {}
    seen_two: dict[tuple[int, int, int, int], tuple[float, int]] = {}
    seen_core: tuple[float, int] | None = None

    for lineno0 in range(body_start, len(lines)):
        lineno = lineno0 + 1
        parts = lines[lineno0].split()
        if not parts:
            continue
        if len(parts) != 5:
            raise FcidumpError(f"line {lineno}: expected 'value i j k l'")
        try:
            value = float(parts[0])
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError:
            raise FcidumpError(f"line {lineno}: unparsable number") from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > m:
                raise FcidumpError(f"line {lineno}: index {idx} outside [1, {m}]")

        if i == j == k == l == 0:
            if seen_core is not None and abs(seen_core[0] - value) > DUPLICATE_TOL:
                raise FcidumpError(
                    f"line {lineno}: core energy conflicts with line {seen_core[1]}"
                )
            seen_core = (value, lineno)
            core = value
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpError(f"line {lineno}: one-electron entry with zero index")
            canon = (min(i, j) - 1, max(i, j) - 1)
            prev = seen_one.get(canon)
            if prev is not None and abs(prev[0] - value) > DUPLICATE_TOL:
                raise FcidumpError(
                    f"line {lineno}: h({i},{j}) conflicts with line {prev[1]}"
                )
            seen_one[canon] = (value, lineno)
            h[i - 1, j - 1] = value
            h[j - 1, i - 1] = value
        else:
            if 0 in (i, j, k, l):
                raise FcidumpError(f"line {lineno}: two-electron entry with zero index")
            images = _eightfold_images(i - 1, j - 1, k - 1, l - 1)
            canon = min(images)
            prev = seen_two.get(canon)
            if prev is not None and abs(prev[0] - value) > DUPLICATE_TOL:
                raise FcidumpError(
                    f"line {lineno}: g({i},{j},{k},{l}) conflicts with line {prev[1]}"
                )
            seen_two[canon] = (value, lineno)
            for image in images:
                g[image] = value

    out = ActiveSpaceIntegrals(
        n_orb=m,
        n_alpha=n_alpha,
        n_beta=n_beta,
        core_energy=core,
        h=h,
        g=g,
        orbsym=header.get("ORBSYM"),
        isym=header.get("ISYM"),
    )
    out.validate_symmetry()
    return out


def load_fcidump(path: str | Path) -> ActiveSpaceIntegrals:
    return parse_fcidump(Path(path).read_text())


def random_integrals(
    n_orb: int,
    n_alpha: int,
    n_beta: int,
    rng: np.random.Generator,
    scale: float = 1.0,
    core_energy: float | None = None,
) -> ActiveSpaceIntegrals:
    """Random symmetric integrals; handy for property tests and demos."""
    h = rng.uniform(-scale, scale, size=(n_orb, n_orb))
    h = 0.5 * (h + h.T)
    g = rng.uniform(-scale, scale, size=(n_orb,) * 4)
    acc = np.zeros_like(g)
    for perm in ((0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
                 (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0)):
        acc += g.transpose(perm)
    g = acc / 8.0
    if core_energy is None:
        core_energy = float(rng.uniform(-scale, scale))
    return ActiveSpaceIntegrals(
        n_orb=n_orb, n_alpha=n_alpha, n_beta=n_beta,
        core_energy=core_energy, h=h, g=g,
    )
