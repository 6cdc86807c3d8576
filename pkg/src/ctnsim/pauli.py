"""Signed n-qubit Pauli strings in binary-symplectic form.

A Pauli operator is stored as two length-n bit vectors plus a phase:

    P = i^phase * L_0 (x) L_1 (x) ... (x) L_{n-1}

where the letter on site k is determined by the bit pair (x[k], z[k]):

    (0,0) -> I,  (1,0) -> X,  (1,1) -> Y,  (0,1) -> Z

and ``phase`` is an exponent of i modulo 4, so the operator's scalar
prefactor ranges over {+1, +i, -1, -i}. Letters are the Hermitian Pauli
matrices; the full i-power (not just a sign) is tracked because rotation
generators combine with complex coefficients.

Text format: ``[+-]?i?[IXYZ]{n}`` with site 0 leftmost, e.g. ``-iXIZ``.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionMismatch, PauliParseError, SizeGuard

# i-exponent picked up when multiplying two letters, indexed by the
# letter codes 2x+z (0=I, 1=Z, 2=X, 3=Y): L_a L_b = i^DELTA[a,b] L_{a^b}.
_DELTA = np.array(
    [[0, 0, 0, 0],
     [0, 0, 1, 3],
     [0, 3, 0, 1],
     [0, 1, 3, 0]], dtype=np.uint8)

_LETTER_OF_CODE = "IZXY"
_BITS_OF_LETTER = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}

_MAT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_PHASE_PREFIX = {0: "", 1: "i", 2: "-", 3: "-i"}

_MATRIX_QUBIT_GUARD = 10


class PauliString:
    """Signed Pauli operator on ``n`` qubits."""

    __slots__ = ("n", "x", "z", "phase")

    def __init__(self, x, z, phase=0):
        self.x = np.asarray(x, dtype=np.uint8) % 2
        self.z = np.asarray(z, dtype=np.uint8) % 2
        if self.x.ndim != 1 or self.x.shape != self.z.shape:
            raise DimensionMismatch("x and z bit vectors must be 1-d and equal length")
        self.n = self.x.shape[0]
        self.phase = int(phase) % 4

    @classmethod
    def identity(cls, n):
        return cls(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8), 0)

    @classmethod
    def single(cls, n, site, letter, phase=0):
        """Pauli with one non-identity letter at ``site``."""
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        x[site], z[site] = _BITS_OF_LETTER[letter]
        return cls(x, z, phase)

    @property
    def codes(self):
        """Per-site letter codes 2x+z."""
        return (2 * self.x + self.z).astype(np.uint8)

    def letters(self) -> str:
        return "".join(_LETTER_OF_CODE[c] for c in self.codes)

    def letter_at(self, site) -> str:
        return _LETTER_OF_CODE[2 * self.x[site] + self.z[site]]

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def support(self):
        """Indices of non-identity sites."""
        return np.flatnonzero(self.x | self.z)

    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def copy(self) -> "PauliString":
        return PauliString(self.x.copy(), self.z.copy(), self.phase)

    def phase_factor(self) -> complex:
        return 1j ** self.phase

    def __mul__(self, other):
        return pauli_multiply(self, other)

    def __eq__(self, other):
        return (isinstance(other, PauliString) and self.n == other.n
                and self.phase == other.phase
                and np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z))

    def __hash__(self):
        return hash((self.phase, self.x.tobytes(), self.z.tobytes()))

    def __repr__(self):
        return f"PauliString({format_pauli(self)!r})"

    def key(self):
        """Hashable canonical key (phase, packed bits)."""
        return (self.phase, self.x.tobytes(), self.z.tobytes())

    def to_matrix(self) -> np.ndarray:
        """Dense matrix (site 0 = most significant factor); oracle use only."""
        if self.n > _MATRIX_QUBIT_GUARD:
            raise SizeGuard(f"dense Pauli requested for n={self.n} > {_MATRIX_QUBIT_GUARD}")
        m = np.array([[1j ** self.phase]])
        for letter in self.letters():
            m = np.kron(m, _MAT[letter])
        return m


def pauli_parse(text: str) -> PauliString:
    """Parse ``[+-]?i?[IXYZ]+`` into a PauliString.

    Raises PauliParseError naming the first bad index in the input text.
    """
    if not text:
        raise PauliParseError(text or " ", 0, "empty Pauli string")
    pos = 0
    phase = 0
    if text[pos] in "+-":
        if text[pos] == "-":
            phase += 2
        pos += 1
    if pos < len(text) and text[pos] == "i":
        phase += 1
        pos += 1
    letters = text[pos:]
    if not letters:
        raise PauliParseError(text, max(len(text) - 1, 0), "no Pauli letters")
    n = len(letters)
    x = np.zeros(n, dtype=np.uint8)
    z = np.zeros(n, dtype=np.uint8)
    for k, letter in enumerate(letters):
        if letter not in _BITS_OF_LETTER:
            raise PauliParseError(text, pos + k)
        x[k], z[k] = _BITS_OF_LETTER[letter]
    return PauliString(x, z, phase)


def format_pauli(p: PauliString) -> str:
    """Inverse of pauli_parse: sign prefix plus letters."""
    return _PHASE_PREFIX[p.phase] + p.letters()


def pauli_multiply(p: PauliString, q: PauliString) -> PauliString:
    """Group product p*q with the accumulated i-power."""
    if p.n != q.n:
        raise DimensionMismatch(f"cannot multiply Paulis on {p.n} and {q.n} qubits")
    phase = (p.phase + q.phase + int(_DELTA[p.codes, q.codes].sum())) % 4
    return PauliString(p.x ^ q.x, p.z ^ q.z, phase)


def pauli_commutes(p: PauliString, q: PauliString) -> bool:
    """True iff the symplectic form <p.x,q.z> + <p.z,q.x> vanishes mod 2."""
    if p.n != q.n:
        raise DimensionMismatch(f"cannot compare Paulis on {p.n} and {q.n} qubits")
    return int(p.x @ q.z + p.z @ q.x) % 2 == 0
