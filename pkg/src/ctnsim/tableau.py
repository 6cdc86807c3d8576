"""Stabilizer-tableau representation of Clifford unitaries.

A Clifford C on n qubits is stored by the images of the 2n Pauli
generators under conjugation:

    row 2k   encodes  C X_k C^dagger
    row 2k+1 encodes  C Z_k C^dagger

``bits`` is a (2n, 2n) GF(2) matrix whose columns are interleaved per site
as (x_0, z_0, x_1, z_1, ...); ``phases[r]`` is the i-exponent of image r in
letter form (always even for a valid tableau). The bit block is exactly a
binary symplectic matrix, so tableaus compose as M_{B.A} = M_A M_B.

Composition convention used throughout: ``compose(a, b, "left")`` returns
b.a (b applied after a), ``"right"`` returns a.b.

The dense lift fixes the global phase so that C|0...0> has a real positive
amplitude on its first nonzero computational component; all statevector
comparisons elsewhere assume only that single convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _symplectic as sp
from .exceptions import CtnError, DimensionMismatch, SizeGuard, ValidationError
from .pauli import PauliString, pauli_multiply

_UNITARY_QUBIT_GUARD = 5

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.diag([1, 1j]).astype(complex)
_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
}

_GATE_1Q = {
    "H": _H,
    "S": _S,
    "Sdg": _S.conj().T,
    "X": _PAULI_1Q["X"],
    "Y": _PAULI_1Q["Y"],
    "Z": _PAULI_1Q["Z"],
}
_GATE_2Q_KINDS = ("CX", "CZ", "SWAP", "CP")


@dataclass(frozen=True)
class CliffordGate:
    """Named Clifford gate on an ordered site tuple.

    CP is a controlled Pauli: on the +1 eigenspace of ``basis`` at the
    control (sites[0]) it acts as identity, on the -1 eigenspace it applies
    ``pauli`` to the target. CP(Z, X) is CX and CP(Z, Z) is CZ.
    """

    kind: str
    sites: tuple
    pauli: Optional[str] = None
    basis: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        if len(set(self.sites)) != len(self.sites):
            raise ValidationError(f"gate sites must be distinct: {self.sites}")
        if self.kind in _GATE_1Q:
            if len(self.sites) != 1:
                raise ValidationError(f"{self.kind} takes one site")
        elif self.kind in _GATE_2Q_KINDS:
            if len(self.sites) != 2:
                raise ValidationError(f"{self.kind} takes two sites")
            if self.kind == "CP" and (self.pauli not in ("X", "Y", "Z")
                                      or self.basis not in ("X", "Y", "Z")):
                raise ValidationError("CP needs pauli and basis letters in {X,Y,Z}")
        else:
            raise ValidationError(f"unknown gate kind {self.kind!r}")

    def matrix(self) -> np.ndarray:
        """Dense matrix on the gate's sites, sites[0] = most significant."""
        if self.kind in _GATE_1Q:
            return _GATE_1Q[self.kind].copy()
        if self.kind == "CX":
            return gate_matrix_cp("Z", "X")
        if self.kind == "CZ":
            return gate_matrix_cp("Z", "Z")
        if self.kind == "SWAP":
            m = np.zeros((4, 4), dtype=complex)
            for a in range(2):
                for b in range(2):
                    m[2 * b + a, 2 * a + b] = 1
            return m
        return gate_matrix_cp(self.basis, self.pauli)

    def adjoint(self) -> "CliffordGate":
        if self.kind == "S":
            return CliffordGate("Sdg", self.sites)
        if self.kind == "Sdg":
            return CliffordGate("S", self.sites)
        return self  # H, Paulis, CX, CZ, SWAP, CP are involutions

    def to_json(self) -> dict:
        d = {"type": self.kind, "q": list(self.sites)}
        if self.kind == "CP":
            d["pauli"] = self.pauli
            d["basis"] = self.basis
        return d

    @classmethod
    def from_json(cls, d: dict) -> "CliffordGate":
        return cls(d["type"], tuple(d["q"]), d.get("pauli"), d.get("basis"))


def gate_matrix_cp(basis: str, pauli: str) -> np.ndarray:
    b = _PAULI_1Q[basis]
    plus = (np.eye(2) + b) / 2
    minus = (np.eye(2) - b) / 2
    return np.kron(plus, np.eye(2)) + np.kron(minus, _PAULI_1Q[pauli])


_MINI_TABLEAU_CACHE: dict = {}


def _gate_mini_tableau(gate: CliffordGate):
    """Images of the local X/Z generators under the gate, from its matrix."""
    key = (gate.kind, gate.pauli, gate.basis)
    if key in _MINI_TABLEAU_CACHE:
        return _MINI_TABLEAU_CACHE[key]
    k = len(gate.sites)
    u = gate.matrix()
    rows = []
    for site in range(k):
        for letter in ("X", "Z"):
            local = PauliString.single(k, site, letter)
            m = u @ local.to_matrix() @ u.conj().T
            rows.append(_match_pauli(m, k))
    _MINI_TABLEAU_CACHE[key] = rows
    return rows


def _match_pauli(m: np.ndarray, k: int) -> PauliString:
    """Identify a dense matrix as i^e times a Pauli letter tensor."""
    dim = 2**k
    for code in range(4**k):
        x = np.zeros(k, dtype=np.uint8)
        z = np.zeros(k, dtype=np.uint8)
        c = code
        for site in range(k - 1, -1, -1):
            x[site] = (c >> 1) & 1
            z[site] = c & 1
            c >>= 2
        cand = PauliString(x, z)
        coeff = np.trace(cand.to_matrix().conj().T @ m) / dim
        if abs(abs(coeff) - 1) < 1e-9:
            e = int(round(np.angle(coeff) / (np.pi / 2))) % 4
            return PauliString(x, z, e)
    raise CtnError("matrix is not a signed Pauli; gate is not Clifford")


class CliffordTableau:
    """Clifford unitary as generator images with phases."""

    __slots__ = ("n", "bits", "phases")

    def __init__(self, bits, phases):
        self.bits = np.asarray(bits, dtype=np.uint8) % 2
        self.phases = np.asarray(phases, dtype=np.uint8) % 4
        self.n = self.bits.shape[0] // 2

    @classmethod
    def identity(cls, n: int) -> "CliffordTableau":
        return cls(np.eye(2 * n, dtype=np.uint8), np.zeros(2 * n, dtype=np.uint8))

    @classmethod
    def from_symplectic(cls, bits, phases=None) -> "CliffordTableau":
        bits = np.asarray(bits, dtype=np.uint8)
        if not sp.is_symplectic(bits):
            raise ValidationError("bit matrix is not symplectic")
        if phases is None:
            phases = np.zeros(bits.shape[0], dtype=np.uint8)
        return cls(bits, phases)

    @classmethod
    def from_gate(cls, gate: CliffordGate, n: int) -> "CliffordTableau":
        t = cls.identity(n)
        t.apply_gate(gate)
        return t

    def copy(self) -> "CliffordTableau":
        return CliffordTableau(self.bits.copy(), self.phases.copy())

    def key(self):
        return (self.bits.tobytes(), self.phases.tobytes())

    def __eq__(self, other):
        return (isinstance(other, CliffordTableau) and self.n == other.n
                and np.array_equal(self.bits, other.bits)
                and np.array_equal(self.phases, other.phases))

    def __hash__(self):
        return hash(self.key())

    def image(self, row: int) -> PauliString:
        return PauliString(self.bits[row, 0::2], self.bits[row, 1::2], self.phases[row])

    def image_of(self, site: int, letter: str) -> PauliString:
        row = 2 * site + (0 if letter == "X" else 1)
        return self.image(row)

    def symplectic(self) -> np.ndarray:
        return self.bits.copy()

    def is_identity(self) -> bool:
        return (np.array_equal(self.bits, np.eye(2 * self.n, dtype=np.uint8))
                and not self.phases.any())

    def is_valid(self) -> bool:
        return sp.is_symplectic(self.bits) and not (self.phases % 2).any()

    # -- conjugation ------------------------------------------------------

    def conjugate(self, p: PauliString, direction: str = "forward") -> PauliString:
        """forward: C p C^dagger; backward: C^dagger p C."""
        if p.n != self.n:
            raise DimensionMismatch(f"Pauli on {p.n} qubits, tableau on {self.n}")
        if direction == "backward":
            return self.inverse().conjugate(p, "forward")
        if direction != "forward":
            raise ValidationError("direction must be 'forward' or 'backward'")
        # p = i^e (letter tensor) = i^(e + #Y) prod_k X_k^x Z_k^z, so the
        # image is i^(e + #Y) times the ordered product of generator images.
        sel = np.empty(2 * self.n, dtype=np.uint8)
        sel[0::2] = p.x
        sel[1::2] = p.z
        acc = PauliString.identity(self.n)
        for r in np.flatnonzero(sel):
            acc = pauli_multiply(acc, self.image(int(r)))
        ycount = int(np.count_nonzero(p.x & p.z))
        return PauliString(acc.x, acc.z, (acc.phase + p.phase + ycount) % 4)

    def inverse(self) -> "CliffordTableau":
        j = sp.symplectic_form(self.n)
        bits_inv = (j @ self.bits.T @ j) % 2
        inv = CliffordTableau(bits_inv, np.zeros(2 * self.n, dtype=np.uint8))
        # fix phases so that C (C^-1 g C) C^dagger = g exactly
        phases = np.zeros(2 * self.n, dtype=np.uint8)
        for r in range(2 * self.n):
            q = self.conjugate(inv.image(r), "forward")
            phases[r] = (-q.phase) % 4
        inv.phases = phases
        return inv

    # -- composition ------------------------------------------------------

    def apply_gate(self, gate: CliffordGate):
        """In place self <- gate . self (gate applied after)."""
        rows = _gate_mini_tableau(gate)
        sites = np.array(gate.sites, dtype=np.intp)
        cols = np.empty(2 * len(sites), dtype=np.intp)
        cols[0::2] = 2 * sites
        cols[1::2] = 2 * sites + 1
        k = len(sites)
        for r in range(2 * self.n):
            loc = self.bits[r, cols]
            if not loc.any():
                continue
            acc = PauliString.identity(k)
            for g in np.flatnonzero(loc):
                acc = pauli_multiply(acc, rows[int(g)])
            ycount = int(np.count_nonzero(loc[0::2] & loc[1::2]))
            self.phases[r] = (self.phases[r] + ycount + acc.phase) % 4
            newbits = np.empty(2 * k, dtype=np.uint8)
            newbits[0::2] = acc.x
            newbits[1::2] = acc.z
            self.bits[r, cols] = newbits

    def compose_right_gate(self, gate: CliffordGate):
        """In place self <- self . gate (gate applied before)."""
        small = CliffordTableau.identity(len(gate.sites))
        small.apply_gate(CliffordGate(gate.kind, tuple(range(len(gate.sites))),
                                      gate.pauli, gate.basis))
        self.compose_right_subtableau(small, gate.sites)

    def compose_right_subtableau(self, small: "CliffordTableau", sites):
        """In place self <- self . V, where V acts as ``small`` on ``sites``.

        Only the generator rows of ``sites`` change; their new images are
        conjugations of V's local images through the unmodified self, so all
        new rows are computed before any row is written.
        """
        sites = [int(s) for s in sites]
        updates = []
        for loc, s in enumerate(sites):
            for w in (0, 1):
                img_small = small.image(2 * loc + w)
                x = np.zeros(self.n, dtype=np.uint8)
                z = np.zeros(self.n, dtype=np.uint8)
                x[sites] = img_small.x
                z[sites] = img_small.z
                embedded = PauliString(x, z, img_small.phase)
                updates.append((2 * s + w, self.conjugate(embedded, "forward")))
        for r, img in updates:
            self.bits[r, 0::2] = img.x
            self.bits[r, 1::2] = img.z
            self.phases[r] = img.phase


def tableau_compose(a: CliffordTableau, b: CliffordTableau, side: str = "left") -> CliffordTableau:
    """side='left': b.a (b applied after a); side='right': a.b."""
    if a.n != b.n:
        raise DimensionMismatch(f"tableaus on {a.n} and {b.n} qubits")
    if side == "left":
        outer, inner = b, a
    elif side == "right":
        outer, inner = a, b
    else:
        raise ValidationError("side must be 'left' or 'right'")
    out = CliffordTableau.identity(a.n)
    for r in range(2 * a.n):
        img = outer.conjugate(inner.image(r), "forward")
        out.bits[r, 0::2] = img.x
        out.bits[r, 1::2] = img.z
        out.phases[r] = img.phase
    return out


def conjugate_pauli(c: CliffordTableau, p: PauliString, direction: str = "forward") -> PauliString:
    return c.conjugate(p, direction)


def random_clifford(n: int, rng: np.random.Generator) -> CliffordTableau:
    """Exactly uniform over the n-qubit Clifford group (mod global phase).

    Uniform symplectic part via the Koenig-Smolin index bijection, plus an
    independent uniform sign for each of the 2n generator images.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    idx = sp.random_index_below(rng, sp.sp_order(n))
    bits = sp.symplectic_from_index(idx, n)
    phases = (2 * rng.integers(0, 2, size=2 * n)).astype(np.uint8)
    return CliffordTableau(bits, phases)


# -- cascade for exact entanglement cooling -------------------------------

# gate prefixes mapping each single-qubit stabilizer state onto |0>
_BASIS_PREFIX = {
    ("Z", +1): (),
    ("Z", -1): ("X",),
    ("X", +1): ("H",),
    ("X", -1): ("Z", "H"),
    ("Y", +1): ("Sdg", "H"),
    ("Y", -1): ("S", "H"),
}


def cascade_circuit(control: int, control_basis: str, targets: dict,
                    rotation_letter: str, eigen_sign: int = +1):
    """Controlled-Pauli cascade turning a local rotation into a global one.

    Returns gates V (in application order) such that, on states whose
    control site is the ``eigen_sign`` eigenstate of ``control_basis``,
    V . (a I + b P_ctrl) acts as a I + b P_ctrl (x) prod_j P_j. Wrapper
    gates re-express the control in the computational basis when needed.
    """
    if control in targets:
        raise ValidationError("control site cannot be a cascade target")
    if control_basis not in ("X", "Y", "Z"):
        raise ValidationError("control basis must be a Pauli letter")
    if rotation_letter not in ("X", "Y", "Z") or rotation_letter == control_basis:
        raise ValidationError("rotation letter must differ from the control basis")
    for site, letter in targets.items():
        if letter not in ("X", "Y", "Z"):
            raise ValidationError(f"trivial target letter at site {site}")
    if not targets:
        return []
    prefix = _BASIS_PREFIX[(control_basis, +1 if eigen_sign >= 0 else -1)]
    gates = [CliffordGate(kind, (control,)) for kind in prefix]
    for site in sorted(targets):
        gates.append(CliffordGate("CP", (control, site), pauli=targets[site], basis="Z"))
    for kind in reversed(prefix):
        gates.append(CliffordGate(kind, (control,)).adjoint())
    return gates


# -- synthesis and dense lift ---------------------------------------------

def synthesize(c: CliffordTableau):
    """Gate list (application order) whose product equals c up to global phase.

    Aaronson-Gottesman style sweep: reduce a copy to the identity with
    appended gates, then return the adjoints in reverse.
    """
    t = c.copy()
    applied = []

    def app(kind, *sites):
        g = CliffordGate(kind, sites)
        t.apply_gate(g)
        applied.append(g)

    n = t.n
    for k in range(n):
        xrow = lambda: (t.bits[2 * k, 0::2], t.bits[2 * k, 1::2])
        zrow = lambda: (t.bits[2 * k + 1, 0::2], t.bits[2 * k + 1, 1::2])

        # bring the X_k image to a form with an X letter at site k
        x, z = xrow()
        if not x[k]:
            hits = np.flatnonzero(x[k + 1:])
            if hits.size:
                app("SWAP", k, k + 1 + int(hits[0]))
            else:
                j = k + int(np.flatnonzero(z[k:])[0])
                app("H", j)
                if j != k:
                    app("SWAP", k, j)
        # clear the rest of the X_k image
        x, z = xrow()
        for j in range(k + 1, n):
            if x[j]:
                app("CX", k, j)
        x, z = xrow()
        if z[k:].any():
            if not z[k]:
                app("S", k)
            x, z = xrow()
            for j in range(k + 1, n):
                if z[j]:
                    app("CX", j, k)
            app("S", k)
        # reduce the Z_k image (z bit at k is forced by anticommutation)
        x, z = zrow()
        for j in range(k + 1, n):
            if z[j]:
                app("CX", j, k)
        x, z = zrow()
        if x[k:].any():
            app("H", k)
            x, z = zrow()
            for j in range(k + 1, n):
                if x[j]:
                    app("CX", k, j)
            x, z = zrow()
            if z[k]:
                app("S", k)
            app("H", k)
    for k in range(n):
        if t.phases[2 * k]:
            app("Z", k)
        if t.phases[2 * k + 1]:
            app("X", k)
    if not t.is_identity():
        raise CtnError("synthesis failed to reduce tableau to identity")
    return [g.adjoint() for g in reversed(applied)]


def apply_gate_to_vec(vec: np.ndarray, n: int, m: np.ndarray, sites) -> np.ndarray:
    """Apply a dense gate on ``sites`` to statevector(s); big-endian sites.

    ``vec`` may be (2^n,) or (2^n, batch).
    """
    k = len(sites)
    batch = vec.shape[1:] if vec.ndim > 1 else ()
    tensor = vec.reshape((2,) * n + batch)
    tensor = np.moveaxis(tensor, sites, range(k))
    shape = tensor.shape
    tensor = m @ tensor.reshape(2**k, -1)
    tensor = np.moveaxis(tensor.reshape(shape), range(k), sites)
    return tensor.reshape((2**n,) + batch)


def apply_tableau_to_statevector(c: CliffordTableau, vec: np.ndarray) -> np.ndarray:
    """C|vec> with the global phase fixed by the |0...0> convention."""
    if len(vec) != 2**c.n:
        raise DimensionMismatch("statevector length does not match tableau")
    cols = np.zeros((2**c.n, 2), dtype=complex)
    cols[:, 0] = vec
    cols[0, 1] = 1.0
    for g in synthesize(c):
        cols = apply_gate_to_vec(cols, c.n, g.matrix(), list(g.sites))
    e0 = cols[:, 1]
    anchor = e0[np.flatnonzero(np.abs(e0) > 1e-12)[0]]
    return cols[:, 0] * (abs(anchor) / anchor)


def tableau_to_unitary(c: CliffordTableau) -> np.ndarray:
    """Dense 2^n x 2^n lift; guarded to small n (oracle/table use)."""
    if c.n > _UNITARY_QUBIT_GUARD:
        raise SizeGuard(f"dense tableau lift requested for n={c.n} > {_UNITARY_QUBIT_GUARD}")
    u = np.eye(2**c.n, dtype=complex)
    for g in synthesize(c):
        u = apply_gate_to_vec(u, c.n, g.matrix(), list(g.sites))
    anchor = u[np.flatnonzero(np.abs(u[:, 0]) > 1e-12)[0], 0]
    return u * (abs(anchor) / anchor)
