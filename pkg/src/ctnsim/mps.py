"""Finite matrix-product-state engine with SVD truncation.

Site tensors have index order (left bond, physical, right bond) with
physical dimension 2; boundary bonds have dimension 1. A mixed-canonical
gauge is maintained: tensors left of ``center`` are left-isometric, tensors
right of it are right-isometric, so the Schmidt spectrum of any cut is read
off a single SVD at the center.

Statevector export is big-endian: site 0 is the most significant bit.
Entropies are base-2 von Neumann entropies of the squared, renormalized
singular values at a cut.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, SizeGuard, ValidationError
from .pauli import PauliString

_STATEVECTOR_GUARD = 14

# single-qubit stabilizer states and the Pauli (letter, sign) stabilizing them
_STABILIZER_1Q = (
    (np.array([1, 0], dtype=complex), ("Z", +1)),
    (np.array([0, 1], dtype=complex), ("Z", -1)),
    (np.array([1, 1], dtype=complex) / np.sqrt(2), ("X", +1)),
    (np.array([1, -1], dtype=complex) / np.sqrt(2), ("X", -1)),
    (np.array([1, 1j], dtype=complex) / np.sqrt(2), ("Y", +1)),
    (np.array([1, -1j], dtype=complex) / np.sqrt(2), ("Y", -1)),
)

_PAULI_MAT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


@dataclass(frozen=True)
class TruncationPolicy:
    """Bond truncation rule: cap chi and drop relative squared weights."""

    chi_max: int = 2**30
    cutoff: float = 0.0

    def __post_init__(self):
        if self.chi_max < 1:
            raise ValidationError("chi_max must be >= 1")
        if not (0.0 <= self.cutoff < 1.0):
            raise ValidationError("cutoff must lie in [0, 1)")


def _svd(m):
    """SVD with a gesvd fallback for the occasional gesdd failure."""
    try:
        return np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        from scipy.linalg import svd as scipy_svd
        return scipy_svd(m, full_matrices=False, lapack_driver="gesvd")


def _svdvals(m):
    try:
        return np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError:
        from scipy.linalg import svd as scipy_svd
        return scipy_svd(m, compute_uv=False, lapack_driver="gesvd")


def _truncate_spectrum(s, policy: TruncationPolicy):
    """Number of singular values to keep under the policy.

    A degenerate multiplet straddling the chi_max boundary is dropped
    whole (by index order) so results do not depend on LAPACK tie order.
    """
    total = float(np.sum(s**2))
    if total <= 0:
        return 1
    if policy.cutoff > 0:
        keep = int(np.count_nonzero(s**2 > policy.cutoff * total))
    else:
        keep = int(np.count_nonzero(s > 0))
    keep = max(keep, 1)
    if keep > policy.chi_max:
        keep = policy.chi_max
        tol = 1e-12 * s[0]
        while keep > 1 and s[keep - 1] - s[keep] <= tol:
            keep -= 1
    return keep


class MPS:
    """Mixed-canonical finite MPS on ``n`` qubits."""

    def __init__(self, tensors, center=0, trunc=None):
        self.tensors = [np.asarray(t, dtype=complex) for t in tensors]
        self.n = len(self.tensors)
        self.center = int(center)
        self.trunc = trunc if trunc is not None else TruncationPolicy()
        self.last_discarded = {}

    # -- constructors ------------------------------------------------------

    @classmethod
    def product_state(cls, states, trunc=None) -> "MPS":
        tensors = []
        for k, amp in enumerate(states):
            v = np.asarray(amp, dtype=complex).reshape(-1)
            if v.shape != (2,):
                raise ValidationError(f"site {k}: expected a length-2 amplitude pair")
            norm = np.linalg.norm(v)
            if abs(norm - 1.0) > 1e-8:
                raise ValidationError(f"site {k}: amplitudes not normalized (|v|={norm:.3e})")
            tensors.append((v / norm).reshape(1, 2, 1))
        if not tensors:
            raise ValidationError("empty product state")
        return cls(tensors, center=0, trunc=trunc)

    @classmethod
    def computational(cls, n, trunc=None) -> "MPS":
        return cls.product_state([(1.0, 0.0)] * n, trunc=trunc)

    def copy(self) -> "MPS":
        out = MPS([t.copy() for t in self.tensors], self.center, self.trunc)
        out.last_discarded = dict(self.last_discarded)
        return out

    # -- bookkeeping -------------------------------------------------------

    @property
    def bond_dims(self):
        return [self.tensors[k].shape[2] for k in range(self.n - 1)]

    @property
    def max_chi(self) -> int:
        return max(self.bond_dims) if self.n > 1 else 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.tensors[self.center]))

    def _renormalize(self):
        nrm = self.norm()
        if nrm > 0:
            self.tensors[self.center] = self.tensors[self.center] / nrm

    # -- canonical gauge ---------------------------------------------------

    def move_center(self, to: int):
        """QR gauge moves; the represented state is unchanged."""
        while self.center < to:
            c = self.center
            t = self.tensors[c]
            dl, _, dr = t.shape
            q, r = np.linalg.qr(t.reshape(dl * 2, dr))
            self.tensors[c] = q.reshape(dl, 2, -1)
            self.tensors[c + 1] = np.einsum("ab,bpr->apr", r, self.tensors[c + 1])
            self.center = c + 1
        while self.center > to:
            c = self.center
            t = self.tensors[c]
            dl, _, dr = t.shape
            q, r = np.linalg.qr(t.reshape(dl, 2 * dr).conj().T)
            self.tensors[c] = q.conj().T.reshape(-1, 2, dr)
            self.tensors[c - 1] = np.einsum("lpa,ab->lpb", self.tensors[c - 1], r.conj().T)
            self.center = c - 1

    def _check_cut(self, cut):
        if not (0 <= cut < self.n - 1):
            raise ValidationError(f"cut {cut} out of range for n={self.n}")

    # -- spectra and entropies ----------------------------------------------

    def schmidt_values(self, cut: int) -> np.ndarray:
        """Normalized singular values at the cut (descending)."""
        self._check_cut(cut)
        self.move_center(cut)
        t = self.tensors[cut]
        dl, _, dr = t.shape
        s = _svdvals(t.reshape(dl * 2, dr))
        nrm = np.linalg.norm(s)
        return s / nrm if nrm > 0 else s

    def bond_entropy(self, cut: int) -> float:
        return _entropy_from_singular(self.schmidt_values(cut))

    def entropy_profile(self) -> np.ndarray:
        """All cut entropies in one left-to-right sweep."""
        if self.n == 1:
            return np.zeros(0)
        self.move_center(0)
        out = np.zeros(self.n - 1)
        for c in range(self.n - 1):
            t = self.tensors[c]
            dl, _, dr = t.shape
            u, s, vh = _svd(t.reshape(dl * 2, dr))
            nrm = np.linalg.norm(s)
            out[c] = _entropy_from_singular(s / nrm if nrm > 0 else s)
            self.tensors[c] = u.reshape(dl, 2, -1)
            self.tensors[c + 1] = np.einsum("ab,bpr->apr", (s[:, None] * vh), self.tensors[c + 1])
            self.center = c + 1
        return out

    # -- state access -------------------------------------------------------

    def to_statevector(self) -> np.ndarray:
        if self.n > _STATEVECTOR_GUARD:
            raise SizeGuard(f"statevector export for n={self.n} > {_STATEVECTOR_GUARD}")
        vec = np.ones((1, 1), dtype=complex)
        for t in self.tensors:
            vec = np.einsum("xa,apb->xpb", vec, t).reshape(vec.shape[0] * 2, -1)
        return vec.reshape(-1)

    def site_vector(self, site: int):
        """Local state of a fully factorized site, or None."""
        t = self.tensors[site]
        if t.shape[0] != 1 or t.shape[2] != 1:
            return None
        v = t[0, :, 0]
        nrm = np.linalg.norm(v)
        return v / nrm if nrm > 0 else None

    def detect_separable_stabilizer(self, site: int):
        """(letter, sign) stabilizing the site iff it factorizes into one of
        the six single-qubit stabilizer states (up to phase); else None."""
        if not (0 <= site < self.n):
            raise ValidationError(f"site {site} out of range")
        v = self.site_vector(site)
        if v is None:
            return None
        for state, tag in _STABILIZER_1Q:
            if abs(abs(np.vdot(state, v)) - 1.0) < 1e-8:
                return tag
        return None

    # -- operations ----------------------------------------------------------

    def apply_local_unitary(self, u, start: int, policy: TruncationPolicy = None,
                            validate: bool = True):
        """Apply a dense unitary on k adjacent sites starting at ``start``."""
        u = np.asarray(u, dtype=complex)
        dim = u.shape[0]
        k = int(np.log2(dim).round())
        if u.shape != (dim, dim) or 2**k != dim or k not in (1, 2, 3):
            raise ValidationError("unitary must act on 1, 2 or 3 sites")
        if start < 0 or start + k > self.n:
            raise ValidationError(f"window [{start},{start + k}) out of range")
        if validate and not np.allclose(u.conj().T @ u, np.eye(dim), atol=1e-8):
            raise ValidationError("matrix is not unitary within 1e-8")
        policy = policy or self.trunc
        if k == 1:
            self.move_center(start)
            self.tensors[start] = np.einsum("pq,lqr->lpr", u, self.tensors[start])
            self._renormalize()
            return
        self.move_center(start)
        theta = self.tensors[start]
        for j in range(start + 1, start + k):
            theta = np.einsum("lpa,aqr->lpqr", theta, self.tensors[j])
            theta = theta.reshape(theta.shape[0], -1, theta.shape[3])
        theta = np.einsum("pq,lqr->lpr", u, theta)
        self._split_window(theta, start, k, policy)
        self._renormalize()

    def _split_window(self, theta, start, k, policy):
        """SVD-split a (l, 2^k, r) window back into sites; center ends at the
        right edge of the window."""
        l = theta.shape[0]
        r = theta.shape[2]
        rest = theta.reshape((l,) + (2,) * k + (r,))
        left_dim = l
        for j in range(k - 1):
            m = rest.reshape(left_dim * 2, -1)
            u, s, vh = _svd(m)
            keep = _truncate_spectrum(s, policy)
            w = s**2
            total = float(w.sum())
            self.last_discarded[start + j] = float(w[keep:].sum() / total) if total > 0 else 0.0
            s = s[:keep] / np.linalg.norm(s[:keep])
            self.tensors[start + j] = u[:, :keep].reshape(left_dim, 2, keep)
            rest = (s[:, None] * vh[:keep]).reshape((keep,) + (2,) * (k - 1 - j) + (r,))
            left_dim = keep
        self.tensors[start + k - 1] = rest.reshape(left_dim, 2, r)
        self.center = start + k - 1

    def apply_pauli_rotation(self, theta: float, p: PauliString,
                             policy: TruncationPolicy = None):
        """Apply cos(theta) I - i sin(theta) P as a bond-2 MPO over the
        support of ``p``, then truncate the affected bonds."""
        if p.n != self.n:
            raise DimensionMismatch(f"Pauli on {p.n} qubits, MPS on {self.n}")
        if not p.is_hermitian():
            raise ValidationError("rotation generator must be Hermitian (even i-power)")
        policy = policy or self.trunc
        sign = 1.0 if p.phase == 0 else -1.0
        alpha = np.cos(theta)
        beta = -1j * np.sin(theta) * sign
        support = p.support()
        if support.size == 0:
            return  # global phase only
        if support.size == 1:
            site = int(support[0])
            u = alpha * np.eye(2) + beta * _PAULI_MAT[p.letter_at(site)]
            self.apply_local_unitary(u, site, policy, validate=False)
            return
        s0, s1 = int(support[0]), int(support[-1])
        self.move_center(s0)
        for site in range(s0, s1 + 1):
            letter = _PAULI_MAT[p.letter_at(site)]
            eye = np.eye(2, dtype=complex)
            if site == s0:
                w = np.zeros((1, 2, 2, 2), dtype=complex)
                w[0, 0] = alpha * eye
                w[0, 1] = beta * letter
            elif site == s1:
                w = np.zeros((2, 1, 2, 2), dtype=complex)
                w[0, 0] = eye
                w[1, 0] = letter
            else:
                w = np.zeros((2, 2, 2, 2), dtype=complex)
                w[0, 0] = eye
                w[1, 1] = letter
            t = self.tensors[site]
            new = np.einsum("abpq,lqr->alpbr", w, t)
            dl, dr = t.shape[0], t.shape[2]
            self.tensors[site] = new.reshape(w.shape[0] * dl, 2, w.shape[1] * dr)
        # restore the canonical gauge over the span, then truncate it
        self.center = s0
        self._right_orthogonalize(s1, s0)
        self._truncate_span(s0, s1, policy)
        self._renormalize()

    def _right_orthogonalize(self, hi, lo):
        """Right-orthonormalize tensors hi..lo+1 via QR (no truncation)."""
        for c in range(hi, lo, -1):
            t = self.tensors[c]
            dl, _, dr = t.shape
            q, r = np.linalg.qr(t.reshape(dl, 2 * dr).conj().T)
            self.tensors[c] = q.conj().T.reshape(-1, 2, dr)
            self.tensors[c - 1] = np.einsum("lpa,ab->lpb", self.tensors[c - 1], r.conj().T)

    def _truncate_span(self, lo, hi, policy):
        """Left-to-right SVD truncation sweep over bonds lo..hi-1."""
        for c in range(lo, hi):
            t = self.tensors[c]
            dl, _, dr = t.shape
            u, s, vh = _svd(t.reshape(dl * 2, dr))
            keep = _truncate_spectrum(s, policy)
            w = s**2
            total = float(w.sum())
            self.last_discarded[c] = float(w[keep:].sum() / total) if total > 0 else 0.0
            s = s[:keep] / np.linalg.norm(s[:keep])
            self.tensors[c] = u[:, :keep].reshape(dl, 2, keep)
            self.tensors[c + 1] = np.einsum("ab,bpr->apr",
                                            s[:, None] * vh[:keep], self.tensors[c + 1])
            self.center = c + 1

    # -- pairwise -------------------------------------------------------------

    def fidelity(self, other: "MPS") -> float:
        if self.n != other.n:
            raise DimensionMismatch("MPS sizes differ")
        env = np.ones((1, 1), dtype=complex)
        for a, b in zip(self.tensors, other.tensors):
            env = np.einsum("ab,apc,bpd->cd", env, a.conj(), b)
        return float(abs(env[0, 0]) ** 2)

    # -- invariant checks (used by tests) -------------------------------------

    def isometry_errors(self):
        errs = []
        for k, t in enumerate(self.tensors):
            dl, _, dr = t.shape
            if k < self.center:
                m = t.reshape(dl * 2, dr)
                errs.append(np.abs(m.conj().T @ m - np.eye(dr)).max())
            elif k > self.center:
                m = t.reshape(dl, 2 * dr)
                errs.append(np.abs(m @ m.conj().T - np.eye(dl)).max())
        return errs

    # -- binary snapshot ------------------------------------------------------

    _MAGIC = b"CTNMPS01"

    def save(self, path):
        with open(path, "wb") as f:
            f.write(self._MAGIC)
            f.write(struct.pack("<iiid", self.n, self.center, self.trunc.chi_max,
                                self.trunc.cutoff))
            for t in self.tensors:
                f.write(struct.pack("<ii", t.shape[0], t.shape[2]))
            for t in self.tensors:
                f.write(np.ascontiguousarray(t, dtype=np.complex128).tobytes())

    @classmethod
    def load(cls, path) -> "MPS":
        with open(path, "rb") as f:
            if f.read(8) != cls._MAGIC:
                raise ValidationError(f"{path}: not an MPS snapshot")
            n, center, chi_max, cutoff = struct.unpack("<iiid", f.read(20))
            shapes = [struct.unpack("<ii", f.read(8)) for _ in range(n)]
            tensors = []
            for dl, dr in shapes:
                buf = f.read(16 * dl * 2 * dr)
                tensors.append(np.frombuffer(buf, dtype=np.complex128).reshape(dl, 2, dr).copy())
        return cls(tensors, center=center, trunc=TruncationPolicy(chi_max, cutoff))


def _entropy_from_singular(s: np.ndarray) -> float:
    w = s.astype(float) ** 2
    w = w[w > 1e-18]
    return max(float(-(w * np.log2(w)).sum()), 0.0) if w.size else 0.0


# module-level aliases matching the operation names used elsewhere

def product_state(states, trunc=None) -> MPS:
    return MPS.product_state(states, trunc)


def bond_entropy(m: MPS, cut: int) -> float:
    return m.bond_entropy(cut)


def fidelity(a: MPS, b: MPS) -> float:
    return a.fidelity(b)


def to_statevector(m: MPS) -> np.ndarray:
    return m.to_statevector()
