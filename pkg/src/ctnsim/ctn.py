"""Clifford-augmented MPS state (C, T) and the entanglement coolers.

The physical state is |psi> = C |psi_T> with C a Clifford frame tableau and
|psi_T> an MPS. Conventions, fixed once and oracle-tested together:

  * physical Clifford gate G:         frame <- G . frame, MPS untouched
  * cooling unitary U applied to MPS: frame <- frame . U^dagger
  * rotation generator:               P = C^dagger P0 C (backward conjugation)

``apply_rotation`` takes the gate angle of R_P(theta) = exp(-i theta/2 P);
the MPS-level generator angle is theta/2 (a T gate is theta = pi/4).

Exact cooling: if the conjugated generator hits a factorized single-qubit
stabilizer site non-trivially, the global rotation splits into a local
rotation on that site plus a controlled-Pauli cascade absorbed into the
frame, so bond dimensions never grow. Heuristic cooling sweeps k-site
windows and greedily applies the best entangling-class representative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import gateclasses
from .exceptions import SizeGuard, ValidationError
from .mps import MPS, TruncationPolicy
from .pauli import PauliString
from .tableau import (CliffordGate, CliffordTableau, apply_tableau_to_statevector,
                      cascade_circuit, tableau_compose)

_STATEVECTOR_GUARD = 12
_NUMERIC_TOL = 1e-10  # slack for "no bond may increase" comparisons
_CHUNK = 512          # candidate-batch size for the window search


def default_improve_tol(n: int) -> float:
    """Minimum per-window entropy gain (bits) for a heuristic move to count.

    Moves below this threshold are treated as ties and skipped; 0.01*n
    reproduces the coarse-grained greedy search whose null results
    (k=2 vs k=3, shallow vs deep sweeps) the ensembles are checked against.
    """
    return 0.01 * n

_PAULI_MAT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


@dataclass(frozen=True)
class CoolingPolicy:
    """Parsed cooling policy string."""

    exact: bool = False
    heuristic_k: Optional[int] = None
    depth: int = 1

    _GRAMMAR = re.compile(r"^(?:(exact)\+)?heuristic:k=(\d+),d=(\d+)$")

    @classmethod
    def parse(cls, text: str) -> "CoolingPolicy":
        text = text.strip()
        if text == "none":
            return cls(False, None, 0)
        if text == "exact":
            return cls(True, None, 0)
        m = cls._GRAMMAR.match(text)
        if not m:
            raise ValidationError(
                f"bad cooling policy {text!r}; expected none | exact | "
                "heuristic:k=K,d=D | exact+heuristic:k=K,d=D")
        k, d = int(m.group(2)), int(m.group(3))
        if k not in (2, 3):
            raise ValidationError("heuristic locality k must be 2 or 3")
        if d < 1:
            raise ValidationError("sweep depth d must be >= 1")
        return cls(m.group(1) == "exact", k, d)

    def __str__(self):
        if self.heuristic_k is None:
            return "exact" if self.exact else "none"
        base = f"heuristic:k={self.heuristic_k},d={self.depth}"
        return f"exact+{base}" if self.exact else base


@dataclass
class CoolingReport:
    method: str
    entropies_before: np.ndarray
    entropies_after: np.ndarray
    gates_applied: int
    succeeded: Optional[bool] = None  # exact cooler only

    @property
    def max_before(self):
        return float(self.entropies_before.max()) if self.entropies_before.size else 0.0

    @property
    def max_after(self):
        return float(self.entropies_after.max()) if self.entropies_after.size else 0.0


class CTNState:
    """The pair (frame, mps) with |psi> = frame . |psi_mps|."""

    def __init__(self, n: int, policy: TruncationPolicy = None):
        if n < 2:
            raise ValidationError("a CTN state needs n >= 2 qubits")
        self.n = n
        self.policy = policy if policy is not None else TruncationPolicy()
        self.frame = CliffordTableau.identity(n)
        self.mps = MPS.computational(n, trunc=self.policy)
        self.stats = []  # CoolingReports of every rotation, in order

    # -- basics -------------------------------------------------------------

    def copy(self) -> "CTNState":
        out = CTNState.__new__(CTNState)
        out.n = self.n
        out.policy = self.policy
        out.frame = self.frame.copy()
        out.mps = self.mps.copy()
        out.stats = list(self.stats)
        return out

    def max_entropy(self) -> float:
        prof = self.mps.entropy_profile()
        return float(prof.max()) if prof.size else 0.0

    def entropy_profile(self) -> np.ndarray:
        return self.mps.entropy_profile()

    def to_statevector(self) -> np.ndarray:
        if self.n > _STATEVECTOR_GUARD:
            raise SizeGuard(f"CTN statevector export for n={self.n} > {_STATEVECTOR_GUARD}")
        return apply_tableau_to_statevector(self.frame, self.mps.to_statevector())

    # -- Clifford layer -------------------------------------------------------

    def apply_clifford(self, g):
        """Absorb a physical Clifford gate or tableau into the frame."""
        if isinstance(g, CliffordGate):
            if any(s < 0 or s >= self.n for s in g.sites):
                raise ValidationError(f"gate sites {g.sites} out of range")
            self.frame.apply_gate(g)
        elif isinstance(g, CliffordTableau):
            self.frame = tableau_compose(self.frame, g, side="left")
        else:
            raise ValidationError("expected a CliffordGate or CliffordTableau")

    # -- rotations -------------------------------------------------------------

    def apply_rotation(self, theta: float, axis: str, site: int,
                       cooling="none", table: gateclasses.GateClassTable = None) -> CoolingReport:
        """Physical rotation R_axis(theta) on ``site``, routed through the frame."""
        if axis not in ("X", "Y", "Z"):
            raise ValidationError("rotation axis must be X, Y or Z")
        if not (0 <= site < self.n):
            raise ValidationError(f"site {site} out of range")
        p0 = PauliString.single(self.n, site, axis)
        p = self.frame.conjugate(p0, "backward")
        return self.apply_conjugated_rotation(theta / 2.0, p, cooling, table)

    def apply_pauli_rotation_gate(self, theta: float, p0: PauliString,
                                  cooling="none", table=None) -> CoolingReport:
        """Physical R_P(theta) for a multi-site Pauli generator."""
        p = self.frame.conjugate(p0, "backward")
        return self.apply_conjugated_rotation(theta / 2.0, p, cooling, table)

    def apply_conjugated_rotation(self, gen_theta: float, p: PauliString,
                                  cooling="none", table=None) -> CoolingReport:
        """Apply alpha I + beta P (generator angle) to the MPS with cooling."""
        policy = cooling if isinstance(cooling, CoolingPolicy) else CoolingPolicy.parse(cooling)
        before = self.mps.entropy_profile()
        succeeded = None
        gates = 0
        if policy.exact:
            exact_report = self.cool_exact(p, gen_theta)
            succeeded = exact_report.succeeded
            gates += exact_report.gates_applied
        if not succeeded:
            self.mps.apply_pauli_rotation(gen_theta, p, self.policy)
            if policy.heuristic_k is not None:
                heur = self.cool_heuristic(policy.heuristic_k, policy.depth, table)
                gates += heur.gates_applied
        report = CoolingReport(str(policy), before, self.mps.entropy_profile(),
                               gates, succeeded)
        self.stats.append(report)
        return report

    # -- exact cooling -----------------------------------------------------------

    def cool_exact(self, p: PauliString, gen_theta: float) -> CoolingReport:
        """Try the constructive disentangler for alpha I + beta P.

        Succeeds iff some factorized single-qubit stabilizer site is hit by
        an anticommuting letter of P (eigen-action only contributes a sign,
        so it does not count); the lowest such site becomes the control. On
        success the MPS receives only a single-site rotation and the frame
        absorbs the controlled-Pauli cascade over the rest of P's support;
        on failure the state is untouched.
        """
        before = self.mps.entropy_profile()
        support = [int(s) for s in p.support()]
        site = None
        basis = sign = None
        for s in support:
            tag = self.mps.detect_separable_stabilizer(s)
            if tag is not None and tag[0] != p.letter_at(s):
                site, (basis, sign) = s, tag
                break
        if site is None:
            return CoolingReport("exact", before, before, 0, succeeded=False)
        targets = {j: p.letter_at(j) for j in support if j != site}
        gates = cascade_circuit(site, basis, targets, p.letter_at(site), eigen_sign=sign)
        # frame <- frame . V with V = gates in application order
        for g in reversed(gates):
            self.frame.compose_right_gate(g)
        rot_sign = 1.0 if p.phase == 0 else -1.0
        u = (np.cos(gen_theta) * np.eye(2)
             - 1j * np.sin(gen_theta) * rot_sign * _PAULI_MAT[p.letter_at(site)])
        self.mps.apply_local_unitary(u, site, self.policy, validate=False)
        return CoolingReport("exact", before, self.mps.entropy_profile(),
                             len(gates), succeeded=True)

    # -- heuristic cooling ----------------------------------------------------------

    def cool_heuristic(self, k: int, depth: int,
                       table: gateclasses.GateClassTable = None,
                       improve_tol: float = None) -> CoolingReport:
        """Greedy k-local sweep cooling (depth passes, alternating direction).

        A window move is applied only when it improves a cut by more than
        ``improve_tol`` bits (default 0.01 n); smaller gains count as ties
        and fall back to identity.
        """
        if table is None:
            table = gateclasses.get_table(k)
        if table.k != k:
            raise ValidationError(f"table is for k={table.k}, requested k={k}")
        if depth < 1:
            raise ValidationError("depth must be >= 1")
        if improve_tol is None:
            improve_tol = default_improve_tol(self.n)
        before = self.mps.entropy_profile()
        unitaries = table.unitaries()
        inverses = table.inverse_tableaus()
        applied_total = 0
        for sweep in range(depth):
            windows = range(self.n - k + 1)
            if sweep % 2 == 1:
                windows = reversed(windows)
            changed = False
            for w0 in windows:
                idx = self._best_window_gate(w0, k, table, improve_tol)
                if idx is None:
                    continue
                self.mps.apply_local_unitary(unitaries[idx], w0, self.policy, validate=False)
                self.frame.compose_right_subtableau(inverses[idx], range(w0, w0 + k))
                applied_total += 1
                changed = True
            if not changed:
                break
        return CoolingReport(f"heuristic:k={k},d={depth}", before,
                             self.mps.entropy_profile(), applied_total)

    def _window_theta(self, w0: int, k: int) -> np.ndarray:
        """Contract the window's site tensors into (l, 2^k, r), center inside."""
        self.mps.move_center(w0)
        theta = self.mps.tensors[w0]
        for j in range(w0 + 1, w0 + k):
            theta = np.einsum("lpa,aqr->lpqr", theta, self.mps.tensors[j])
            theta = theta.reshape(theta.shape[0], -1, theta.shape[3])
        return theta

    def _best_window_gate(self, w0: int, k: int, table, improve_tol: float):
        """Index of the representative to apply on the window, or None.

        k=2 objective: minimize the internal-cut entropy. k=3: a candidate
        is admissible only if no internal bond's entropy increases and at
        least one improves by more than ``improve_tol``; the largest total
        decrease wins. Internal cuts are evaluated cheapest-first and
        candidates already violating the no-increase rule skip the
        remaining (larger) cuts.
        """
        theta = self._window_theta(w0, k)
        base = _window_cut_entropies(theta[None], k)[0]
        if base.sum() <= improve_tol:
            return None
        if k == 2:
            ents = _candidate_entropies(theta, table, cuts=(1,))[:, 0]
            best = int(np.argmin(ents))
            if ents[best] < base[0] - improve_tol:
                return best
            return None
        ents = _candidate_entropies(theta, table, reject_above=base + _NUMERIC_TOL)
        gain = base[None, :] - ents
        admissible = (gain.min(axis=1) > -_NUMERIC_TOL) & (gain.max(axis=1) > improve_tol)
        if not admissible.any():
            return None
        scores = np.where(admissible, gain.sum(axis=1), -np.inf)
        return int(np.argmax(scores))


def _candidate_entropies(theta: np.ndarray, table, cuts=None, reject_above=None) -> np.ndarray:
    """Internal-cut entropies of U_c . theta for every table representative.

    For each cut the reduced density matrix is assembled on the smaller side
    of the cut from the table's precomputed two-point transfer tensors and a
    single environment tensor of the window, so no per-candidate rotation is
    performed. With ``reject_above`` set, cuts are visited cheapest-first and
    candidates whose entropy already exceeds the bound skip the rest (their
    remaining entries stay +inf).
    """
    l, d, r = theta.shape
    k = table.k
    cuts = tuple(cuts) if cuts is not None else tuple(range(1, k))
    ncand = table.unitaries().shape[0]
    transfer = table.transfer_tensors()
    ents = np.full((ncand, k - 1), np.inf)
    env = {}
    sizes = sorted(cuts, key=lambda c: min((2**c) * l, (2**(k - c)) * r))
    surv = np.arange(ncand)
    for c in sizes:
        if surv.size == 0:
            break
        a, b = 2**c, 2**(k - c)
        use_left = a * l <= b * r
        side = "L" if use_left else "R"
        if side not in env:
            if use_left:
                env[side] = np.einsum("lqr,LQr->qQlL", theta, theta.conj()).reshape(d * d, l * l)
            else:
                env[side] = np.einsum("lqr,lQR->qQrR", theta, theta.conj()).reshape(d * d, r * r)
        emat = env[side]
        kt = transfer[(side, c)]
        m = (a if use_left else b)
        bond = l if use_left else r
        vals = np.empty(surv.size)
        for lo in range(0, surv.size, _CHUNK):
            sel = surv[lo:lo + _CHUNK]
            block = kt[sel] if sel.size != ncand else kt
            rho = (block.reshape(-1, d * d) @ emat)
            rho = rho.reshape(sel.size, m, m, bond, bond)
            rho = rho.transpose(0, 1, 3, 2, 4).reshape(sel.size, m * bond, m * bond)
            vals[lo:lo + sel.size] = _entropies_from_grams(rho)
        ents[surv, c - 1] = vals
        if reject_above is not None:
            surv = surv[vals <= reject_above[c - 1]]
    return ents


def _window_cut_entropies(batch: np.ndarray, k: int) -> np.ndarray:
    """Entropies of the k-1 internal cuts for a batch of window tensors.

    ``batch`` has shape (C, l, 2^k, r); the environment is assumed
    isometric (canonical center inside the window).
    """
    c, l, d, r = batch.shape
    out = np.empty((c, k - 1))
    for cut in range(1, k):
        a = l * (2**cut)
        b = (d >> cut) * r
        m = batch.reshape(c, a, b)
        if a <= b:
            gram = m @ m.conj().transpose(0, 2, 1)
        else:
            gram = m.conj().transpose(0, 2, 1) @ m
        out[:, cut - 1] = _entropies_from_grams(gram)
    return out


def _entropies_from_grams(gram: np.ndarray) -> np.ndarray:
    size = gram.shape[1]
    if size == 1:
        return np.zeros(gram.shape[0])
    if size == 2:
        tr = gram[:, 0, 0].real + gram[:, 1, 1].real
        det = (gram[:, 0, 0].real * gram[:, 1, 1].real
               - (gram[:, 0, 1] * gram[:, 1, 0]).real)
        disc = np.sqrt(np.clip(tr * tr - 4 * det, 0.0, None))
        w = np.stack([(tr + disc) / 2, (tr - disc) / 2], axis=1)
    else:
        try:
            w = np.linalg.eigvalsh(gram)
        except np.linalg.LinAlgError:
            from scipy.linalg import eigvalsh as scipy_eigvalsh
            w = np.stack([scipy_eigvalsh(g, driver="ev") for g in gram])
    w = np.clip(w.real, 0.0, None)
    w = w / np.clip(w.sum(axis=1, keepdims=True), 1e-300, None)
    logw = np.where(w > 1e-18, np.log2(np.clip(w, 1e-300, None)), 0.0)
    return np.maximum(-(w * logw).sum(axis=1), 0.0)


def new_ctn(n: int, policy: TruncationPolicy = None) -> CTNState:
    return CTNState(n, policy)


def ctn_to_statevector(state: CTNState) -> np.ndarray:
    return state.to_statevector()


def max_entropy(state: CTNState) -> float:
    return state.max_entropy()
