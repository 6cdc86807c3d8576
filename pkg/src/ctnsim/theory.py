"""Numeric verification of the single-qubit no-go purity criterion.

Setting: a rotation alpha I + beta P (alpha = cos theta, beta = -i sin
theta) acts on |Psi> (x) |phi>, where the last qubit is separable with
|phi> = mu|0> + nu|1> (mu real) and the last Pauli letter acts on it as
P_n|phi> = gamma|phi> + delta|phi_perp> (gamma real). Any unitary that
disentangles the last qubit for arbitrary |Psi> is forced into the block
form

    U_f = (U_1 (x) I) [ I (x) |w><phi| + M_B (x) |w_perp><phi_perp| ],
    M_B = (alpha* P_B + beta* gamma* I) / sqrt(1 - |beta|^2 |delta|^2),

and applying U_f to a flip-test product stabilizer state leaves the last
qubit with reduced purity

    |mu|^4 + |nu|^4 + 2|mu|^2|nu|^2|beta|^2|gamma|^2
                      / (1 - |beta|^2 + |beta|^2|gamma|^2).

A Clifford U_f must map that stabilizer input to a stabilizer state, whose
single-qubit purity can only be 1 or 1/2; the formula reaches those values
only when |phi> is a stabilizer state or the rotation is itself Clifford.
``purity_formula`` evaluates the closed form, ``purity_oracle`` builds U_f
densely and traces; they must agree to 1e-10.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import SizeGuard, ValidationError
from .pauli import PauliString
from .tableau import CliffordTableau, tableau_to_unitary
from .gateclasses import enumerate_symplectic

_ORACLE_GUARD = 8  # qubits in the traced-out block

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}

_STABILIZER_STATES = (
    np.array([1, 0], dtype=complex),
    np.array([0, 1], dtype=complex),
    np.array([1, 1], dtype=complex) / np.sqrt(2),
    np.array([1, -1], dtype=complex) / np.sqrt(2),
    np.array([1, 1j], dtype=complex) / np.sqrt(2),
    np.array([1, -1j], dtype=complex) / np.sqrt(2),
)


@dataclass
class TheoremInstance:
    """One sampled configuration of the no-go setup."""

    theta: float
    mu: float            # real by global-phase convention
    nu: complex
    gamma: float         # real: <phi|P_n|phi> for Hermitian P_n
    delta: complex
    p_b: PauliString     # letters on the n-1 traced-out qubits
    psi: Optional[np.ndarray] = None

    def __post_init__(self):
        if abs(self.mu**2 + abs(self.nu) ** 2 - 1) > 1e-8:
            raise ValidationError("|mu|^2 + |nu|^2 must be 1")
        if abs(self.gamma**2 + abs(self.delta) ** 2 - 1) > 1e-8:
            raise ValidationError("|gamma|^2 + |delta|^2 must be 1")
        if self.p_b.weight < 1:
            raise ValidationError("P_B must act non-trivially somewhere")

    @property
    def beta_sq(self) -> float:
        return float(np.sin(self.theta) ** 2)

    def phi(self) -> np.ndarray:
        return np.array([self.mu, self.nu], dtype=complex)

    def phi_perp(self) -> np.ndarray:
        return np.array([np.conj(self.nu), -self.mu], dtype=complex)


def purity_formula(inst: TheoremInstance) -> float:
    """Closed-form purity of the last qubit after the forced disentangler."""
    b2 = inst.beta_sq
    g2 = inst.gamma**2
    mu2 = inst.mu**2
    nu2 = abs(inst.nu) ** 2
    denom = 1.0 - b2 + b2 * g2
    if denom < 1e-14:
        raise ValidationError("singular case |beta|^2 = 1 with gamma = 0: "
                              "the rotation is a Pauli; classify separately")
    return float(mu2**2 + nu2**2 + 2 * mu2 * nu2 * b2 * g2 / denom)


def flip_test_state(p_b: PauliString) -> np.ndarray:
    """Product stabilizer state |s> with P_i|s_i> orthogonal to |s_i> on the
    support of P_B (App.-style flip condition); |0> elsewhere."""
    vec = np.array([1.0 + 0j])
    for site in range(p_b.n):
        letter = p_b.letter_at(site)
        local = (np.array([1, 1], dtype=complex) / np.sqrt(2)
                 if letter == "Z" else np.array([1, 0], dtype=complex))
        vec = np.kron(vec, local)
    return vec


def forced_unitary(inst: TheoremInstance) -> np.ndarray:
    """Dense U_f with U_1 = I and |w> = |phi> (the purity is invariant
    under the leftover U_1 freedom)."""
    nb = inst.p_b.n
    if nb > _ORACLE_GUARD:
        raise SizeGuard(f"oracle block of {nb} qubits exceeds {_ORACLE_GUARD}")
    alpha = np.cos(inst.theta)
    beta = -1j * np.sin(inst.theta)
    norm = np.sqrt(1.0 - inst.beta_sq * abs(inst.delta) ** 2)
    if norm < 1e-12:
        raise ValidationError("singular case: rotation is a pure Pauli")
    phase = (np.conj(alpha) + np.conj(beta) * inst.gamma) / norm
    phi = inst.phi()
    phi_perp = inst.phi_perp()
    w = phi
    w_perp = np.conj(phase) * phi_perp
    pb = inst.p_b.to_matrix()
    m_b = (np.conj(alpha) * pb + np.conj(beta) * inst.gamma * np.eye(2**nb)) / norm
    return (np.kron(np.eye(2**nb), np.outer(w, phi.conj()))
            + np.kron(m_b, np.outer(w_perp, phi_perp.conj())))


def purity_oracle(inst: TheoremInstance) -> float:
    """Tr(rho_n^2) from the dense forced unitary on the flip-test state."""
    u = forced_unitary(inst)
    vec = np.kron(flip_test_state(inst.p_b), np.array([1, 0], dtype=complex))
    out = u @ vec
    rho = out.reshape(-1, 2)
    rho_n = rho.T @ rho.conj()  # (2, 2) reduced matrix of the last qubit
    return float(np.trace(rho_n @ rho_n).real)


def is_stabilizer_state(phi: np.ndarray, tol: float = 1e-8) -> bool:
    phi = np.asarray(phi, dtype=complex).reshape(2)
    phi = phi / np.linalg.norm(phi)
    return any(abs(abs(np.vdot(s, phi)) - 1.0) < tol for s in _STABILIZER_STATES)


def theorem_witness(theta, mu, nu, gamma, delta) -> str:
    """Classify whether a Clifford disentangler can exist.

    Possible iff |phi> is one of the six stabilizer states or sin^2(theta)
    is 0 or 1 (the rotation itself is Clifford).
    """
    phi = np.array([mu, nu], dtype=complex)
    s2 = float(np.sin(theta) ** 2)
    if min(abs(s2 - 0.0), abs(s2 - 1.0)) < 1e-8 or is_stabilizer_state(phi):
        return "clifford_disentangler_possible"
    return "impossible"


def sample_instance(rng: np.random.Generator, nb: int = 3,
                    stabilizer_phi: bool = False) -> TheoremInstance:
    """Random instance per the sampling design: theta uniform on (0, pi/2),
    |phi> Haar (or a random stabilizer state), P_B with weight >= 1, and
    (gamma, delta) induced by a random non-trivial last letter."""
    theta = float(rng.uniform(1e-3, np.pi / 2 - 1e-3))
    if stabilizer_phi:
        phi = _STABILIZER_STATES[rng.integers(6)].copy()
    else:
        raw = rng.normal(size=2) + 1j * rng.normal(size=2)
        phi = raw / np.linalg.norm(raw)
    # global-phase convention: mu real and non-negative
    if abs(phi[0]) > 1e-12:
        phi = phi * np.conj(phi[0]) / abs(phi[0])
    else:
        phi = phi * np.conj(phi[1]) / abs(phi[1])
    mu = float(phi[0].real)
    nu = complex(phi[1])
    while True:
        letters = rng.integers(0, 4, size=nb)
        if np.any(letters > 0):
            break
    x = ((letters == 1) | (letters == 3)).astype(np.uint8)
    z = ((letters == 2) | (letters == 3)).astype(np.uint8)
    p_b = PauliString(x, z)
    p_n = _PAULI_1Q["XYZ"[rng.integers(3)]]
    phi_vec = np.array([mu, nu], dtype=complex)
    phi_perp = np.array([np.conj(nu), -mu], dtype=complex)
    gamma = float(np.vdot(phi_vec, p_n @ phi_vec).real)
    delta = complex(np.vdot(phi_perp, p_n @ phi_vec))
    return TheoremInstance(theta, mu, nu, gamma, delta, p_b)


# -- exhaustive two-qubit confirmation --------------------------------------

_C2_CACHE = {}


def all_two_qubit_cliffords() -> np.ndarray:
    """All 11520 two-qubit Clifford unitaries (mod global phase), stacked."""
    if "us" in _C2_CACHE:
        return _C2_CACHE["us"]
    mats = enumerate_symplectic(2)
    out = np.empty((len(mats) * 16, 4, 4), dtype=complex)
    i = 0
    for m in mats:
        for signs in range(16):
            phases = np.array([2 * ((signs >> b) & 1) for b in range(4)], dtype=np.uint8)
            out[i] = tableau_to_unitary(CliffordTableau(m, phases))
            i += 1
    _C2_CACHE["us"] = out
    return out


def exhaustive_two_qubit_search(inst: TheoremInstance, rng: np.random.Generator,
                                n_tests: int = 6) -> bool:
    """True iff some two-qubit Clifford disentangles qubit 2 of
    (alpha I + beta P1 (x) P2)(|psi> (x) |phi>) for every test |psi>."""
    if inst.p_b.n != 1:
        raise ValidationError("two-qubit search needs a single-site P_B")
    alpha = np.cos(inst.theta)
    beta = -1j * np.sin(inst.theta)
    p1 = inst.p_b.to_matrix()
    # reconstruct a last-qubit letter consistent with (gamma, delta)
    p2 = _p2_from_action(inst)
    rot = alpha * np.eye(4) + beta * np.kron(p1, p2)
    tests = [np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)]
    for _ in range(n_tests - 2):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        tests.append(v / np.linalg.norm(v))
    states = np.stack([rot @ np.kron(t, inst.phi()) for t in tests], axis=1)
    us = all_two_qubit_cliffords()
    outs = us @ states                      # (NC, 4, T)
    m = outs.reshape(-1, 2, 2, states.shape[1])
    # smallest singular value of each 2x2 via trace/det
    t2 = np.einsum("cijt,cijt->ct", m, m.conj()).real
    det = (m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0])
    disc = np.sqrt(np.clip(t2**2 - 4 * np.abs(det) ** 2, 0.0, None))
    smin2 = np.clip((t2 - disc) / 2, 0.0, None)
    separable = (smin2 < 1e-12).all(axis=1)
    return bool(separable.any())


def verify_theorem_report(samples: int, seed: int, exhaustive: int = 0) -> dict:
    """Formula-vs-oracle agreement plus witness consistency, as one report.

    Random instances follow the sampling design (Haar phi, theta on the open
    interval, induced gamma/delta); their purity must stay off {1, 1/2} and
    the witness must say impossible. Crafted stabilizer-phi instances with
    anticommuting last letter plus the beta edge check the converse.
    ``exhaustive`` adds brute-force two-qubit searches over all 11520
    Cliffords.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    consistent = 0
    for i in range(samples):
        inst = sample_instance(rng, nb=2 + int(rng.integers(3)))
        worst = max(worst, abs(purity_formula(inst) - purity_oracle(inst)))
        pur = purity_formula(inst)
        special = min(abs(pur - 1.0), abs(pur - 0.5)) < 1e-8
        verdict = theorem_witness(inst.theta, inst.mu, inst.nu, inst.gamma, inst.delta)
        if (not special) and verdict == "impossible":
            consistent += 1
    crafted_ok = 0
    crafted_total = 0
    for i in range(max(samples // 10, 10)):
        while True:
            inst = sample_instance(rng, nb=2 + int(rng.integers(3)), stabilizer_phi=True)
            if abs(inst.gamma) < 1e-9:
                break
        crafted_total += 1
        pur = purity_formula(inst)
        ok = min(abs(pur - 1.0), abs(pur - 0.5)) < 1e-8
        ok &= theorem_witness(inst.theta, inst.mu, inst.nu, inst.gamma,
                              inst.delta) == "clifford_disentangler_possible"
        crafted_ok += ok
    exhaustive_ok = 0
    for i in range(exhaustive):
        stab = i % 2 == 0
        while True:
            inst = sample_instance(rng, nb=1, stabilizer_phi=stab)
            if not stab or abs(inst.gamma) < 1e-9:
                break
        found = exhaustive_two_qubit_search(inst, rng)
        want = theorem_witness(inst.theta, inst.mu, inst.nu, inst.gamma, inst.delta)
        exhaustive_ok += found == (want == "clifford_disentangler_possible")
    report = {
        "samples": samples,
        "max_formula_oracle_diff": worst,
        "random_witness_consistent": consistent,
        "crafted_special_ok": crafted_ok,
        "crafted_total": crafted_total,
        "exhaustive_confirmed": exhaustive_ok,
        "exhaustive_total": exhaustive,
    }
    report["passed"] = bool(
        worst < 1e-10 and consistent == samples and crafted_ok == crafted_total
        and exhaustive_ok == exhaustive)
    return report


def _p2_from_action(inst: TheoremInstance) -> np.ndarray:
    """Hermitian single-qubit Pauli with <phi|P|phi> = gamma and
    <phi_perp|P|phi> = delta."""
    for letter in ("X", "Y", "Z"):
        p = _PAULI_1Q[letter]
        g = np.vdot(inst.phi(), p @ inst.phi())
        d = np.vdot(inst.phi_perp(), p @ inst.phi())
        if abs(g - inst.gamma) < 1e-9 and abs(d - inst.delta) < 1e-9:
            return p
    raise ValidationError("no Pauli letter matches the (gamma, delta) action")
