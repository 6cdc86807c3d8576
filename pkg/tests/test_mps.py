import numpy as np
import pytest

from ctnsim.exceptions import SizeGuard, ValidationError
from ctnsim.mps import MPS, TruncationPolicy
from ctnsim.pauli import pauli_parse
from ctnsim.tableau import random_clifford, tableau_to_unitary

import dense_reference as ref

PLUS = (1 / np.sqrt(2), 1 / np.sqrt(2))
MAGIC = (np.cos(np.pi / 8), -1j * np.sin(np.pi / 8))


def mps_from_dense(vec, n, trunc=None):
    tensors = []
    rest = np.asarray(vec, dtype=complex).reshape(1, -1)
    dl = 1
    for _ in range(n - 1):
        m = rest.reshape(dl * 2, -1)
        u, s, vh = np.linalg.svd(m, full_matrices=False)
        keep = int(np.count_nonzero(s > 1e-14))
        tensors.append(u[:, :keep].reshape(dl, 2, keep))
        rest = s[:keep, None] * vh[:keep]
        dl = keep
    tensors.append(rest.reshape(dl, 2, 1))
    return MPS(tensors, center=n - 1, trunc=trunc)


def random_mps(rng, n, trunc=None):
    vec = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    vec /= np.linalg.norm(vec)
    return mps_from_dense(vec, n, trunc), vec


def test_product_state_basics():
    m = MPS.product_state([(1, 0)] * 4)
    sv = m.to_statevector()
    assert np.allclose(sv, np.eye(16)[0])
    assert m.bond_dims == [1, 1, 1]


def test_product_state_magic_amplitudes():
    m = MPS.product_state([MAGIC])
    assert np.allclose(m.to_statevector(),
                       [np.cos(np.pi / 8), -1j * np.sin(np.pi / 8)])


def test_product_state_rejects_unnormalized():
    with pytest.raises(ValidationError):
        MPS.product_state([(1, 1)])


def test_statevector_ordering_big_endian():
    m = MPS.product_state([(1, 0), (0, 1)])
    assert np.allclose(m.to_statevector(), [0, 1, 0, 0])


def test_statevector_guard():
    m = MPS.computational(15)
    with pytest.raises(SizeGuard):
        m.to_statevector()


def test_cx_on_00_stays_product():
    m = MPS.computational(2)
    m.apply_local_unitary(ref.CX, 0)
    assert m.bond_dims == [1]
    assert np.allclose(m.to_statevector(), [1, 0, 0, 0])


def test_cx_on_plus0_makes_bell():
    m = MPS.product_state([PLUS, (1, 0)])
    m.apply_local_unitary(ref.CX, 0)
    assert np.allclose(m.to_statevector(), np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert abs(m.bond_entropy(0) - 1.0) < 1e-12


def test_apply_rejects_nonunitary():
    m = MPS.computational(2)
    with pytest.raises(ValidationError):
        m.apply_local_unitary(np.ones((4, 4)), 0)
    with pytest.raises(ValidationError):
        m.apply_local_unitary(ref.CX, 1)


def test_three_site_unitary_against_dense(rng):
    trunc = TruncationPolicy(chi_max=64, cutoff=0.0)
    m, vec = random_mps(rng, 6, trunc)
    u = tableau_to_unitary(random_clifford(3, rng))
    m.apply_local_unitary(u, 2)
    want = ref.apply_on(vec, 6, u, [2, 3, 4])
    fid = abs(np.vdot(want, m.to_statevector())) ** 2
    assert abs(fid - 1.0) < 1e-10
    assert max(m.isometry_errors()) < 1e-10


def test_rotation_identity_angle(rng):
    m, vec = random_mps(rng, 4)
    m.apply_pauli_rotation(0.0, pauli_parse("XYZI"))
    assert abs(abs(np.vdot(vec, m.to_statevector())) ** 2 - 1) < 1e-12


def test_rotation_schmidt_values():
    m = MPS.computational(2)
    m.apply_pauli_rotation(np.pi / 8, pauli_parse("XX"))
    s = m.schmidt_values(0)
    assert np.allclose(s, [np.cos(np.pi / 8), np.sin(np.pi / 8)], atol=1e-12)
    w = s**2
    assert abs(m.bond_entropy(0) - (-(w * np.log2(w)).sum())) < 1e-12
    assert abs(m.bond_entropy(0) - 0.6009) < 2e-4


def test_rotation_t_angle_makes_magic_site():
    m = MPS.product_state([PLUS, (1, 0)])
    m.apply_pauli_rotation(np.pi / 8, pauli_parse("ZI"))
    assert m.bond_dims == [1]
    v = m.site_vector(0)
    want = (ref.rotation_matrix(np.pi / 8, "Z") @ np.array(PLUS))
    want /= np.linalg.norm(want)
    assert abs(abs(np.vdot(v, want)) - 1) < 1e-10


def test_rotation_matches_dense(rng):
    trunc = TruncationPolicy(chi_max=64, cutoff=0.0)
    for letters in ("XIZII", "IYYII", "ZZZZZ", "IIIXI"):
        m, vec = random_mps(rng, 5, trunc)
        m.apply_pauli_rotation(0.3, pauli_parse(letters), trunc)
        want = ref.rotation_matrix(0.3, letters) @ vec
        assert abs(abs(np.vdot(want, m.to_statevector())) ** 2 - 1) < 1e-10


def test_rotation_inverse_restores(rng):
    trunc = TruncationPolicy(chi_max=64, cutoff=0.0)
    m, vec = random_mps(rng, 6, trunc)
    p = pauli_parse("XZIYXI")
    m.apply_pauli_rotation(0.7, p, trunc)
    m.apply_pauli_rotation(-0.7, p, trunc)
    assert abs(abs(np.vdot(vec, m.to_statevector())) ** 2 - 1) < 1e-9


def test_bond_entropy_product_and_range():
    m = MPS.computational(4)
    assert all(m.bond_entropy(c) == 0 for c in range(3))
    with pytest.raises(ValidationError):
        m.bond_entropy(3)


def test_w_state_entropy():
    w = np.zeros(8)
    w[[1, 2, 4]] = 1 / np.sqrt(3)
    m = mps_from_dense(w, 3)
    assert abs(m.bond_entropy(1) - (np.log2(3) - 2 / 3)) < 1e-9


def test_entropy_profile_matches_dense(rng):
    m, vec = random_mps(rng, 7)
    prof = m.entropy_profile()
    for c in range(6):
        assert abs(prof[c] - ref.cut_entropy(vec, 7, c)) < 1e-9
    assert abs(abs(np.vdot(vec, m.to_statevector())) ** 2 - 1) < 1e-10


def test_entropy_invariant_under_single_site_unitary(rng):
    m, _ = random_mps(rng, 5)
    before = m.entropy_profile().copy()
    u = tableau_to_unitary(random_clifford(1, rng))
    m.apply_local_unitary(u, 2)
    assert np.allclose(m.entropy_profile(), before, atol=1e-10)


def test_entropy_bounded_by_log_chi(rng):
    m, _ = random_mps(rng, 6)
    prof = m.entropy_profile()
    for c, chi in enumerate(m.bond_dims):
        assert prof[c] <= np.log2(max(chi, 1)) + 1e-9


def test_fidelity_identities(rng):
    m, vec = random_mps(rng, 5)
    assert abs(m.fidelity(m) - 1.0) < 1e-12
    a = MPS.product_state([(1, 0)])
    b = MPS.product_state([(0, 1)])
    assert a.fidelity(b) == 0.0


def test_fidelity_matches_dense(rng):
    trunc = TruncationPolicy(chi_max=16, cutoff=0.0)
    a, va = random_mps(rng, 8, trunc)
    b, vb = random_mps(rng, 8, trunc)
    assert abs(a.fidelity(b) - abs(np.vdot(va, vb)) ** 2) < 1e-10
    assert abs(a.fidelity(b) - b.fidelity(a)) < 1e-12


def test_truncation_discarded_weight(rng):
    m, vec = random_mps(rng, 6)
    tight = TruncationPolicy(chi_max=2, cutoff=0.0)
    m.apply_local_unitary(np.eye(4), 2, tight)
    cut = 2
    w = np.linalg.svd(vec.reshape(8, 8), compute_uv=False) ** 2
    expected_discard = w[2:].sum() / w.sum()
    assert abs(m.last_discarded[cut] - expected_discard) < 1e-9
    assert abs(m.norm() - 1.0) < 1e-12


def test_truncation_degenerate_multiplet_dropped_whole():
    # Bell pair spectrum is doubly degenerate; chi_max=1 must drop to rank 1
    # while a 4-fold degenerate spectrum with chi_max=3 drops the whole
    # multiplet deterministically
    vec = np.zeros(16)
    vec[[0, 5, 10, 15]] = 0.5  # two Bell pairs: middle cut has 4 equal values
    m = mps_from_dense(vec, 4)
    pol = TruncationPolicy(chi_max=3, cutoff=0.0)
    m.move_center(1)
    m.apply_local_unitary(np.eye(4), 1, pol)
    assert m.bond_dims[1] == 1  # whole multiplet of 4 dropped, 1 kept floor


def test_exactness_with_zero_cutoff(rng):
    # cutoff 0 and chi_max 2^(n/2): every operation keeps fidelity 1
    trunc = TruncationPolicy(chi_max=32, cutoff=0.0)
    n = 10
    m = MPS.computational(n, trunc=trunc)
    vec = np.zeros(2**n, dtype=complex)
    vec[0] = 1.0
    for _ in range(6):
        u = tableau_to_unitary(random_clifford(2, rng))
        start = int(rng.integers(n - 1))
        m.apply_local_unitary(u, start)
        vec = ref.apply_on(vec, n, u, [start, start + 1])
        letters = "".join("IXYZ"[i] for i in rng.integers(0, 4, n))
        if letters.strip("I"):
            p = pauli_parse(letters)
            m.apply_pauli_rotation(0.2, p)
            vec = ref.rotation_matrix(0.2, letters) @ vec
    assert abs(abs(np.vdot(vec, m.to_statevector())) ** 2 - 1) < 1e-9


def test_detect_separable_stabilizer():
    m = MPS.product_state([(1, 0), PLUS, MAGIC])
    assert m.detect_separable_stabilizer(0) == ("Z", 1)
    assert m.detect_separable_stabilizer(1) == ("X", 1)
    assert m.detect_separable_stabilizer(2) is None
    bell = mps_from_dense(np.array([1, 0, 0, 1]) / np.sqrt(2), 2)
    assert bell.detect_separable_stabilizer(0) is None


def test_snapshot_roundtrip(tmp_path, rng):
    m, vec = random_mps(rng, 5, TruncationPolicy(chi_max=8, cutoff=1e-12))
    path = tmp_path / "state.bin"
    m.save(path)
    back = MPS.load(path)
    assert back.n == 5
    assert back.trunc == m.trunc
    assert abs(abs(np.vdot(vec, back.to_statevector())) ** 2 - 1) < 1e-10
