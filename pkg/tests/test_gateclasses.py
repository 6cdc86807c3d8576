import time

import numpy as np
import pytest

import ctnsim._symplectic as sp
from ctnsim.exceptions import ValidationError
from ctnsim.gateclasses import (GateClassTable, _pack_keys, class_sizes,
                                double_coset_classes, enumerate_symplectic,
                                lift_representative)
from ctnsim.mps import MPS
from ctnsim.tableau import tableau_to_unitary

import dense_reference as ref


def test_enumerate_k2_count_and_time():
    t0 = time.time()
    mats = enumerate_symplectic(2)
    assert time.time() - t0 < 1.0
    assert mats.shape == (720, 4, 4)
    keys = _pack_keys(mats)
    assert np.unique(keys).size == 720
    ident = _pack_keys(np.eye(4, dtype=np.uint8)[None])[0]
    assert int((keys == ident).sum()) == 1


def test_enumerate_elements_are_symplectic():
    mats = enumerate_symplectic(2)
    assert all(sp.is_symplectic(m) for m in mats[::17])


def test_enumerate_rejects_bad_k():
    with pytest.raises(ValidationError):
        enumerate_symplectic(4)


def test_k2_classes(table2):
    assert table2.class_count == 20
    assert len(table2.representatives) == 20


def test_k2_identity_class_is_local_subgroup():
    sizes = class_sizes(2)
    assert sizes.shape == (20,)
    # cosets of the 36-element local layer partition the 720 elements evenly
    assert np.all(sizes == 36)


def test_representatives_pairwise_inequivalent(table2):
    # no two representatives related by a post-gate local layer
    gens = sp.local_symplectic_generators(2)
    local = {tuple(np.eye(4, dtype=np.uint8).ravel())}
    frontier = [np.eye(4, dtype=np.uint8)]
    while frontier:
        m = frontier.pop()
        for g in gens:
            p = (m @ g) % 2
            key = tuple(p.ravel())
            if key not in local:
                local.add(key)
                frontier.append(p)
    assert len(local) == 36
    reps = [t.symplectic() for t in table2.representatives]
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            for lkey in local:
                lmat = np.array(lkey, dtype=np.uint8).reshape(4, 4)
                assert not np.array_equal((a @ lmat) % 2, b)


def test_class_membership_under_post_local_moves(table2, rng):
    mats = enumerate_symplectic(2)
    keys = set(_pack_keys(mats).tolist())
    gens = sp.local_symplectic_generators(2)
    for t in table2.representatives:
        m = t.symplectic()
        for _ in range(50):
            m = (m @ gens[rng.integers(len(gens))]) % 2
        assert int(_pack_keys(m[None])[0]) in keys


def test_lift_representative_identity_and_cx():
    ident = lift_representative(np.eye(4, dtype=np.uint8))
    assert ident.is_identity()
    cx_bits = np.array([[1, 0, 1, 0],
                        [0, 1, 0, 0],
                        [0, 0, 1, 0],
                        [0, 1, 0, 1]], dtype=np.uint8)
    cx = lift_representative(cx_bits)
    got = tableau_to_unitary(cx)
    assert np.allclose(got, ref.phase_aligned(got, ref.CX), atol=1e-12)


def test_lift_rejects_non_symplectic():
    with pytest.raises(ValidationError):
        lift_representative(np.ones((4, 4), dtype=np.uint8))


def test_lift_roundtrip_k3(table3, rng):
    for _ in range(10):
        t = table3.representatives[int(rng.integers(table3.class_count))]
        assert np.array_equal(lift_representative(t.symplectic()).symplectic(),
                              t.symplectic())
        assert not t.phases.any()


def test_representatives_have_positive_phases(table2):
    for t in table2.representatives:
        assert not t.phases.any()
        assert t.is_valid()


def test_local_pauli_soundness(table2, rng):
    # entropy profile of R L |phi> equals that of R |phi> for local Paulis L
    from ctnsim.pauli import PauliString

    us = table2.unitaries()
    for _ in range(20):
        idx = int(rng.integers(20))
        states = []
        for _ in range(2):
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            states.append(v / np.linalg.norm(v))
        phi = np.kron(states[0], states[1])
        letters = "".join("IXYZ"[i] for i in rng.integers(0, 4, 2))
        lmat = ref.pauli_matrix(letters)
        for vec in (us[idx] @ phi, us[idx] @ (lmat @ phi)):
            pass
        e_plain = ref.cut_entropy(us[idx] @ phi, 2, 0)
        e_pauli = ref.cut_entropy(us[idx] @ (lmat @ phi), 2, 0)
        assert abs(e_plain - e_pauli) < 1e-10


def test_table_io_roundtrip(tmp_path, table2):
    path = tmp_path / "classes.bin"
    table2.save(path)
    back = GateClassTable.load(path)
    assert back.k == 2 and back.class_count == 20
    for a, b in zip(back.representatives, table2.representatives):
        assert np.array_equal(a.symplectic(), b.symplectic())


def test_table_determinism(table2):
    again = double_coset_classes(2)
    for a, b in zip(again.representatives, table2.representatives):
        assert np.array_equal(a.symplectic(), b.symplectic())
