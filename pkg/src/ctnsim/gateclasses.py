"""Entangling-equivalence classes of k-qubit Clifford gates.

For the cooling search only the action on entanglement matters, and a
single-qubit layer applied after a gate cannot change any cut spectrum.
The search set is therefore one representative per coset of the k-qubit
Clifford group under post-gate local (single-qubit) Clifford layers.
Pauli factors and phases sit inside the local subgroup, so these cosets
biject with cosets of Sp(2k,2) under local symplectic layers:

    k=2:  720 / 36  = 20 representatives
    k=3:  1451520 / 216 = 6720 representatives

matching the advertised |C_2|/|C_1 x C_1| = 11520/576 and
|C_3|/|C_1^3| = 92897280/13824. The representative of each class is its
lexicographically smallest bit matrix, lifted to a tableau with all
generator-image phases +1.

The k=3 table is a one-time offline build; it is persisted to a small
versioned binary file and cached under ``$CTNSIM_CACHE`` (default
``~/.cache/ctnsim``).
"""

from __future__ import annotations

import os
import struct
import time
from dataclasses import dataclass, field

import numpy as np

from . import _symplectic as sp
from .exceptions import CtnError, ValidationError
from .tableau import CliffordTableau, tableau_to_unitary

_EXPECTED_CLASSES = {2: 20, 3: 6720}
_EXPECTED_ORDER = {2: 720, 3: 1451520}
_MAGIC = b"CTNGCT01"


def enumerate_symplectic(k: int) -> np.ndarray:
    """All of Sp(2k, 2) as a (N, 2k, 2k) uint8 array, in index order."""
    if k not in (2, 3):
        raise ValidationError("symplectic enumeration supports k in {2, 3}")
    rows = sp.enumerate_rows(k)
    nn = 2 * k
    return ((rows[:, :, None] >> np.arange(nn)[None, None, :]) & 1).astype(np.uint8)


def _pack_keys(mats: np.ndarray) -> np.ndarray:
    """Row-major bit packing, MSB first, so key order == lexicographic order."""
    nbits = mats.shape[1] * mats.shape[2]
    weights = (1 << np.arange(nbits - 1, -1, -1)).astype(np.uint64)
    flat = mats.reshape(mats.shape[0], nbits).astype(np.uint64)
    return flat @ weights


@dataclass
class GateClassTable:
    """Canonical representatives of the k-qubit entangling classes."""

    k: int
    representatives: list
    class_count: int
    build_seconds: float = 0.0
    _unitaries: np.ndarray = field(default=None, repr=False)
    _inverses: list = field(default=None, repr=False)
    _transfer: dict = field(default=None, repr=False)

    def unitaries(self) -> np.ndarray:
        """Stacked dense lifts, shape (class_count, 2^k, 2^k)."""
        if self._unitaries is None:
            self._unitaries = np.stack([tableau_to_unitary(t) for t in self.representatives])
        return self._unitaries

    def inverse_tableaus(self) -> list:
        if self._inverses is None:
            self._inverses = [t.inverse() for t in self.representatives]
        return self._inverses

    def transfer_tensors(self) -> dict:
        """Two-point tensors K[side, cut][cand, a, a', q, q'] used by the
        window search: contractions of each unitary with its conjugate over
        the traced-out physical legs of an internal cut."""
        if self._transfer is None:
            us = self.unitaries()
            d = us.shape[1]
            tt = {}
            for c in range(1, self.k):
                a, b = 2**c, 2**(self.k - c)
                ur = us.reshape(-1, a, b, d)
                tt[("L", c)] = np.einsum("cxpq,cypQ->cxyqQ", ur, ur.conj())
                tt[("R", c)] = np.einsum("cpxq,cpyQ->cxyqQ", ur, ur.conj())
            self._transfer = tt
        return self._transfer

    def save(self, path):
        with open(path, "wb") as f:
            f.write(_MAGIC)
            f.write(struct.pack("<BId", self.k, self.class_count, self.build_seconds))
            for t in self.representatives:
                f.write(np.packbits(t.bits.reshape(-1)).tobytes())

    @classmethod
    def load(cls, path) -> "GateClassTable":
        with open(path, "rb") as f:
            if f.read(8) != _MAGIC:
                raise ValidationError(f"{path}: not a gate-class table")
            k, count, build_seconds = struct.unpack("<BId", f.read(13))
            nbits = 4 * k * k
            nbytes = (nbits + 7) // 8
            reps = []
            for _ in range(count):
                bits = np.unpackbits(np.frombuffer(f.read(nbytes), dtype=np.uint8))[:nbits]
                reps.append(CliffordTableau.from_symplectic(bits.reshape(2 * k, 2 * k)))
        return cls(k, reps, count, build_seconds)


def lift_representative(mat: np.ndarray) -> CliffordTableau:
    """Phase-free tableau whose symplectic part equals ``mat``."""
    return CliffordTableau.from_symplectic(np.asarray(mat, dtype=np.uint8))


def double_coset_classes(k: int, mats: np.ndarray = None) -> GateClassTable:
    """Partition Sp(2k,2) into post-gate local-layer classes.

    Flood fill under right multiplication by the per-site H/S generator
    images (matrix convention: physical post-composition multiplies the
    bit matrix on the right). Seeds are visited in lexicographic order,
    so each class representative is its lexicographically smallest member.
    """
    start = time.time()
    if mats is None:
        mats = enumerate_symplectic(k)
    n_el = mats.shape[0]
    if n_el != _EXPECTED_ORDER[k]:
        raise CtnError(f"|Sp({2 * k},2)| = {n_el}, expected {_EXPECTED_ORDER[k]}")
    keys = _pack_keys(mats)
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    if np.any(sorted_keys[1:] == sorted_keys[:-1]):
        raise CtnError("duplicate symplectic elements in enumeration")
    gens = sp.local_symplectic_generators(k)
    class_id = np.full(n_el, -1, dtype=np.int32)
    rep_indices = []
    next_class = 0
    for pos in range(n_el):
        seed = int(order[pos])
        if class_id[seed] >= 0:
            continue
        class_id[seed] = next_class
        rep_indices.append(seed)
        frontier = mats[seed][None, :, :]
        while frontier.shape[0]:
            new = []
            for g in gens:
                prod = (frontier @ g) % 2
                pk = _pack_keys(prod)
                idx = order[np.searchsorted(sorted_keys, pk)]
                fresh = idx[class_id[idx] < 0]
                if fresh.size:
                    fresh = np.unique(fresh)
                    class_id[fresh] = next_class
                    new.append(mats[fresh])
            frontier = np.concatenate(new) if new else np.empty((0, 2 * k, 2 * k), np.uint8)
        next_class += 1
    if next_class != _EXPECTED_CLASSES[k]:
        raise CtnError(f"found {next_class} classes for k={k}, expected {_EXPECTED_CLASSES[k]}")
    reps = [lift_representative(mats[i]) for i in rep_indices]
    return GateClassTable(k, reps, next_class, build_seconds=time.time() - start)


def class_sizes(k: int) -> np.ndarray:
    """Orbit sizes (all equal to |local layer| since these are cosets)."""
    mats = enumerate_symplectic(k)
    table_ids = _class_ids(k, mats)
    return np.bincount(table_ids)


def _class_ids(k, mats):
    # rerun the flood fill but return the per-element labels (test helper)
    keys = _pack_keys(mats)
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    gens = sp.local_symplectic_generators(k)
    class_id = np.full(mats.shape[0], -1, dtype=np.int32)
    next_class = 0
    for pos in range(mats.shape[0]):
        seed = int(order[pos])
        if class_id[seed] >= 0:
            continue
        class_id[seed] = next_class
        frontier = mats[seed][None, :, :]
        while frontier.shape[0]:
            new = []
            for g in gens:
                prod = (frontier @ g) % 2
                idx = order[np.searchsorted(sorted_keys, _pack_keys(prod))]
                fresh = idx[class_id[idx] < 0]
                if fresh.size:
                    fresh = np.unique(fresh)
                    class_id[fresh] = next_class
                    new.append(mats[fresh])
            frontier = np.concatenate(new) if new else np.empty((0, 2 * k, 2 * k), np.uint8)
        next_class += 1
    return class_id


def cache_dir() -> str:
    base = os.environ.get("CTNSIM_CACHE")
    if base is None:
        base = os.path.join(os.path.expanduser("~"), ".cache", "ctnsim")
    os.makedirs(base, exist_ok=True)
    return base


_TABLES: dict = {}


def get_table(k: int, path=None) -> GateClassTable:
    """Load (or build and cache) the class table for k in {2, 3}."""
    if k in _TABLES and path is None:
        return _TABLES[k]
    if k not in (2, 3):
        raise ValidationError("gate-class tables exist for k in {2, 3} only")
    fname = path or os.path.join(cache_dir(), f"classes_k{k}.bin")
    if os.path.exists(fname):
        table = GateClassTable.load(fname)
        if table.k != k or table.class_count != _EXPECTED_CLASSES[k]:
            raise CtnError(f"{fname}: stale or corrupt table")
    else:
        table = double_coset_classes(k)
        table.save(fname)
    upath = fname + ".unitaries.npy"
    if os.path.exists(upath):
        table._unitaries = np.load(upath)
    else:
        np.save(upath, table.unitaries())
    if path is None:
        _TABLES[k] = table
    return table
