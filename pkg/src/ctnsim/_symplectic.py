"""Indexed enumeration of the binary symplectic group Sp(2n, 2).

Implements the transvection-based bijection between {0, ..., |Sp(2n,2)|-1}
and symplectic matrices from Koenig & Smolin, "How to efficiently select an
arbitrary Clifford group element" (J. Math. Phys. 55, 122202). Bit columns
are interleaved per site as (x0, z0, x1, z1, ...), so the symplectic form
pairs adjacent coordinates.

Matrices are uint8 arrays over GF(2); row r is the image of basis vector r.
Internally rows are plain ints (bit c = column c), which keeps the
million-element k=3 enumeration cheap.
"""

from __future__ import annotations

import numpy as np


def sp_order(n: int) -> int:
    """|Sp(2n, 2)| = prod_{j=1..n} (4^j - 1) * 2^(2j-1)."""
    order = 1
    for j in range(1, n + 1):
        order *= (4**j - 1) << (2 * j - 1)
    return order


def _even_mask(nn: int) -> int:
    m = 0
    for c in range(0, nn, 2):
        m |= 1 << c
    return m


def _inner(v: int, w: int, even: int) -> int:
    return ((v & (w >> 1) & even).bit_count() + (w & (v >> 1) & even).bit_count()) & 1


def _transvection(k: int, v: int, even: int) -> int:
    return v ^ k if (k and _inner(k, v, even)) else v


def _find_transvection(x: int, y: int, nn: int, even: int):
    """h1, h2 with Z_h1 Z_h2 x = y (Lemma 2 of the reference)."""
    if x == y:
        return 0, 0
    if _inner(x, y, even):
        return x ^ y, 0
    z = 0
    for c in range(0, nn, 2):
        xp = (x >> c) & 3
        yp = (y >> c) & 3
        if xp and yp:
            zp = xp ^ yp
            if zp == 0:
                zp = 2
                if (xp & 1) != ((xp >> 1) & 1):
                    zp |= 1
            z = zp << c
            return x ^ z, y ^ z
    for c in range(0, nn, 2):
        xp = (x >> c) & 3
        if xp and not ((y >> c) & 3):
            if (xp & 1) == ((xp >> 1) & 1):
                zp = 2
            else:
                zp = ((xp & 1) << 1) | ((xp >> 1) & 1)
            z |= zp << c
            break
    for c in range(0, nn, 2):
        yp = (y >> c) & 3
        if yp and not ((x >> c) & 3):
            if (yp & 1) == ((yp >> 1) & 1):
                zp = 2
            else:
                zp = ((yp & 1) << 1) | ((yp >> 1) & 1)
            z |= zp << c
            break
    return x ^ z, y ^ z


def _rows_from_index(i: int, n: int) -> list:
    """Rows (as bit ints) of the i-th element of Sp(2n, 2)."""
    nn = 2 * n
    even = _even_mask(nn)
    s = (1 << nn) - 1
    f1 = (i % s) + 1
    i //= s

    t1, t2 = _find_transvection(1, f1, nn, even)

    bits = i % (1 << (nn - 1))
    i >>= nn - 1
    eprime = 1 | (((bits >> 1) << 2) & ((1 << nn) - 1))
    h0 = _transvection(t1, eprime, even)
    h0 = _transvection(t2, h0, even)
    if bits & 1:
        f1 = 0

    if n == 1:
        rows = [1, 2]
    else:
        rows = [1, 2] + [r << 2 for r in _rows_from_index(i, n - 1)]
    for j in range(nn):
        r = _transvection(t1, rows[j], even)
        r = _transvection(t2, r, even)
        r = _transvection(h0, r, even)
        rows[j] = _transvection(f1, r, even)
    return rows


def rows_to_matrix(rows) -> np.ndarray:
    nn = len(rows)
    arr = np.array(rows, dtype=np.int64)
    return ((arr[:, None] >> np.arange(nn)[None, :]) & 1).astype(np.uint8)


def symplectic_from_index(i: int, n: int) -> np.ndarray:
    """The i-th element of Sp(2n, 2); bijective for 0 <= i < sp_order(n)."""
    return rows_to_matrix(_rows_from_index(i, n))


def enumerate_rows(n: int) -> np.ndarray:
    """All group elements as an (order, 2n) int64 row array, in index order."""
    order = sp_order(n)
    out = np.empty((order, 2 * n), dtype=np.int64)
    for i in range(order):
        out[i] = _rows_from_index(i, n)
    return out


def symplectic_form(n: int) -> np.ndarray:
    j = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    for k in range(n):
        j[2 * k, 2 * k + 1] = 1
        j[2 * k + 1, 2 * k] = 1
    return j


def is_symplectic(m: np.ndarray) -> bool:
    n = m.shape[0] // 2
    j = symplectic_form(n)
    return np.array_equal((m.astype(np.uint8) @ j @ m.T) % 2, j)


def random_index_below(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in [0, bound) for arbitrarily large bounds."""
    nbits = bound.bit_length()
    nwords = (nbits + 31) // 32
    while True:
        words = rng.integers(0, 1 << 32, size=nwords, dtype=np.uint64)
        value = 0
        for w in words:
            value = (value << 32) | int(w)
        value &= (1 << nbits) - 1
        if value < bound:
            return value


def local_symplectic_generators(k: int):
    """Per-site H and S images as 2k x 2k matrices (row-vector action)."""
    h = np.array([[0, 1], [1, 0]], dtype=np.uint8)
    s = np.array([[1, 1], [0, 1]], dtype=np.uint8)
    gens = []
    for site in range(k):
        for block in (h, s):
            g = np.eye(2 * k, dtype=np.uint8)
            g[2 * site:2 * site + 2, 2 * site:2 * site + 2] = block
            gens.append(g)
    return gens
