"""uint64 bitset primitives shared by the exact solvers.

A vertex set over ``n`` vertices is a row of ``words(n)`` uint64 words; vertex
``v`` lives in word ``v >> 6`` at bit ``v & 63``.  All constants are uint64 so
numba never promotes a mask to float.
"""

import numpy as np

from ._accel import njit

ZERO = np.uint64(0)
ONE = np.uint64(1)
ALL = np.uint64(0xFFFFFFFFFFFFFFFF)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_S1 = np.uint64(1)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S8 = np.uint64(8)
_S16 = np.uint64(16)
_S32 = np.uint64(32)
_LOW7 = np.uint64(0x7F)


def words(n: int) -> int:
    return max(1, (n + 63) >> 6)


@njit
def popcount64(x):
    x = x - ((x >> _S1) & _M1)
    x = (x & _M2) + ((x >> _S2) & _M2)
    x = (x + (x >> _S4)) & _M4
    x = x + (x >> _S8)
    x = x + (x >> _S16)
    x = x + (x >> _S32)
    return np.int64(x & _LOW7)


@njit
def lowbit_index(x):
    # x must be nonzero
    return popcount64((x & (~x + ONE)) - ONE)


@njit
def bit(v):
    return ONE << np.uint64(v & 63)


@njit
def popcount(row):
    total = 0
    for w in range(row.shape[0]):
        total += popcount64(row[w])
    return total


@njit
def is_empty(row):
    for w in range(row.shape[0]):
        if row[w] != ZERO:
            return False
    return True


@njit
def first_index(row):
    for w in range(row.shape[0]):
        if row[w] != ZERO:
            return (w << 6) + lowbit_index(row[w])
    return -1


@njit
def contains(row, v):
    return (row[v >> 6] & bit(v)) != ZERO


@njit
def set_bit(row, v):
    row[v >> 6] |= bit(v)


@njit
def clear_bit(row, v):
    row[v >> 6] &= ~bit(v)


@njit
def build_adjacency(n, eu, ev):
    nw = max(1, (n + 63) >> 6)
    adj = np.zeros((n, nw), dtype=np.uint64)
    for i in range(eu.shape[0]):
        u = eu[i]
        v = ev[i]
        adj[u, v >> 6] |= bit(v)
        adj[v, u >> 6] |= bit(u)
    return adj


@njit
def range_mask(n, lo, nw):
    """Bits ``lo..n-1`` set."""
    out = np.zeros(nw, dtype=np.uint64)
    for v in range(lo, n):
        out[v >> 6] |= bit(v)
    return out


def to_indices(row) -> list:
    out = []
    for w, word in enumerate(np.asarray(row, dtype=np.uint64)):
        word = int(word)
        while word:
            low = word & -word
            out.append((w << 6) + low.bit_length() - 1)
            word ^= low
    return out


def from_indices(indices, n: int) -> np.ndarray:
    row = np.zeros(words(n), dtype=np.uint64)
    for v in indices:
        row[v >> 6] |= np.uint64(1) << np.uint64(v & 63)
    return row
