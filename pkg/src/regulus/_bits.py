"""Bit-twiddling helpers shared by the numba kernels."""

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)


@njit(cache=True, inline="always")
def popcount(x):
    x = np.uint64(x)
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True, inline="always")
def bit(i):
    return _ONE << np.uint64(i)


@njit(cache=True, inline="always")
def lowest_index(x):
    # index of the lowest set bit; x must be nonzero
    i = 0
    x = np.uint64(x)
    while (x & _ONE) == np.uint64(0):
        x >>= _ONE
        i += 1
    return i


@njit(cache=True, inline="always")
def has(rows, u, v):
    return (rows[u, v >> 6] >> np.uint64(v & 63)) & _ONE != np.uint64(0)


def words_for(n: int) -> int:
    return max(1, (n + 63) // 64)
