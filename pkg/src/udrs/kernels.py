"""Numeric inner loops, each in a numba and a plain-numpy flavour.

``UDRS_NUMBA=0`` in the environment (or numba failing to import) selects the
numpy path.  Both paths are importable as ``*_numba`` / ``*_numpy`` so tests
and the benchmark can compare them directly.
"""
from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - depends on the environment
    from numba import njit
    HAVE_NUMBA = True
except Exception:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("UDRS_NUMBA", "1") not in ("0", "false", "no")


# ---------------------------------------------------------------- linear extensions


def count_linear_extensions_numpy(pred: np.ndarray) -> int:
    """Number of linear extensions; ``pred[i]`` is the bitmask of items that must precede ``i``."""
    n = len(pred)
    if n == 0:
        return 1
    full = 1 << n
    dp = np.zeros(full, dtype=np.int64)
    dp[0] = 1
    masks = np.arange(full, dtype=np.int64)
    # layer by popcount so every source is final before it is used
    pop = np.array([bin(m).count("1") for m in range(full)])
    for k in range(n):
        layer = masks[(pop == k) & (dp != 0)]
        for i in range(n):
            bit = 1 << i
            ok = ((layer & bit) == 0) & ((layer & pred[i]) == pred[i])
            src = layer[ok]
            np.add.at(dp, src | bit, dp[src])
    return int(dp[full - 1])


if HAVE_NUMBA:
    @njit(cache=True)
    def _count_linear_extensions_nb(pred):  # pragma: no cover - compiled
        n = pred.shape[0]
        full = 1 << n
        dp = np.zeros(full, dtype=np.int64)
        dp[0] = 1
        for s in range(full):
            v = dp[s]
            if v == 0:
                continue
            for i in range(n):
                bit = 1 << i
                if (s & bit) == 0 and (s & pred[i]) == pred[i]:
                    dp[s | bit] += v
        return dp[full - 1]

    def count_linear_extensions_numba(pred: np.ndarray) -> int:
        if len(pred) == 0:
            return 1
        return int(_count_linear_extensions_nb(np.asarray(pred, dtype=np.int64)))
else:  # pragma: no cover
    count_linear_extensions_numba = count_linear_extensions_numpy


def count_linear_extensions(pred) -> int:
    arr = np.asarray(pred, dtype=np.int64)
    if USE_NUMBA:
        return count_linear_extensions_numba(arr)
    return count_linear_extensions_numpy(arr)


# ---------------------------------------------------------------- model bits


def decode_bits_numpy(start: int, count: int, nbits: int) -> np.ndarray:
    """Rows ``start .. start+count-1`` of the binary counting table, LSB first."""
    ids = np.arange(start, start + count, dtype=np.int64)
    return ((ids[:, None] >> np.arange(nbits, dtype=np.int64)) & 1).astype(np.bool_)


if HAVE_NUMBA:
    @njit(cache=True)
    def _decode_bits_nb(start, count, nbits):  # pragma: no cover - compiled
        out = np.empty((count, nbits), dtype=np.bool_)
        for r in range(count):
            v = start + r
            for b in range(nbits):
                out[r, b] = (v >> b) & 1
        return out

    def decode_bits_numba(start: int, count: int, nbits: int) -> np.ndarray:
        return _decode_bits_nb(np.int64(start), np.int64(count), np.int64(nbits))
else:  # pragma: no cover
    decode_bits_numba = decode_bits_numpy


def decode_bits(start: int, count: int, nbits: int) -> np.ndarray:
    if USE_NUMBA:
        return decode_bits_numba(start, count, nbits)
    return decode_bits_numpy(start, count, nbits)


# ---------------------------------------------------------------- quantifier laws


def gq_properties_numpy(table: np.ndarray, n: int) -> np.ndarray:
    """Check monotonicity laws of a conservative quantifier over all subsets of ``{0..n-1}``.

    ``table[a, k]`` is the truth value for ``|A| = a`` and ``|A & B| = k``.
    Returns booleans ``[right_up, right_down, persistent, anti_persistent]``.
    """
    subsets = np.arange(1 << n, dtype=np.int64)
    pop = np.array([bin(int(s)).count("1") for s in subsets])
    A = subsets[:, None, None]
    B = subsets[None, :, None]
    C = subsets[None, None, :]          # the second restrictor / scope set
    val_AB = table[pop[A], pop[A & B]]
    # right: B subset of C
    sub_BC = (B & C) == B
    val_AC = table[pop[A], pop[A & C]]
    right_up = not np.any(sub_BC & val_AB & ~val_AC)
    right_down = not np.any(sub_BC & val_AC & ~val_AB)
    # left: A subset of A' (C plays A')
    val_CB = table[pop[C], pop[C & B]]
    sub_AC = (A & C) == A
    persistent = not np.any(sub_AC & val_AB & ~val_CB)
    anti = not np.any(sub_AC & val_CB & ~val_AB)
    return np.array([right_up, right_down, persistent, anti])


if HAVE_NUMBA:
    @njit(cache=True)
    def _popcount(x):  # pragma: no cover - compiled
        c = 0
        while x:
            x &= x - 1
            c += 1
        return c

    @njit(cache=True)
    def _gq_properties_nb(table, n):  # pragma: no cover - compiled
        full = 1 << n
        res = np.ones(4, dtype=np.bool_)
        for a in range(full):
            pa = _popcount(a)
            for b in range(full):
                vab = table[pa, _popcount(a & b)]
                for c in range(full):
                    if (b & c) == b:
                        vac = table[pa, _popcount(a & c)]
                        if vab and not vac:
                            res[0] = False
                        if vac and not vab:
                            res[1] = False
                    if (a & c) == a:
                        vcb = table[_popcount(c), _popcount(c & b)]
                        if vab and not vcb:
                            res[2] = False
                        if vcb and not vab:
                            res[3] = False
        return res

    def gq_properties_numba(table: np.ndarray, n: int) -> np.ndarray:
        return _gq_properties_nb(np.ascontiguousarray(table, dtype=np.bool_), n)
else:  # pragma: no cover
    gq_properties_numba = gq_properties_numpy


def gq_properties(table: np.ndarray, n: int) -> np.ndarray:
    if USE_NUMBA:
        return gq_properties_numba(table, n)
    return gq_properties_numpy(table, n)


def gq_entails_numpy(t1: np.ndarray, t2: np.ndarray, n: int) -> bool:
    """``Q1(A, B)`` implies ``Q2(A, B)`` for all subsets of an ``n``-element domain."""
    subsets = np.arange(1 << n, dtype=np.int64)
    pop = np.array([bin(int(s)).count("1") for s in subsets])
    A = subsets[:, None]
    B = subsets[None, :]
    a, k = pop[A], pop[A & B]
    return not np.any(t1[a, k] & ~t2[a, k])


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
