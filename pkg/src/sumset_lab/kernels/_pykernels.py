"""Pure Python / numpy implementations of the hot kernels.

Every function here has a twin with the same name and signature in the
compiled ``_ckernels`` extension; the two must produce identical output.
"""
import numpy as np

BACKEND = "python"

_M64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)


def _mix64_array(z):
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _C1
    z = (z ^ (z >> np.uint64(27))) * _C2
    return z ^ (z >> np.uint64(31))


def mix2(keys, indices):
    """splitmix64(keys ^ splitmix64(indices)), elementwise, uint64 wraparound.

    ``keys`` and ``indices`` are equal-length 1-d arrays (uint64 / int64).
    """
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    idx = np.ascontiguousarray(indices, dtype=np.int64).view(np.uint64)
    with np.errstate(over="ignore"):
        return _mix64_array(keys ^ _mix64_array(idx))


def uniform_below(words, m):
    """Map 64-bit words to integers in [0, m) as ((w >> 32) * m) >> 32."""
    w = np.ascontiguousarray(words, dtype=np.uint64) >> np.uint64(32)
    mm = np.ascontiguousarray(m, dtype=np.int64)
    if mm.size and (mm.min() < 1 or mm.max() >= 1 << 32):
        raise ValueError("m must lie in [1, 2**32)")
    with np.errstate(over="ignore"):
        return ((w * mm.astype(np.uint64)) >> np.uint64(32)).astype(np.int64)


def sumset_shift_or(a_offsets, b_words, nbits):
    """OR of (mask_b << a) over a in ``a_offsets``; result truncated to nbits.

    Masks travel as little-endian uint64 word arrays.
    """
    nbits = int(nbits)
    b = int.from_bytes(np.ascontiguousarray(b_words, dtype="<u8").tobytes(), "little")
    acc = 0
    for a in np.asarray(a_offsets, dtype=np.int64).tolist():
        acc |= b << a
    acc &= (1 << nbits) - 1
    nwords = (nbits + 63) // 64
    return np.frombuffer(acc.to_bytes(nwords * 8, "little"), dtype="<u8").copy()


def sumset_naive(a, b):
    """All pairwise sums a_i + b_j, sorted and deduplicated."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    return np.unique(np.add.outer(a, b).ravel())


def translate_hits(dense, offsets, start, stop):
    """Positions p in [start, stop) with dense[p + o] true for every offset o.

    ``dense`` is a uint8/bool array; offsets are nonnegative and
    p + max(offsets) must stay inside ``dense`` for any reported p.
    """
    dense = np.asarray(dense, dtype=bool)
    offsets = np.asarray(offsets, dtype=np.int64)
    stop = min(stop, dense.size - int(offsets.max()))
    if stop <= start:
        return np.empty(0, dtype=np.int64)
    ok = np.ones(stop - start, dtype=bool)
    for o in offsets.tolist():
        ok &= dense[start + o:stop + o]
    return np.nonzero(ok)[0].astype(np.int64) + start


def cover_counts(a_dense, b_dense, n):
    """counts[u] = #{(i, j) : a_dense[i] and b_dense[j], i + j = u}, u < n."""
    a = np.asarray(a_dense, dtype=np.int64)
    b = np.asarray(b_dense, dtype=np.int64)
    out = np.zeros(n, dtype=np.int64)
    if a.size and b.size:
        c = np.convolve(a, b)[:n]
        out[:c.size] = c
    return out
