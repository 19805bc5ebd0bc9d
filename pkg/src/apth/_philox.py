"""Vectorized Philox 4x64-10 counter-based generator.

Word j of the stream keyed by (seed, stream_id) is a pure function of
(seed, stream_id, j), which is what makes sampling reproducible under any
worker decomposition: workers can claim arbitrary index ranges and still
produce bit-identical output.

The constants and round structure follow the Philox 4x64 round function with
10 rounds, and the counter convention matches ``numpy.random.Philox`` with
``key=[seed, stream_id]``: output block b (4 words) uses counter value b+1.
``words()`` therefore agrees word-for-word with
``np.random.Philox(key=[seed, stream_id]).random_raw(...)``, which the test
suite asserts.  numpy's own Philox is not used on the hot path because its
per-instance API cannot be vectorized across thousands of stream keys.
"""

from __future__ import annotations

import numpy as np

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_MASK32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)

_ROUNDS = 10
_WORDS_PER_BLOCK = 4

_U64 = 1 << 64


def check_u64(value: int, name: str) -> int:
    if not 0 <= value < _U64:
        raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value}")
    return value


def _mulhilo(a, b):
    # 64x64 -> (hi, lo).  lo is the wrapping product; hi assembled from
    # 32-bit partial products, all of which stay below 2^64.
    lo = a * b
    ah = a >> _S32
    al = a & _MASK32
    bh = b >> _S32
    bl = b & _MASK32
    t = ah * bl + ((al * bl) >> _S32)
    u = al * bh + (t & _MASK32)
    hi = ah * bh + (t >> _S32) + (u >> _S32)
    return hi, lo


def _blocks(c0, k0, k1):
    """Run the 10-round block function on broadcast uint64 arrays.

    c0 carries the counter (remaining counter lanes are zero: streams never
    produce 2^66 words); k0/k1 carry the key.  Returns the four output lanes.
    """
    c1 = np.zeros_like(c0)
    c2 = np.zeros_like(c0)
    c3 = np.zeros_like(c0)
    with np.errstate(over="ignore"):
        for r in range(_ROUNDS):
            if r:
                k0 = k0 + _W0
                k1 = k1 + _W1
            hi0, lo0 = _mulhilo(_M0, c0)
            hi1, lo1 = _mulhilo(_M1, c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return c0, c1, c2, c3


def words(
    seed: int,
    stream_ids: np.ndarray,
    nwords: int,
    first_word: int = 0,
) -> np.ndarray:
    """Words [first_word, first_word+nwords) of each (seed, id) stream.

    ``stream_ids`` is a 1-d uint64 array of m stream ids; the result has
    shape (m, nwords).
    """
    check_u64(seed, "seed")
    if nwords < 0 or first_word < 0:
        raise ValueError("word positions must be nonnegative")
    ids = np.ascontiguousarray(stream_ids, dtype=np.uint64)
    m = ids.shape[0]
    if nwords == 0:
        return np.zeros((m, 0), dtype=np.uint64)
    b_lo = first_word // _WORDS_PER_BLOCK
    b_hi = (first_word + nwords - 1) // _WORDS_PER_BLOCK
    nblocks = b_hi - b_lo + 1
    # block b holds words [4b, 4b+4) and is generated at counter b+1
    ctr = np.broadcast_to(
        np.arange(b_lo + 1, b_hi + 2, dtype=np.uint64), (m, nblocks)
    )
    k0 = np.broadcast_to(np.uint64(seed), (m, nblocks))
    k1 = np.broadcast_to(ids[:, None], (m, nblocks))
    o0, o1, o2, o3 = _blocks(ctr, k0, k1)
    out = np.empty((m, nblocks, _WORDS_PER_BLOCK), dtype=np.uint64)
    out[..., 0] = o0
    out[..., 1] = o1
    out[..., 2] = o2
    out[..., 3] = o3
    flat = out.reshape(m, nblocks * _WORDS_PER_BLOCK)
    off = first_word - b_lo * _WORDS_PER_BLOCK
    return flat[:, off : off + nwords]
