"""Bit-packed 2-colorings of [1, n] and monochromatic k-AP detection.

A coloring assigns red (bit 1) or blue (bit 0) to each element; element i
lives at bit i-1.  Detection works per common difference d by AND-ing the
color mask with itself shifted by multiples of d: a set bit at position
i-1 in the result marks a monochromatic run starting at element i.  The
shift chain is built by doubling, so a length-k run costs O(log k) shifted
ANDs instead of k-1.

Two equivalent kernels are provided: an arbitrary-precision-integer one for
single colorings, and a numpy uint64 batch one used by the Monte Carlo
engine.  Their agreement (and agreement with a direct scan over
``enumerate_aps``) is asserted by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _philox
from .progressions import _check_k, _check_n, element_mask
from .family import APFamily

WORD_BITS = 64

_FULL_WORD = np.uint64(0xFFFFFFFFFFFFFFFF)


def _word_count(n: int) -> int:
    return -(-n // WORD_BITS)


def _pad_mask(n: int) -> np.uint64:
    """Mask of the significant bits of the top word of an n-bit vector."""
    top = n - (_word_count(n) - 1) * WORD_BITS
    return _FULL_WORD if top == WORD_BITS else np.uint64((1 << top) - 1)


@dataclass(frozen=True)
class Coloring:
    """A 2-coloring of [1, n]: bit i-1 of ``bits`` is 1 iff element i is red."""

    n: int
    bits: int

    def __post_init__(self):
        _check_n(self.n)
        # bit_length comparison instead of bits < 2^n: n may be huge
        if self.bits < 0 or self.bits.bit_length() > self.n:
            raise ValueError(
                f"bits must have at most n={self.n} significant bits "
                "(padding above n must be zero)"
            )

    @classmethod
    def from01(cls, text: str) -> "Coloring":
        """Parse a 0/1 string, element 1 first."""
        if not text or any(ch not in "01" for ch in text):
            raise ValueError("coloring string must be nonempty and contain only 0/1")
        bits = 0
        for i, ch in enumerate(text):
            if ch == "1":
                bits |= 1 << i
        return cls(len(text), bits)

    def to01(self) -> str:
        """Serialize as a 0/1 string, element 1 first."""
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.n))

    @classmethod
    def from_words(cls, n: int, words: list[int]) -> "Coloring":
        _check_n(n)
        if len(words) != _word_count(n):
            raise ValueError(
                f"expected {_word_count(n)} words for n={n}, got {len(words)}"
            )
        bits = 0
        for i, w in enumerate(words):
            if not 0 <= w < (1 << WORD_BITS):
                raise ValueError("words must be unsigned 64-bit integers")
            bits |= w << (i * WORD_BITS)
        return cls(n, bits)

    def words(self) -> list[int]:
        """Little-endian 64-bit words (word 0 holds elements 1..64)."""
        return [
            (self.bits >> (i * WORD_BITS)) & ((1 << WORD_BITS) - 1)
            for i in range(_word_count(self.n))
        ]

    def hex_words(self) -> list[str]:
        """Words as fixed-width hex strings, for JSON dumps."""
        return [f"{w:016x}" for w in self.words()]

    def flipped(self) -> "Coloring":
        """The coloring with both colors exchanged."""
        return Coloring(self.n, self.bits ^ ((1 << self.n) - 1))

    def red_count(self) -> int:
        return self.bits.bit_count()


class RandomStream:
    """Deterministic stream of random 64-bit words keyed by (seed, stream_id).

    Word j of a stream is a pure function of (seed, stream_id, j); distinct
    stream ids under one seed give statistically independent sequences, so
    parallel workers can each own their own ids with no coordination.  The
    instance keeps a cursor for sequential draws; ``words_at`` is the pure
    random-access form.
    """

    __slots__ = ("seed", "stream_id", "_pos")

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = _philox.check_u64(seed, "seed")
        self.stream_id = _philox.check_u64(stream_id, "stream_id")
        self._pos = 0

    @property
    def position(self) -> int:
        return self._pos

    def words_at(self, offset: int, count: int) -> np.ndarray:
        ids = np.array([self.stream_id], dtype=np.uint64)
        return _philox.words(self.seed, ids, count, first_word=offset)[0]

    def next_words(self, count: int) -> np.ndarray:
        out = self.words_at(self._pos, count)
        self._pos += count
        return out

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id})"


def random_coloring(n: int, stream: RandomStream) -> Coloring:
    """Draw a uniform coloring of [1, n] from the stream's next words.

    Each element's color comes from its own bit of the word stream, so a
    coloring of [1, n] is the prefix of the coloring of [1, n'] (n' > n)
    drawn from the same stream position.  Padding above n is cleared.
    """
    _check_n(n)
    raw = stream.next_words(_word_count(n))
    bits = int.from_bytes(raw.astype("<u8").tobytes(), "little")
    return Coloring(n, bits & ((1 << n) - 1))


def _run_starts(mask: int, d: int, k: int) -> int:
    """Bits i with mask bits i, i+d, ..., i+(k-1)d all set (doubling chain)."""
    t = 1
    while 2 * t <= k:
        mask &= mask >> (t * d)
        t *= 2
    if t < k:
        mask &= mask >> ((k - t) * d)
    return mask


def has_mono_ap(c: Coloring, k: int) -> bool:
    """True iff some k-AP in [1, c.n] is monochromatic under ``c``.

    Scans d ascending (small-d APs are the most numerous, so hits come
    early) and returns on the first nonzero run mask of either color.
    """
    _check_k(k)
    full = (1 << c.n) - 1
    red = c.bits
    blue = red ^ full
    for d in range(1, (c.n - 1) // (k - 1) + 1):
        if _run_starts(red, d, k) or _run_starts(blue, d, k):
            return True
    return False


def count_mono_aps(c: Coloring, k: int) -> int:
    """Exact number of monochromatic k-APs in [1, c.n] under ``c``."""
    _check_k(k)
    full = (1 << c.n) - 1
    red = c.bits
    blue = red ^ full
    total = 0
    for d in range(1, (c.n - 1) // (k - 1) + 1):
        total += _run_starts(red, d, k).bit_count()
        total += _run_starts(blue, d, k).bit_count()
    return total


def mono_in_family(c: Coloring, family: APFamily) -> bool:
    """True iff some member of ``family`` is monochromatic under ``c``."""
    if family.n > c.n:
        raise ValueError(
            f"family lives in [1, {family.n}] but the coloring covers "
            f"only [1, {c.n}]"
        )
    bits = c.bits
    for p in family:
        m = element_mask(p)
        hit = bits & m
        if hit == m or hit == 0:
            return True
    return False


# --- batch kernel -----------------------------------------------------------


def _shift_right_words(v: np.ndarray, bits: int) -> np.ndarray:
    """Logical right shift of each row's bit vector by ``bits``.

    Rows are little-endian uint64 words; vacated high positions fill with
    zero.  Equivalent to ``row_as_int >> bits`` on every row.
    """
    nrows, nwords = v.shape
    w, b = divmod(bits, WORD_BITS)
    out = np.zeros_like(v)
    if w >= nwords:
        return out
    if b == 0:
        out[:, : nwords - w] = v[:, w:]
        return out
    bb = np.uint64(b)
    carry = np.uint64(WORD_BITS - b)
    out[:, : nwords - w] = v[:, w:] >> bb
    if w + 1 < nwords:
        out[:, : nwords - w - 1] |= v[:, w + 1 :] << carry
    return out


def _batch_run_starts(mask: np.ndarray, d: int, k: int) -> np.ndarray:
    cur = mask
    t = 1
    while 2 * t <= k:
        cur = cur & _shift_right_words(cur, t * d)
        t *= 2
    if t < k:
        cur = cur & _shift_right_words(cur, (k - t) * d)
    return cur


def batch_has_mono_ap(words: np.ndarray, n: int, k: int) -> np.ndarray:
    """Vectorized ``has_mono_ap`` over a (rows, words) matrix of colorings.

    Row r packs a coloring of [1, n] into ceil(n/64) little-endian words
    with zero padding above n.  Returns a boolean vector.  Rows are retired
    from the scan as soon as they are decided, which makes supercritical
    batches (where nearly every row has a hit at small d) cheap.
    """
    _check_k(k)
    _check_n(n)
    nrows, nwords = words.shape
    if nwords != _word_count(n):
        raise ValueError(f"expected {_word_count(n)} words per row for n={n}")
    found = np.zeros(nrows, dtype=bool)
    if n < k:
        return found
    full = np.full(nwords, _FULL_WORD, dtype=np.uint64)
    full[-1] = _pad_mask(n)
    active = words
    active_rows = np.arange(nrows)
    for d in range(1, (n - 1) // (k - 1) + 1):
        runs = _batch_run_starts(active, d, k) | _batch_run_starts(active ^ full, d, k)
        hit = runs.any(axis=1)
        if hit.any():
            found[active_rows[hit]] = True
            keep = ~hit
            active = active[keep]
            active_rows = active_rows[keep]
            if active_rows.size == 0:
                break
    return found
