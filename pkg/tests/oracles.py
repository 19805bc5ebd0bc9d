"""Independent brute-force oracles used across the test suite.

Everything here is deliberately naive pure Python (nested loops over
element tuples, no bit tricks, no shared code with the library kernels) so
that agreement with the library is a genuine two-route check.
"""

from collections import Counter
from fractions import Fraction


def ap_tuples(k: int, n: int, d_lo: int = 1, d_hi: int | None = None):
    """All k-APs in [1, n] as element tuples, ordered by (diff, start)."""
    out = []
    d = d_lo
    while 1 + (k - 1) * d <= n and (d_hi is None or d <= d_hi):
        for a in range(1, n - (k - 1) * d + 1):
            out.append(tuple(a + j * d for j in range(k)))
        d += 1
    return out


def is_mono(bits: int, ap: tuple[int, ...]) -> bool:
    vals = [(bits >> (e - 1)) & 1 for e in ap]
    return all(vals) or not any(vals)


def naive_has_mono(bits: int, k: int, n: int) -> bool:
    return any(is_mono(bits, ap) for ap in ap_tuples(k, n))


def naive_count_mono(bits: int, k: int, n: int) -> int:
    return sum(is_mono(bits, ap) for ap in ap_tuples(k, n))


def naive_prob_mono(k: int, n: int) -> Fraction:
    aps = ap_tuples(k, n)
    hits = sum(
        any(is_mono(bits, ap) for ap in aps) for bits in range(1 << n)
    )
    return Fraction(hits, 1 << n)


def naive_distribution(k: int, n: int) -> dict[int, int]:
    aps = ap_tuples(k, n)
    counts = Counter(
        sum(is_mono(bits, ap) for ap in aps) for bits in range(1 << n)
    )
    return dict(counts)


def naive_union_count(aps: list[tuple[int, ...]], s: int) -> int:
    return sum(
        any(is_mono(bits, ap) for ap in aps) for bits in range(1 << s)
    )


def naive_single_count(ap: tuple[int, ...], s: int) -> int:
    return sum(is_mono(bits, ap) for bits in range(1 << s))


def naive_pair_count(p: tuple[int, ...], q: tuple[int, ...], s: int) -> int:
    return sum(
        is_mono(bits, p) and is_mono(bits, q) for bits in range(1 << s)
    )
