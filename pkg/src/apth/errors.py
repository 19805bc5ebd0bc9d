"""Toolkit-specific error types.

Plain precondition violations raise ValueError; the classes here mark the
two failure modes that callers (and the CLI exit-code map) treat specially.
"""


class BruteForceCapError(RuntimeError):
    """Exact enumeration was requested for an interval beyond the cap.

    Enumerating 2^n colorings is exponential; the cap keeps accidental
    huge requests from hanging a session.  Raise rather than truncate so
    the caller can decide to lift the cap (``cap=`` argument, ``--brute-cap``
    flag, or ``APTH_BRUTE_CAP`` environment variable).
    """

    def __init__(self, n: int, cap: int):
        self.n = n
        self.cap = cap
        super().__init__(
            f"exact enumeration over 2^{n} colorings exceeds the brute-force "
            f"cap n <= {cap}; raise the cap via the cap argument, the "
            f"--brute-cap flag, or APTH_BRUTE_CAP"
        )


class SearchCeilingError(RuntimeError):
    """A threshold search climbed past its hard interval-length ceiling."""

    def __init__(self, k: int, target: float, ceiling: int):
        self.k = k
        self.target = target
        self.ceiling = ceiling
        super().__init__(
            f"no bracket with estimated probability >= {target} found for "
            f"k={k} below the search ceiling n <= {ceiling}"
        )
