"""Command-line interface.

Subcommands map one-to-one onto library operations and emit CSV or JSON
(all numeric, header row, no quoting) to stdout or ``--out``.  Exit codes:

* 0 success
* 2 argument/usage error
* 3 exact-enumeration cap exceeded
* 4 threshold search ceiling exceeded

Errors print a single machine-parsable line ``error: <code>: <message>``
to stderr.  Identical invocations (same flags, same seed) produce
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import __version__
from . import _philox
from .coloring import (
    Coloring,
    RandomStream,
    batch_has_mono_ap,
    has_mono_ap,
    random_coloring,
)
from .errors import BruteForceCapError, SearchCeilingError
from .family import (
    greedy_max_family,
    is_almost_disjoint,
    large_diff_family,
    large_diff_family_size,
)
from .montecarlo import (
    ProbEstimate,
    ScalingReport,
    ThresholdResult,
    estimate_prob,
    scaling_report,
    threshold_search,
    wilson_interval,
)
from .probability import (
    exact_prob_mono,
    expected_mono,
    markov_upper,
    mono_count_distribution,
    p0_lower_first_moment,
    p0_upper_blocks,
    threshold_scale_lower,
    threshold_scale_upper,
)
from .progressions import Progression, count_aps, enumerate_aps

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CAP = 3
EXIT_CEILING = 4

ENV_BRUTE_CAP = "APTH_BRUTE_CAP"


# --- emitters and readers ----------------------------------------------------
#
# Every emission below is parseable by the reader next to it; `selftest`
# exercises the round trips.


def _jdump(obj) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(repr(v) if isinstance(v, float) else str(v) for v in row)
                 for row in rows)
    return "\n".join(lines) + "\n"


def emit_count(k: int, n: int, count: int, fmt: str) -> str:
    if fmt == "json":
        return _jdump({"k": k, "n": n, "count": count})
    return _csv(["k", "n", "count"], [(k, n, count)])


def read_count(text: str, fmt: str) -> dict:
    if fmt == "json":
        return json.loads(text)
    header, row = text.splitlines()
    return dict(zip(header.split(","), (int(v) for v in row.split(","))))


def stream_family(members: Iterable[Progression], fmt: str) -> Iterator[str]:
    """Family output in constant memory; chunks concatenate to the same
    bytes a whole-document dump would produce."""
    if fmt == "json":
        yield "["
        sep = ""
        for p in members:
            yield sep + json.dumps(
                {"start": p.start, "diff": p.diff}, separators=(",", ":")
            )
            sep = ","
        yield "]\n"
    else:
        yield "start,diff,k\n"
        for p in members:
            yield f"{p.start},{p.diff},{p.length}\n"


def emit_family(members: Iterable[Progression], fmt: str) -> str:
    return "".join(stream_family(members, fmt))


def read_family_csv(text: str) -> list[tuple[int, int, int]]:
    lines = text.splitlines()
    if lines[0] != "start,diff,k":
        raise ValueError(f"unexpected family CSV header {lines[0]!r}")
    return [tuple(int(v) for v in line.split(",")) for line in lines[1:]]


def read_family_json(text: str) -> list[dict]:
    return json.loads(text)


def emit_exact(k: int, n: int, prob, fmt: str) -> str:
    fields = {
        "k": k,
        "n": n,
        "numerator": prob.numerator,
        "denominator": prob.denominator,
        "probability": float(prob),
    }
    if fmt == "json":
        return _jdump(fields)
    return _csv(list(fields), [tuple(fields.values())])


def read_exact(text: str, fmt: str) -> dict:
    if fmt == "json":
        return json.loads(text)
    header, row = text.splitlines()
    out = dict(zip(header.split(","), row.split(",")))
    return {
        key: float(v) if key == "probability" else int(v)
        for key, v in out.items()
    }


def emit_dist(dist, fmt: str) -> str:
    rows = [
        (r, c, c / dist.total) for r, c in sorted(dist.counts.items())
    ]
    if fmt == "json":
        return _jdump(
            {
                "k": dist.k,
                "n": dist.n,
                "total": dist.total,
                "rows": [
                    {"r": r, "count": c, "probability": p} for r, c, p in rows
                ],
            }
        )
    return _csv(["r", "count", "probability"], rows)


def read_dist_csv(text: str) -> list[tuple[int, int, float]]:
    lines = text.splitlines()
    if lines[0] != "r,count,probability":
        raise ValueError(f"unexpected dist CSV header {lines[0]!r}")
    out = []
    for line in lines[1:]:
        r, c, p = line.split(",")
        out.append((int(r), int(c), float(p)))
    return out


def read_dist_json(text: str) -> dict:
    return json.loads(text)


def _estimate_fields(est: ProbEstimate) -> dict:
    return {
        "k": est.k,
        "n": est.n,
        "samples": est.samples,
        "successes": est.successes,
        "p_hat": est.p_hat,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
        "seed": est.seed,
    }


def emit_simulate(est: ProbEstimate, fmt: str) -> str:
    fields = _estimate_fields(est)
    fields["version"] = __version__
    if fmt == "json":
        return _jdump(fields)
    return _csv(list(fields), [tuple(fields.values())])


def read_simulate_json(text: str) -> dict:
    return json.loads(text)


def read_simulate_csv(text: str) -> dict:
    header, row = text.splitlines()
    out = {}
    for key, v in zip(header.split(","), row.split(",")):
        if key in ("p_hat", "ci_low", "ci_high"):
            out[key] = float(v)
        elif key == "version":
            out[key] = v
        else:
            out[key] = int(v)
    return out


def emit_sweep(res: ThresholdResult) -> str:
    return _jdump(
        {
            "k": res.k,
            "target": res.target,
            "n_star": res.n_star,
            "bracket_low": res.bracket_low,
            "bracket_high": res.bracket_high,
            "samples_per_point": res.samples_per_point,
            "seed": res.seed,
            "version": __version__,
            "trace": [
                {"n": n, **_estimate_fields(est)} for n, est in res.trace
            ],
        }
    )


def read_sweep_json(text: str) -> dict:
    return json.loads(text)


_REPORT_COLUMNS = ["k", "n_star", "log2_n_star", "ratio_sqrt", "ratio_3half"]


def emit_report(rep: ScalingReport, fmt: str) -> str:
    meta = {
        "slope": rep.slope,
        "n_star_increasing": rep.n_star_increasing,
        "target": rep.target,
        "samples": rep.samples,
        "seed": rep.seed,
        "version": __version__,
    }
    rows = [
        (r.k, r.n_star, r.log2_n_star, r.ratio_sqrt, r.ratio_3half)
        for r in rep.rows
    ]
    if fmt == "json":
        return _jdump(
            {
                "rows": [dict(zip(_REPORT_COLUMNS, row)) for row in rows],
                **meta,
            }
        )
    return _csv(_REPORT_COLUMNS, rows) + _jdump(meta)


def read_report_csv(text: str) -> tuple[list[tuple], dict]:
    lines = text.splitlines()
    if lines[0] != ",".join(_REPORT_COLUMNS):
        raise ValueError(f"unexpected report CSV header {lines[0]!r}")
    rows = []
    for line in lines[1:-1]:
        k, n_star, log2_n, r_sqrt, r_3half = line.split(",")
        rows.append(
            (int(k), int(n_star), float(log2_n), float(r_sqrt), float(r_3half))
        )
    return rows, json.loads(lines[-1])


def read_report_json(text: str) -> dict:
    return json.loads(text)


def emit_bounds(obj: dict) -> str:
    return _jdump(obj)


def read_bounds_json(text: str) -> dict:
    return json.loads(text)


# --- argument parsing ---------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {EXIT_USAGE}: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="apth",
        description=(
            "Monochromatic k-term arithmetic progressions in random "
            "2-colorings of {1..n}: counting, almost-disjoint families, "
            "exact oracles, bounds, and Monte Carlo threshold estimation."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def cmd(name, help_text, fmt_default="csv", formats=("csv", "json")):
        p = sub.add_parser(name, help=help_text)
        if formats:
            p.add_argument("--format", choices=formats, default=fmt_default)
        p.add_argument("--out", help="write output to this file instead of stdout")
        return p

    p = cmd("count", "number of k-APs contained in [1, n]", "json")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    p = cmd("enumerate", "list k-APs in [1, n], ordered by (diff, start)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dmin", type=int, help="restrict to diff >= dmin")
    p.add_argument("--dmax", type=int, help="restrict to diff <= dmax")

    p = cmd("family", "the almost-disjoint family with diff in [n/k, n/(k-1))")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    p = cmd("greedy", "greedy maximal almost-disjoint family over all k-APs")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument(
        "--seed-large-diff",
        action="store_true",
        help="insert the large-difference family before scanning",
    )
    p.add_argument(
        "--order",
        choices=("lex_by_diff_start", "lex_by_start_diff"),
        default="lex_by_diff_start",
    )

    p = cmd("exact", "exact mono-k-AP probability by full enumeration", "json")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--brute-cap", type=int)

    p = cmd("dist", "exact distribution of the mono-k-AP count")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--brute-cap", type=int)

    p = cmd("bounds", "closed-form bound evaluators", "json", formats=("json",))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--f", type=float, help="upper-scale parameter (>= 1)")
    p.add_argument("--g", type=float, help="lower-scale parameter in (0, 1]")

    p = cmd("simulate", "Monte Carlo estimate of the mono-k-AP probability", "json")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = cmd("sweep", "locate the n where the estimate crosses the target",
            "json", formats=("json",))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--target", type=float, default=0.5)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--ceiling", type=int)

    p = cmd("report", "threshold scaling table over a k range")
    p.add_argument("--k-low", type=int, required=True)
    p.add_argument("--k-high", type=int, required=True)
    p.add_argument("--target", type=float, default=0.5)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--ceiling", type=int)
    p.add_argument("--k-budget", type=int, default=20,
                   help="refuse k-high beyond this (per-point cost ~ 2^k)")

    cmd("selftest", "run the built-in invariant suite", formats=())

    return parser


def _resolve_cap(args) -> int | None:
    """--brute-cap beats APTH_BRUTE_CAP beats the library default."""
    if getattr(args, "brute_cap", None) is not None:
        return args.brute_cap
    env = os.environ.get(ENV_BRUTE_CAP)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(
                f"{ENV_BRUTE_CAP} must be an integer, got {env!r}"
            ) from None
    return None


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValueError(message)


def _dispatch(args) -> str:
    sc = args.subcommand

    if sc in {"count", "enumerate", "family", "greedy", "exact", "dist",
              "bounds", "simulate"}:
        _require(args.k >= 3, "--k must be >= 3")
    if sc in {"count", "enumerate", "family", "greedy", "exact", "dist",
              "simulate"}:
        _require(args.n >= 1, "--n must be >= 1")

    if sc == "count":
        return emit_count(args.k, args.n, count_aps(args.k, args.n), args.format)

    if sc == "enumerate":
        if args.dmin is None and args.dmax is None:
            diff_range = None
        else:
            d_cap = (args.n - 1) // (args.k - 1) if args.n >= args.k else 0
            diff_range = (
                args.dmin if args.dmin is not None else 1,
                args.dmax if args.dmax is not None else d_cap,
            )
        return stream_family(
            enumerate_aps(args.k, args.n, diff_range), args.format
        )

    if sc == "family":
        return stream_family(large_diff_family(args.k, args.n), args.format)

    if sc == "greedy":
        fam = greedy_max_family(
            args.k, args.n,
            seed_with_large_diff=args.seed_large_diff,
            order=args.order,
        )
        return stream_family(fam, args.format)

    if sc == "exact":
        prob = exact_prob_mono(args.k, args.n, cap=_resolve_cap(args))
        return emit_exact(args.k, args.n, prob, args.format)

    if sc == "dist":
        dist = mono_count_distribution(args.k, args.n, cap=_resolve_cap(args))
        return emit_dist(dist, args.format)

    if sc == "bounds":
        _require(
            args.f is not None or args.g is not None,
            "bounds needs --f and/or --g",
        )
        obj: dict = {"k": args.k, "version": __version__}
        if args.f is not None:
            _require(args.f >= 1, "--f must be >= 1")
            n = args.n if args.n is not None else threshold_scale_upper(args.k, args.f)
            rep = p0_upper_blocks(args.k, n, args.f)
            obj["n_upper_scale"] = threshold_scale_upper(args.k, args.f)
            obj["p0_upper"] = {
                "n": rep.n, "f": rep.f, "q": rep.q, "s": rep.s, "r": rep.r,
                "value": rep.value, "flags": rep.flags,
            }
        if args.g is not None:
            _require(0 < args.g <= 1, "--g must be in (0, 1]")
            n = args.n if args.n is not None else threshold_scale_lower(args.k, args.g)
            obj["n_lower_scale"] = threshold_scale_lower(args.k, args.g)
            obj["p0_lower"] = {
                "n": n,
                "g": args.g,
                "value": p0_lower_first_moment(args.k, args.g),
                "expected_mono": expected_mono(args.k, n),
                "markov_upper": markov_upper(args.k, n),
            }
        return emit_bounds(obj)

    if sc == "simulate":
        _require(args.samples >= 1, "--samples must be >= 1")
        _require(args.workers >= 1, "--workers must be >= 1")
        est = estimate_prob(args.k, args.n, args.samples, args.seed, args.workers)
        return emit_simulate(est, args.format)

    if sc == "sweep":
        _require(args.k >= 3, "--k must be >= 3")
        _require(0.05 <= args.target <= 0.95, "--target must be in [0.05, 0.95]")
        _require(args.samples >= 1, "--samples must be >= 1")
        kwargs = {"workers": args.workers}
        if args.ceiling is not None:
            kwargs["ceiling"] = args.ceiling
        res = threshold_search(args.k, args.target, args.samples, args.seed, **kwargs)
        return emit_sweep(res)

    if sc == "report":
        _require(args.k_low >= 3, "--k-low must be >= 3")
        _require(args.k_high >= args.k_low, "--k-high must be >= --k-low")
        _require(0.05 <= args.target <= 0.95, "--target must be in [0.05, 0.95]")
        _require(args.samples >= 1, "--samples must be >= 1")
        kwargs = {"workers": args.workers, "k_budget": args.k_budget}
        if args.ceiling is not None:
            kwargs["ceiling"] = args.ceiling
        rep = scaling_report(
            args.k_low, args.k_high, args.target, args.samples, args.seed, **kwargs
        )
        return emit_report(rep, args.format)

    if sc == "selftest":
        return _selftest()

    raise AssertionError(f"unhandled subcommand {sc}")  # pragma: no cover


# --- selftest -----------------------------------------------------------------


def _naive_has_mono(c: Coloring, k: int) -> bool:
    for p in enumerate_aps(k, c.n):
        m = 0
        for e in range(p.start, p.last + 1, p.diff):
            m |= 1 << (e - 1)
        if (c.bits & m) == m or (c.bits & m) == 0:
            return True
    return False


def _selftest_checks():
    def count_vs_enumeration():
        for k in (3, 4, 5):
            for n in range(k, 41):
                assert count_aps(k, n) == sum(1 for _ in enumerate_aps(k, n))

    def large_diff_family_invariants():
        for k in (3, 4, 5):
            for n in range(k * (k - 1), 121, 7):
                fam = large_diff_family(k, n)
                assert len(fam) == large_diff_family_size(k, n)
                assert is_almost_disjoint(fam)[0]
                assert all(p.start <= p.diff for p in fam)

    def detection_matches_direct_scan():
        stream = RandomStream(20260810, 0)
        for n in (12, 40, 64, 65, 130):
            for k in (3, 4, 5):
                for _ in range(20):
                    c = random_coloring(n, stream)
                    assert has_mono_ap(c, k) == _naive_has_mono(c, k)

    def batch_matches_scalar():
        seed = 424242
        for n in (12, 64, 65, 130):
            ids = np.arange(64, dtype=np.uint64)
            words = _philox.words(seed, ids, -(-n // 64))
            top = n - (n // 64) * 64
            if top:
                words[:, -1] &= np.uint64((1 << top) - 1)
            got = batch_has_mono_ap(words, n, 3)
            for i in range(64):
                c = random_coloring(n, RandomStream(seed, int(i)))
                assert has_mono_ap(c, 3) == bool(got[i])

    def stream_reproducibility():
        a = RandomStream(7, 3).next_words(9)
        b = RandomStream(7, 3).next_words(9)
        assert np.array_equal(a, b)
        s = RandomStream(7, 3)
        first = s.next_words(5)
        assert np.array_equal(first, s.words_at(0, 5))

    def philox_reference():
        for seed, sid in ((0, 0), (1, 2), (12345, 678)):
            ref = np.random.Philox(
                key=np.array([seed, sid], dtype=np.uint64)
            ).random_raw(11)
            got = _philox.words(seed, np.array([sid], dtype=np.uint64), 11)[0]
            assert np.array_equal(ref, got)

    def estimate_worker_invariance():
        a = estimate_prob(3, 12, 5000, 5, workers=1)
        b = estimate_prob(3, 12, 5000, 5, workers=4)
        assert a == b

    def estimate_degenerate_points():
        assert estimate_prob(3, 2, 500, 1).p_hat == 0.0
        assert estimate_prob(3, 9, 500, 1).p_hat == 1.0

    def wilson_sanity():
        for samples in (1, 10, 1000):
            for successes in range(0, samples + 1, max(1, samples // 7)):
                lo, hi = wilson_interval(successes, samples)
                assert 0.0 <= lo <= successes / samples <= hi <= 1.0

    def roundtrip_count():
        for fmt in ("csv", "json"):
            text = emit_count(3, 5, count_aps(3, 5), fmt)
            assert read_count(text, fmt) == {"k": 3, "n": 5, "count": 4}

    def roundtrip_family():
        fam = large_diff_family(3, 12)
        rows = read_family_csv(emit_family(fam, "csv"))
        assert rows == [(p.start, p.diff, p.length) for p in fam]
        objs = read_family_json(emit_family(fam, "json"))
        assert objs == [{"start": p.start, "diff": p.diff} for p in fam]

    def roundtrip_exact():
        prob = exact_prob_mono(3, 8)
        for fmt in ("csv", "json"):
            obj = read_exact(emit_exact(3, 8, prob, fmt), fmt)
            assert obj["numerator"] == prob.numerator
            assert obj["denominator"] == prob.denominator

    def roundtrip_dist():
        dist = mono_count_distribution(3, 6)
        rows = read_dist_csv(emit_dist(dist, "csv"))
        assert [(r, c) for r, c, _ in rows] == sorted(dist.counts.items())
        obj = read_dist_json(emit_dist(dist, "json"))
        assert {row["r"]: row["count"] for row in obj["rows"]} == dist.counts

    def roundtrip_simulate():
        est = estimate_prob(3, 9, 200, 1)
        obj = read_simulate_json(emit_simulate(est, "json"))
        assert obj["successes"] == est.successes and obj["seed"] == est.seed
        row = read_simulate_csv(emit_simulate(est, "csv"))
        assert row["successes"] == est.successes and row["p_hat"] == est.p_hat

    def roundtrip_bounds():
        text = _dispatch(_build_parser().parse_args(["bounds", "--k", "10", "--g", "0.5"]))
        obj = read_bounds_json(text)
        assert obj["p0_lower"]["value"] == 0.6875

    def roundtrip_sweep():
        res = threshold_search(3, 0.5, 400, 1)
        obj = read_sweep_json(emit_sweep(res))
        assert obj["n_star"] == res.n_star
        assert len(obj["trace"]) == len(res.trace)

    def roundtrip_report():
        rep = scaling_report(3, 4, 0.5, 400, 1)
        rows, meta = read_report_csv(emit_report(rep, "csv"))
        assert [r[0] for r in rows] == [3, 4]
        assert meta["slope"] == rep.slope
        obj = read_report_json(emit_report(rep, "json"))
        assert [r["k"] for r in obj["rows"]] == [3, 4]

    return [
        count_vs_enumeration,
        large_diff_family_invariants,
        detection_matches_direct_scan,
        batch_matches_scalar,
        stream_reproducibility,
        philox_reference,
        estimate_worker_invariance,
        estimate_degenerate_points,
        wilson_sanity,
        roundtrip_count,
        roundtrip_family,
        roundtrip_exact,
        roundtrip_dist,
        roundtrip_simulate,
        roundtrip_bounds,
        roundtrip_sweep,
        roundtrip_report,
    ]


def _selftest() -> str:
    lines = []
    failures = 0
    for check in _selftest_checks():
        try:
            check()
        except Exception as exc:  # noqa: BLE001 - report every failure
            failures += 1
            lines.append(f"FAIL {check.__name__}: {exc!r}")
        else:
            lines.append(f"ok {check.__name__}")
    text = "\n".join(lines) + "\n"
    if failures:
        raise _SelftestFailure(failures, text)
    return text


class _SelftestFailure(Exception):
    def __init__(self, failures: int, text: str):
        self.failures = failures
        self.text = text
        super().__init__(f"{failures} selftest check(s) failed")


# --- entry point --------------------------------------------------------------


def _write(output: str | Iterable[str], out: str | None) -> None:
    chunks = (output,) if isinstance(output, str) else output
    if out is None:
        for chunk in chunks:
            sys.stdout.write(chunk)
    else:
        with open(out, "w", newline="") as fh:
            for chunk in chunks:
                fh.write(chunk)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _write(_dispatch(args), getattr(args, "out", None))
    except BruteForceCapError as exc:
        sys.stderr.write(f"error: {EXIT_CAP}: {exc}\n")
        return EXIT_CAP
    except SearchCeilingError as exc:
        sys.stderr.write(f"error: {EXIT_CEILING}: {exc}\n")
        return EXIT_CEILING
    except ValueError as exc:
        sys.stderr.write(f"error: {EXIT_USAGE}: {exc}\n")
        return EXIT_USAGE
    except _SelftestFailure as exc:
        _write(exc.text, args.out)
        sys.stderr.write(f"error: 1: {exc}\n")
        return 1
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
