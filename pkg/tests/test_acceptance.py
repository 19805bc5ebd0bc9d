"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines as they complete.  Exact criteria are deterministic; the Monte Carlo
criteria use fixed seeds and 3-sigma budgets (expected flake rate below
0.3% per run).
"""

from fractions import Fraction

import numpy as np

from apth.coloring import Coloring, has_mono_ap
from apth.family import (
    family_density,
    greedy_max_family,
    is_almost_disjoint,
    large_diff_family,
    large_diff_family_size,
)
from apth.montecarlo import estimate_prob, scaling_report, standard_error
from apth.probability import (
    bonferroni_lower,
    exact_prob_mono,
    expected_mono,
    markov_upper,
    mono_count_distribution,
    mono_pair_count,
    mono_single_count,
    p0_upper_blocks,
    threshold_scale_lower,
    threshold_scale_upper,
    union_mono_exact,
)
from apth.progressions import (
    count_aps,
    element_mask,
    elements,
    enumerate_aps,
    intersection_size,
)

SEED = 20260810


def _criterion(num, title, failures, detail=""):
    ok = not failures
    tail = detail if ok else f"{len(failures)} violation(s), first: {failures[0]}"
    print(f"{'PASS' if ok else 'FAIL'} criterion {num:02d} [{title}] {tail}")
    assert ok, f"criterion {num} ({title}): {tail}"


def test_criterion_01_family_construction_exact():
    failures = []
    for k in range(3, 9):
        for n in range(k * (k - 1), 301):
            fam = large_diff_family(k, n)
            ok, witness = is_almost_disjoint(fam)
            if not ok:
                failures.append((k, n, "overlap", witness))
                continue
            for p in fam:
                if p.start > p.diff:
                    failures.append((k, n, "start>diff", p))
                    break
                for l, e in enumerate(elements(p)):
                    # e must lie in (l n / k, (l+1) n / k], checked in
                    # integer arithmetic
                    if not (e * k > l * n and e * k <= (l + 1) * n):
                        failures.append((k, n, "window", p, l))
                        break
    _criterion(1, "large-diff family: almost disjoint, start<=diff, windows",
               failures, "k in [3,8], n in [k(k-1), 300]")


def test_criterion_02_family_size_formula():
    failures = []
    for k in range(3, 9):
        for n in range(k * (k - 1), 301):
            if large_diff_family_size(k, n) != sum(1 for _ in large_diff_family(k, n)):
                failures.append((k, n))
    n = 10**6
    for k in range(3, 11):
        size = large_diff_family_size(k, n)
        ratio = size * 2 * k * k * (k - 1) / n**2
        if not 0.999 <= ratio <= 1.001:
            failures.append((k, "2k^2(k-1) ratio", ratio))
        cubed = size * 2 * k**3 / n**2
        lo, hi = k / (k - 1) * 0.999, k / (k - 1) * 1.001
        if not lo <= cubed <= hi:
            failures.append((k, "2k^3 ratio", cubed))
    _criterion(2, "size formula vs enumeration + million-scale ratios", failures)


def test_criterion_03_density_lower_bound():
    failures = []
    n = 10**6
    for k in range(3, 11):
        d = family_density(large_diff_family(k, n))
        if abs(d - 1 / k**2) > 0.01 / k**2:
            failures.append((k, d, 1 / k**2))
    greedy = family_density(greedy_max_family(3, 1000, seed_with_large_diff=True))
    if not greedy > 1 / 9:
        failures.append(("greedy", greedy))
    _criterion(3, "density: construction ~ 1/k^2, seeded greedy beats it",
               failures, f"greedy density at n=1000: {greedy:.4f}")


def test_criterion_04_single_and_pair_counts_exact():
    failures = []
    for k in (3, 4):
        for s in range(k, 17):
            colorings = np.arange(1 << s, dtype=np.uint64)
            aps = list(enumerate_aps(k, s))
            mono = []
            for p in aps:
                m = np.uint64(element_mask(p))
                held = colorings & m
                mono.append((held == m) | (held == 0))
            for i, p in enumerate(aps):
                if int(mono[i].sum()) != mono_single_count(k, s):
                    failures.append(("single", k, s, p))
            for i, p in enumerate(aps):
                for j in range(i, len(aps)):
                    q = aps[j]
                    both = int((mono[i] & mono[j]).sum())
                    if both != mono_pair_count(p, q, s):
                        failures.append(("pair", k, s, p, q))
                    elif i != j and intersection_size(p, q) <= 1:
                        if both != 1 << (s - 2 * k + 2):
                            failures.append(("ad-pair", k, s, p, q))
    _criterion(4, "mono single/pair counts match enumeration, s <= 16", failures)


def test_criterion_05_bonferroni_sandwich():
    failures = []
    for s in range(12, 21):
        fam = large_diff_family(3, s)
        union = union_mono_exact(fam, s)
        lower = bonferroni_lower(len(fam), s, 3).value
        upper = len(fam) * (1 << (s - 2))
        if not lower <= union <= upper:
            failures.append((s, lower, union, upper))
    _criterion(5, "bonferroni <= exact union <= m 2^(s-2), s in [12,20]", failures)


def test_criterion_06_expectation_identity_and_markov():
    failures = []
    for k in (3, 4):
        for n in range(k, 21):
            dist = mono_count_distribution(k, n)
            if dist.mean() != Fraction(count_aps(k, n), 1 << (k - 1)):
                failures.append(("mean", k, n))
            if float(exact_prob_mono(k, n)) > markov_upper(k, n) + 1e-12:
                failures.append(("markov", k, n))
    _criterion(6, "sum r p_r = count 2^(1-k) exactly; exact <= markov", failures)


def test_criterion_07_w3_rederivation():
    failures = []
    witness = Coloring.from01("11001100")
    if has_mono_ap(witness, 3):
        failures.append("witness coloring has a mono 3-AP")
    if not exact_prob_mono(3, 8) < 1:
        failures.append("p(3,8) not < 1")
    if exact_prob_mono(3, 9) != 1:
        failures.append("p(3,9) != 1")
    _criterion(7, "W(3)=9: avoidable at 8 (witness 11001100), forced at 9",
               failures)


def test_criterion_08_exact_monotone_in_n():
    failures = []
    for k in (3, 4):
        prev = Fraction(0)
        for n in range(1, 21):
            cur = exact_prob_mono(k, n)
            if cur < prev:
                failures.append((k, n, prev, cur))
            prev = cur
    _criterion(8, "exact mono probability nondecreasing in n", failures)


def test_criterion_09_monte_carlo_calibration():
    failures = []
    for k in (3, 4):
        for n in range(2, 21):
            est = estimate_prob(k, n, 100_000, SEED)
            p = float(exact_prob_mono(k, n))
            if abs(est.p_hat - p) > 3 * standard_error(p, est.samples):
                failures.append((k, n, est.p_hat, p))
    single = estimate_prob(3, 17, 100_000, SEED, workers=1)
    eight = estimate_prob(3, 17, 100_000, SEED, workers=8)
    if single != eight:
        failures.append(("workers", single, eight))
    _criterion(9, "MC within 3 sigma of exact; worker-count invariant", failures)


def test_criterion_10_lower_scale_direction():
    failures = []
    g = 0.3
    for k in (10, 14, 18):
        n = threshold_scale_lower(k, g)
        e = expected_mono(k, n)
        if e > k * g * g / (k - 2):
            failures.append((k, "expectation", e))
        est = estimate_prob(k, n, 10_000, SEED)
        if est.p_hat > e + 3 * standard_error(max(est.p_hat, 1e-9), est.samples):
            failures.append((k, "p_hat", est.p_hat, e))
    _criterion(10, "at n = lower scale(g=0.3): E small and p_hat <= E + 3SE",
               failures)


def test_criterion_11_upper_scale_direction():
    failures = []
    details = []
    for k, f in [(12, 2), (14, 2)]:
        n = threshold_scale_upper(k, f)
        rep = p0_upper_blocks(k, n, f)
        est = estimate_prob(k, n, 10_000, SEED)
        floor = 1 - rep.value - 3 * standard_error(max(est.p_hat, 1e-9), est.samples)
        if est.p_hat < floor:
            failures.append((k, f, est.p_hat, floor))
        details.append(f"k={k}: p_hat={est.p_hat:.4f} >= {floor:.4f}")
    _criterion(11, "at n = upper scale(f=2): p_hat >= 1 - p0 bound - 3SE",
               failures, "; ".join(details))


def test_criterion_12_scaling_exponent():
    rep = scaling_report(8, 16, 0.5, 2000, SEED)
    failures = []
    if not rep.n_star_increasing:
        failures.append(("not strictly increasing",
                         [r.n_star for r in rep.rows]))
    if not 0.40 <= rep.slope <= 0.62:
        failures.append(("slope", rep.slope))
    _criterion(12, "log2(n_star) slope in [0.40, 0.62] over k in [8,16]",
               failures, f"slope={rep.slope:.4f}")
