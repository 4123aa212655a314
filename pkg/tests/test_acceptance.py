"""End-to-end acceptance checks, one test per criterion (numbered 1-10)."""

from __future__ import annotations

import itertools
import time
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from ordmetrics.core import Election
from ordmetrics.cultures import (
    antagonism_election,
    balanced_tree,
    caterpillar_tree,
    identity_election,
    is_consistent_with_tree,
    is_single_crossing,
    is_single_peaked,
    is_spoc,
    sample_group_separable,
    sample_ic,
    sample_single_crossing,
    sample_sp_conitzer,
    sample_sp_walsh,
    sample_spoc,
    sample_urn,
)
from ordmetrics.datasets import generate_dataset, load_manifest
from ordmetrics.distances import isomorphic_swap_distance, swap_distance
from ordmetrics.embedding import mds_embed, pearson
from ordmetrics.indices import (
    agreement_index,
    agreement_via_majority,
    diversity_from_profile,
    finalize_profile,
    index_report,
    kappa_profile,
    polarization_from_profile,
)
from ordmetrics.kemeny import (
    distinct_vote_count,
    has_condorcet_cycle,
    k_kemeny_among_votes_exact,
    k_kemeny_exact_partition,
    kemeny_exact,
    kemeny_profiles,
)


def test_criterion_1_compass_values(criterion):
    results = {}
    for name, e in (("ID", identity_election(8, 96)), ("AN", antagonism_election(8, 96))):
        start = time.perf_counter()
        r = index_report(e)
        results[name] = (r, time.perf_counter() - start)
    rid, tid = results["ID"]
    ran, tan = results["AN"]
    ok = (
        (rid.agreement, rid.diversity, rid.polarization) == (1, 0, 0)
        and (ran.agreement, ran.diversity, ran.polarization) == (0, Fraction(1, 2), 1)
        and max(tid, tan) < 1.0
    )
    criterion(
        1,
        ok,
        f"ID (A,D,P)=({rid.agreement},{rid.diversity},{rid.polarization}) in {tid:.3f}s; "
        f"AN (A,D,P)=({ran.agreement},{ran.diversity},{ran.polarization}) in {tan:.3f}s",
    )


@pytest.mark.slow
def test_criterion_2_full_un_polarization(criterion):
    e = Election(8, np.array(list(itertools.permutations(range(8)))))
    start = time.perf_counter()
    kappas = kappa_profile(e, "best-of", k_max=2)
    elapsed = time.perf_counter() - start
    p = float(polarization_from_profile(e, kappas))
    exact_k1 = kemeny_exact(e).distance
    ok = abs(p - 0.232) <= 0.01 and kappas[0] == exact_k1 and elapsed <= 600
    criterion(2, ok, f"P={p:.6f} (target 0.232 +- 0.01), kappa=({kappas[0]},{kappas[1]}), {elapsed:.0f}s")


def test_criterion_3_agreement_equivalence(criterion):
    rng = np.random.default_rng(3)
    mismatches = 0
    for _ in range(1000):
        m = int(rng.integers(1, 9))
        n = int(rng.integers(1, 51))
        e = sample_ic(m, n, rng)
        mismatches += agreement_index(e) != agreement_via_majority(e)
    sp_bad = 0
    for i in range(200):
        m = int(rng.integers(2, 9))
        # odd n keeps the single-peaked majority relation strict, hence cycle-free
        n = 2 * int(rng.integers(0, 25)) + 1
        e = (sample_sp_walsh if i % 2 else sample_sp_conitzer)(m, n, rng)
        kappa1 = kemeny_exact(e).distance
        if has_condorcet_cycle(e) or agreement_index(e) != 1 - Fraction(2 * kappa1, n * comb(m, 2)):
            sp_bad += 1
    criterion(
        3,
        mismatches == 0 and sp_bad == 0,
        f"{mismatches}/1000 random mismatches, {sp_bad}/200 single-peaked violations",
    )


def test_criterion_4_among_votes_two_approximation(criterion):
    rng = np.random.default_rng(4)
    violations = 0
    worst = 0.0
    for _ in range(200):
        m = int(rng.integers(2, 5))
        n = int(rng.integers(1, 7))
        k = int(rng.integers(1, 4))
        e = sample_ic(m, n, rng)
        best = k_kemeny_exact_partition(e, k).distance
        among = k_kemeny_among_votes_exact(e, k).distance
        if among > 2 * best:
            violations += 1
        if best:
            worst = max(worst, among / best)
    criterion(4, violations == 0, f"{violations}/200 violations, worst among/optimum ratio {worst:.3f}")


@pytest.fixture(scope="module")
def standard_run():
    """Regenerated standard dataset with raw k-Kemeny profiles, indices and compass distances."""
    start = time.perf_counter()
    items = generate_dataset(load_manifest("standard"))
    raw = [kemeny_profiles(item.election) for item in items]
    kappas = [
        finalize_profile(item.election, [min(a, b) for a, b in zip(r["local-search"], r["combined"])])
        for item, r in zip(items, raw)
    ]
    tags = [item.tag for item in items]
    anchors = {t: items[tags.index(t)].election for t in ("identity", "un_star", "antagonism")}
    dist = {
        t: [isomorphic_swap_distance(item.election, a).distance for item in items] for t, a in anchors.items()
    }
    return {"items": items, "raw": raw, "kappas": kappas, "dist": dist, "elapsed": time.perf_counter() - start}


@pytest.mark.slow
def test_criterion_5_heuristic_sanity(standard_run, criterion):
    items, raw, kappas = standard_run["items"], standard_run["raw"], standard_run["kappas"]
    rows = worse = nonmono = nonzero = 0
    for item, r, kap in zip(items, raw, kappas):
        for g, c in zip(r["greedy"], r["combined"]):
            rows += 1
            worse += c > g
        nonmono += any(b > a for a, b in zip(kap, kap[1:]))
        nonzero += kap[distinct_vote_count(item.election) - 1] != 0
    # the acceptance profiles must be exactly what the public solver returns
    spot = [0, len(items) // 2, len(items) - 1]
    agree = all(kappa_profile(items[i].election, "best-of") == kappas[i] for i in spot)
    ok = worse == 0 and nonmono == 0 and nonzero == 0 and agree
    criterion(
        5,
        ok,
        f"{worse}/{rows} rows with combined > greedy, {nonmono} non-monotone profiles, "
        f"{nonzero} profiles nonzero at k=D, solver agreement {agree}",
    )


@pytest.mark.slow
def test_criterion_6_correlations(standard_run, criterion):
    items, kappas, dist = standard_run["items"], standard_run["kappas"], standard_run["dist"]
    agreement = [float(agreement_index(item.election)) for item in items]
    diversity = [float(diversity_from_profile(item.election, k)) for item, k in zip(items, kappas)]
    polarization = [float(polarization_from_profile(item.election, k)) for item, k in zip(items, kappas)]
    coef = {
        "agreement~d(ID)": pearson(agreement, dist["identity"]),
        "diversity~d(UN*)": pearson(diversity, dist["un_star"]),
        "polarization~d(AN)": pearson(polarization, dist["antagonism"]),
    }
    ok = len(items) == 292 and all(v < -0.85 for v in coef.values())
    text = ", ".join(f"{k}={v:.4f}" for k, v in coef.items())
    criterion(6, ok, f"{len(items)} elections, {text}, pipeline {standard_run['elapsed']:.0f}s on 1 core")


def test_criterion_7_urn_distinct_votes(criterion):
    counts = [distinct_vote_count(sample_urn(8, 1000, 1.0, seed)) for seed in range(200)]
    mean = float(np.mean(counts))
    criterion(7, 5.5 <= mean <= 7.48, f"mean distinct votes over seeds 0..199 = {mean:.4f} (window [5.5, 7.48])")


def test_criterion_8_sampler_frequencies(criterion):
    m = 8
    ident = np.arange(m)

    def axis_freq(e):
        return float((np.all(e.votes == ident, axis=1) | np.all(e.votes == ident[::-1], axis=1)).mean())

    conitzer = sample_sp_conitzer(m, 10_000, seed=8)
    walsh = sample_sp_walsh(m, 10_000, seed=8)
    fc, fw = axis_freq(conitzer), axis_freq(walsh)
    checks = [
        is_single_peaked(conitzer),
        is_single_peaked(walsh),
        is_spoc(sample_spoc(m, 10_000, seed=8)),
    ]
    for s in range(20):
        checks.append(is_single_crossing(sample_single_crossing(m, 96, seed=s)))
    for kind, tree in (("balanced", balanced_tree(m)), ("caterpillar", caterpillar_tree(m))):
        e = sample_group_separable(m, 2_000, kind, seed=8)
        checks.append(all(is_consistent_with_tree(v, tree) for v in e.votes))
    ok = abs(fc - 0.25) <= 0.02 and abs(fw - 2 / 2**7) <= 0.005 and all(checks)
    criterion(
        8,
        ok,
        f"Conitzer {fc:.4f} (0.25 +- 0.02), Walsh {fw:.4f} (0.0156 +- 0.005), "
        f"validators {sum(checks)}/{len(checks)} passed",
    )


def _enumerated_iso_distance(e: Election, f: Election) -> int:
    pos_e, pos_f = e.positions(), f.positions()
    a, b = np.triu_indices(e.m, 1)
    voter_perms = np.array(list(itertools.permutations(range(e.n))))
    best = None
    for pi in itertools.permutations(range(e.m)):
        pi = np.array(pi)
        # E voter i ranks a over b; F voter j ranks pi(a) over pi(b)
        ea = pos_e[:, a] < pos_e[:, b]
        fa = pos_f[:, pi[a]] < pos_f[:, pi[b]]
        cost = (ea[:, None, :] != fa[None, :, :]).sum(axis=2)
        total = cost[np.arange(e.n), voter_perms].sum(axis=1).min()
        best = total if best is None else min(best, total)
    return int(best)


def test_criterion_9_distances(criterion):
    rng = np.random.default_rng(9)
    swap_bad = 0
    for _ in range(100_000):
        m = int(rng.integers(1, 11))
        u, v = rng.permutation(m), rng.permutation(m)
        pu, pv = np.argsort(u), np.argsort(v)
        brute = sum((pu[x] < pu[y]) != (pv[x] < pv[y]) for x in range(m) for y in range(x + 1, m))
        swap_bad += swap_distance(u, v) != brute
    iso_bad = copy_bad = 0
    for _ in range(100):
        m = int(rng.integers(1, 6))
        n = int(rng.integers(1, 7))
        e, f = sample_ic(m, n, rng), sample_ic(m, n, rng)
        iso_bad += isomorphic_swap_distance(e, f, mode="exact").distance != _enumerated_iso_distance(e, f)
        copy = Election(m, rng.permutation(m)[e.votes][rng.permutation(n)])
        copy_bad += isomorphic_swap_distance(e, copy, mode="exact").distance != 0
        copy_bad += isomorphic_swap_distance(e, copy, mode="heuristic").distance != 0
    criterion(
        9,
        swap_bad == 0 and iso_bad == 0 and copy_bad == 0,
        f"{swap_bad}/100000 swap mismatches, {iso_bad}/100 exact-distance mismatches, "
        f"{copy_bad}/200 nonzero isomorphic-copy distances",
    )


def test_criterion_10_smacof(criterion):
    rng = np.random.default_rng(10)
    rises = 0
    for _ in range(100):
        size = int(rng.integers(3, 51))
        raw = rng.random((size, size)) * 10
        d = np.triu(raw, 1) + np.triu(raw, 1).T
        emb = mds_embed(d, seed=int(rng.integers(2**31)))
        h = np.array(emb.history)
        rises += int((np.diff(h) > 1e-9 * h[0]).sum())
    worst = 0.0
    for _ in range(100):
        p = rng.standard_normal((3, 2)) * rng.uniform(0.1, 10)
        d = np.linalg.norm(p[:, None] - p[None, :], axis=2)
        worst = max(worst, mds_embed(d, seed=int(rng.integers(2**31))).stress)
    criterion(
        10,
        rises == 0 and worst < 1e-6,
        f"{rises} stress increases over 100 random matrices, worst 3-point stress {worst:.2e}",
    )
