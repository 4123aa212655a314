"""Majority relation, exact Kemeny rankings and k-Kemeny solvers.

k-Kemeny is k-median over rankings with swap distance as the metric. The
heuristics (greedy, local search, combined) pick centers among the distinct
votes of the election; duplicate votes are collapsed into weights.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Election, pairwise_counts
from .distances import pair_indicators

MAX_EXACT_CANDIDATES = 16
DENSE_LIMIT = 3000
METHODS = ("greedy", "local-search", "combined", "best-of")


class BudgetExceeded(RuntimeError):
    """An exact solver was asked for an instance beyond its configured budget."""


@dataclass(frozen=True)
class MajorityRelation:
    """``geq[a, b]`` is true iff at least half of the voters prefer a to b (a != b)."""

    geq: np.ndarray

    def strict(self) -> np.ndarray:
        return self.geq & ~self.geq.T


@dataclass(frozen=True)
class KKemenyResult:
    k: int
    rankings: list[tuple[int, ...]]
    assignment: np.ndarray
    distance: int
    method: str
    exact: bool = field(default=False)


def majority_relation(e: Election) -> MajorityRelation:
    counts = pairwise_counts(e)
    geq = counts >= counts.T
    np.fill_diagonal(geq, False)
    return MajorityRelation(geq)


def has_condorcet_cycle(e: Election) -> bool:
    """True iff some cycle of weak majority edges contains a strict edge."""
    mu = majority_relation(e)
    reach = mu.geq.copy()
    for mid in range(e.m):
        reach |= reach[:, mid : mid + 1] & reach[mid : mid + 1, :]
    # strict edge a -> b closes a cycle when b reaches a back
    return bool((mu.strict() & reach.T).any())


# --- exact 1-Kemeny --------------------------------------------------------


def _kemeny_dp(counts: np.ndarray) -> tuple[int, list[int]]:
    """Exact Kemeny ranking from pairwise counts ``counts[a, b]`` (a over b).

    Dynamic program over the set of candidates already placed at the top.
    Placing c right below set S costs the voters who prefer some candidate
    outside S to c.
    """
    m = counts.shape[0]
    if m > MAX_EXACT_CANDIDATES:
        raise BudgetExceeded(f"exact Kemeny is limited to m <= {MAX_EXACT_CANDIDATES}")
    size = 1 << m
    # above[S, c] = number of (voter, b in S) with b preferred to c
    above = np.zeros((size, m), dtype=np.int64)
    for t in range(m):
        above[1 << t : 1 << (t + 1)] = above[: 1 << t] + counts[t]
    beaten = counts.sum(axis=0)
    masks = np.arange(size)
    popcount = np.zeros(size, dtype=np.int64)
    for t in range(m):
        popcount += (masks >> t) & 1
    dp = np.full(size, np.iinfo(np.int64).max // 4, dtype=np.int64)
    dp[0] = 0
    choice = np.full(size, -1, dtype=np.int64)
    for layer in range(1, m + 1):
        layer_masks = masks[popcount == layer]
        for c in range(m):
            sel = layer_masks[(layer_masks >> c) & 1 == 1]
            prev = sel ^ (1 << c)
            val = dp[prev] + beaten[c] - above[prev, c]
            better = val < dp[sel]
            dp[sel[better]] = val[better]
            choice[sel[better]] = c
    order: list[int] = []
    mask = size - 1
    while mask:
        c = int(choice[mask])
        order.append(c)
        mask ^= 1 << c
    order.reverse()
    return int(dp[size - 1]), order


def kemeny_exact(e: Election) -> KKemenyResult:
    cost, order = _kemeny_dp(pairwise_counts(e))
    return KKemenyResult(
        k=1,
        rankings=[tuple(order)],
        assignment=np.zeros(e.n, dtype=np.int64),
        distance=cost,
        method="exact-dp",
        exact=True,
    )


# --- collapsed instance ----------------------------------------------------


class _Instance:
    """Distinct votes with multiplicities and on-demand swap distances between them."""

    def __init__(self, e: Election, dense_limit: int = DENSE_LIMIT):
        uniq, first, inverse, counts = np.unique(
            e.votes, axis=0, return_index=True, return_inverse=True, return_counts=True
        )
        order = np.argsort(first, kind="stable")
        rank = np.empty_like(order)
        rank[order] = np.arange(len(order))
        self.votes = uniq[order]
        self.weights = counts[order].astype(np.int64)
        self.voter_type = rank[np.ravel(inverse)]
        self.size = len(self.votes)
        self.m = e.m
        ind = pair_indicators(self.votes).astype(np.float32)
        self._ind = ind
        self._neg = 1.0 - ind
        self.dense = None
        if self.size <= dense_limit:
            self.dense = self.columns(np.arange(self.size))

    def columns(self, idx: np.ndarray) -> np.ndarray:
        """``(D, len(idx))`` distances from every distinct vote to the votes ``idx``."""
        if self.dense is not None:
            return self.dense[:, idx]
        d = self._ind @ self._neg[idx].T + self._neg @ self._ind[idx].T
        return np.rint(d).astype(np.int64)

    def add_costs(self, bases: np.ndarray, chunk: int = 256) -> np.ndarray:
        """``out[b, i] = sum_j w_j * min(dist(j, i), bases[b, j])``."""
        bases = np.atleast_2d(bases)
        if self.dense is not None and len(bases) * self.size**2 <= 20_000_000:
            return np.einsum(
                "j,bji->bi", self.weights, np.minimum(self.dense[None, :, :], bases[:, :, None])
            )
        if self.dense is not None:
            return np.stack(
                [self.weights @ np.minimum(self.dense, base[:, None]) for base in bases]
            )
        # lazy path stays in float32: distances and capped bases are small exact integers
        cap = np.minimum(bases, self.m * (self.m - 1) // 2 + 1).astype(np.float32)
        weights = self.weights.astype(np.float64)
        out = np.empty((len(bases), self.size), dtype=np.int64)
        for lo in range(0, self.size, chunk):
            idx = np.arange(lo, min(lo + chunk, self.size))
            cols = self._ind @ self._neg[idx].T + self._neg @ self._ind[idx].T
            for b, base in enumerate(cap):
                out[b, idx] = np.rint(weights @ np.minimum(cols, base[:, None]))
        return out

    def cost(self, chosen) -> int:
        return int(self.weights @ self.columns(np.asarray(chosen)).min(axis=1))

    def result(self, chosen, k: int, method: str, exact: bool = False) -> KKemenyResult:
        chosen = np.asarray(chosen, dtype=np.int64)
        dists = self.columns(chosen)
        nearest = dists.argmin(axis=1)
        return KKemenyResult(
            k=k,
            rankings=[tuple(int(c) for c in self.votes[i]) for i in chosen],
            assignment=nearest[self.voter_type],
            distance=int(self.weights @ dists.min(axis=1)),
            method=method,
            exact=exact,
        )

    @property
    def big(self) -> int:
        return int(self.weights.sum()) * self.m * self.m + 1


# --- exact k-Kemeny oracles -------------------------------------------------


def _partitions_at_most(n: int, k: int) -> int:
    """Number of set partitions of n items into at most k nonempty blocks."""
    stirling = [[0] * (k + 1) for _ in range(n + 1)]
    stirling[0][0] = 1
    for i in range(1, n + 1):
        for j in range(1, k + 1):
            stirling[i][j] = j * stirling[i - 1][j] + stirling[i - 1][j - 1]
    return sum(stirling[n][1:])


BELL_10 = 115975


def _partition_dp(e: Election, k: int, budget: int):
    n = e.n
    if k < 1:
        raise ValueError("k must be positive")
    k_eff = min(k, n)
    count = _partitions_at_most(n, k_eff)
    if count > budget:
        raise BudgetExceeded(f"{count} voter partitions exceed budget {budget}")
    pos = e.positions()
    per_voter = (pos[:, :, None] < pos[:, None, :]).astype(np.int64)
    full = (1 << n) - 1
    sub_counts = np.zeros((full + 1, e.m, e.m), dtype=np.int64)
    for t in range(n):
        sub_counts[1 << t : 1 << (t + 1)] = sub_counts[: 1 << t] + per_voter[t]
    single = [0] * (full + 1)
    single_rank: list[list[int]] = [[] for _ in range(full + 1)]
    for s in range(1, full + 1):
        single[s], single_rank[s] = _kemeny_dp(sub_counts[s])
    best = [[math.inf] * (full + 1) for _ in range(k_eff + 1)]
    pick = [[0] * (full + 1) for _ in range(k_eff + 1)]
    best[0][0] = 0
    for j in range(1, k_eff + 1):
        best[j][0] = 0
        for s in range(1, full + 1):
            low = s & -s
            rest = s ^ low
            value, chosen = best[j - 1][s], 0
            sub = rest
            while True:
                block = sub | low
                cand = single[block] + best[j - 1][s ^ block]
                if cand < value:
                    value, chosen = cand, block
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            best[j][s], pick[j][s] = value, chosen
    return best, pick, single_rank


def k_kemeny_exact_partition(e: Election, k: int, budget: int = BELL_10) -> KKemenyResult:
    """Global k-Kemeny optimum by optimising over partitions of the voters.

    Every voter group is served by its own exact Kemeny ranking; the best
    split into at most k groups is found by a dynamic program over voter
    subsets, which covers every partition without listing them one by one.
    """
    best, pick, single_rank = _partition_dp(e, k, budget)
    n, k_eff = e.n, min(k, e.n)
    full = (1 << n) - 1
    blocks = []
    s, j = full, k_eff
    while s:
        if pick[j][s]:
            blocks.append(pick[j][s])
            s ^= pick[j][s]
        j -= 1
    rankings, assignment = [], np.zeros(n, dtype=np.int64)
    for b, block in enumerate(blocks):
        rankings.append(tuple(single_rank[block]))
        for t in range(n):
            if block >> t & 1:
                assignment[t] = b
    return KKemenyResult(k, rankings, assignment, int(best[k_eff][full]), "exact-partition", True)


def exact_profile(e: Election, k_max: int | None = None, budget: int = BELL_10) -> list[int]:
    """Exact k-Kemeny distances for k = 1..k_max (default n) from one partition DP."""
    k_max = e.n if k_max is None else k_max
    best, _, _ = _partition_dp(e, k_max, budget)
    full = (1 << e.n) - 1
    k_eff = min(k_max, e.n)
    return [int(best[min(k, k_eff)][full]) for k in range(1, k_max + 1)]


def k_kemeny_among_votes_exact(e: Election, k: int, budget: int = 200_000) -> KKemenyResult:
    """Best k centers restricted to rankings that occur among the votes."""
    inst = _Instance(e)
    if k >= inst.size:
        return inst.result(np.arange(inst.size), k, "exact-among-votes", True)
    combos = math.comb(inst.size, k)
    if combos > budget:
        raise BudgetExceeded(f"{combos} vote subsets exceed budget {budget}")
    dist = inst.columns(np.arange(inst.size))
    best_val, best_combo = None, None
    for combo in itertools.combinations(range(inst.size), k):
        val = int(inst.weights @ dist[:, combo].min(axis=1))
        if best_val is None or val < best_val:
            best_val, best_combo = val, combo
    return inst.result(best_combo, k, "exact-among-votes", True)


def k_kemeny_exact(e: Election, k: int, budget: int = BELL_10) -> KKemenyResult:
    return k_kemeny_exact_partition(e, k, budget)


# --- heuristics --------------------------------------------------------------


def _greedy_order(inst: _Instance, k_max: int) -> tuple[list[int], list[int]]:
    """Distinct-vote indices in greedy order, and the cost after each addition."""
    base = np.full(inst.size, inst.big, dtype=np.int64)
    chosen: list[int] = []
    costs: list[int] = []
    taken = np.zeros(inst.size, dtype=bool)
    for _ in range(min(k_max, inst.size)):
        totals = inst.add_costs(base[None, :])[0]
        totals[taken] = np.iinfo(np.int64).max
        i = int(np.argmin(totals))
        chosen.append(i)
        costs.append(int(totals[i]))
        taken[i] = True
        base = np.minimum(base, inst.columns(np.array([i]))[:, 0])
    return chosen, costs


def _local_search(inst: _Instance, start) -> list[int]:
    """Best-improvement single-swap local search over distinct votes."""
    chosen = np.sort(np.asarray(start, dtype=np.int64))
    k = len(chosen)
    if k >= inst.size:
        return chosen.tolist()
    dists = inst.columns(chosen).T  # (k, D)
    while True:
        in_set = np.zeros(inst.size, dtype=bool)
        in_set[chosen] = True
        if k == 1:
            bases = np.full((1, inst.size), inst.big, dtype=np.int64)
            current = int(inst.weights @ dists[0])
        else:
            two = np.partition(dists, 1, axis=0)[:2]
            nearest = dists.argmin(axis=0)
            d1, d2 = two[0], two[1]
            bases = np.where(np.arange(k)[:, None] == nearest[None, :], d2[None, :], d1[None, :])
            current = int(inst.weights @ d1)
        totals = inst.add_costs(bases)
        totals[:, in_set] = np.iinfo(np.int64).max
        flat = int(np.argmin(totals))
        out_pos, new = divmod(flat, inst.size)
        if totals[out_pos, new] >= current:
            return chosen.tolist()
        chosen[out_pos] = new
        dists[out_pos] = inst.columns(np.array([new]))[:, 0]
        order = np.argsort(chosen, kind="stable")
        chosen, dists = chosen[order], dists[order]


def _seed_for(seed, k: int) -> np.random.Generator:
    entropy = [int(seed), int(k)] if seed is not None else None
    return np.random.default_rng(entropy)


def k_kemeny_greedy(e: Election, k_max: int) -> list[KKemenyResult]:
    """Greedy trace: result for every k = 1..k_max from one incremental pass."""
    inst = _Instance(e)
    order, _ = _greedy_order(inst, k_max)
    return [
        inst.result(order[: min(k, len(order))], k, "greedy")
        for k in range(1, k_max + 1)
    ]


def k_kemeny_local_search(e: Election, k: int, seed=0) -> KKemenyResult:
    inst = _Instance(e)
    if k >= inst.size:
        return inst.result(np.arange(inst.size), k, "local-search")
    start = _seed_for(seed, k).choice(inst.size, size=k, replace=False)
    return inst.result(_local_search(inst, start), k, "local-search")


def k_kemeny_combined(e: Election, k: int) -> KKemenyResult:
    """Local search started from the greedy solution; never worse than greedy."""
    inst = _Instance(e)
    order, _ = _greedy_order(inst, k)
    if k >= inst.size:
        return inst.result(order, k, "combined")
    return inst.result(_local_search(inst, order), k, "combined")


def k_kemeny_profile(
    e: Election,
    method: str = "best-of",
    k_max: int | None = None,
    seed=0,
    monotone: bool = True,
) -> list[int]:
    """k-Kemeny distances for k = 1..k_max (default n) by the chosen heuristic.

    ``best-of`` is the pointwise minimum of local search and combined. With
    ``monotone`` each value is capped by its predecessor, which is always
    achievable: a (k-1)-solution plus any extra ranking is a k-solution.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    k_max = e.n if k_max is None else k_max
    inst = _Instance(e)
    solvable = min(k_max, inst.size - 1)
    order, greedy_costs = _greedy_order(inst, k_max)
    greedy = greedy_costs + [0] * (k_max - len(greedy_costs))
    if method == "greedy":
        values = greedy
    else:
        ls = comb = None
        if method in ("local-search", "best-of"):
            ls = [
                inst.cost(_local_search(inst, _seed_for(seed, k).choice(inst.size, k, replace=False)))
                for k in range(1, solvable + 1)
            ]
        if method in ("combined", "best-of"):
            comb = [inst.cost(_local_search(inst, order[:k])) for k in range(1, solvable + 1)]
        if method == "local-search":
            head = ls
        elif method == "combined":
            head = comb
        else:
            head = [min(a, b) for a, b in zip(ls, comb)]
        values = head + [0] * (k_max - solvable)
    if monotone:
        values = list(np.minimum.accumulate(values)) if values else []
    return [int(v) for v in values]


def kemeny_profiles(e: Election, k_max: int | None = None, seed=0) -> dict[str, list[int]]:
    """Raw greedy, local-search and combined values for k = 1..k_max sharing one distance table."""
    k_max = e.n if k_max is None else k_max
    inst = _Instance(e)
    solvable = min(k_max, inst.size - 1)
    order, greedy_costs = _greedy_order(inst, k_max)
    pad = lambda xs: [int(x) for x in xs] + [0] * (k_max - len(xs))  # noqa: E731
    ls = [
        inst.cost(_local_search(inst, _seed_for(seed, k).choice(inst.size, k, replace=False)))
        for k in range(1, solvable + 1)
    ]
    comb = [inst.cost(_local_search(inst, order[:k])) for k in range(1, solvable + 1)]
    return {"greedy": pad(greedy_costs), "local-search": pad(ls), "combined": pad(comb)}


def distinct_vote_count(e: Election) -> int:
    return len(np.unique(e.votes, axis=0))
