"""Swap (Kendall tau) distance between votes and isomorphic swap distance between elections."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import Election, ElectionError


def _count_inversions(seq: list[int]) -> tuple[list[int], int]:
    if len(seq) <= 1:
        return seq, 0
    mid = len(seq) // 2
    left, a = _count_inversions(seq[:mid])
    right, b = _count_inversions(seq[mid:])
    merged, inv, i, j = [], a + b, 0, 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            inv += len(left) - i
            j += 1
    merged += left[i:]
    merged += right[j:]
    return merged, inv


def swap_distance(u, v) -> int:
    """Number of candidate pairs ordered oppositely by ``u`` and ``v``.

    Counts inversions of ``v`` read in ``u``'s coordinates with merge sort.
    """
    if len(u) != len(v):
        raise ElectionError(f"votes have different lengths ({len(u)} vs {len(v)})")
    pos_u = {int(c): i for i, c in enumerate(u)}
    return _count_inversions([pos_u[int(c)] for c in v])[1]


def swap_distance_pairs(u, v) -> int:
    """Quadratic pair scan; same value as :func:`swap_distance`."""
    if len(u) != len(v):
        raise ElectionError(f"votes have different lengths ({len(u)} vs {len(v)})")
    pu = {int(c): i for i, c in enumerate(u)}
    pv = {int(c): i for i, c in enumerate(v)}
    return sum(
        1
        for a, b in itertools.combinations(pu, 2)
        if (pu[a] < pu[b]) != (pv[a] < pv[b])
    )


def pair_indicators(votes: np.ndarray) -> np.ndarray:
    """``(n, m(m-1)/2)`` 0/1 matrix: column (a, b), a < b, is 1 when a beats b."""
    votes = np.asarray(votes)
    m = votes.shape[1]
    pos = np.empty_like(votes)
    pos[np.arange(len(votes))[:, None], votes] = np.arange(m)
    a, b = np.triu_indices(m, 1)
    return (pos[:, a] < pos[:, b]).astype(np.int32)


def cross_distances(votes_a: np.ndarray, votes_b: np.ndarray) -> np.ndarray:
    """Swap distances between every vote of ``votes_a`` and every vote of ``votes_b``."""
    ia = pair_indicators(votes_a)
    ib = pair_indicators(votes_b)
    return ia @ (1 - ib).T + (1 - ia) @ ib.T


def vote_distance_matrix(e: Election) -> np.ndarray:
    return cross_distances(e.votes, e.votes)


def min_cost_voter_matching(cost) -> tuple[np.ndarray, int]:
    """Perfect matching of rows to columns with minimum total cost.

    Returns ``(assignment, total)`` where row ``i`` is matched to column
    ``assignment[i]``.
    """
    cost = np.asarray(cost)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {cost.shape}")
    rows, cols = linear_sum_assignment(cost)
    assignment = np.empty(len(rows), dtype=np.int64)
    assignment[rows] = cols
    return assignment, cost[rows, cols].sum().item()


@dataclass(frozen=True)
class IsoDistanceResult:
    distance: int
    candidate_bijection: np.ndarray
    voter_bijection: np.ndarray
    exact: bool


def _pair_tensor(e: Election) -> np.ndarray:
    pos = e.positions()
    return (pos[:, :, None] < pos[:, None, :]).astype(np.int32)


class _IsoProblem:
    """Precomputed pair tensors for one ordered pair of elections."""

    def __init__(self, e: Election, f: Election):
        if e.m != f.m or e.n != f.n:
            raise ElectionError(
                f"elections differ in size: (m={e.m}, n={e.n}) vs (m={f.m}, n={f.n})"
            )
        self.m, self.n = e.m, e.n
        self.pe = _pair_tensor(e)
        self.pf = _pair_tensor(f)
        self.pe_flat = self.pe.reshape(self.n, -1)
        self.count_e = self.pe.sum(axis=0)
        self.count_f = self.pf.sum(axis=0)
        self.pos_e = position_profile(e)
        self.pos_f = position_profile(f)

    def cost_matrix(self, pi: np.ndarray) -> np.ndarray:
        """``cost[i, j] = swap(pi(v_i), u_j)``."""
        # a beats b in v_i and pi(b) beats pi(a) in u_j
        flipped = self.pf[:, pi[None, :], pi[:, None]].reshape(self.n, -1)
        return self.pe_flat @ flipped.T

    def solve_voters(self, pi: np.ndarray) -> tuple[np.ndarray, int]:
        return min_cost_voter_matching(self.cost_matrix(pi))

    def improve_candidates(self, pi: np.ndarray, sigma: np.ndarray) -> tuple[np.ndarray, int]:
        """Best-improvement hill climbing over transpositions of ``pi`` with voters fixed."""
        m = self.m
        coupling = np.einsum(
            "iab,icd->abcd", self.pe, self.pf[sigma], optimize=True
        )
        a_idx, b_idx = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")

        def total(perms: np.ndarray) -> np.ndarray:
            return coupling[a_idx, b_idx, perms[:, b_idx], perms[:, a_idx]].sum(axis=(1, 2))

        xs, ys = np.triu_indices(m, 1)
        value = int(total(pi[None, :])[0])
        while len(xs):
            cands = np.repeat(pi[None, :], len(xs), axis=0)
            rows = np.arange(len(xs))
            cands[rows, xs], cands[rows, ys] = pi[ys], pi[xs]
            values = total(cands)
            best = int(np.argmin(values))
            if values[best] >= value:
                return pi, value
            pi, value = cands[best], int(values[best])
        return pi, value

    def alternate(self, pi: np.ndarray) -> tuple[int, np.ndarray, np.ndarray]:
        sigma, value = self.solve_voters(pi)
        while True:
            new_pi, new_value = self.improve_candidates(pi, sigma)
            if new_value >= value:
                return value, pi, sigma
            pi = new_pi
            sigma, value = self.solve_voters(pi)

    def aligned_start(self) -> np.ndarray:
        """Candidate bijection matching position profiles (cheap warm start)."""
        cost = np.abs(self.pos_e[:, None, :] - self.pos_f[None, :, :]).sum(axis=2)
        return min_cost_voter_matching(cost)[0]


def position_profile(e: Election) -> np.ndarray:
    """Row c holds the position histogram of candidate c."""
    x = np.zeros((e.m, e.m), dtype=np.int64)
    np.add.at(x, (e.votes, np.broadcast_to(np.arange(e.m), e.votes.shape)), 1)
    return x


def _heuristic(problem: _IsoProblem, budget: int, seed) -> IsoDistanceResult:
    rng = np.random.default_rng(seed)
    best = None
    starts = [problem.aligned_start()]
    starts += [rng.permutation(problem.m) for _ in range(max(budget, 1))]
    for pi in starts:
        value, pi, sigma = problem.alternate(pi)
        if best is None or value < best[0]:
            best = (value, pi, sigma)
        if best[0] == 0:
            break
    value, pi, sigma = best
    return IsoDistanceResult(int(value), pi.copy(), sigma.copy(), exact=False)


def _branch_and_bound(problem: _IsoProblem, incumbent: IsoDistanceResult) -> IsoDistanceResult:
    m = problem.m
    ce, cf = problem.count_e, problem.count_f
    best = [incumbent.distance, incumbent.candidate_bijection, incumbent.voter_bijection]
    # assign candidates with the most lopsided pair counts first
    order = np.argsort(-np.abs(ce - ce.T).sum(axis=1), kind="stable")
    pi = np.full(m, -1)

    def bound(depth: int) -> int:
        assigned = order[:depth]
        free_e = order[depth:]
        used = np.zeros(m, dtype=bool)
        used[pi[assigned]] = True
        free_f = np.flatnonzero(~used)
        total = 0
        for i, a in enumerate(assigned):
            for b in assigned[i + 1 :]:
                total += abs(int(ce[a, b]) - int(cf[pi[a], pi[b]]))
            for b in free_e:
                total += int(np.abs(ce[a, b] - cf[pi[a], free_f]).min())
        if len(free_e) >= 2:
            sub = cf[np.ix_(free_f, free_f)]
            off = ~np.eye(len(free_f), dtype=bool)
            options = sub[off]
            for i, a in enumerate(free_e):
                for b in free_e[i + 1 :]:
                    total += int(np.abs(ce[a, b] - options).min())
        return total

    def search(depth: int) -> None:
        if depth == m:
            sigma, value = problem.solve_voters(pi)
            if value < best[0]:
                best[:] = [value, pi.copy(), sigma]
            return
        a = order[depth]
        taken = set(pi[order[:depth]].tolist())
        for y in range(m):
            if y in taken:
                continue
            pi[a] = y
            if bound(depth + 1) < best[0]:
                search(depth + 1)
            pi[a] = -1

    if best[0] > 0:
        search(0)
    return IsoDistanceResult(int(best[0]), np.asarray(best[1]).copy(), np.asarray(best[2]).copy(), exact=True)


def isomorphic_swap_distance(
    e: Election, f: Election, mode: str = "heuristic", budget: int = 10, seed=0
) -> IsoDistanceResult:
    """Minimum total swap distance over candidate bijections and voter matchings.

    ``mode="exact"`` runs branch and bound over candidate bijections (each
    leaf solved as an assignment problem), seeded with the heuristic value.
    ``mode="heuristic"`` alternates between optimal voter matching and
    transposition hill climbing on the candidate bijection, from one
    position-profile warm start plus ``budget`` random restarts.
    """
    if mode not in ("exact", "heuristic"):
        raise ValueError(f"unknown mode {mode!r}")
    problem = _IsoProblem(e, f)
    result = _heuristic(problem, budget if mode == "heuristic" else min(budget, 2), seed)
    if mode == "exact":
        result = _branch_and_bound(problem, result)
    return result
