"""Statistical cultures, compass elections, mixtures and structural validators.

Every sampler takes ``seed``, which may be an int, a sequence of ints or a
``numpy.random.Generator``; the same seed always gives the same election.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .core import Election, ElectionError, borda_top_m
from .positions import (
    block_matrix,
    id_st_block_sizes,
    realize_position_matrix,
    stratification_matrix,
    uniform_matrix,
)

KINDS = (
    "ic",
    "mallows",
    "mallows_mixture",
    "urn",
    "sp_walsh",
    "sp_conitzer",
    "spoc",
    "single_crossing",
    "group_separable_balanced",
    "group_separable_caterpillar",
    "euclidean_cube",
    "euclidean_circle",
    "euclidean_sphere",
    "identity",
    "antagonism",
    "un_star",
    "st_star",
    "id_an_mixture",
    "an_un_mixture",
    "id_st_mixture",
    "empirical",
)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _check_sizes(m: int, n: int) -> None:
    if m < 1 or n < 1:
        raise ElectionError(f"need m >= 1 and n >= 1, got m={m}, n={n}")


def canonical_vote(m: int) -> np.ndarray:
    return np.arange(m, dtype=np.int64)


# --- impartial culture and Mallows -------------------------------------------


def sample_ic(m: int, n: int, seed=None) -> Election:
    _check_sizes(m, n)
    rng = _rng(seed)
    return Election(m, rng.permuted(np.tile(np.arange(m), (n, 1)), axis=1))


def expected_swap_distance(phi: float, m: int) -> float:
    """Mean swap distance to the central vote under Mallows(phi).

    Repeated insertion makes the inversion count a sum of independent
    variables, the j-th uniform-geometric on 0..j with weights phi**t.
    """
    total = 0.0
    for j in range(1, m):
        t = np.arange(j + 1, dtype=float)
        w = phi**t if phi > 0 else (t == 0).astype(float)
        total += float((t * w).sum() / w.sum())
    return total


def norm_phi_to_phi(norm_phi: float, m: int, tol: float = 1e-10) -> float:
    if not 0.0 <= norm_phi <= 1.0:
        raise ElectionError(f"norm-phi must lie in [0, 1], got {norm_phi}")
    if norm_phi == 0.0 or m < 2:
        return 0.0
    if norm_phi == 1.0:
        return 1.0
    target = norm_phi * m * (m - 1) / 4
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if expected_swap_distance(mid, m) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def mallows_votes(central, phi: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Exact Mallows(phi) votes by repeated insertion."""
    central = np.asarray(central, dtype=np.int64)
    m = len(central)
    cur = np.empty((n, 0), dtype=np.int64)
    for j in range(m):
        t = np.arange(j + 1)
        w = phi ** t.astype(float) if phi > 0 else (t == 0).astype(float)
        # inserting at depth p from the top puts the item above j - p earlier items
        inversions = rng.choice(j + 1, size=n, p=w / w.sum())
        p = (j - inversions)[:, None]
        cols = np.arange(j + 1)[None, :]
        shifted = np.concatenate([cur[:, :1], cur], axis=1) if j else np.zeros((n, 1), np.int64)
        padded = np.concatenate([cur, np.zeros((n, 1), np.int64)], axis=1)
        cur = np.where(cols < p, padded, np.where(cols == p, central[j], shifted))
    return cur


def sample_mallows(m: int, n: int, norm_phi: float, central=None, seed=None) -> Election:
    _check_sizes(m, n)
    central = canonical_vote(m) if central is None else np.asarray(central)
    phi = norm_phi_to_phi(norm_phi, m)
    return Election(m, mallows_votes(central, phi, n, _rng(seed)))


def sample_mallows_mixture(
    m: int, n: int, norm_phi: float, omega: float, central=None, seed=None
) -> Election:
    """Each vote comes from Mallows around ``central`` or, with probability omega, its reverse."""
    _check_sizes(m, n)
    if not 0.0 <= omega <= 0.5:
        raise ElectionError(f"omega must lie in [0, 0.5], got {omega}")
    rng = _rng(seed)
    central = canonical_vote(m) if central is None else np.asarray(central)
    phi = norm_phi_to_phi(norm_phi, m)
    flip = rng.random(n) < omega
    votes = mallows_votes(central, phi, n, rng)
    votes[flip] = mallows_votes(central[::-1], phi, int(flip.sum()), rng)
    return Election(m, votes)


# --- urn -----------------------------------------------------------------------


def sample_urn(m: int, n: int, alpha: float, seed=None) -> Election:
    """Polya-Eggenberger urn with replacement weight ``alpha * m!``.

    The i-th vote (0-based) copies a uniformly chosen earlier vote with
    probability ``i*alpha / (1 + i*alpha)`` and is a fresh uniform ranking
    otherwise.
    """
    _check_sizes(m, n)
    if alpha < 0:
        raise ElectionError(f"alpha must be nonnegative, got {alpha}")
    rng = _rng(seed)
    votes = np.empty((n, m), dtype=np.int64)
    for i in range(n):
        if i and rng.random() < i * alpha / (1 + i * alpha):
            votes[i] = votes[rng.integers(i)]
        else:
            votes[i] = rng.permutation(m)
    return Election(m, votes)


def urn_distinct_bound(n: int, alpha: float) -> float:
    """Upper bound on the expected number of distinct urn votes (tight when m! >> n)."""
    return float(sum(1.0 / (1.0 + i * alpha) for i in range(n)))


# --- single-peaked and related domains ------------------------------------------


def _axis(m: int, axis) -> np.ndarray:
    return canonical_vote(m) if axis is None else np.asarray(axis, dtype=np.int64)


def sample_sp_walsh(m: int, n: int, seed=None, axis=None) -> Election:
    """Uniform over the 2**(m-1) votes single-peaked on ``axis``.

    Built bottom-up: each of the last m-1 positions takes the left or right
    end of the remaining axis interval with probability 1/2.
    """
    _check_sizes(m, n)
    rng = _rng(seed)
    ax = _axis(m, axis)
    votes = np.empty((n, m), dtype=np.int64)
    coins = rng.random((n, max(m - 1, 0))) < 0.5
    for v in range(n):
        lo, hi = 0, m - 1
        for pos in range(m - 1, 0, -1):
            if coins[v, m - 1 - pos]:
                votes[v, pos] = ax[lo]
                lo += 1
            else:
                votes[v, pos] = ax[hi]
                hi -= 1
        votes[v, 0] = ax[lo]
    return Election(m, votes)


def sample_sp_conitzer(m: int, n: int, seed=None, axis=None) -> Election:
    """Uniform peak, then grow the interval left or right with probability 1/2."""
    _check_sizes(m, n)
    rng = _rng(seed)
    ax = _axis(m, axis)
    votes = np.empty((n, m), dtype=np.int64)
    peaks = rng.integers(m, size=n)
    coins = rng.random((n, max(m - 1, 0))) < 0.5
    for v in range(n):
        lo = hi = int(peaks[v])
        votes[v, 0] = ax[lo]
        for pos in range(1, m):
            go_left = hi == m - 1 or (lo > 0 and coins[v, pos - 1])
            if go_left:
                lo -= 1
                votes[v, pos] = ax[lo]
            else:
                hi += 1
                votes[v, pos] = ax[hi]
    return Election(m, votes)


def sample_spoc(m: int, n: int, seed=None, axis=None) -> Election:
    """Single-peaked on a circle: uniform top, then extend the arc at either end."""
    _check_sizes(m, n)
    rng = _rng(seed)
    ax = _axis(m, axis)
    votes = np.empty((n, m), dtype=np.int64)
    peaks = rng.integers(m, size=n)
    coins = rng.random((n, max(m - 1, 0))) < 0.5
    for v in range(n):
        left = right = int(peaks[v])
        votes[v, 0] = ax[left]
        for pos in range(1, m):
            if coins[v, pos - 1]:
                left = (left - 1) % m
                votes[v, pos] = ax[left]
            else:
                right = (right + 1) % m
                votes[v, pos] = ax[right]
    return Election(m, votes)


def single_crossing_domain(m: int, size: int, seed=None) -> np.ndarray:
    """Sequence of ``size`` votes, each one adjacent swap away from the previous.

    The first vote is 0 > 1 > ... > m-1. Each step swaps a uniformly chosen
    adjacent pair that is still in its original relative order, so no pair
    is ever swapped twice; once the reverse order is reached it repeats.
    """
    rng = _rng(seed)
    cur = canonical_vote(m)
    out = np.empty((size, m), dtype=np.int64)
    for i in range(size):
        if i:
            ok = np.flatnonzero(cur[:-1] < cur[1:])
            if len(ok):
                j = int(ok[rng.integers(len(ok))])
                cur = cur.copy()
                cur[j], cur[j + 1] = cur[j + 1], cur[j]
        out[i] = cur
    return out


def sample_single_crossing(m: int, n: int, seed=None) -> Election:
    """Draw n votes uniformly (with replacement) from an n-vote single-crossing domain.

    Votes are listed in domain order so the election is single-crossing in
    its stored voter order.
    """
    _check_sizes(m, n)
    rng = _rng(seed)
    domain = single_crossing_domain(m, n, rng)
    picks = np.sort(rng.integers(n, size=n))
    return Election(m, domain[picks])


# --- group-separable -----------------------------------------------------------


def balanced_tree(m: int):
    """Complete binary tree (heap shape) with leaves labeled 0..m-1 left to right."""
    if m < 1:
        raise ElectionError("a tree needs at least one leaf")
    internal = m - 1
    counter = iter(range(m))

    def label(node: int):
        if node >= internal:
            return next(counter)
        return (label(2 * node + 1), label(2 * node + 2))

    return label(0)


def caterpillar_tree(m: int):
    """Path-like tree: (0, (1, (2, ..., (m-2, m-1))))."""
    if m < 1:
        raise ElectionError("a tree needs at least one leaf")
    tree = m - 1
    for c in range(m - 2, -1, -1):
        tree = (c, tree)
    return tree


def tree_leaves(tree) -> list[int]:
    if isinstance(tree, tuple):
        return [c for child in tree for c in tree_leaves(child)]
    return [int(tree)]


def _read_tree(tree, rng: np.random.Generator) -> list[int]:
    if not isinstance(tree, tuple):
        return [int(tree)]
    children = list(tree)
    if rng.random() < 0.5:
        children.reverse()
    return [c for child in children for c in _read_tree(child, rng)]


def sample_group_separable(m: int, n: int, tree_kind: str = "balanced", seed=None, tree=None) -> Election:
    _check_sizes(m, n)
    if m < 2:
        raise ElectionError("group-separable sampling needs m >= 2")
    if tree is None:
        if tree_kind == "balanced":
            tree = balanced_tree(m)
        elif tree_kind == "caterpillar":
            tree = caterpillar_tree(m)
        else:
            raise ElectionError(f"unknown tree kind {tree_kind!r}")
    rng = _rng(seed)
    return Election(m, np.array([_read_tree(tree, rng) for _ in range(n)], dtype=np.int64))


# --- Euclidean -------------------------------------------------------------------


def euclidean_points(space: str, count: int, rng: np.random.Generator, dim: int = 1) -> np.ndarray:
    if space == "cube":
        if dim < 1:
            raise ElectionError(f"cube dimension must be positive, got {dim}")
        return rng.random((count, dim))
    if space == "circle":
        angle = rng.random(count) * 2 * np.pi
        return np.stack([np.cos(angle), np.sin(angle)], axis=1)
    if space == "sphere":
        g = rng.standard_normal((count, 3))
        return g / np.linalg.norm(g, axis=1, keepdims=True)
    raise ElectionError(f"unknown Euclidean space {space!r}")


def votes_from_points(candidates: np.ndarray, voters: np.ndarray) -> np.ndarray:
    """Each voter ranks candidates by distance, nearer first, ties to the lower index."""
    dist = np.linalg.norm(voters[:, None, :] - candidates[None, :, :], axis=2)
    return np.argsort(dist, axis=1, kind="stable").astype(np.int64)


def sample_euclidean(
    m: int,
    n: int,
    space: str = "cube",
    dim: int = 1,
    seed=None,
    candidate_points=None,
    voter_points=None,
) -> Election:
    _check_sizes(m, n)
    rng = _rng(seed)
    cands = (
        euclidean_points(space, m, rng, dim)
        if candidate_points is None
        else np.asarray(candidate_points, dtype=float).reshape(m, -1)
    )
    voters = (
        euclidean_points(space, n, rng, dim)
        if voter_points is None
        else np.asarray(voter_points, dtype=float).reshape(n, -1)
    )
    return Election(m, votes_from_points(cands, voters))


# --- compass elections and mixtures -----------------------------------------------


def identity_election(m: int, n: int) -> Election:
    _check_sizes(m, n)
    return Election(m, np.tile(canonical_vote(m), (n, 1)))


def antagonism_election(m: int, n: int) -> Election:
    _check_sizes(m, n)
    if n % 2:
        raise ElectionError(f"AN needs an even number of voters, got n={n}")
    v = canonical_vote(m)
    return Election(m, np.concatenate([np.tile(v, (n // 2, 1)), np.tile(v[::-1], (n // 2, 1))]))


def compass(kind: str, m: int, n: int, seed=None, alpha: float | None = None) -> Election:
    if kind == "identity":
        return identity_election(m, n)
    if kind == "antagonism":
        return antagonism_election(m, n)
    if kind == "un_star":
        return realize_position_matrix(uniform_matrix(m, n), seed)
    if kind == "st_star":
        if alpha is None:
            raise ElectionError("st_star needs alpha")
        return realize_position_matrix(stratification_matrix(alpha, m, n), seed)
    raise ElectionError(f"unknown compass kind {kind!r}")


def _split(n: int, share: float) -> int:
    part = n * share
    if abs(part - round(part)) > 1e-9:
        raise ElectionError(f"share {share} of {n} voters is not an integer")
    return int(round(part))


def _concat(m: int, parts: list[np.ndarray]) -> Election:
    return Election(m, np.concatenate([p for p in parts if len(p)], axis=0))


def mixture(kind: str, m: int, n: int, seed=None, share: float | None = None, blocks: int | None = None) -> Election:
    """ID-AN, AN-UN* and ID-ST* mixtures.

    ``id_an``: an AN election with ``n*share`` voters followed by ID voters
    for the rest, all around the canonical vote. ``an_un``: an AN election
    with ``n*(1-share)`` voters followed by a UN* election with ``n*share``
    voters. ``id_st``: realization of a block matrix with ``blocks`` blocks.
    """
    _check_sizes(m, n)
    if kind == "id_st":
        if blocks is None:
            raise ElectionError("id_st needs blocks")
        rng = _rng(seed)
        return realize_position_matrix(block_matrix(id_st_block_sizes(blocks, m, rng), n), rng)
    if share is None or not 0.0 <= share <= 1.0:
        raise ElectionError(f"share must lie in [0, 1], got {share}")
    if kind == "id_an":
        n_an = _split(n, share)
        if n_an % 2:
            raise ElectionError(f"AN part of {n_an} voters is odd")
        parts = [np.tile(canonical_vote(m), (n - n_an, 1))]
        if n_an:
            parts.append(antagonism_election(m, n_an).votes)
        return _concat(m, parts)
    if kind == "an_un":
        n_un = _split(n, share)
        n_an = n - n_un
        parts = []
        if n_an:
            parts.append(antagonism_election(m, n_an).votes)
        if n_un:
            parts.append(realize_position_matrix(uniform_matrix(m, n_un), seed).votes)
        return _concat(m, parts)
    raise ElectionError(f"unknown mixture kind {kind!r}")


# --- empirical resampling -----------------------------------------------------------


def sample_empirical(source: Election, m_top: int, n: int, seed=None) -> Election:
    """Borda-top ``m_top`` restriction of ``source``, then n votes i.i.d. with replacement."""
    if source.n < 1:
        raise ElectionError("empirical source has no votes")
    _check_sizes(m_top, n)
    restricted = borda_top_m(source, m_top)
    idx = _rng(seed).integers(source.n, size=n)
    return Election(m_top, restricted.votes[idx], restricted.labels)


# --- structural validators ------------------------------------------------------------


def _vote_is_single_peaked(vote, where: np.ndarray) -> bool:
    lo = hi = where[vote[0]]
    for c in vote[1:]:
        p = where[c]
        if p == lo - 1:
            lo = p
        elif p == hi + 1:
            hi = p
        else:
            return False
    return True


def is_single_peaked(e: Election, axis=None) -> bool:
    """Every top-t prefix of every vote is an interval of ``axis``."""
    ax = _axis(e.m, axis)
    where = np.empty(e.m, dtype=np.int64)
    where[ax] = np.arange(e.m)
    uniq = np.unique(e.votes, axis=0)
    return all(_vote_is_single_peaked(v, where) for v in uniq)


def is_spoc(e: Election, axis=None) -> bool:
    """Every top-t prefix of every vote is an arc of the cyclic ``axis``."""
    m = e.m
    ax = _axis(m, axis)
    where = np.empty(m, dtype=np.int64)
    where[ax] = np.arange(m)
    for vote in np.unique(e.votes, axis=0):
        left = right = where[vote[0]]
        for c in vote[1:]:
            p = where[c]
            if p == (left - 1) % m:
                left = p
            elif p == (right + 1) % m:
                right = p
            else:
                return False
    return True


def is_single_crossing(e: Election, voter_order=None) -> bool:
    """For every pair, voters preferring a to b form a prefix or a suffix of ``voter_order``."""
    order = np.arange(e.n) if voter_order is None else np.asarray(voter_order)
    pos = e.positions()[order]
    a, b = np.triu_indices(e.m, 1)
    prefers = pos[:, a] < pos[:, b]
    # a column must switch value at most once down the voter sequence
    switches = (prefers[1:] != prefers[:-1]).sum(axis=0)
    return bool((switches <= 1).all())


def is_consistent_with_tree(vote, tree) -> bool:
    """The vote reads the leaves of ``tree`` left to right after reversing some nodes' children."""
    vote = [int(c) for c in vote]
    if sorted(vote) != sorted(tree_leaves(tree)):
        return False
    where = {c: i for i, c in enumerate(vote)}

    def check(node) -> tuple[int, int] | None:
        if not isinstance(node, tuple):
            p = where[int(node)]
            return p, p
        spans = []
        for child in node:
            span = check(child)
            if span is None:
                return None
            spans.append(span)
        lo = min(s[0] for s in spans)
        hi = max(s[1] for s in spans)
        if hi - lo + 1 != sum(s[1] - s[0] + 1 for s in spans):
            return None
        forward = sorted(spans)
        # children must appear in the given order or exactly reversed
        if forward != spans and forward != spans[::-1]:
            return None
        return lo, hi

    return check(tree) is not None


# --- specs and dispatch ----------------------------------------------------------------


@dataclass(frozen=True)
class CultureSpec:
    kind: str
    m: int
    n: int
    seed: Any = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ElectionError(f"unknown culture kind {self.kind!r}")
        _check_sizes(self.m, self.n)
        p = self.params
        if "norm_phi" in p and not 0.0 <= p["norm_phi"] <= 1.0:
            raise ElectionError(f"norm_phi must lie in [0, 1], got {p['norm_phi']}")
        if "omega" in p and not 0.0 <= p["omega"] <= 0.5:
            raise ElectionError(f"omega must lie in [0, 0.5], got {p['omega']}")
        if "alpha" in p and p["alpha"] < 0:
            raise ElectionError(f"alpha must be nonnegative, got {p['alpha']}")
        if "share" in p and not 0.0 <= p["share"] <= 1.0:
            raise ElectionError(f"share must lie in [0, 1], got {p['share']}")
        if "blocks" in p and not 2 <= p["blocks"] <= self.m:
            raise ElectionError(f"blocks must lie in 2..{self.m}, got {p['blocks']}")


def sample(spec: CultureSpec, sources: dict[str, Election] | None = None) -> Election:
    """Draw one election for ``spec``; ``sources`` maps names to empirical source elections."""
    k, m, n, p = spec.kind, spec.m, spec.n, spec.params
    rng = _rng(spec.seed)
    if k == "ic":
        return sample_ic(m, n, rng)
    if k == "mallows":
        return sample_mallows(m, n, p["norm_phi"], seed=rng)
    if k == "mallows_mixture":
        return sample_mallows_mixture(m, n, p["norm_phi"], p["omega"], seed=rng)
    if k == "urn":
        return sample_urn(m, n, p["alpha"], rng)
    if k == "sp_walsh":
        return sample_sp_walsh(m, n, rng)
    if k == "sp_conitzer":
        return sample_sp_conitzer(m, n, rng)
    if k == "spoc":
        return sample_spoc(m, n, rng)
    if k == "single_crossing":
        return sample_single_crossing(m, n, rng)
    if k == "group_separable_balanced":
        return sample_group_separable(m, n, "balanced", rng)
    if k == "group_separable_caterpillar":
        return sample_group_separable(m, n, "caterpillar", rng)
    if k == "euclidean_cube":
        return sample_euclidean(m, n, "cube", int(p.get("dim", 1)), rng)
    if k == "euclidean_circle":
        return sample_euclidean(m, n, "circle", seed=rng)
    if k == "euclidean_sphere":
        return sample_euclidean(m, n, "sphere", seed=rng)
    if k in ("identity", "antagonism", "un_star"):
        return compass(k, m, n, rng)
    if k == "st_star":
        return compass(k, m, n, rng, alpha=p["alpha"])
    if k == "id_an_mixture":
        return mixture("id_an", m, n, rng, share=p["share"])
    if k == "an_un_mixture":
        return mixture("an_un", m, n, rng, share=p["share"])
    if k == "id_st_mixture":
        return mixture("id_st", m, n, rng, blocks=int(p["blocks"]))
    if k == "empirical":
        name = p["source"]
        if not sources or name not in sources:
            raise ElectionError(f"empirical source {name!r} is not loaded")
        return sample_empirical(sources[name], m, n, rng)
    raise ElectionError(f"unknown culture kind {k!r}")
