"""Position matrices: block constructions and sampling elections that realize them."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .core import Election, ElectionError, is_position_matrix


def block_matrix(block_sizes: Sequence[int], n: int) -> np.ndarray:
    """Block-diagonal position matrix with near-uniform blocks.

    A block of size b spreads its n voters as evenly as integers allow:
    entry ``(i, j)`` of the block is ``n // b + 1`` when ``(j - i) mod b``
    is below ``n % b`` and ``n // b`` otherwise, so every row and column of
    the block sums to n.
    """
    m = int(sum(block_sizes))
    x = np.zeros((m, m), dtype=np.int64)
    lo = 0
    for b in block_sizes:
        if b < 1:
            raise ElectionError("block sizes must be positive")
        q, r = divmod(n, b)
        i, j = np.meshgrid(np.arange(b), np.arange(b), indexing="ij")
        x[lo : lo + b, lo : lo + b] = q + ((j - i) % b < r)
        lo += b
    return x


def uniform_matrix(m: int, n: int) -> np.ndarray:
    if n % m:
        raise ElectionError(f"UN* needs m | n, got m={m}, n={n}")
    return np.full((m, m), n // m, dtype=np.int64)


def stratification_matrix(alpha: float, m: int, n: int) -> np.ndarray:
    top = alpha * m
    if abs(top - round(top)) > 1e-9 or not 1 <= round(top) <= m - 1:
        raise ElectionError(f"alpha={alpha} does not split {m} candidates into two blocks")
    return block_matrix([int(round(top)), m - int(round(top))], n)


# block layouts of the 8-candidate ID-ST* matrices used in the extended dataset
PRINTED_ID_ST_BLOCKS = {3: (2, 3, 3), 4: (2, 2, 2, 2), 6: (1, 2, 2, 1, 1, 1)}


def id_st_block_sizes(blocks: int, m: int, rng: np.random.Generator | None = None) -> tuple[int, ...]:
    if not 2 <= blocks <= m:
        raise ElectionError(f"number of blocks must lie in 2..{m}, got {blocks}")
    if m == 8 and blocks in PRINTED_ID_ST_BLOCKS:
        return PRINTED_ID_ST_BLOCKS[blocks]
    q, r = divmod(m, blocks)
    sizes = np.array([q + 1] * r + [q] * (blocks - r))
    if rng is not None:
        sizes = rng.permutation(sizes)
    return tuple(int(s) for s in sizes)


def _has_perfect_matching(support: np.ndarray) -> bool:
    size = support.shape[0]
    if size == 0:
        return True
    match = maximum_bipartite_matching(csr_matrix(support.astype(np.int8)), perm_type="column")
    return bool((match >= 0).all())


def realize_position_matrix(x, seed=None) -> Election:
    """Sample an election whose position matrix is exactly ``x``.

    Votes are drawn one at a time. Within a vote, positions are filled top
    to bottom, each with a candidate drawn uniformly among those that keep
    a perfect matching of the remaining positions and candidates inside the
    support of the residual matrix. Any such vote leaves a residual with
    equal row and column sums, so the process never gets stuck.
    """
    x = np.array(x, dtype=np.int64)
    if not is_position_matrix(x):
        raise ElectionError("not a position matrix: rows and columns must share one sum")
    m = x.shape[0]
    n = int(x[0].sum())
    if n < 1:
        raise ElectionError("position matrix has no voters")
    rng = np.random.default_rng(seed)
    residual = x.copy()
    votes = np.empty((n, m), dtype=np.int64)
    for v in range(n):
        free = np.ones(m, dtype=bool)
        for pos in range(m):
            options = []
            for c in np.flatnonzero(free & (residual[pos] > 0)):
                free[c] = False
                rest = np.flatnonzero(free)
                if _has_perfect_matching(residual[pos + 1 :][:, rest] > 0):
                    options.append(c)
                free[c] = True
            if not options:
                raise ElectionError("position matrix cannot be realized")
            c = options[int(rng.integers(len(options)))]
            votes[v, pos] = c
            free[c] = False
        residual[np.arange(m), votes[v]] -= 1
    return Election(m, votes)
