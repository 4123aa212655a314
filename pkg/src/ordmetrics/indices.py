"""Agreement, diversity and polarization indices.

All three indices are kept as exact fractions; the k-Kemeny values feeding
diversity and polarization are integers. Convert with ``float`` only when
reporting.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .core import Election, pairwise_counts
from .kemeny import (
    MAX_EXACT_CANDIDATES,
    exact_profile,
    k_kemeny_profile,
    kemeny_exact,
    majority_relation,
)

SOLVERS = ("best-of", "local-search", "combined", "greedy", "exact")


@dataclass(frozen=True)
class IndexReport:
    agreement: Fraction
    diversity: Fraction
    polarization: Fraction
    kappa_profile: tuple[int, ...]
    solver: str

    def as_floats(self) -> tuple[float, float, float]:
        return float(self.agreement), float(self.diversity), float(self.polarization)


def agreement_index(e: Election) -> Fraction:
    """Mean over candidate pairs of |p(a, b) - p(b, a)|."""
    counts = pairwise_counts(e)
    a, b = np.triu_indices(e.m, 1)
    margin = int(np.abs(counts[a, b] - counts[b, a]).sum())
    pairs = comb(e.m, 2)
    if pairs == 0:
        return Fraction(1)
    return Fraction(margin, e.n * pairs)


def majority_tau(vote, geq: np.ndarray) -> Fraction:
    """Kendall tau between a linear order and a (possibly tied) majority relation.

    Summed over ordered pairs (a, b): one half for "a above b in the vote
    but a not weakly preferred by the majority" plus one half for "b weakly
    preferred by the majority but b not above a in the vote".
    """
    m = len(vote)
    pos = np.empty(m, dtype=np.int64)
    pos[np.asarray(vote)] = np.arange(m)
    above = pos[:, None] < pos[None, :]
    off = ~np.eye(m, dtype=bool)
    first = above & ~geq & off
    second = geq.T & ~above.T & off
    return Fraction(int(first.sum() + second.sum()), 2)


def agreement_via_majority(e: Election) -> Fraction:
    """Agreement computed as a linear transform of the total tau to the majority relation."""
    geq = majority_relation(e).geq
    tau = Fraction(0)
    uniq, counts = np.unique(e.votes, axis=0, return_counts=True)
    for vote, c in zip(uniq, counts):
        tau += int(c) * majority_tau(vote, geq)
    pairs = comb(e.m, 2)
    if pairs == 0:
        return Fraction(1)
    return 1 - 2 * tau / (e.n * pairs)


def _normaliser(e: Election) -> int:
    return e.n * comb(e.m, 2)


def kappa_profile(e: Election, solver: str = "best-of", k_max: int | None = None, seed=0) -> list[int]:
    """k-Kemeny values for k = 1..k_max with the given solver.

    Heuristic profiles take the first value from the exact Kemeny dynamic
    program when m is small enough, then cap every later value by its
    predecessor.
    """
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")
    if solver == "exact":
        return exact_profile(e, k_max)
    return finalize_profile(e, k_kemeny_profile(e, solver, k_max=k_max, seed=seed, monotone=False))


def finalize_profile(e: Election, values) -> list[int]:
    """Exact first value (when m allows), then a running minimum over k."""
    values = [int(v) for v in values]
    if e.m <= MAX_EXACT_CANDIDATES and values:
        values[0] = kemeny_exact(e).distance
    return [int(v) for v in np.minimum.accumulate(values)] if values else []


def diversity_from_profile(e: Election, kappas) -> Fraction:
    norm = _normaliser(e)
    if norm == 0:
        return Fraction(0)
    return sum((Fraction(int(kap), k) for k, kap in enumerate(kappas, start=1)), Fraction(0)) / norm


def polarization_from_profile(e: Election, kappas) -> Fraction:
    norm = _normaliser(e)
    if norm == 0:
        return Fraction(0)
    k1 = int(kappas[0])
    k2 = int(kappas[1]) if len(kappas) > 1 else k1
    return Fraction(2 * (k1 - k2), norm)


def diversity_index(e: Election, solver: str = "best-of", seed=0) -> Fraction:
    return diversity_from_profile(e, kappa_profile(e, solver, seed=seed))


def polarization_index(e: Election, solver: str = "best-of", seed=0) -> Fraction:
    return polarization_from_profile(e, kappa_profile(e, solver, k_max=min(2, e.n), seed=seed))


def index_report(e: Election, solver: str = "best-of", seed=0) -> IndexReport:
    kappas = kappa_profile(e, solver, seed=seed)
    return IndexReport(
        agreement=agreement_index(e),
        diversity=diversity_from_profile(e, kappas),
        polarization=polarization_from_profile(e, kappas),
        kappa_profile=tuple(kappas),
        solver=solver,
    )
