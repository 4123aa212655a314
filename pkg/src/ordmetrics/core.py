"""Elections, position matrices, Borda utilities and the election file format.

Candidates are dense 0-based indices. A vote is a permutation listing
candidates best-first; an election stores its votes expanded, one row per
voter, in an ``(n, m)`` integer array.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

FILE_HEADER = "# ordmetrics-election v1"


class ElectionError(ValueError):
    """Raised for malformed elections, votes or election files."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Election:
    num_candidates: int
    votes: np.ndarray
    labels: tuple[str, ...] | None = field(default=None)

    def __post_init__(self) -> None:
        try:
            votes = np.array(self.votes, dtype=np.int64)
        except ValueError:
            for idx, vote in enumerate(self.votes):
                if len(vote) != self.num_candidates:
                    raise ElectionError(
                        f"vote {idx} has length {len(vote)}, expected m={self.num_candidates}"
                    ) from None
            raise
        if votes.ndim == 1 and votes.size == 0:
            votes = votes.reshape(0, self.num_candidates)
        object.__setattr__(self, "votes", _freeze(votes))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
        validate_election(self)

    @classmethod
    def from_votes(cls, votes: Iterable[Sequence[int]], labels=None) -> Election:
        rows = [list(v) for v in votes]
        if not rows:
            raise ElectionError("an election needs at least one vote")
        return cls(len(rows[0]), np.array(rows, dtype=np.int64), labels)

    @property
    def n(self) -> int:
        return self.votes.shape[0]

    @property
    def m(self) -> int:
        return self.num_candidates

    def positions(self) -> np.ndarray:
        """``pos[v, c]`` is the position (0 = best) of candidate c in vote v."""
        pos = np.empty_like(self.votes)
        rows = np.arange(self.n)[:, None]
        pos[rows, self.votes] = np.arange(self.m)[None, :]
        return pos

    def distinct(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct votes in order of first appearance, with multiplicities."""
        uniq, first, counts = np.unique(
            self.votes, axis=0, return_index=True, return_counts=True
        )
        order = np.argsort(first, kind="stable")
        return uniq[order], counts[order]

    def relabel(self, perm: Sequence[int]) -> Election:
        """Rename candidate ``c`` to ``perm[c]`` in every vote."""
        perm = np.asarray(perm)
        return Election(self.m, perm[self.votes])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Election):
            return NotImplemented
        return (
            self.m == other.m
            and self.votes.shape == other.votes.shape
            and bool(np.array_equal(self.votes, other.votes))
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return hash((self.m, self.votes.tobytes()))

    def __repr__(self) -> str:
        return f"Election(m={self.m}, n={self.n})"


def is_permutation(vote: Sequence[int], m: int) -> bool:
    return len(vote) == m and sorted(int(c) for c in vote) == list(range(m))


def validate_election(e: Election) -> None:
    """Raise :class:`ElectionError` unless every vote is a permutation of 0..m-1."""
    m = e.num_candidates
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ElectionError(f"number of candidates must be positive, got {m!r}")
    votes = e.votes
    if votes.ndim != 2:
        raise ElectionError("votes must form a two-dimensional array")
    if votes.shape[0] < 1:
        raise ElectionError("an election needs at least one vote")
    if votes.shape[1] != m:
        raise ElectionError(
            f"vote 0 has length {votes.shape[1]}, expected m={m}"
        )
    target = np.arange(m)
    ok = np.all(np.sort(votes, axis=1) == target, axis=1)
    if not ok.all():
        bad = int(np.flatnonzero(~ok)[0])
        raise ElectionError(f"vote {bad} is not a permutation of 0..{m - 1}")
    if e.labels is not None and len(e.labels) != m:
        raise ElectionError(f"got {len(e.labels)} labels for {m} candidates")


def pairwise_counts(e: Election) -> np.ndarray:
    """``N[a, b]`` = number of voters ranking a above b."""
    pos = e.positions()
    return (pos[:, :, None] < pos[:, None, :]).sum(axis=0)


def pairwise_preference(e: Election) -> list[list[Fraction]]:
    """Exact fractions ``p[a][b]`` of voters preferring a to b (diagonal 0)."""
    counts = pairwise_counts(e)
    n = e.n
    return [[Fraction(int(counts[a, b]), n) for b in range(e.m)] for a in range(e.m)]


def position_matrix_of(e: Election) -> np.ndarray:
    """``X[i, j]`` = number of voters placing candidate j at position i."""
    x = np.zeros((e.m, e.m), dtype=np.int64)
    np.add.at(x, (np.broadcast_to(np.arange(e.m), e.votes.shape), e.votes), 1)
    return x


def is_position_matrix(x: np.ndarray) -> bool:
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1] or (x < 0).any():
        return False
    n = x[0].sum() if x.size else 0
    return bool((x.sum(axis=0) == n).all() and (x.sum(axis=1) == n).all())


def borda_scores(e: Election) -> np.ndarray:
    scores = np.zeros(e.m, dtype=np.int64)
    np.add.at(scores, e.votes, np.arange(e.m - 1, -1, -1)[None, :])
    return scores


def borda_top_m(e: Election, m_top: int) -> Election:
    """Restrict to the ``m_top`` best candidates by Borda score.

    Ties go to the lower candidate index. Kept candidates are re-indexed
    0..m_top-1 in decreasing Borda order; labels follow when present.
    """
    if not 1 <= m_top <= e.m:
        raise ElectionError(f"cannot keep {m_top} of {e.m} candidates")
    scores = borda_scores(e)
    keep = sorted(range(e.m), key=lambda c: (-scores[c], c))[:m_top]
    new_index = np.full(e.m, -1)
    new_index[keep] = np.arange(m_top)
    mapped = new_index[e.votes]
    restricted = mapped[mapped >= 0].reshape(e.n, m_top)
    labels = tuple(e.labels[c] for c in keep) if e.labels else None
    return Election(m_top, restricted, labels)


def complete_partial_votes(
    partial: Sequence[Sequence[int]], m: int, seed=None, labels=None
) -> Election:
    """Append the unranked candidates of each prefix in uniformly random order."""
    rng = np.random.default_rng(seed)
    rows = []
    for idx, prefix in enumerate(partial):
        prefix = [int(c) for c in prefix]
        if any(not 0 <= c < m for c in prefix):
            raise ElectionError(f"vote {idx} mentions an unknown candidate")
        if len(set(prefix)) != len(prefix):
            raise ElectionError(f"vote {idx} repeats a candidate")
        seen = set(prefix)
        rest = np.array([c for c in range(m) if c not in seen], dtype=np.int64)
        rows.append(prefix + rng.permutation(rest).tolist())
    return Election(m, np.array(rows, dtype=np.int64).reshape(len(rows), m), labels)


# --- election files -------------------------------------------------------

_SIZE_RE = re.compile(r"^m=(\d+) n=(\d+)$")
_LABEL_RE = re.compile(r"^# label (\d+) (.*)$")
_VOTE_RE = re.compile(r"^(\d+): *(.*)$")


def format_election(e: Election) -> str:
    lines = [FILE_HEADER, f"m={e.m} n={e.n}"]
    if e.labels:
        lines += [f"# label {i} {lab}" for i, lab in enumerate(e.labels)]
    # group runs of identical consecutive votes so the expanded order survives
    votes = e.votes
    start = 0
    for i in range(1, e.n + 1):
        if i == e.n or not np.array_equal(votes[i], votes[start]):
            lines.append(f"{i - start}: " + ",".join(str(int(c)) for c in votes[start]))
            start = i
    return "\n".join(lines) + "\n"


def parse_election(text: str) -> Election:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != FILE_HEADER:
        raise ElectionError("missing or malformed header line")
    if len(lines) < 2 or not (size := _SIZE_RE.match(lines[1])):
        raise ElectionError("malformed size line, expected 'm=<int> n=<int>'")
    m, n = int(size.group(1)), int(size.group(2))
    labels: dict[int, str] = {}
    rows: list[list[int]] = []
    for lineno, line in enumerate(lines[2:], start=3):
        if (lab := _LABEL_RE.match(line)) and not rows:
            labels[int(lab.group(1))] = lab.group(2)
            continue
        vote = _VOTE_RE.match(line)
        if not vote:
            raise ElectionError(f"line {lineno}: cannot parse {line!r}")
        try:
            cands = [int(tok) for tok in vote.group(2).split(",")]
        except ValueError:
            raise ElectionError(f"line {lineno}: non-integer candidate") from None
        if not is_permutation(cands, m):
            raise ElectionError(f"line {lineno}: not a permutation of 0..{m - 1}")
        rows.extend([cands] * int(vote.group(1)))
    if len(rows) != n:
        raise ElectionError(f"vote counts sum to {len(rows)}, header says n={n}")
    label_tuple = None
    if labels:
        if sorted(labels) != list(range(m)):
            raise ElectionError("labels must cover every candidate exactly once")
        label_tuple = tuple(labels[i] for i in range(m))
    return Election(m, np.array(rows, dtype=np.int64).reshape(n, m), label_tuple)


def write_election(e: Election, path) -> None:
    Path(path).write_text(format_election(e), encoding="utf-8", newline="\n")


def read_election(path) -> Election:
    return parse_election(Path(path).read_text(encoding="utf-8"))


def read_preflib(path, seed=0) -> Election:
    """Read a PrefLib ``.soc``/``.soi``/``.toc`` file of strict (possibly partial) orders.

    Candidates are re-indexed from PrefLib's 1-based ids. Incomplete votes are
    completed with :func:`complete_partial_votes`; ties are rejected.
    """
    m = None
    names: dict[int, str] = {}
    prefixes: list[list[int]] = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if key := re.match(r"# NUMBER ALTERNATIVES: (\d+)", line):
                m = int(key.group(1))
            elif alt := re.match(r"# ALTERNATIVE NAME (\d+): (.*)", line):
                names[int(alt.group(1)) - 1] = alt.group(2)
            continue
        count, _, order = line.partition(":")
        if "{" in order:
            raise ElectionError("weak orders are not supported")
        prefix = [int(tok) - 1 for tok in order.split(",") if tok.strip()]
        prefixes.extend([prefix] * int(count))
    if m is None:
        raise ElectionError("PrefLib header lacks '# NUMBER ALTERNATIVES'")
    labels = tuple(names.get(i, str(i)) for i in range(m)) if names else None
    return complete_partial_votes(prefixes, m, seed=seed, labels=labels)
