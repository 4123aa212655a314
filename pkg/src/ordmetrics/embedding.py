"""Planar embeddings (SMACOF), maps of elections and preferences, correlation helpers."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import Election, ElectionError
from .distances import isomorphic_swap_distance, vote_distance_matrix


@dataclass(frozen=True)
class Embedding2D:
    points: np.ndarray
    stress: float
    iterations: int
    history: tuple[float, ...] = field(default=(), repr=False)


def raw_stress(d: np.ndarray, x: np.ndarray) -> float:
    """Sum over pairs i < j of (d_ij - |x_i - x_j|)**2."""
    iu = np.triu_indices(len(d), 1)
    emb = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=2)
    return float(((d[iu] - emb[iu]) ** 2).sum())


def _check_dissimilarities(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {d.shape}")
    if not np.allclose(d, d.T, rtol=0, atol=1e-9 * max(1.0, float(np.abs(d).max(initial=0)))):
        raise ValueError("distance matrix is not symmetric")
    if (d < 0).any() or np.any(np.diag(d) != 0):
        raise ValueError("distances must be nonnegative with a zero diagonal")
    return d


def _smacof_run(d: np.ndarray, x: np.ndarray, max_iter: int, tol: float):
    n = len(d)
    history = [raw_stress(d, x)]
    it = 0
    for it in range(1, max_iter + 1):
        emb = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(emb > 0, d / emb, 0.0)
        b = -ratio
        b[np.diag_indices(n)] = ratio.sum(axis=1)
        # Guttman transform for unit weights
        x = b @ x / n
        history.append(raw_stress(d, x))
        prev, cur = history[-2], history[-1]
        if cur <= 1e-14 or (prev - cur) <= tol * prev:
            break
    return x, history, it


def classical_scaling(d: np.ndarray) -> np.ndarray:
    """Torgerson scaling: top two eigenvectors of the double-centred squared distances."""
    n = len(d)
    j = np.eye(n) - 1.0 / n
    b = -0.5 * j @ (d**2) @ j
    vals, vecs = np.linalg.eigh(b)
    top = np.argsort(vals)[::-1][:2]
    x = vecs[:, top] * np.sqrt(np.maximum(vals[top], 0.0))
    # fix the eigenvector signs so the result does not depend on the solver
    signs = np.sign(x[np.argmax(np.abs(x), axis=0), [0, 1]])
    signs[signs == 0] = 1
    return x * signs


def mds_embed(d, seed=0, max_iter: int = 300, tol: float = 1e-6, restarts: int = 4, init=None) -> Embedding2D:
    """SMACOF stress majorization into the plane.

    Without ``init`` the runs start from classical scaling and from
    ``restarts`` seeded random configurations; the lowest final stress wins.
    ``history`` lists the raw stress of the start and after every iteration.
    """
    d = _check_dissimilarities(d)
    n = len(d)
    if n == 0:
        return Embedding2D(np.zeros((0, 2)), 0.0, 0)
    if n == 1:
        return Embedding2D(np.zeros((1, 2)), 0.0, 0)
    if init is not None:
        starts = [np.asarray(init, dtype=float).reshape(n, 2)]
    else:
        rng = np.random.default_rng(seed)
        scale = float(d.max()) or 1.0
        starts = [classical_scaling(d)]
        starts += [rng.standard_normal((n, 2)) * scale for _ in range(max(restarts, 1))]
    best = None
    for x0 in starts:
        x, history, it = _smacof_run(d, x0.copy(), max_iter, tol)
        if best is None or history[-1] < best.stress:
            best = Embedding2D(x, history[-1], it, tuple(history))
    return best


# --- maps --------------------------------------------------------------------------


def _pair_distance(args):
    e, f, mode, budget, seed = args
    return isomorphic_swap_distance(e, f, mode=mode, budget=budget, seed=seed).distance


def election_distance_matrix(
    elections: Sequence[Election], mode: str = "heuristic", budget: int = 10, seed=0, workers: int = 1
) -> np.ndarray:
    """Pairwise isomorphic swap distances; pair (i, j) uses seed ``[seed, i, j]``."""
    if elections:
        m, n = elections[0].m, elections[0].n
        for idx, e in enumerate(elections):
            if (e.m, e.n) != (m, n):
                raise ElectionError(f"election {idx} has (m={e.m}, n={e.n}), expected (m={m}, n={n})")
    size = len(elections)
    pairs = list(itertools.combinations(range(size), 2))
    tasks = [(elections[i], elections[j], mode, budget, [seed, i, j]) for i, j in pairs]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_pair_distance, tasks, chunksize=16))
    else:
        values = [_pair_distance(t) for t in tasks]
    out = np.zeros((size, size), dtype=np.int64)
    for (i, j), v in zip(pairs, values):
        out[i, j] = out[j, i] = v
    return out


def map_of_elections(
    elections: Sequence[Election], mode: str = "heuristic", seed=0, budget: int = 10, workers: int = 1
) -> tuple[Embedding2D, np.ndarray]:
    dist = election_distance_matrix(elections, mode, budget, seed, workers)
    return mds_embed(dist, seed=seed), dist


@dataclass(frozen=True)
class PreferenceMap:
    embedding: Embedding2D
    votes: np.ndarray
    multiplicities: np.ndarray


def map_of_preferences(e: Election, seed=0) -> PreferenceMap:
    """Embed the distinct votes of ``e`` by swap distance; duplicates become multiplicities."""
    votes, counts = e.distinct()
    dist = vote_distance_matrix(Election(e.m, votes))
    return PreferenceMap(mds_embed(dist, seed=seed), votes, counts)


# --- correlation and the agreement/diversity triangle ------------------------------------


def pearson(xs, ys) -> float:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("pearson needs two equal-length sequences of at least two values")
    dx, dy = x - x.mean(), y - y.mean()
    sx, sy = np.sqrt((dx * dx).sum()), np.sqrt((dy * dy).sum())
    if sx == 0 or sy == 0:
        raise ValueError("pearson is undefined for zero variance")
    return float(np.clip((dx * dy).sum() / (sx * sy), -1.0, 1.0))


def _rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def triangle_transform(points, id_index: int, an_index: int, un_index: int, final_rotation: bool = True) -> np.ndarray:
    """Affine normalization of a map so ID, AN and the farthest point form an equilateral triangle.

    ID moves to the origin and AN onto the positive x axis; the map is
    mirrored so UN* has nonnegative y; y is scaled so the point farthest from
    the ID-AN line sits at height sqrt(3)/2 times the ID-AN distance, and a
    shear moves that point above the midpoint of ID and AN. With
    ``final_rotation`` the result is finally rotated by 120 degrees
    counterclockwise around the triangle's center.
    """
    p = np.asarray(points, dtype=float)
    p = p - p[id_index]
    length = float(np.linalg.norm(p[an_index]))
    if length == 0:
        raise ValueError("ID and AN anchors coincide")
    angle = np.arctan2(p[an_index, 1], p[an_index, 0])
    p = p @ _rotation(-angle).T
    if p[un_index, 1] < 0:
        p[:, 1] = -p[:, 1]
    apex = int(np.argmax(np.abs(p[:, 1])))
    if p[apex, 1] == 0:
        raise ValueError("all points lie on the ID-AN line")
    if p[apex, 1] < 0:
        p[:, 1] = -p[:, 1]
    height = np.sqrt(3) / 2 * length
    p[:, 1] *= height / p[apex, 1]
    shear = (length / 2 - p[apex, 0]) / p[apex, 1]
    p[:, 0] += shear * p[:, 1]
    if final_rotation:
        center = np.array([length / 2, height / 3])
        p = (p - center) @ _rotation(2 * np.pi / 3).T + center
    return p


# --- static scatter output ------------------------------------------------------------------

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def write_svg_scatter(points, tags: Sequence[str], path, size: int = 600, radii=None) -> None:
    p = np.asarray(points, dtype=float)
    lo, hi = p.min(axis=0), p.max(axis=0)
    span = float((hi - lo).max()) or 1.0
    xy = (p - lo) / span * (size - 40) + 20
    colors = {t: PALETTE[i % len(PALETTE)] for i, t in enumerate(dict.fromkeys(tags))}
    r = np.full(len(p), 3.0) if radii is None else np.asarray(radii, dtype=float)
    body = [
        f'<circle cx="{x:.2f}" cy="{size - y:.2f}" r="{rad:.2f}" fill="{colors[t]}"><title>{t}</title></circle>'
        for (x, y), t, rad in zip(xy, tags, r)
    ]
    Path(path).write_text(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">\n'
        + "\n".join(body)
        + "\n</svg>\n",
        encoding="utf-8",
    )
