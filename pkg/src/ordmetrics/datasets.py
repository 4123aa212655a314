"""Dataset manifests, shipped empirical source elections and batch generation.

A manifest is a JSON array of entries ``{kind, params, m, n, seed, count, tag}``.
Copy ``j`` of an entry uses the generator ``default_rng([seed, j])``: it first
draws any randomized parameters (in sorted key order), then samples the
election from the same stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterator

import numpy as np

from .core import Election, ElectionError, read_election, read_preflib
from .cultures import KINDS, CultureSpec, sample, sample_euclidean, sample_mallows

MANIFESTS = ("standard", "extended", "mallows")
SOURCES = ("irish", "sushi", "grenoble")
_ENTRY_KEYS = {"kind", "params", "m", "n", "seed", "count", "tag"}


def data_path(*parts: str) -> Path:
    return Path(str(resources.files("ordmetrics").joinpath("data", *parts)))


def manifest_path(name: str) -> Path:
    return data_path("manifests", f"{name}.json")


def draw_param(value, rng: np.random.Generator):
    """Resolve a manifest parameter: plain values pass through, dicts with ``dist`` are drawn."""
    if not isinstance(value, dict):
        return value
    dist = value.get("dist")
    if dist == "uniform":
        return float(rng.uniform(value.get("low", 0.0), value.get("high", 1.0)))
    if dist == "gamma":
        return float(rng.gamma(value["shape"], value.get("scale", 1.0)))
    if dist == "one_minus_sqrt_uniform":
        # P[1 - x <= t] = t**2 thins out values near 1
        return float(1.0 - np.sqrt(rng.random()))
    raise ElectionError(f"unknown parameter distribution {value!r}")


@dataclass(frozen=True)
class DatasetItem:
    id: str
    tag: str
    kind: str
    params: dict
    election: Election


def validate_manifest(entries) -> None:
    if not isinstance(entries, list):
        raise ElectionError("manifest must be a JSON array")
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or set(entry) != _ENTRY_KEYS:
            raise ElectionError(f"manifest entry {i} must have exactly the keys {sorted(_ENTRY_KEYS)}")
        if entry["kind"] not in KINDS:
            raise ElectionError(f"manifest entry {i}: unknown kind {entry['kind']!r}")
        if not isinstance(entry["count"], int) or entry["count"] < 1:
            raise ElectionError(f"manifest entry {i}: count must be a positive integer")
        if not isinstance(entry["params"], dict):
            raise ElectionError(f"manifest entry {i}: params must be an object")


def load_manifest(path_or_name) -> list[dict]:
    path = Path(path_or_name)
    if not path.exists() and str(path_or_name) in MANIFESTS:
        path = manifest_path(str(path_or_name))
    try:
        entries = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ElectionError(f"cannot read manifest {path}: {exc}") from None
    validate_manifest(entries)
    return entries


def load_source(name: str, search_dirs=()) -> Election:
    """Empirical source by name: a PrefLib or election file in ``search_dirs``, else the shipped stand-in."""
    for d in search_dirs:
        for suffix in (".soc", ".soi", ".toc"):
            p = Path(d) / f"{name}{suffix}"
            if p.exists():
                return read_preflib(p)
        p = Path(d) / f"{name}.txt"
        if p.exists():
            return read_election(p)
    p = data_path("sources", f"{name}.txt")
    if not p.exists():
        raise ElectionError(f"no empirical source named {name!r}")
    return read_election(p)


def expand_manifest(entries, source_dirs=()) -> Iterator[tuple[str, str, str, dict, CultureSpec]]:
    """Yield ``(id, tag, kind, drawn_params, spec)`` for every election of the manifest."""
    index = 0
    for entry in entries:
        for j in range(entry["count"]):
            rng = np.random.default_rng([int(entry["seed"]), j])
            params = {k: draw_param(entry["params"][k], rng) for k in sorted(entry["params"])}
            spec = CultureSpec(entry["kind"], int(entry["m"]), int(entry["n"]), rng, params)
            yield f"{index:03d}_{entry['tag']}", entry["tag"], entry["kind"], params, spec
            index += 1


def generate_dataset(entries, source_dirs=()) -> list[DatasetItem]:
    sources: dict[str, Election] = {}
    items = []
    for ident, tag, kind, params, spec in expand_manifest(entries, source_dirs):
        if kind == "empirical" and params["source"] not in sources:
            sources[params["source"]] = load_source(params["source"], source_dirs)
        items.append(DatasetItem(ident, tag, kind, params, sample(spec, sources)))
    return items


def surrogate_source(name: str) -> Election:
    """Deterministic synthetic stand-ins for the three real-life sources.

    Same candidate counts as the originals; the vote models are chosen to
    give each source a different character (clustered Euclidean, broad
    Mallows, and a 2-D spatial electorate).
    """
    if name == "irish":
        rng = np.random.default_rng(20_001)
        spatial = sample_euclidean(12, 2000, "cube", 3, rng).votes
        peaked = sample_mallows(12, 2000, 0.5, seed=rng).votes
        votes = rng.permutation(np.concatenate([spatial, peaked]))
        return Election(12, votes)
    if name == "sushi":
        return sample_mallows(10, 5000, 0.8, seed=20_002)
    if name == "grenoble":
        return sample_euclidean(11, 760, "cube", 2, 20_003)
    raise ElectionError(f"no surrogate for {name!r}")
