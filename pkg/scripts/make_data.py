"""Regenerate the shipped manifests and stand-in empirical sources."""

from __future__ import annotations

import json

from ordmetrics.core import write_election
from ordmetrics.datasets import SOURCES, data_path, surrogate_source

M, N = 8, 96
_seed = iter(range(1000, 2000))


def entry(kind, tag, count=1, **params):
    return {"kind": kind, "params": params, "m": M, "n": N, "seed": next(_seed), "count": count, "tag": tag}


def standard():
    out = [
        entry("ic", "ic", 16),
        entry("mallows", "mallows", 48, norm_phi={"dist": "uniform", "low": 0.0, "high": 1.0}),
        entry("urn", "urn", 48, alpha={"dist": "gamma", "shape": 0.8, "scale": 1.0}),
        entry("sp_conitzer", "sp_conitzer", 16),
        entry("sp_walsh", "sp_walsh", 16),
        entry("euclidean_cube", "interval", 16, dim=1),
        entry("euclidean_cube", "square", 16, dim=2),
        entry("euclidean_cube", "cube", 16, dim=3),
        entry("euclidean_cube", "5-cube", 8, dim=5),
        entry("euclidean_cube", "10-cube", 8, dim=10),
        entry("euclidean_circle", "circle", 16),
        entry("euclidean_sphere", "sphere", 16),
    ]
    out += [entry("empirical", name, 8, source=name) for name in SOURCES]
    out += [entry("un_star", "un_star", 4), entry("identity", "identity"), entry("antagonism", "antagonism")]
    out += [entry("id_an_mixture", "id_an", share=j / 12) for j in range(1, 12)]
    out += [entry("an_un_mixture", "an_un", share=j / 12) for j in range(1, 12)]
    return out


def extended():
    out = standard()
    out += [
        entry("spoc", "spoc", 16),
        entry("single_crossing", "single_crossing", 16),
        entry("group_separable_balanced", "gs_balanced", 16),
        entry("group_separable_caterpillar", "gs_caterpillar", 16),
        entry("st_star", "st_star", 4, alpha=0.5),
    ]
    out += [entry("st_star", "st_star", alpha=a / 8) for a in (1, 2, 3)]
    out += [entry("id_st_mixture", "id_st", blocks=b) for b in (3, 4, 6)]
    return out


def mallows():
    return [
        entry(
            "mallows_mixture",
            "mallows_mixture",
            288,
            norm_phi={"dist": "one_minus_sqrt_uniform"},
            omega={"dist": "uniform", "low": 0.0, "high": 0.5},
        ),
        entry("identity", "identity"),
        entry("antagonism", "antagonism"),
        entry("un_star", "un_star"),
        entry("st_star", "st_star", alpha=0.5),
    ]


def main() -> None:
    global _seed
    for name, build in (("standard", standard), ("extended", extended), ("mallows", mallows)):
        _seed = iter(range({"standard": 1000, "extended": 1000, "mallows": 3000}[name], 10**6))
        path = data_path("manifests", f"{name}.json")
        path.write_text(json.dumps(build(), indent=1) + "\n", encoding="utf-8")
    for name in SOURCES:
        write_election(surrogate_source(name), data_path("sources", f"{name}.txt"))


if __name__ == "__main__":
    main()
