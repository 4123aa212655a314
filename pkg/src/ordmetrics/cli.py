"""Command-line interface: ``ordmetrics <verb> ...``.

Every verb writes into ``--out`` (a directory) and echoes its effective
configuration there as ``run_config.json``. Exit codes: 0 success,
1 validation error, 2 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .core import Election, ElectionError, read_election, write_election
from .datasets import generate_dataset, load_manifest
from .distances import isomorphic_swap_distance
from .embedding import map_of_elections, map_of_preferences, pearson, triangle_transform, write_svg_scatter
from .indices import SOLVERS, finalize_profile, index_report
from .kemeny import BudgetExceeded, k_kemeny_exact, k_kemeny_profile, kemeny_profiles

log = logging.getLogger("ordmetrics")

COMPASS_TAGS = {"agreement": "identity", "diversity": "un_star", "polarization": "antagonism"}


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _read_csv(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _echo_config(out: Path, args: argparse.Namespace) -> None:
    out.mkdir(parents=True, exist_ok=True)
    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items()) if k != "func"}
    config["version"] = __version__
    (out / "run_config.json").write_text(json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_directory(path) -> list[tuple[str, str, Election]]:
    """Election files of a directory as ``(id, tag, election)``, sorted by id.

    Tags come from ``index.csv`` when present, else from the file name
    after the first underscore.
    """
    path = Path(path)
    if not path.is_dir():
        raise ElectionError(f"{path} is not a directory")
    tags = {}
    if (path / "index.csv").exists():
        tags = {row["id"]: row["tag"] for row in _read_csv(path / "index.csv")}
    out = []
    for f in sorted(path.glob("*.txt")):
        ident = f.stem
        tag = tags.get(ident, ident.split("_", 1)[1] if "_" in ident else "")
        out.append((ident, tag, read_election(f)))
    return out


def _pool_map(fn, tasks, threads: int):
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


# --- verbs -------------------------------------------------------------------------


def cmd_generate(args) -> None:
    entries = load_manifest(args.manifest)
    out = Path(args.out)
    _echo_config(out, args)
    items = generate_dataset(entries, source_dirs=args.sources or ())
    rows = []
    for item in items:
        write_election(item.election, out / f"{item.id}.txt")
        rows.append([item.id, item.tag, item.kind, json.dumps(item.params, sort_keys=True)])
    _write_csv(out / "index.csv", ["id", "tag", "kind", "params"], rows)
    log.info("wrote %d elections to %s", len(items), out)


def _report_task(task):
    ident, e, solver, seed = task
    return ident, index_report(e, solver, seed)


def cmd_indices(args) -> None:
    data = load_directory(args.input)
    out = Path(args.out)
    _echo_config(out, args)
    tasks = [(ident, e, args.solver, args.seed) for ident, _, e in data]
    reports = dict(_pool_map(_report_task, tasks, args.threads))
    side = out / "kappa"
    side.mkdir(exist_ok=True)
    rows = []
    for ident, tag, _ in data:
        r = reports[ident]
        a, d, p = r.as_floats()
        rows.append([ident, tag, repr(a), repr(d), repr(p)])
        _write_csv(side / f"{ident}.csv", ["k", "kappa"], list(enumerate(r.kappa_profile, start=1)))
    _write_csv(out / "indices.csv", ["id", "tag", "agreement", "diversity", "polarization"], rows)


def cmd_kkemeny(args) -> None:
    e = read_election(args.election)
    out = Path(args.out)
    _echo_config(out, args)
    k_max = args.k_max or e.n
    if args.solver == "exact":
        values = [k_kemeny_exact(e, k, budget=args.budget).distance for k in range(1, k_max + 1)]
    else:
        values = finalize_profile(e, k_kemeny_profile(e, args.solver, k_max=k_max, seed=args.seed, monotone=False))
    _write_csv(out / "kkemeny.csv", ["k", "distance", "solver"], [[k, v, args.solver] for k, v in enumerate(values, start=1)])
    print(" ".join(str(v) for v in values))


def _raw_profiles(task):
    ident, e, seed = task
    return ident, kemeny_profiles(e, seed=seed)


def difference_summary(rows) -> dict:
    """Max/mean/min of pairwise method differences over all (election, k) rows."""
    cols = {"greedy": 3, "local-search": 4, "combined": 5}
    out = {}
    for a, b in (("greedy", "combined"), ("greedy", "local-search"), ("local-search", "combined")):
        diff = np.array([r[cols[a]] - r[cols[b]] for r in rows], dtype=float)
        if len(diff):
            out[f"{a} - {b}"] = {"max": float(diff.max()), "mean": float(diff.mean()), "min": float(diff.min())}
    return out


def cmd_compare_kkemeny(args) -> None:
    data = load_directory(args.input)
    out = Path(args.out)
    _echo_config(out, args)
    profiles = dict(_pool_map(_raw_profiles, [(i, e, args.seed) for i, _, e in data], args.threads))
    rows = []
    for ident, tag, _ in data:
        p = profiles[ident]
        for k, (g, ls, c) in enumerate(zip(p["greedy"], p["local-search"], p["combined"]), start=1):
            rows.append([ident, tag, k, g, ls, c])
    _write_csv(out / "compare_kkemeny.csv", ["id", "tag", "k", "greedy", "local_search", "combined"], rows)
    (out / "summary.json").write_text(json.dumps(difference_summary(rows), indent=2) + "\n", encoding="utf-8")


def cmd_distance(args) -> None:
    e, f = read_election(args.first), read_election(args.second)
    out = Path(args.out)
    _echo_config(out, args)
    r = isomorphic_swap_distance(e, f, mode=args.mode, budget=args.budget, seed=args.seed)
    result = {
        "distance": r.distance,
        "exact": r.exact,
        "candidate_bijection": r.candidate_bijection.tolist(),
        "voter_bijection": r.voter_bijection.tolist(),
    }
    (out / "distance.json").write_text(json.dumps(result) + "\n", encoding="utf-8")
    print(r.distance)


def cmd_map(args) -> None:
    data = load_directory(args.input)
    out = Path(args.out)
    _echo_config(out, args)
    elections = [e for _, _, e in data]
    emb, dist = map_of_elections(elections, mode=args.mode, seed=args.seed, budget=args.budget, workers=args.threads)
    ids = [i for i, _, _ in data]
    tags = [t for _, t, _ in data]
    points = emb.points
    if args.triangle:
        anchor = {t: tags.index(t) for t in ("identity", "antagonism", "un_star") if t in tags}
        if len(anchor) < 3:
            raise ElectionError("triangle layout needs identity, antagonism and un_star elections")
        points = triangle_transform(points, anchor["identity"], anchor["antagonism"], anchor["un_star"])
    _write_csv(out / "map.csv", ["id", "tag", "x", "y"], [[i, t, repr(float(x)), repr(float(y))] for i, t, (x, y) in zip(ids, tags, points)])
    _write_csv(out / "distances.csv", ["id"] + ids, [[i] + row.tolist() for i, row in zip(ids, dist)])
    write_svg_scatter(points, tags, out / "map.svg")


def cmd_prefmap(args) -> None:
    e = read_election(args.election)
    out = Path(args.out)
    _echo_config(out, args)
    pm = map_of_preferences(e, seed=args.seed)
    rows = [
        [i, ">".join(str(int(c)) for c in vote), repr(float(x)), repr(float(y)), int(mult)]
        for i, (vote, (x, y), mult) in enumerate(zip(pm.votes, pm.embedding.points, pm.multiplicities))
    ]
    _write_csv(out / "prefmap.csv", ["id", "tag", "x", "y", "multiplicity"], rows)
    write_svg_scatter(pm.embedding.points, ["vote"] * len(rows), out / "prefmap.svg", radii=2 + np.sqrt(pm.multiplicities))


def _compass_task(task):
    e, anchor, mode, budget, seed = task
    return isomorphic_swap_distance(e, anchor, mode=mode, budget=budget, seed=seed).distance


def compass_distances(data, mode="heuristic", budget=10, seed=0, threads=1) -> dict[str, list[int]]:
    """Direct isomorphic swap distance from every election to the first ID, UN* and AN elections."""
    tags = [t for _, t, _ in data]
    out = {}
    for tag in COMPASS_TAGS.values():
        if tag not in tags:
            raise ElectionError(f"no election tagged {tag!r} to measure distances from")
        anchor = data[tags.index(tag)][2]
        out[tag] = _pool_map(_compass_task, [(e, anchor, mode, budget, seed) for _, _, e in data], threads)
    return out


def correlation_rows(indices_rows, data, distances) -> list[list]:
    ids = [i for i, _, _ in data]
    by_id = {row["id"]: row for row in indices_rows}
    if set(by_id) != set(ids):
        raise ElectionError("indices CSV and election directory list different ids")
    rows = []
    for index, tag in COMPASS_TAGS.items():
        values = [float(by_id[i][index]) for i in ids]
        rows.append([index, tag, repr(pearson(values, distances[tag]))])
    return rows


def cmd_correlate(args) -> None:
    indices_rows = _read_csv(Path(args.indices))
    data = load_directory(args.elections)
    out = Path(args.out)
    _echo_config(out, args)
    dist = compass_distances(data, args.mode, args.budget, args.seed, args.threads)
    ids = [i for i, _, _ in data]
    _write_csv(
        out / "compass_distances.csv",
        ["id"] + list(dist),
        [[i] + [dist[t][n] for t in dist] for n, i in enumerate(ids)],
    )
    rows = correlation_rows(indices_rows, data, dist)
    _write_csv(out / "correlation.csv", ["index", "compass", "pearson"], rows)
    for row in rows:
        print(",".join(str(x) for x in row))


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--solver", choices=SOLVERS, default="best-of")
    common.add_argument("--mode", choices=("exact", "heuristic"), default="heuristic")
    common.add_argument("--budget", type=int, default=10, help="restarts (heuristic distance) or partition budget (exact k-Kemeny)")
    common.add_argument("--out", type=Path, default=Path("out"))
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ordmetrics", description="Agreement, diversity and polarization of ordinal elections.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="sample a dataset from a manifest")
    p.add_argument("manifest", help="manifest path or one of: standard, extended, mallows")
    p.add_argument("--sources", action="append", help="directory with real source files (irish.soi, ...)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("indices", parents=[common], help="agreement, diversity and polarization per election")
    p.add_argument("input")
    p.set_defaults(func=cmd_indices)

    p = sub.add_parser("kkemeny", parents=[common], help="k-Kemeny distances of one election")
    p.add_argument("election")
    p.add_argument("--k-max", type=int, default=None)
    p.set_defaults(func=cmd_kkemeny)

    p = sub.add_parser("compare-kkemeny", parents=[common], help="greedy vs local search vs combined")
    p.add_argument("input")
    p.set_defaults(func=cmd_compare_kkemeny)

    p = sub.add_parser("distance", parents=[common], help="isomorphic swap distance of two elections")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("map", parents=[common], help="map of elections")
    p.add_argument("input")
    p.add_argument("--triangle", action="store_true", help="normalize with the ID/AN/UN* triangle transform")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("prefmap", parents=[common], help="map of preferences of one election")
    p.add_argument("election")
    p.set_defaults(func=cmd_prefmap)

    p = sub.add_parser("correlate", parents=[common], help="Pearson correlation of indices with compass distances")
    p.add_argument("indices", help="indices.csv written by the indices verb")
    p.add_argument("elections", help="directory of the same elections")
    p.set_defaults(func=cmd_correlate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    args.threads = max(1, args.threads)
    try:
        args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2
    except (ElectionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
