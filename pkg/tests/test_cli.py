from __future__ import annotations

import csv
import json

import pytest

from ordmetrics.cli import main
from ordmetrics.core import write_election
from ordmetrics.cultures import antagonism_election, compass, identity_election, mixture


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def compass_dir(tmp_path):
    d = tmp_path / "in"
    d.mkdir()
    write_election(identity_election(4, 12), d / "000_identity.txt")
    write_election(antagonism_election(4, 12), d / "001_antagonism.txt")
    write_election(compass("un_star", 4, 12, seed=0), d / "002_un_star.txt")
    write_election(mixture("an_un", 4, 12, seed=1, share=1 / 3), d / "003_an_un.txt")
    return d


def test_generate_deterministic(tmp_path):
    manifest = tmp_path / "m.json"
    manifest.write_text(
        json.dumps(
            [
                {"kind": "ic", "params": {}, "m": 4, "n": 6, "seed": 1, "count": 2, "tag": "ic"},
                {"kind": "urn", "params": {"alpha": {"dist": "gamma", "shape": 0.8}}, "m": 4, "n": 6, "seed": 2, "count": 1, "tag": "urn"},
            ]
        )
    )
    for run in ("a", "b"):
        assert main(["generate", str(manifest), "--out", str(tmp_path / run), "--threads", "1"]) == 0
    files = sorted(p.name for p in (tmp_path / "a").glob("*.txt"))
    assert files == ["000_ic.txt", "001_ic.txt", "002_urn.txt"]
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    index = rows(tmp_path / "a" / "index.csv")
    assert "alpha" in json.loads(index[2]["params"])
    assert json.loads((tmp_path / "a" / "run_config.json").read_text())["command"] == "generate"


def test_generate_bad_manifest(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[{}]")
    assert main(["generate", str(bad), "--out", str(tmp_path / "o")]) == 1


def test_indices(compass_dir, tmp_path):
    out = tmp_path / "idx"
    assert main(["indices", str(compass_dir), "--out", str(out), "--threads", "1"]) == 0
    table = {r["id"]: r for r in rows(out / "indices.csv")}
    assert [float(table["000_identity"][k]) for k in ("agreement", "diversity", "polarization")] == [1, 0, 0]
    assert [float(table["001_antagonism"][k]) for k in ("agreement", "diversity", "polarization")] == [0, 0.5, 1]
    assert (out / "kappa" / "001_antagonism.csv").exists()
    first = (out / "indices.csv").read_bytes()
    assert main(["indices", str(compass_dir), "--out", str(out), "--threads", "1"]) == 0
    assert (out / "indices.csv").read_bytes() == first


def test_indices_empty_directory(tmp_path):
    (tmp_path / "empty").mkdir()
    assert main(["indices", str(tmp_path / "empty"), "--out", str(tmp_path / "o"), "--threads", "1"]) == 0
    assert (tmp_path / "o" / "indices.csv").read_text() == "id,tag,agreement,diversity,polarization\n"


def test_indices_unreadable(tmp_path):
    d = tmp_path / "in"
    d.mkdir()
    (d / "000_x.txt").write_text("garbage\n")
    assert main(["indices", str(d), "--out", str(tmp_path / "o"), "--threads", "1"]) == 1


def test_compare_kkemeny(compass_dir, tmp_path):
    out = tmp_path / "cmp"
    assert main(["compare-kkemeny", str(compass_dir), "--out", str(out), "--threads", "1"]) == 0
    table = rows(out / "compare_kkemeny.csv")
    assert all(int(r["combined"]) <= int(r["greedy"]) for r in table)
    assert all(int(r["greedy"]) == 0 for r in table if r["id"] == "000_identity")
    summary = json.loads((out / "summary.json").read_text())
    assert summary["greedy - combined"]["min"] >= 0


def test_kkemeny_and_budget(compass_dir, tmp_path):
    target = str(compass_dir / "001_antagonism.txt")
    assert main(["kkemeny", target, "--k-max", "2", "--out", str(tmp_path / "k")]) == 0
    assert [r["distance"] for r in rows(tmp_path / "k" / "kkemeny.csv")] == ["36", "0"]
    code = main(["kkemeny", target, "--solver", "exact", "--k-max", "2", "--budget", "10", "--out", str(tmp_path / "x")])
    assert code == 2


def test_distance(compass_dir, tmp_path, capsys):
    a, b = compass_dir / "000_identity.txt", compass_dir / "001_antagonism.txt"
    assert main(["distance", str(a), str(b), "--mode", "exact", "--out", str(tmp_path / "d")]) == 0
    assert capsys.readouterr().out.strip() == "36"
    assert json.loads((tmp_path / "d" / "distance.json").read_text())["exact"] is True


def test_map_and_prefmap(compass_dir, tmp_path):
    out = tmp_path / "map"
    assert main(["map", str(compass_dir), "--triangle", "--out", str(out), "--threads", "1"]) == 0
    table = rows(out / "map.csv")
    assert [r["tag"] for r in table] == ["identity", "antagonism", "un_star", "an_un"]
    assert (out / "map.svg").exists()
    pref = tmp_path / "pref"
    assert main(["prefmap", str(compass_dir / "001_antagonism.txt"), "--out", str(pref)]) == 0
    assert [int(r["multiplicity"]) for r in rows(pref / "prefmap.csv")] == [6, 6]


def test_correlate(compass_dir, tmp_path, capsys):
    assert main(["indices", str(compass_dir), "--out", str(tmp_path / "idx"), "--threads", "1"]) == 0
    out = tmp_path / "corr"
    args = ["correlate", str(tmp_path / "idx" / "indices.csv"), str(compass_dir), "--out", str(out), "--threads", "1"]
    assert main(args) == 0
    table = rows(out / "correlation.csv")
    assert [r["index"] for r in table] == ["agreement", "diversity", "polarization"]
    assert all(-1 <= float(r["pearson"]) <= 1 for r in table)
    first = (out / "correlation.csv").read_bytes()
    assert main(args) == 0
    assert (out / "correlation.csv").read_bytes() == first


def test_correlate_two_elections(tmp_path):
    d = tmp_path / "in"
    d.mkdir()
    write_election(identity_election(4, 12), d / "000_identity.txt")
    write_election(antagonism_election(4, 12), d / "001_antagonism.txt")
    with open(d / "index.csv", "w") as fh:
        fh.write("id,tag,kind,params\n000_identity,identity,identity,{}\n001_antagonism,antagonism,antagonism,{}\n")
    assert main(["indices", str(d), "--out", str(tmp_path / "idx"), "--threads", "1"]) == 0
    from ordmetrics.cli import correlation_rows, load_directory

    data = load_directory(d)
    # with two elections every coefficient is +-1; no UN* is present, so its distances are stand-ins
    dist = {"identity": [0, 36], "un_star": [36, 0], "antagonism": [36, 0]}
    table = correlation_rows(rows(tmp_path / "idx" / "indices.csv"), data, dist)
    assert [round(float(r[2]), 9) for r in table] == [-1.0, -1.0, -1.0]


def test_correlate_missing_compass(tmp_path):
    d = tmp_path / "in"
    d.mkdir()
    write_election(identity_election(3, 4), d / "000_identity.txt")
    (tmp_path / "i.csv").write_text("id,tag,agreement,diversity,polarization\n000_identity,identity,1,0,0\n")
    assert main(["correlate", str(tmp_path / "i.csv"), str(d), "--out", str(tmp_path / "o")]) == 1
