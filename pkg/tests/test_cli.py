import json

import pytest

from conftest import BT3, EX1, EX3, ineq
from projcone.cli import ScanJob, _burnside_orbits, main, run_scan
from projcone.core import LogProjectionVector


def write(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


@pytest.fixture
def files(tmp_path):
    return {
        "bt3": write(tmp_path, "bt3.json", BT3.to_json()),
        "ex1": write(tmp_path, "ex1.json", EX1.to_json()),
        "ex3": write(tmp_path, "ex3.json", EX3.to_json()),
        "nf": write(tmp_path, "nf.json", ineq(2, ("1", 1), ("12", -1)).to_json()),
        "box_pi": write(tmp_path, "pi1.json", LogProjectionVector.from_vector(2, [1, 2, 3]).to_json()),
        "bad_pi": write(tmp_path, "pi2.json", LogProjectionVector.from_vector(2, [0, 0, 1]).to_json()),
        "dir": tmp_path,
    }


def test_classify_exit_codes(files, capsys):
    assert main(["classify", files["bt3"]]) == 0
    assert capsys.readouterr().out.startswith("BT")
    assert main(["classify", files["ex1"]]) == 10
    assert capsys.readouterr().out.strip() == "NC\\BT"
    assert main(["classify", files["nf"]]) == 20


def test_refute_writes_reports(files, capsys):
    out = str(files["dir"] / "rep.json")
    assert main(["refute", files["ex1"], "-o", out]) == 0
    rep = json.loads(open(out).read())
    assert rep["method"] == "skeleton" and rep["lhs"] == "6859/1"
    assert capsys.readouterr().out.strip() == "skeleton: 6859 < 11881"
    assert main(["refute", files["ex3"]]) == 0
    assert json.loads(capsys.readouterr().out)["method"] == "hybrid"
    assert main(["refute", files["bt3"]]) == 30
    assert main(["refute", files["ex1"], "--methods", "unionbox", "--tmax", "1", "-o", out]) == 0
    assert json.loads(open(out).read())["method"] == "unionbox"


def test_mcap_env_override(files, monkeypatch, capsys):
    monkeypatch.setenv("PROJCONE_MCAP", "4")
    assert main(["refute", files["ex1"], "--methods", "skeleton"]) == 30
    monkeypatch.setenv("PROJCONE_MCAP", "x")
    assert main(["refute", files["ex1"]]) == 2


def test_volume_and_evaluate(files, capsys):
    out = str(files["dir"] / "rep.json")
    main(["refute", files["ex1"], "-o", out])
    obj = write(files["dir"], "obj.json", json.loads(open(out).read())["witness"])
    capsys.readouterr()
    assert main(["volume", obj, "--subset", "1,2,3"]) == 0
    assert capsys.readouterr().out.strip() == "109"
    assert main(["evaluate", files["ex1"], obj]) == 0
    assert capsys.readouterr().out.strip() == "violated 6859/11881"
    cube = write(files["dir"], "cube.json", {"n": 3, "boxes": [{"corner": ["0", "0", "0"], "sides": ["1", "1", "1"]}]})
    main(["volume", cube, "--subset", "2"])
    assert capsys.readouterr().out.strip() == "1"


def test_membership_and_flower_pi(files, capsys):
    assert main(["membership", files["box_pi"]]) == 0
    flower = write(files["dir"], "fl.json", json.loads(capsys.readouterr().out))
    assert main(["flower-pi", flower]) == 0
    assert json.loads(capsys.readouterr().out)["entries"] == {"1": "1/1", "2": "2/1", "1,2": "3/1"}
    assert main(["membership", files["bad_pi"]]) == 10
    assert json.loads(capsys.readouterr().out)["text"] == "x1 + x2 >= x12"


def test_schema_errors(files, capsys):
    bad = write(files["dir"], "bad.json", {"n": 2, "terms": [{"subset": [3], "coeff": "1"}]})
    assert main(["classify", bad]) == 2
    assert "terms[0].subset" in capsys.readouterr().err
    broken = files["dir"] / "broken.json"
    broken.write_text("{not json")
    assert main(["evaluate", str(broken), files["ex1"]]) == 2
    assert main(["membership", files["ex1"]]) == 2
    assert main(["scan", "--n", "5", "--c", "1"]) == 2


def test_small_scans():
    ledger = run_scan(ScanJob(2, 1))
    assert ledger["classes"]["NC\\BT"] == 0 and ledger["classes"]["BT"] > 0
    ledger = run_scan(ScanJob(3, 2))
    assert ledger["classes"]["NC\\BT"] == 0
    total = ledger["balanced_instances"] + ledger["unbalanced_instances"]
    assert total == _burnside_orbits(ScanJob(3, 2))


def test_burnside_matches_brute_force():
    import itertools

    from projcone.core import axis_permutations, enumerate_subsets

    subs = enumerate_subsets(2)
    seen = set()
    for v in itertools.product(range(-1, 2), repeat=3):
        if any(v):
            imgs = []
            for p in axis_permutations(2):
                img = dict(zip([frozenset(p[x] for x in s) for s in subs], v))
                imgs.append(tuple(img[s] for s in subs))
            seen.add(min(imgs))
    assert _burnside_orbits(ScanJob(2, 1)) == len(seen)
    no_dedup = run_scan(ScanJob(2, 1, dedup=False))
    assert no_dedup["balanced_instances"] + no_dedup["unbalanced_instances"] == 26


def test_scan_resume_and_workers_are_deterministic(tmp_path, monkeypatch):
    import projcone.cli as cli

    monkeypatch.setattr(cli, "CHECKPOINT_EVERY", 100)
    job = ScanJob(3, 2)
    full = run_scan(job)
    ckpt = tmp_path / "ck.json"
    partial = run_scan(job, ckpt, stop_after=250)
    assert not partial["complete"] and json.loads(ckpt.read_text())["next_index"] == 250
    resumed = run_scan(job, ckpt)
    assert json.dumps(resumed, sort_keys=True) == json.dumps(full, sort_keys=True)
    assert json.dumps(run_scan(job, workers=2), sort_keys=True) == json.dumps(full, sort_keys=True)


def test_scan_cli_writes_ledger(tmp_path, capsys):
    out = tmp_path / "ledger.json"
    assert main(["scan", "--n", "2", "--c", "1", "-o", str(out)]) == 0
    first = out.read_text()
    main(["scan", "--n", "2", "--c", "1", "-o", str(out)])
    assert out.read_text() == first
