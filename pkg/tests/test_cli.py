import csv
import io
import json

import pytest

from stdperm import cli
from stdperm.errors import InternalInvariant


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr()


def test_sample_smoke_and_reproducible(capsys):
    code, first = run(capsys, "sample", "--dist", "uniform:6", "--n", "50", "--seed", "1")
    assert code == 0
    body = [l for l in first.out.splitlines() if not l.startswith("#")]
    assert len(body) == 1 and len(body[0].split("\t")[1].split()) == 50
    assert run(capsys, "sample", "--dist", "uniform:6", "--n", "50", "--seed", "1")[1].out == first.out


def test_sample_files(tmp_path, capsys):
    seq, perm = tmp_path / "s.txt", tmp_path / "p.txt"
    code, _ = run(capsys, "sample", "--dist", "geom:0.7", "--n", "1000", "--reps", "3",
                  "--seq-out", str(seq), "--perm-out", str(perm))
    assert code == 0
    assert len(seq.read_text().splitlines()) == 3 == len(perm.read_text().splitlines())
    first = perm.read_text()
    run(capsys, "sample", "--dist", "geom:0.7", "--n", "1000", "--reps", "3",
        "--seq-out", str(seq), "--perm-out", str(perm))
    assert perm.read_text() == first


def test_exact_ck_csv(capsys):
    code, out = run(capsys, "exact", "ck", "--dist", "uniform:2", "--n", "100", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.out)))
    assert [r["k"] for r in rows] == ["1", "2", "3", "4", "5"]
    assert float(rows[0]["float"]) == pytest.approx(2.0)


def test_exact_tail_beyond_n_is_zero(capsys):
    code, out = run(capsys, "exact", "tail", "--pair", "0,1:3", "--n", "5", "--format", "json")
    assert code == 0
    doc = json.loads(out.out)
    assert doc["records"][0]["tail"] == "0" or doc["records"][0]["tail"] == 0
    assert len(doc["config_hash"]) == 64


def test_exact_query_file(tmp_path, capsys):
    q = tmp_path / "q.txt"
    q.write_text("# two necklaces\n0 1\n0,1 1\n")
    code, out = run(capsys, "exact", "tail", "--query", str(q), "--n", "4", "--format", "csv")
    assert code == 0
    assert list(csv.DictReader(io.StringIO(out.out)))[0]["tail"] == "1/8"


def test_non_primitive_exit_2(capsys):
    code, out = run(capsys, "exact", "tail", "--pair", "1,1:1", "--n", "10")
    assert code == 2 and "power" in out.err


def test_usage_errors_exit_2(capsys):
    assert run(capsys, "nope")[0] == 2
    assert run(capsys, "sample", "--n", "-3")[0] == 2
    assert run(capsys, "sample", "--dist", "geom:3")[0] == 2


def test_surgery_round_trip(capsys):
    code, out = run(capsys, "surgery", "insert", "--g", "6 1 5 3 3 1 2", "--word", "4,2,7,2,5,4",
                    "--format", "json")
    rec = json.loads(out.out)["records"][0]
    assert code == 0 and rec["output"] == "6 1 7 5 5 3 3 2 4 1 4 2 2"
    assert (rec["D_before"], rec["D_after"]) == (0, 1)
    code, out = run(capsys, "surgery", "remove", "--g", rec["output"], "--word", "4,2,7,2,5,4",
                    "--format", "json")
    assert json.loads(out.out)["records"][0]["output"] == "6 1 5 3 3 1 2"


def test_census(capsys):
    code, out = run(capsys, "census", "--g", "6,1,5,3,3,1,2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out.out)))
    assert {r["necklace"]: r["count"] for r in rows} == {"1,1,6,2,5": "1", "3": "2"}


def test_verify_pass_and_fail_codes(capsys):
    code, out = run(capsys, "verify", "small-fixed", "--dist", "uniform:2", "--n", "500",
                    "--reps", "3000", "--seed", "7", "--kmax", "2")
    assert code == 0 and "# overall PASS" in out.out and "# hash" in out.out
    code, _ = run(capsys, "verify", "small-spreading", "--q", "2", "--n", "500", "--reps", "3000",
                  "--kmax", "1")
    assert code == 1


def test_verify_csv_dump(tmp_path, capsys):
    path = tmp_path / "raw.csv"
    run(capsys, "verify", "small-fixed", "--n", "100", "--reps", "200", "--kmax", "2",
        "--csv", str(path))
    header = path.read_text().splitlines()[0]
    assert header.startswith("rep,n,K,c1,c2,lambda1")


def test_internal_invariant_exit_3(capsys, monkeypatch):
    def boom(args, out):
        raise InternalInvariant("broken")
    monkeypatch.setitem(cli.HANDLERS, "census", boom)
    assert run(capsys, "census", "--g", "1 2")[0] == 3


def test_pd_and_clt_commands(capsys):
    code, out = run(capsys, "pd", "--reps", "3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out.out)))
    assert code == 0 and len(rows) == 3 and "m2" in rows[0]
    code, out = run(capsys, "clt", "--ns", "100,200", "--reps", "50", "--format", "csv")
    assert code == 0 and len(out.out.splitlines()) == 101


def test_config_canonical():
    cfg = cli.RunConfig("sample", {"b": 2, "a": 1})
    assert cfg.canonical() == '{"command":"sample","options":{"a":1,"b":2}}'
