import csv
import io
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from folnerkit.cli import fmt, main, split_ops, write_atomic


def read_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_profile_shift(capsys):
    code, out, err = run_cli(capsys, "profile", "--op", "zoo:shift", "--dims", "1,4,100", "--p", "2")
    assert code == 0
    rows = read_csv(out)
    assert [float(r["ratio2"]) for r in rows] == [1.0, 0.5, 0.1]
    assert [r["window_len"] for r in rows] == ["1", "4", "100"]
    assert out.startswith("# command=profile\n# spec_sha256=")
    assert err.startswith("profile spec=") and err.strip().endswith("headline 0.10000000000000001")


def test_verify_cuntz_family(capsys):
    code, out, err = run_cli(capsys, "verify", "--op", "zoo:cuntz-family:2", "--window", "64")
    assert code == 0
    assert "max deviation 0" in err
    assert {r["relation"]: r["max_deviation"] for r in read_csv(out)} == {"range_sum": "0", "orthogonality": "0"}


def test_verify_selfadjoint(capsys):
    code, _, err = run_cli(capsys, "verify", "--op", "zoo:am:1.0", "--window", "41")
    assert code == 0 and "max deviation" in err


def test_szego_toeplitz(capsys, tmp_path):
    hist = tmp_path / "hist.csv"
    code, out, _ = run_cli(capsys, "szego", "--op", "zoo:toeplitz:1,0,1", "--dims", "64,256,1024",
                           "--ref", "symbol", "--hist", str(hist), "--bins", "50")
    assert code == 0
    rows = read_csv(out)
    ks = [float(r["ks_dist"]) for r in rows]
    assert ks[0] > ks[1] > ks[2] and ks[2] <= 0.02
    assert list(rows[0]) == ["d", "ks_dist"] + [f"m{k}_err" for k in range(1, 9)] + [
        f"trace_resid_{k}" for k in range(1, 9)]
    h = read_csv(hist.read_text())
    assert len(h) == 50 and list(h[0]) == ["bin_left", "bin_right", "mass"]
    assert sum(float(r["mass"]) for r in h) == pytest.approx(1.0)


def test_szego_oracle_json(capsys):
    code, out, _ = run_cli(capsys, "szego", "--op", "zoo:am:1.0", "--dims", "32,64", "--ref", "oracle:256",
                           "--kmax", "2", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["columns"][:2] == ["d", "ks_dist"] and len(doc["rows"]) == 2
    assert doc["in_symbol_range"] == [None, None]


def test_trace_command(capsys):
    code, out, _ = run_cli(capsys, "trace", "--op", "zoo:toeplitz:1,0,1", "--power", "2", "--dims", "10,100")
    assert code == 0
    assert [float(r["trace_re"]) for r in read_csv(out)] == [1.9, 1.99]


def test_search_json_report(capsys, tmp_path):
    out_path = tmp_path / "search.json"
    code, out, _ = run_cli(capsys, "search", "--ops", "zoo:cuntz:2:0,zoo:cuntz:2:1", "--size", "32",
                           "--window", "128", "--strategy", "greedy", "--out", str(out_path))
    assert code == 0 and out.startswith("search spec=")
    doc = json.loads(out_path.read_text())
    for key in ("strategy", "budget", "best_window", "best_ratio", "decay_flag", "trace"):
        assert key in doc
    assert sum(n for _, n in doc["best_window"]) == 32
    assert doc["best_ratio"] ** 2 >= 0.5 - 1e-12


def test_search_probe_schedule(capsys):
    code, out, _ = run_cli(capsys, "search", "--op", "zoo:shift", "--dims", "16,32,64,128,256,512,1024")
    assert code == 0
    doc = json.loads(out)
    assert doc["decay_flag"] == "decaying" and len(doc["trace"]) == 7


def test_nrange_polygon_and_probe(capsys):
    code, out, _ = run_cli(capsys, "nrange", "--op", "zoo:toeplitz:1,0,1", "--size", "8", "--angles", "16")
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 16
    assert max(abs(float(r["point_im"])) for r in rows) <= 1e-12  # Hermitian: W is a segment
    code, out, _ = run_cli(capsys, "nrange", "--op", "zoo:diag:periodic:0,1", "--dims", "8",
                           "--samples", "3", "--angles", "24")
    assert code == 0
    assert float(read_csv(out)[0]["max_distance"]) <= 1e-12


def test_ops_splitting():
    assert split_ops("zoo:toeplitz:1,0,1,zoo:shift") == ["zoo:toeplitz:1,0,1", "zoo:shift"]
    assert split_ops('{"op":"sum","args":[{"op":"shift"},{"op":"shift"}]},zoo:am:1') == [
        '{"op":"sum","args":[{"op":"shift"},{"op":"shift"}]}', "zoo:am:1"]
    assert split_ops('{"op":"diagonal","rule":"x,zoo:"},zoo:shift') == [
        '{"op":"diagonal","rule":"x,zoo:"}', "zoo:shift"]
    assert split_ops("zoo:diag:periodic:0,1,@ops.json") == ["zoo:diag:periodic:0,1", "@ops.json"]


def test_operator_from_file(capsys, tmp_path):
    f = tmp_path / "op.json"
    f.write_text('{"op":"toeplitz","c":[1,0,1]}')
    code, out, _ = run_cli(capsys, "profile", "--op", f"@{f}", "--dims", "10", "--p", "2")
    assert code == 0 and float(read_csv(out)[0]["ratio2"]) == pytest.approx(np.sqrt(0.2))


def test_malformed_dsl_exit_2(capsys):
    code, _, err = run_cli(capsys, "profile", "--op", '{"op":"sum","args":[{"op":"shfit"}]}', "--dims", "4")
    assert code == 2
    assert "/args/0/op" in err


def test_even_toeplitz_needs_c0_index(capsys):
    code, _, _ = run_cli(capsys, "profile", "--op", "zoo:toeplitz:1,1", "--dims", "4")
    assert code == 2
    code, out, _ = run_cli(capsys, "profile", "--op", "zoo:toeplitz:1,1", "--c0-index", "0", "--dims", "4",
                           "--p", "2")
    assert code == 0 and float(read_csv(out)[0]["ratio2"]) == 0.5


@pytest.mark.parametrize(
    "argv",
    [
        ["profile", "--op", "zoo:shift"],
        ["profile", "--op", "zoo:shift", "--dims", "4,2"],
        ["szego", "--op", "zoo:shift", "--dims", "4"],
        ["szego", "--op", "zoo:toeplitz:1,0,1", "--dims", "4", "--ref", "bogus"],
        ["verify", "--op", "zoo:cuntz:2:0", "--window", "4"],
        ["search", "--op", "zoo:shift", "--size", "4", "--budget", "0"],
        ["profile", "--op", "/nonexistent/op.json", "--dims", "4"],
        ["profile", "--dims", "4"],
    ],
)
def test_validation_errors_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["profile", "--p", "3"])
    assert exc.value.code == 2


def test_size_cap_exit_3(capsys, monkeypatch):
    monkeypatch.setenv("FOLNER_SIZE_CAP", "10")
    code, _, err = run_cli(capsys, "szego", "--op", "zoo:toeplitz:1,0,1", "--dims", "11", "--kmax", "2")
    assert code == 3 and "FOLNER_SIZE_CAP" in err


def test_outputs_are_byte_identical(capsys, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["profile", "--ops", "zoo:cuntz-family:2", "--dims", "10,33,100", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    j = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in j:
        assert main(["search", "--ops", "zoo:cuntz-family:2", "--size", "20", "--strategy", "swap-local",
                     "--seed", "3", "--out", str(p)]) == 0
    assert j[0].read_bytes() == j[1].read_bytes()
    capsys.readouterr()


def test_atomic_write_leaves_no_temp_files(tmp_path):
    target = tmp_path / "sub" / "x.csv"
    write_atomic(str(target), "a,b\n")
    write_atomic(str(target), "c,d\n")
    assert target.read_text() == "c,d\n"
    assert os.listdir(target.parent) == ["x.csv"]


def test_fmt_full_precision():
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(1 / 3)) == 1 / 3
    assert fmt(7) == "7"
    assert fmt(1 + 2j) == "1+2j"


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "folnerkit", "verify", "--op", "zoo:cuntz-family:3", "--window", "27"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "max deviation 0" in proc.stderr
