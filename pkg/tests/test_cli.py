import csv
import io
import json

import pytest

from genhilbert import cli, harness

LEB = '{"kind": "density", "p": 0}'
ATOM = '{"kind": "atomic", "atoms": [[0.5, 1.0]]}'


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_entries_hilbert_matrix(tmp_path, capsys):
    path = tmp_path / "lebesgue.json"
    path.write_text(LEB)
    code, out, _ = run(["entries", "--measure", str(path), "--alpha", "1", "--n", "5", "--k", "5"],
                       capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 36
    for row in rows:
        n, k = int(row["n"]), int(row["k"])
        assert float(row["value"]) == pytest.approx(1 / (n + k + 1), rel=1e-15)


def test_gamma_table(capsys):
    code, out, _ = run(["gamma-table", "--alpha", "2", "--n", "3"], capsys)
    assert code == 0
    assert [float(r["c_n"]) for r in csv.DictReader(io.StringIO(out))] == [1, 2, 3, 4]


def test_floats_use_17_digits(capsys):
    code, out, _ = run(["gamma-table", "--alpha", "0.5", "--n", "2", "--format", "json"], capsys)
    assert "0.375" in out and json.loads(out)["values"][1] == 0.5


def test_apply_csv_columns(capsys):
    code, out, _ = run(["apply", "--measure-json", ATOM, "--alpha", "2", "--family", "constant_one",
                        "--n-out", "200", "--z", "0.5", "--z", "0.3+0.4j"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["z_re", "z_im", "H_value_re", "H_value_im", "I_value_re",
                             "I_value_im", "gap"]
    assert float(rows[0]["H_value_re"]) == pytest.approx(16 / 9)
    assert all(float(r["gap"]) < 1e-12 for r in rows)


def test_integral_and_pairing(capsys):
    code, out, _ = run(["integral", "--measure-json", LEB, "--alpha", "2", "--family",
                        "constant_one", "--z", "0.5", "--order", "1"], capsys)
    assert code == 0 and float(out.splitlines()[1].split(",")[2]) == pytest.approx(4.0)
    code, out, _ = run(["pairing", "--measure-json", ATOM, "--alpha", "2", "--coeffs", "[0, 1]",
                        "--g-coeffs", "[0, 1]", "--r", "0.8"], capsys)
    res = json.loads(out)
    assert code == 0 and res["rhs"][0] == pytest.approx(0.16)
    assert res["lhs"][0] == pytest.approx(0.16, abs=1e-9)


def test_norms_and_classify(capsys):
    code, out, _ = run(["norms", "--family", "bergman_peak", "--param", "0.9", "--alpha", "2",
                        "--bergman"], capsys)
    assert code == 0 and json.loads(out)["bergman_a1"] == pytest.approx(1.0, abs=1e-6)
    code, out, _ = run(["classify", "--measure-json", LEB, "--s", "1"], capsys)
    rep = json.loads(out)
    assert rep["constant_estimate"] == pytest.approx(1.0) and not rep["vanishing"]
    code, out, _ = run(["classify", "--measure-json", LEB, "--s", "1", "--csv"], capsys)
    assert out.splitlines()[0] == "t,tail,ratio" and len(out.splitlines()) == 41


def test_verify_exit_zero_for_unbounded_confirmed(tmp_path, capsys):
    path = tmp_path / "lebesgue.json"
    path.write_text(LEB)
    code, out, _ = run(["verify", "T2.1", "--measure", str(path), "--alpha", "2", "--beta", "0.5"],
                       capsys)
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "unbounded" and rep["consistent"]


def test_verify_other_modes(capsys):
    code, out, _ = run(["verify", "T2.2", "--mode", "compact", "--measure-json",
                        '{"kind": "density", "p": 1, "q": -2}', "--alpha", "2"], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "compact"
    code, out, _ = run(["verify", "Qp", "--measure-json", '{"kind": "density", "p": -0.5}',
                        "--alpha", "0.5", "--format", "csv"], capsys)
    assert code == 0 and "verdict,bounded" in out
    code, out, _ = run(["verify", "T3.1", "--measure-json", ATOM, "--alpha", "2", "--beta", "1.5",
                        "--gamma", "1"], capsys)
    assert code == 0


def test_verify_inconsistent_exit_two(monkeypatch, capsys):
    real = harness.run_boundedness_harness

    def contradicting(*args, **kwargs):
        rep = real(*args, **kwargs)
        rep.consistent = False
        return rep

    monkeypatch.setattr(harness, "run_boundedness_harness", contradicting)
    code, _, _ = run(["verify", "T2.1", "--measure-json", LEB, "--alpha", "2", "--beta", "0.5"],
                     capsys)
    assert code == 2


def test_byte_identical_reports(tmp_path, capsys):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        assert cli.main(["verify", "T2.2", "--measure-json", '{"kind": "density", "p": 1, "q": -1}',
                         "--alpha", "2", "--beta", "1", "--no-timing", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


@pytest.mark.parametrize("argv, prefix", [
    (["verify", "T9.9", "--measure-json", LEB, "--alpha", "2", "--beta", "0.5"], "usage error"),
    (["entries", "--measure-json", "{not json", "--alpha", "1", "--n", "2", "--k", "2"],
     "invalid measure"),
    (["entries", "--measure-json", '{"kind": "density", "p": -2}', "--alpha", "1", "--n", "2",
      "--k", "2"], "invalid measure"),
    (["verify", "T2.1", "--measure-json", LEB, "--alpha", "1.5", "--beta", "0.5"], "out of range"),
    (["entries", "--measure-json", LEB, "--alpha", "-1", "--n", "2", "--k", "2"],
     "invalid parameters"),
    (["entries", "--alpha", "1", "--n", "2", "--k", "2"], "usage error"),
    (["frobnicate"], "usage error"),
    ([], "usage error"),
])
def test_errors_exit_one(argv, prefix, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1
    assert err.startswith(prefix)


def test_out_file(tmp_path, capsys):
    path = tmp_path / "g.csv"
    assert cli.main(["gamma-table", "--alpha", "1", "--n", "2", "--out", str(path)]) == 0
    assert path.read_text() == "n,c_n\n0,1\n1,1\n2,1\n"
    assert capsys.readouterr().out == ""
