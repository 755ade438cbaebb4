import json
import subprocess
import sys

import pytest

from fareyspin import cli, spinchain
from fareyspin.monoid import psi_oracle


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_phi_single(capsys):
    code, out, _ = run(capsys, "phi", "--n", "3")
    assert code == 0
    assert out.splitlines() == ["N,phi", "3,2"]


@pytest.mark.parametrize("method", ["main", "divisor", "boca", "oracle"])
def test_phi_methods_agree(capsys, method):
    _, out, _ = run(capsys, "phi", "--n-range", "3:40", "--method", method)
    _, ref, _ = run(capsys, "phi", "--n-range", "3:40")
    assert out == ref


def test_n_wins_over_range(capsys):
    _, out, _ = run(capsys, "phi", "--n", "4", "--n-range", "3:10")
    assert out.splitlines()[1:] == ["4,6"]


def test_upsilon_row(capsys):
    _, out, _ = run(capsys, "upsilon", "--x", "7")
    assert out.splitlines() == ["X,upsilon,upsilon_cut,key_lemma_delta", "7,0,0,0"]
    _, out, _ = run(capsys, "upsilon", "--x-range", "12:16")
    # 13: m = +-1 with lam*mu = 3, m = +-3 with lam*mu = 1
    assert out.splitlines()[1:] == ["12,6,3,0", "13,6,3,0", "14,0,0,0", "15,0,0,0", "16,7,2,3"]


def test_psi_rows(capsys):
    _, out, _ = run(capsys, "psi", "--n-range", "3:5")
    lines = out.splitlines()
    assert lines[0] == "N,psi,psi_main,relative_error"
    assert [l.split(",")[:2] for l in lines[1:]] == [[str(N), str(psi_oracle(N))] for N in (3, 4, 5)]


def test_json_matches_csv(capsys):
    _, csv_out, _ = run(capsys, "psi", "--n-range", "3:20")
    _, js, _ = run(capsys, "psi", "--n-range", "3:20", "--format", "json")
    rows = json.loads(js)
    header, *lines = csv_out.splitlines()
    assert list(rows[0]) == header.split(",")
    for row, line in zip(rows, lines):
        assert [cli._fmt(v) for v in row.values()] == line.split(",")


def test_reals_have_12_significant_digits(capsys):
    _, out, _ = run(capsys, "asympt", "--n", "10", "--c3", "1.25")
    row = dict(zip(*[l.split(",") for l in out.splitlines()]))
    assert row["X"] == "96" and row["D"] == "24" and row["r"] == "2"
    assert row["c3"] == "1.25"
    assert len(row["L1"].replace(".", "").lstrip("0")) <= 12


def test_asympt_labels_default_c3(capsys):
    _, _, err = run(capsys, "asympt", "--n", "10")
    assert "empirical" in err


def test_fit_c3_row(capsys):
    code, out, _ = run(capsys, "fit-c3", "--n-range", "3:200")
    assert code == 0
    fields = out.splitlines()[1].split(",")
    assert fields[:4] == ["X=n^2-4", "3", "200", "198"]
    float(fields[4])


def test_dist_rows(capsys):
    _, out, _ = run(capsys, "dist", "--n", "200", "--bin-width", "0.5", "--t-max", "2")
    lines = out.splitlines()
    assert lines[0] == "bin_center,frequency"
    assert [l.split(",")[0] for l in lines[1:]] == ["0.25", "0.75", "1.25", "1.75", "inf"]
    total = sum(float(l.split(",")[1]) for l in lines[1:])
    assert total == pytest.approx(198 / 200)


def test_verify_ok(capsys):
    code, out, _ = run(capsys, "verify", "--n-range", "3:60")
    assert code == 0
    assert out.splitlines()[1:] == ["four_way,3,60,58,ok", "key_lemma,1,3600,1800,ok"]


def test_verify_reports_mismatch(capsys, monkeypatch):
    real = spinchain.phi_boca
    monkeypatch.setattr(spinchain, "phi_boca", lambda N: real(N) + (N == 17))
    code, out, err = run(capsys, "verify", "--n-range", "3:30")
    assert code == 1
    assert "N=17" in err and "boca=" in err
    assert "FAIL" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["phi"],
        ["phi", "--n", "2"],
        ["phi", "--n-range", "9:3"],
        ["phi", "--n-range", "x"],
        ["psi", "--n", "5", "--jobs", "0"],
        ["asympt", "--n", "5", "--tol", "-1"],
        ["dist", "--bin-width", "0"],
        ["upsilon"],
        ["nosuch"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


def test_io_error_exit_3(capsys, tmp_path):
    code, _, err = run(capsys, "phi", "--n", "3", "--output", str(tmp_path / "missing" / "out.csv"))
    assert code == 3
    assert "cannot write" in err


def test_output_file(capsys, tmp_path):
    dest = tmp_path / "out.csv"
    code, out, _ = run(capsys, "phi", "--n", "3", "-o", str(dest))
    assert code == 0 and out == ""
    assert dest.read_text() == "N,phi\n3,2\n"


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "fareyspin", "phi", "--n", "4"], capture_output=True, text=True, check=True
    )
    assert res.stdout == "N,phi\n4,6\n"
