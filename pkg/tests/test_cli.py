from __future__ import annotations

import subprocess
import sys

import pytest

from shiftconv import cli

SUBCOMMANDS = [
    "rl", "tau", "coeffs-check", "expsum", "voronoi-check", "jutila-check",
    "farey", "theta-arc", "shifted-sum", "circle-recon", "exponent-fit",
]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def data_rows(text):
    return [line for line in text.splitlines() if line and not line.startswith("#")]


@pytest.mark.parametrize("name", SUBCOMMANDS)
def test_help_contract(name, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main([name, "--help"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    assert out.startswith("usage: shiftconv " + name)
    for flag in ("--out", "--threads", "--tolerance"):
        assert flag in out


def test_top_level_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--help"])
    out = capsys.readouterr().out
    for name in SUBCOMMANDS:
        assert name in out


def test_rl_table(capsys):
    code, out, _ = run(capsys, "rl", "--ell", "2", "--n-max", "10")
    assert code == 0
    rows = data_rows(out)
    assert rows[0] == "n,r_l(n)"
    assert [int(r.split(",")[1]) for r in rows[1:]] == [1, 4, 4, 0, 4, 8, 0, 0, 4, 4, 8]
    assert "# ell: 2" in out


def test_voronoi_check_rows(capsys):
    code, out, _ = run(capsys, "voronoi-check", "--ell", "2", "--q", "5", "--X", "1000")
    assert code == 0
    rows = data_rows(out)
    header = rows[0].split(",")
    assert {"q", "a", "lhs_re", "rhs_re", "relerr", "dual_terms"} <= set(header)
    body = [dict(zip(header, r.split(","))) for r in rows[1:]]
    assert sorted(int(b["a"]) for b in body) == [1, 2, 3, 4]
    assert all(float(b["relerr"]) <= 1e-5 for b in body)


@pytest.mark.parametrize(
    "argv",
    [
        ("rl", "--ell", "3", "--n-max", "50"),
        ("expsum", "--kind", "kloosterman", "--q", "15", "--m", "2", "--n", "7"),
        ("farey", "--Q", "6"),
        ("jutila-check", "--Q", "40,80"),
        ("shifted-sum", "--ell", "2", "--h", "3", "--X", "500"),
    ],
)
def test_idempotent(argv, capsys, tmp_path):
    _, first, _ = run(capsys, *argv)
    path = tmp_path / "out.csv"
    code, stdout, _ = run(capsys, "--out", str(path), *argv)
    assert code == 0 and stdout == ""
    assert path.read_bytes() == first.encode()
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_out_after_subcommand(capsys, tmp_path):
    path = tmp_path / "rl.csv"
    code, _, _ = run(capsys, "rl", "--ell", "2", "--n-max", "3", "--out", str(path))
    assert code == 0 and path.read_text().count("\n") >= 5


def test_threads_do_not_change_output(capsys):
    argv = ("exponent-fit", "--ell", "2", "--h", "1,5", "--X", "300,1000,3000,10000")
    _, one, _ = run(capsys, *argv)
    _, four, _ = run(capsys, "--threads", "4", *argv)
    assert data_rows(one) == data_rows(four)


@pytest.mark.parametrize(
    "argv",
    [
        ("rl", "--ell", "2", "--n-max", "-1"),
        ("voronoi-check", "--ell", "2", "--q", "6"),
        ("jutila-check", "--Q", "10"),
        ("expsum", "--kind", "salie", "--q", "9"),
        ("shifted-sum", "--h", "1", "--X", "100", "--coeffs", "/nonexistent/file.txt"),
        ("--threads", "0", "rl", "--ell", "2", "--n-max", "3"),
    ],
)
def test_validation_exit_code(argv, capsys):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert err.startswith("error,validation,")


def test_bad_number_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["shifted-sum", "--h", "1", "--X", "abc"])
    assert info.value.code == 2


def test_computation_exit_code(capsys, monkeypatch):
    def broken(*a, **k):
        raise RuntimeError("no convergence")

    monkeypatch.setattr(cli.arith, "repr_count", broken)
    code, out, err = run(capsys, "rl", "--ell", "2", "--n-max", "3")
    assert code == 1 and out == ""
    assert err.startswith("error,computation,RuntimeError")


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "shiftconv", "tau", "--n-max", "5"], capture_output=True, text=True, check=True
    )
    assert "3,252," in res.stdout and "5,4830," in res.stdout
