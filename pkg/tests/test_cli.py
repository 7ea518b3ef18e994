import csv
import io
import subprocess
import sys

import pytest

from coherent_env import __version__
from coherent_env import scenario as scen
from coherent_env.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, EXIT_VIOLATED, main


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eval_to_stdout(capsys):
    assert main(["eval", "two_atom", "--n-points", "16", "--x-hi", "2"]) == EXIT_OK
    out = rows(capsys.readouterr().out)
    assert len(out) == 16 and float(out[0]["survival"]) == 1.0


def test_eval_curves_and_file(tmp_path):
    target = tmp_path / "h.csv"
    assert main(["eval", "gamma_closed_form", "--curve", "hazard", "--system", "system2", "--out", str(target)]) == EXIT_OK
    data = rows(target.read_text())
    assert list(data[0]) == ["x", "hazard"]
    assert not list(tmp_path.glob(".*.tmp"))


def test_verify_positive_and_negative(capsys, tmp_path):
    assert main(["verify", "series_vs_mixed_lam_0"]) == EXIT_OK
    out = rows(capsys.readouterr().out)
    assert {r["theorem"] for r in out} == {"4.4", "4.5"}
    assert main(["verify", "neg_hr_elasticity", "--out", str(tmp_path / "r.csv")]) == EXIT_VIOLATED
    assert "expected (ii)" in capsys.readouterr().err


def test_verify_alias_and_usage_errors(capsys):
    assert main(["verify", "deterministic_series_parallel", "--theorem", "5.12"]) == EXIT_OK
    assert {r["theorem"] for r in rows(capsys.readouterr().out)} == {"5.6"}
    assert main(["verify", "two_atom", "--theorem", "9.9"]) == EXIT_USAGE
    assert main(["bogus"]) == EXIT_USAGE
    assert main(["eval", "two_atom", "--curve", "quantile"]) == EXIT_USAGE


def test_data_errors(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "missing.toml")]) == EXIT_DATA
    bad = tmp_path / "bad.toml"
    bad.write_text('name = "x"\n[environments.e]\natoms = [[1.0, 2.0]]\n[system1]\nenvironment = "e"\nkofn = {k=1, n=1}\nmarginals = [{baseline="exponential", rate=1.0}]\n')
    assert main(["eval", str(bad)]) == EXIT_DATA
    assert "environments.e" in capsys.readouterr().err
    assert main(["simulate", "two_atom", "--n", "10"]) == EXIT_DATA
    assert main(["lemmas", "--kofn", "1", "2", "2", "3"]) == EXIT_DATA


def test_simulate_is_reproducible(capsys):
    args = ["simulate", "series_vs_mixed_fgm", "--n", "20000", "--seed", "4"]
    assert main(args) == EXIT_OK
    first = capsys.readouterr().out
    assert main(args) == EXIT_OK
    assert capsys.readouterr().out == first
    assert all(float(r["|z|"]) < 4 for r in rows(first))


def test_lemmas(capsys):
    assert main(["lemmas", "--kofn", "2", "3", "1", "2"]) == EXIT_OK
    out = rows(capsys.readouterr().out)
    assert out and all(r["verdict"] == "certified-on-grid" for r in out)


def test_scenarios_listing(capsys):
    assert main(["scenarios"]) == EXIT_OK
    out = capsys.readouterr().out
    assert all(name in out for name in scen.bundled())


def test_plot_flag(tmp_path):
    pytest.importorskip("matplotlib")
    png = tmp_path / "s.png"
    assert main(["eval", "two_atom", "--plot", str(png), "--out", str(tmp_path / "s.csv")]) == EXIT_OK
    assert png.stat().st_size > 0
    png2 = tmp_path / "m.png"
    assert main(["simulate", "two_atom", "--n", "5000", "--plot", str(png2), "--out", str(tmp_path / "m.csv")]) == EXIT_OK
    assert png2.stat().st_size > 0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "coherent_env", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout
