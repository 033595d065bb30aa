import json

from phasebench.cli import main
from phasebench.hamiltonian import IsingExpansion
from phasebench.sat import load_dimacs, worked_example, save_dimacs, write_dimacs
from phasebench.sweep import read_results


def test_generate_to_file(tmp_path):
    out = tmp_path / "f.cnf"
    assert main(["generate", "--n", "20", "--alpha", "4.25", "--seed", "3", "--out", str(out)]) == 0
    f = load_dimacs(out)
    assert (f.n, f.m, f.k) == (20, 85, 3)


def test_generate_directory(tmp_path):
    assert main(["generate", "--n", "10", "--m", "5", "--count", "3", "--out", str(tmp_path / "d")]) == 0
    assert len(list((tmp_path / "d").glob("*.cnf"))) == 3


def test_generate_needs_alpha_or_m(capsys):
    assert main(["generate", "--n", "10"]) == 1


def test_solve_worked_example(tmp_path, capsys):
    path = tmp_path / "p.cnf"
    save_dimacs(worked_example(), path)
    assert main(["solve", str(path), "--maxsat", "--backbone"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["status"] == "SAT"
    assert report["min_unsat"] == 0
    assert report["density"] == 0.6


def test_solve_limit_exit_code(tmp_path):
    path = tmp_path / "big.cnf"
    assert main(["generate", "--n", "30", "--m", "10", "--out", str(path)]) == 0
    assert main(["solve", str(path), "--maxsat"]) == 2


def test_solve_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.cnf"
    path.write_text("p cnf 2 1\n1 5 0\n")
    assert main(["solve", str(path)]) == 1
    assert "line 2" in capsys.readouterr().err


def test_sweep_flags_json(tmp_path):
    out = tmp_path / "s.json"
    code = main(["sweep", "--experiment", "decision", "--n", "20", "--alpha-min", "3",
                 "--alpha-max", "5", "--alpha-step", "1", "--instances", "4", "--seed", "1",
                 "--out", str(out)])
    assert code == 0
    res = read_results(out)
    assert [p.density for p in res.points] == [3.0, 4.0, 5.0]


def test_sweep_config_file_with_overrides(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(
        "experiment: qaoa\nn: 4\nk: 2\nalpha: {min: 0.5, max: 1.0, step: 0.5}\n"
        "instances: 2\nrestarts: 3\n"
    )
    out = tmp_path / "s.csv"
    assert main(["sweep", "--config", str(cfg), "--depths", "1,2", "--format", "csv",
                 "--out", str(out)]) == 0
    text = out.read_text()
    assert "qaoa_error" in text and text.startswith("density,realized_density,metric")


def test_sweep_bad_config_exit_code(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("experiment: decision\nn: 10\ndensities: [2, 1]\n")
    assert main(["sweep", "--config", str(cfg)]) == 1
    assert main(["sweep", "--n", "10"]) == 1


def test_sweep_limit_exit_code():
    assert main(["sweep", "--experiment", "qaoa", "--n", "30", "--alpha-min", "1",
                 "--alpha-max", "1", "--alpha-step", "1", "--instances", "1"]) == 2


def test_verify(capsys):
    assert main(["verify", "--count", "20", "--max-n", "8"]) == 0
    assert "OK" in capsys.readouterr().out


def test_ising_export(tmp_path):
    path = tmp_path / "p.cnf"
    path.write_text(write_dimacs(worked_example()))
    out = tmp_path / "p.ising"
    assert main(["ising", str(path), "--out", str(out)]) == 0
    table = IsingExpansion.from_table(out.read_text())
    assert table.n == 5 and table.degree == 3
