import json
import subprocess
import sys

import pytest

from netcfg import classical, cli, distribution
from netcfg.topology import builtin, serialize

GHZ_STATE = {"components": [{"family": "ghz", "params": {"theta": 0.5, "n": 3}, "assignment": [1, 2, 3]}]}


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "tri.json").write_text(serialize(builtin("cycle", 3)))
    (tmp_path / "ghz.json").write_text(json.dumps(GHZ_STATE))
    return tmp_path


def call(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("argv,expected", [
    (["fis", "--network", "chain:3"], "1/2 1/2 1/2\n"),
    (["fis", "--network", "tri.json", "--algorithm", "optimal"], "1/2 1/2 1/2\n"),
    (["fis", "--network", "chain:4", "--algorithm", "family", "--m", "5", "--k", "2"], "2/5 3/5 2/5 3/5\n"),
    (["fis", "--network", "star:4", "--algorithm", "facet"], "0 0 0 1\n"),
    (["fis", "--network", "cycle:3", "--algorithm", "decompose"], "1/2 1/2 1/2\n"),
])
def test_fis_golden(workdir, capsys, argv, expected):
    assert call(capsys, *argv) == (0, expected, "")


def test_fis_invalid_facet(workdir, capsys):
    code, out, err = call(capsys, "fis", "--network", "cycle:3", "--algorithm", "facet", "--facet", "odd_parties")
    assert code == 2 and out == ""
    assert err.startswith("ERROR:validation: ")


def test_simulate_check_witness_compat(workdir, capsys):
    assert call(capsys, "simulate", "--state", "ghz.json", "-o", "d.json")[0] == 0
    d = distribution.load_distribution("d.json")
    assert d[(0, 0, 0)] == pytest.approx(0.7701511529340699, abs=1e-15)

    code, out, _ = call(capsys, "check", "--dist", "d.json", "--network", "tri.json")
    assert code == 3
    assert out.splitlines()[0] == "# weights: greedy: 1/2 1/2 1/2"
    assert out.splitlines()[-1] == "VIOLATED margin=0.11965344 at (1,1,1)"

    code, out, _ = call(capsys, "witness", "--state", "ghz.json")
    assert code == 3
    assert out == ("pair (1,2): DEPENDENT margin=0.177018355 at (1,1)\n"
                   "pair (2,3): DEPENDENT margin=0.177018355 at (1,1)\nENTANGLED\n")

    code, out, _ = call(capsys, "compat", "--dist", "d.json", "--network", "chain:3", "--strategy", "family", "--m", "10")
    assert code == 3
    assert out == ("weights (family(chain,m=10,k=1,a)): 9/10 1/10 9/10\n"
                   "VIOLATED margin=0.168650397 at (1,1,1)\n"
                   "INCOMPATIBLE with 3-party network [{1,2},{2,3}]\n")


def test_check_satisfied_and_weight_validation(workdir, capsys):
    t, sources, responses = classical.triangle_wiring(0.5, 0.5, 0.5)
    (workdir / "bits.json").write_text(distribution.serialize(classical.classical_joint(t, sources, responses)))
    code, out, _ = call(capsys, "check", "--dist", "bits.json", "--weights", "1/2 1/2 1/2", "--network", "tri.json")
    assert code == 0 and out.endswith("SATISFIED\n")
    code, _, err = call(capsys, "check", "--dist", "bits.json", "--weights", "2/3,2/3,1/2", "--network", "tri.json")
    assert code == 2 and "not a fractional independent set" in err
    code, out, _ = call(capsys, "check", "--dist", "bits.json", "--chain-min", "--m", "10")
    assert code == 3


def test_classical_simulate(workdir, capsys):
    t, sources, responses = classical.triangle_wiring(0.3, 0.5, 0.5)
    (workdir / "src.json").write_text(json.dumps(classical.sources_to_document(sources)))
    (workdir / "resp.json").write_text(json.dumps(classical.responses_to_document(t, responses)))
    code, out, _ = call(capsys, "simulate", "--network", "tri.json", "--sources", "src.json", "--responses", "resp.json")
    assert code == 0
    assert distribution.parse_distribution(out).allclose(classical.triangle_bits(0.3, 0.5, 0.5))


def test_scan_output_is_reproducible(workdir, capsys):
    args = ["scan", "--experiment", "noisy_star(3)", "--grid", "3", "--v-grid", "2"]
    first = call(capsys, *args)
    second = call(capsys, *args)
    assert first == second and first[0] == 0
    assert first[1].splitlines()[0] == "# experiment=noisy_star(3)"
    assert call(capsys, *args, "-o", "scan.csv")[1] == ""
    assert (workdir / "scan.csv").read_text() == first[1]


@pytest.mark.parametrize("argv,code,prefix", [
    (["bogus"], 1, "ERROR:usage:"),
    (["check", "--dist", "d.json"], 1, "ERROR:usage:"),
    (["simulate"], 1, "ERROR:usage:"),
    (["check", "--dist", "missing.json", "--chain-min"], 2, "ERROR:input:"),
    (["fis", "--network", "tri.json", "--algorithm", "family"], 2, "ERROR:validation:"),
    (["scan", "--experiment", "noisy_bell", "--grid", "2"], 2, "ERROR:validation:"),
])
def test_error_exit_codes(workdir, capsys, argv, code, prefix):
    (workdir / "d.json").write_text("{}")
    got, out, err = call(capsys, *argv)
    assert got == code and err.startswith(prefix)


def test_malformed_json(workdir, capsys):
    (workdir / "bad.json").write_text("{nope")
    code, _, err = call(capsys, "check", "--dist", "bad.json", "--chain-min")
    assert code == 2 and err.startswith("ERROR:") and "not valid JSON" in err


def test_console_script_version():
    out = subprocess.run([sys.executable, "-m", "netcfg.cli", "--version"], capture_output=True, text=True)
    assert out.stdout.strip() == "netcfg 0.1.0" and out.returncode == 0
