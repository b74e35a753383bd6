import json
import subprocess
import sys

import pytest

from malcev.cli import main
from malcev.duality import pullback_hom
from malcev.lie import LieAlgebra, abelian, heisenberg
from conftest import hom_corpus


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out), out


@pytest.fixture
def specs(tmp_path):
    paths = {}
    for name, alg in [("heisenberg", heisenberg()), ("abelian3", abelian(3))]:
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(alg.to_json()))
        paths[name] = str(p)
    bad = tmp_path / "antisym.json"
    bad.write_text(json.dumps({
        "class": 2,
        "ranks": [2, 1],
        "brackets": [
            {"left": [1, 1], "right": [1, 2], "result": [{"basis": [2, 1], "coeff": "1"}]},
            {"left": [1, 2], "right": [1, 1], "result": [{"basis": [2, 1], "coeff": "1"}]},
        ],
    }))
    paths["antisym"] = str(bad)
    broken = tmp_path / "broken.json"
    broken.write_text("{ not json")
    paths["broken"] = str(broken)
    return paths


def test_check(capsys, specs):
    code, rep, _ = run(capsys, "check", specs["heisenberg"])
    assert code == 0 and rep["status"] == "ok" and rep["results"]["ok"]
    code, rep, _ = run(capsys, "check", specs["antisym"])
    assert code == 1 and not rep["results"]["checks"]["antisymmetry"]
    code, rep, _ = run(capsys, "check", specs["broken"])
    assert code == 2 and rep["status"] == "error"


def test_compare(capsys, specs):
    code, rep, _ = run(capsys, "compare", specs["heisenberg"], specs["abelian3"])
    assert code == 0 and rep["results"]["certified_non_isomorphic"] is True


def test_free_then_check(capsys, tmp_path):
    code, rep, out = run(capsys, "free", "--gens", "2", "--class", "3")
    assert code == 0 and rep["results"]["dimension"] == 5
    path = tmp_path / "f23.json"
    path.write_text(out)
    code, rep, _ = run(capsys, "check", str(path))
    assert code == 0


def test_polbasis(capsys, specs):
    code, rep, _ = run(capsys, "polbasis", specs["heisenberg"], "--degree", "2")
    assert code == 0 and rep["results"]["dimension"] == 7 and len(rep["results"]["basis"]) == 7


def test_polbasis_cap(capsys, specs, monkeypatch):
    monkeypatch.setenv("MALCEV_MAX_DEGREE", "2")
    code, _, _ = run(capsys, "polbasis", specs["heisenberg"], "--degree", "3")
    assert code == 2


def test_graded_lcs_betti(capsys, specs):
    code, rep, _ = run(capsys, "graded", specs["heisenberg"])
    assert code == 0 and LieAlgebra.from_json(rep["results"]["spec"]) == heisenberg()
    code, rep, _ = run(capsys, "lcs", specs["heisenberg"])
    assert rep["results"]["dimensions"] == [3, 1, 0]
    code, rep, _ = run(capsys, "betti", specs["heisenberg"])
    assert rep["results"]["betti"] == [1, 2, 2, 1]
    code, rep, _ = run(capsys, "betti", specs["heisenberg"], "--max-n", "1")
    assert rep["results"]["betti"] == [1, 2]


def test_mul(capsys, specs):
    code, rep, _ = run(capsys, "mul", specs["heisenberg"], "0,1,0", "1,0,0")
    assert rep["results"]["product"]["coords"] == ["1", "1", "-1"]
    code, rep, _ = run(capsys, "mul", specs["heisenberg"], '{"coords": ["1/2", "0", "0"]}', "[0, 2, 0]")
    assert rep["results"]["product"]["coords"] == ["1/2", "2", "0"]
    code, _, _ = run(capsys, "mul", specs["heisenberg"], "1,2", "1,0,0")
    assert code == 2


def test_pullback(capsys, specs):
    zeta_z = json.dumps([{"exps": [0, 0, 1], "coeff": "1"}])
    code, rep, _ = run(capsys, "pullback", specs["heisenberg"], "--op", "m", zeta_z)
    terms = {(tuple(t["exps"]), t["coeff"]) for t in rep["results"]["pullback"]["terms"]}
    assert terms == {((0, 0, 1, 0, 0, 0), "1"), ((0, 0, 0, 0, 0, 1), "1"), ((0, 1, 0, 1, 0, 0), "-1")}
    code, rep, _ = run(capsys, "pullback", specs["heisenberg"], "--op", "inv", zeta_z)
    assert code == 0
    code, rep, _ = run(capsys, "pullback", specs["heisenberg"], "--op", "mtilde", zeta_z)
    assert code == 0


def test_reconstruct(capsys, tmp_path):
    phi = hom_corpus()["dilation_heisenberg"]
    path = tmp_path / "psi.json"
    path.write_text(json.dumps(pullback_hom(phi).to_json()))
    code, rep, _ = run(capsys, "reconstruct", str(path))
    assert code == 0
    assert rep["results"]["homomorphism"]["generator_images"] == [g.to_json() for g in phi.generator_images]

    data = pullback_hom(phi).to_json()
    data["images"][-1]["image"]["terms"][0]["coeff"] = "5"  # zeta_z -> 5 zeta_z
    path.write_text(json.dumps(data))
    code, rep, _ = run(capsys, "reconstruct", str(path))
    assert code == 1 and not rep["results"]["flags"]["comultiplicative_up_to_D"]


def test_console_script_is_deterministic(specs):
    cmd = [sys.executable, "-m", "malcev.cli", "compare", specs["heisenberg"], specs["abelian3"]]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["command"] == "compare"
