import json

from hybridft.circuit import Circuit
from hybridft.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, "--json", *argv)
    return code, json.loads(out)


def test_codes_list(capsys):
    code, rep = run_json(capsys, "codes", "list")
    assert code == 0
    assert rep["exit_code"] == 0
    assert rep["command"][:2] == ["hybridft", "--json"]


def test_validate_and_distance(capsys):
    assert run(capsys, "codes", "validate", "steane")[0] == 0
    code, rep = run_json(capsys, "codes", "distance", "c25")
    assert code == 0
    assert rep["results"]["distance"] == {"value": 5, "tier": "EXACT"}


def test_unknown_code_is_usage_error(capsys):
    code, _, err = run(capsys, "codes", "distance", "bogus")
    assert code == 2
    assert "unknown" in err


def test_bad_subcommand(capsys):
    assert run(capsys, "frobnicate")[0] == 2


def test_synth_writes_circuit(capsys, tmp_path):
    out = tmp_path / "t.txt"
    code, text, _ = run(capsys, "synth", "steane", "--k", "0", "--theta", "pi/4", "--out", str(out))
    assert code == 0
    circ = Circuit.from_text(out.read_text())
    assert len(circ.non_clifford_locations()) == 1
    assert "logical action deficit" in text


def test_analyze_c25_t(capsys):
    code, rep = run_json(capsys, "analyze", "c25", "--gate", "T")
    assert code == 0
    res = rep["results"]
    assert res["predicted"] == 3
    assert res["verdict"] == "VERIFIED"
    assert len(res["search"]["witness"]) == 2
    assert "wall_time_s" not in res["search"]


def test_analyze_not_applicable(capsys):
    code, rep = run_json(capsys, "analyze", "c23", "--gate", "H")
    assert code == 0
    assert rep["results"]["predicted"] == "NOT_APPLICABLE"


def test_analyze_budget_exhaustion_exit_3(capsys):
    code, rep = run_json(capsys, "analyze", "c25", "--gate", "H", "--budget", "1000")
    assert code == 3
    assert rep["results"]["verdict"] == "LOWER_BOUND"


def test_analyze_predict_only(capsys):
    code, rep = run_json(capsys, "analyze", "c49", "--gate", "H", "--predict-only")
    assert code == 0
    assert rep["results"]["predicted"] == 9


def test_timing_flag(capsys):
    code, rep = run_json(capsys, "--timing", "codes", "list")
    assert "wall_time_s" in rep


def test_table1_predictions(capsys):
    code, rep = run_json(capsys, "table1", "--no-verify")
    assert code == 0
    rows = {r["code"]: r for r in rep["results"]["rows"]}
    assert rows["c23"]["cells"][0]["predicted"] == "NOT_APPLICABLE"
    assert all(r["worst_case"] == 3 for r in rows.values())


def test_lift_and_partition(capsys, tmp_path):
    out = tmp_path / "lifted.txt"
    assert run(capsys, "lift", "c25", "--gate", "T", "--out", str(out))[0] == 0
    assert Circuit.from_text(out.read_text()).n == 25
    code, rep = run_json(capsys, "partition", "five_qubit", "--gate", "T", "--inner", "steane")
    assert code == 0
    assert rep["results"]["B1"] == ["q1", "q3", "q5"]
    assert len(rep["results"]["S1"]) == 1


def test_spec_from_json_file(capsys, tmp_path):
    from hybridft.concat import preset
    f = tmp_path / "spec.json"
    f.write_text(preset("c25").to_json())
    code, rep = run_json(capsys, "analyze", str(f), "--gate", "T", "--predict-only")
    assert code == 0 and rep["results"]["predicted"] == 3
