import pytest

from hybridft.circuit import TABLE_GATES, named
from hybridft.concat import (
    NOT_APPLICABLE,
    PREDICTED,
    LiftError,
    MalformedSpecError,
    ConcatSpec,
    build_concat,
    lift_circuit,
    overall_distance,
    predict_effective_distance,
    predicted_distance,
    preset,
)
from hybridft.faults import enumerate_fault_locations
from hybridft.synth import logical_gate_on

SIZES = {"c23": 23, "c25": 25, "c31": 31, "c35": 35, "c49": 49}


@pytest.mark.parametrize("name,n", SIZES.items())
def test_preset_sizes(name, n):
    cc = build_concat(preset(name))
    assert cc.n == n
    assert cc.flat.n == n
    assert len(cc.flat.generators) == n - 1


@pytest.mark.parametrize("name,tag", [("c25", "Case1"), ("c23", "Case1"), ("c49", "Case2=3"), ("c31", "Case2"), ("c35", "Case3")])
def test_case_tags(name, tag):
    assert build_concat(preset(name)).case_tag == tag


def test_spec_json_round_trip():
    spec = preset("c31")
    assert ConcatSpec.from_json(spec.to_json()) == spec


def test_bad_specs():
    with pytest.raises(MalformedSpecError):
        ConcatSpec("steane", ("steane",) * 3)
    with pytest.raises(MalformedSpecError):
        preset("c99")


def test_flat_code_is_valid():
    from hybridft.codes import validate_code
    for name in SIZES:
        assert validate_code(build_concat(preset(name)).flat).ok


def test_overall_distances():
    assert overall_distance(build_concat(preset("c25"))).value == 5
    d49 = overall_distance(build_concat(preset("c49")))
    assert (d49.value, d49.tier) == (9, PREDICTED)
    assert d49.components == {"steane": 3}


@pytest.mark.parametrize("name,expected", [("c23", 5), ("c25", 5), ("c31", 9), ("c35", 9), ("c49", 9)])
def test_predicted_distance(name, expected):
    assert predicted_distance(preset(name)) == expected


def test_h_not_applicable_when_permutation_mixes_codes():
    assert predict_effective_distance(preset("c23"), named("H")) == NOT_APPLICABLE
    assert predict_effective_distance(preset("c35"), named("H")) == 9


def test_d1_rule_on_synthetic_spec():
    # S is transversal on the outer Steane code but not on the five-qubit blocks
    spec = ConcatSpec("steane", ("five_qubit",) * 7)
    # every block is then a single point of failure
    assert predict_effective_distance(spec, named("S")) == 3
    assert predict_effective_distance(spec, named("K")) == 9


def test_lift_t_on_c25_counts():
    spec = preset("c25")
    lifted = lift_circuit(spec, logical_gate_on(spec.code, TABLE_GATES["T"]))
    assert lifted.n == 25
    assert lifted.count("CNOT") == 28
    assert lifted.count("GADGET") == 1
    locs = enumerate_fault_locations(lifted)
    assert sum(l.kind == "gate" for l in locs) == 28
    assert sum(l.kind == "slot" for l in locs) == 1


def test_lift_transversal_h_on_c25():
    spec = preset("c25")
    lifted = lift_circuit(spec, logical_gate_on(spec.code, named("H")))
    assert lifted.count("H") == 25
    assert lifted.count("GADGET") == 0


def test_pft_policy_rejects_single_qubit_gates():
    spec = preset("c25")
    with pytest.raises(LiftError):
        lift_circuit(spec, logical_gate_on(spec.code, TABLE_GATES["T"]), policy="pft")


def test_lift_rejects_wrong_width():
    from hybridft.circuit import Circuit
    with pytest.raises(LiftError):
        lift_circuit(preset("c25"), Circuit(5))
