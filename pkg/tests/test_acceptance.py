"""Acceptance suite. Each test carries a ``criterion`` mark; the terminal
summary prints one PASS/FAIL line per criterion."""

import json
import time
from fractions import Fraction

import numpy as np
import pytest

from hybridft.analysis import EXPECTED_TABLE, TABLE_GATE_ORDER, table_ok
from hybridft.circuit import TABLE_GATES, named
from hybridft.cli import main
from hybridft.codes import code_distance, make_code, validate_code
from hybridft.concat import EXACT, NOT_APPLICABLE, PREDICTED, build_concat, lift_circuit, overall_distance, preset
from hybridft.decoder import CORRECTED, LOGICAL_FAILURE, decode_hierarchical, decoder_plan
from hybridft.faults import (
    FaultSet,
    check_fault_set,
    effective_distance_search,
    enumerate_fault_locations,
)
from hybridft.pauli import PauliOperator, single
from hybridft.statevec import verify_logical_action
from hybridft.synth import check_transversal, find_transversal_permutation, logical_gate_on, partition, synth_ckz

# pinned tolerances and limits
DEFICIT_TOL = 1e-9
LIMIT_CODES_S = 60
LIMIT_OVERALL_S = 600
LIMIT_STATEVEC_S = 300
LIMIT_C25_T_S = 600
BRANCH_BUDGET = 10**8
RANDOM_WEIGHT2 = 10**4

T = TABLE_GATES["T"]


@pytest.mark.criterion(1, "base codes [[5,1,3]], [[7,1,3]], [[15,1,3]] validate, distance 3, < 1 min")
def test_criterion_1_code_parameters():
    start = time.perf_counter()
    for name, n in (("five_qubit", 5), ("steane", 7), ("rm15", 15)):
        c = make_code(name)
        assert (c.n, c.k) == (n, 1)
        assert validate_code(c).ok
        assert code_distance(c, recompute=True) == 3
    assert time.perf_counter() - start < LIMIT_CODES_S


@pytest.mark.criterion(2, "preset qubit counts 23/25/31/35/49")
def test_criterion_2_qubit_counts():
    for name, row in EXPECTED_TABLE.items():
        assert build_concat(preset(name)).n == row[0]


@pytest.mark.criterion(3, "overall distance 5 EXACT for c23/c25, 9 PREDICTED for c31/c35/c49")
def test_criterion_3_overall_distance():
    start = time.perf_counter()
    for name in ("c23", "c25"):
        d = overall_distance(build_concat(preset(name)))
        assert (d.value, d.tier) == (5, EXACT)
    assert time.perf_counter() - start < LIMIT_OVERALL_S
    for name in ("c31", "c35", "c49"):
        d = overall_distance(build_concat(preset(name)))
        assert (d.value, d.tier) == (9, PREDICTED)
        # component distances come from exhaustive coset search
        for code_name, value in d.components.items():
            assert value == 3
            assert code_distance(make_code(code_name), recompute=True) == value


@pytest.mark.criterion(4, "logical-action deficit < 1e-9 for Steane T, five-qubit T/S/CZ/CCZ, < 5 min")
def test_criterion_4_logical_action():
    start = time.perf_counter()
    steane, five = make_code("steane"), make_code("five_qubit")
    cases = [
        ([steane], T, synth_ckz([steane], 0, Fraction(1, 4))),
        ([five], T, synth_ckz([five], 0, Fraction(1, 4))),
        ([five], named("S"), logical_gate_on(five, named("S"))),
        ([five] * 2, named("CZ"), logical_gate_on(five, named("CZ"))),
        ([five] * 3, TABLE_GATES["CCZ"], logical_gate_on(five, TABLE_GATES["CCZ"])),
    ]
    for blocks, gate, circ in cases:
        assert circ.n == sum(b.n for b in blocks)
        assert verify_logical_action(blocks, circ, gate) < DEFICIT_TOL, gate
    assert time.perf_counter() - start < LIMIT_STATEVEC_S


@pytest.mark.criterion(5, "Steane T: one non-Clifford location coupling {1,2,7}; five-qubit couples {1,3,5}, |S1| = 1")
def test_criterion_5_structure():
    st = synth_ckz([make_code("steane")], 0, Fraction(1, 4))
    assert len(st.non_clifford_locations()) == 1
    assert st.coupled_qubits() == {0, 1, 6}
    assert st.count("CNOT") == 4
    five = synth_ckz([make_code("five_qubit")], 0, Fraction(1, 4))
    part = partition(five, make_code("steane"))
    assert part.b1 == {0, 2, 4}
    assert len(part.s1) == 1


@pytest.mark.criterion(6, "c25 T: every single fault corrected, size-2 witness fails, distance exactly 3")
def test_criterion_6_c25_t():
    start = time.perf_counter()
    spec = preset("c25")
    cc = build_concat(spec)
    lifted = lift_circuit(spec, logical_gate_on(spec.code, T))
    locs = enumerate_fault_locations(lifted)
    assert sum(l.kind == "gate" for l in locs) == 28
    assert sum(l.kind == "slot" for l in locs) >= 1
    cases = 0
    for loc in locs:
        for p in loc.choices(lifted.n):
            assert check_fault_set(lifted, cc, FaultSet(((loc, p),))).outcome == CORRECTED
            cases += 1
    assert cases == 28 * 15 + 21
    res = effective_distance_search(lifted, cc, 2, budget=BRANCH_BUDGET)
    assert res.t_verified == 1 and res.exact
    assert len(res.witness) == 2
    assert check_fault_set(lifted, cc, res.witness).outcome == LOGICAL_FAILURE
    assert res.effective_distance == 3
    assert time.perf_counter() - start < LIMIT_C25_T_S


@pytest.mark.criterion(7, "c25 H and CZ: all fault sets of size <= 2 corrected within 1e8 branch decodes")
@pytest.mark.parametrize("gate", ["H", "CZ"])
def test_criterion_7_transversal(gate):
    spec = preset("c25")
    cc = build_concat(spec)
    lifted = lift_circuit(spec, logical_gate_on(spec.code, TABLE_GATES[gate]))
    res = effective_distance_search(lifted, cc, 2, budget=BRANCH_BUDGET)
    assert res.status == EXACT
    assert res.branch_decodes <= BRANCH_BUDGET
    assert res.t_verified == 2 and res.witness is None


@pytest.mark.criterion(8, "table1 matches every cell, '-' entries and worst case 3; exit code 0")
def test_criterion_8_table1(capsys):
    code = main(["--json", "table1"])
    rep = json.loads(capsys.readouterr().out)
    assert code == 0
    rows = rep["results"]["rows"]
    assert table_ok(rows)
    for row in rows:
        expected = EXPECTED_TABLE[row["code"]]
        assert row["qubits"] == expected[0]
        for gname, cell, want in zip(TABLE_GATE_ORDER, row["cells"], expected[1:7]):
            assert cell["predicted"] == (NOT_APPLICABLE if want is None else want), (row["code"], gname)
            assert cell["verdict"] != "MISMATCH"
        assert row["worst_case"] == 3


@pytest.mark.criterion(9, "transversality claims on Steane and the five-qubit code")
def test_criterion_9_transversality():
    steane, five = make_code("steane"), make_code("five_qubit")
    for g in ("H", "S", "K", "CNOT", "CZ"):
        assert check_transversal(steane, named(g)), g
    assert not check_transversal(steane, T)
    assert check_transversal(five, named("K"))
    for g in (named("S"), named("CZ"), T, TABLE_GATES["CCZ"]):
        assert not check_transversal(five, g), g
    assert not check_transversal(five, named("H"))
    assert not check_transversal(five, named("H"), tuple(range(5)))
    perm = find_transversal_permutation(five, named("H"))
    assert perm is not None and perm != tuple(range(5))
    assert check_transversal(five, named("H"), perm)


@pytest.mark.criterion(10, "c49 decoder: 147 single errors and 1e4 random weight-2 errors corrected")
def test_criterion_10_decoder():
    cc = build_concat(preset("c49"))
    singles = 0
    for q in range(49):
        for letter in "XYZ":
            assert decode_hierarchical(cc, single(49, q, letter)).outcome == CORRECTED
            singles += 1
    assert singles == 147
    rng = np.random.default_rng(2024)
    xs, zs = [], []
    for _ in range(RANDOM_WEIGHT2):
        a, b = rng.choice(49, 2, replace=False)
        la, lb = rng.integers(1, 4, 2)
        xs.append(((int(la) & 1) << int(a)) | ((int(lb) & 1) << int(b)))
        zs.append(((int(la) >> 1) << int(a)) | ((int(lb) >> 1) << int(b)))
    fails = decoder_plan(cc).decode_ints(xs, zs)
    assert not fails.any()
    # the reference decoder agrees on a subsample
    for x, z in list(zip(xs, zs))[:200]:
        assert decode_hierarchical(cc, PauliOperator(49, x, z)).outcome == CORRECTED
