import itertools
import random
from fractions import Fraction

import pytest

from hybridft.circuit import TABLE_GATES, Circuit, named
from hybridft.codes import make_code
from hybridft.concat import ConcatSpec, build_concat, lift_circuit, preset
from hybridft.decoder import CORRECTED, LOGICAL_FAILURE
from hybridft.faults import (
    EXACT,
    LOWER_BOUND,
    FaultSet,
    InvalidLocationError,
    check_fault_set,
    effective_distance_search,
    enumerate_fault_locations,
    propagate_faults,
)
from hybridft.pauli import PauliOperator, single
from hybridft.statevec import circuit_unitary, pauli_support
from hybridft.synth import logical_gate_on, synth_ckz


@pytest.fixture(scope="module")
def steane_t():
    return synth_ckz([make_code("steane")], 0, Fraction(1, 4))


@pytest.fixture(scope="module")
def c25_t():
    spec = preset("c25")
    return lift_circuit(spec, logical_gate_on(spec.code, TABLE_GATES["T"])), build_concat(spec)


def fault(locs, op, p):
    loc = next(l for l in locs if l.op == op and l.kind in ("gate", "slot"))
    return FaultSet(((loc, p),))


def test_empty_circuit_has_no_locations():
    assert enumerate_fault_locations(Circuit(3)) == []


def test_single_cnot():
    c = Circuit(2)
    c.append(named("CNOT"), [0, 1])
    (loc,) = enumerate_fault_locations(c)
    assert loc.support == (0, 1)
    assert len(loc.choices(2)) == 15


def test_idle_locations():
    c = Circuit(3)
    c.append(named("H"), [0])
    c.append(named("CNOT"), [0, 1])
    locs = enumerate_fault_locations(c, idle=True)
    kinds = [l.kind for l in locs]
    assert kinds.count("input") == 3
    # layer 0 leaves q2, q3 idle; layer 1 leaves q3 idle
    assert kinds.count("idle") == 3


def test_z_before_t_passes_through(steane_t):
    locs = enumerate_fault_locations(steane_t)
    out = propagate_faults(steane_t, fault(locs, 1, single(7, 6, "Z")))
    assert len(out) == 1
    (r,) = out
    assert r.x == 0 and r.z


def test_x_on_control_spreads():
    c = Circuit(2)
    c.append(named("H"), [1])
    c.append(named("CNOT"), [0, 1])
    locs = enumerate_fault_locations(c, idle=True)
    inp = next(l for l in locs if l.kind == "input" and l.support == (0,))
    (r,) = propagate_faults(c, FaultSet(((inp, single(2, 0, "X")),)))
    assert r.letters == "XX"


def test_x_into_t_branches(steane_t):
    locs = enumerate_fault_locations(steane_t)
    out = propagate_faults(steane_t, fault(locs, 1, single(7, 6, "X")))
    assert len(out) == 3


def test_fault_set_validation(steane_t):
    locs = enumerate_fault_locations(steane_t)
    with pytest.raises(InvalidLocationError):
        FaultSet(((locs[0], single(7, 5, "X")),))
    with pytest.raises(InvalidLocationError):
        FaultSet(((locs[0], single(7, 0, "X")), (locs[0], single(7, 0, "Z"))))
    with pytest.raises(InvalidLocationError):
        FaultSet(((locs[0], PauliOperator(7, 0, 0)),))


def _dense_error_paulis(circ, fs):
    """Phaseless Paulis in the expansion of U_faulty U^dag."""
    ideal = circuit_unitary(circ)
    inserts = {}
    for loc, p in fs.faults:
        inserts[loc.position] = inserts[loc.position] * p if loc.position in inserts else p
    err = circuit_unitary(circ, inserts) @ ideal.conj().T
    return {PauliOperator(circ.n, x, z) for x, z in pauli_support(err)}


def test_branches_cover_dense_simulation(steane_t):
    locs = enumerate_fault_locations(steane_t, idle=True)
    rng = random.Random(11)
    pairs = list(itertools.combinations(locs, 2))
    for a, b in rng.sample(pairs, 40):
        fs = FaultSet(((a, rng.choice(a.choices(7))), (b, rng.choice(b.choices(7)))))
        got = propagate_faults(steane_t, fs)
        assert _dense_error_paulis(steane_t, fs) <= got


def test_single_faults_stay_within_one_qubit_per_block(c25_t):
    lifted, cc = c25_t
    for loc in enumerate_fault_locations(lifted):
        for p in loc.choices(lifted.n):
            for r in propagate_faults(lifted, FaultSet(((loc, p),))):
                assert all(r.restrict(range(a, b)).weight <= 1 for a, b in cc.block_map)


def test_check_fault_set(c25_t):
    lifted, cc = c25_t
    locs = enumerate_fault_locations(lifted)
    v = check_fault_set(lifted, cc, fault(locs, 0, single(25, 0, "X")))
    assert v.outcome == CORRECTED and v.witness is None


def test_c25_t_search(c25_t):
    lifted, cc = c25_t
    res = effective_distance_search(lifted, cc, 2)
    assert (res.t_verified, res.status, res.exact) == (1, EXACT, True)
    assert res.effective_distance == 3
    assert check_fault_set(lifted, cc, res.witness).outcome == LOGICAL_FAILURE
    again = effective_distance_search(lifted, cc, 2)
    assert again.witness == res.witness


def test_interleaved_ec_single_faults(c25_t):
    lifted, cc = c25_t
    res = effective_distance_search(lifted, cc, 1, interleaved_ec=True)
    assert res.t_verified == 1


def test_bare_steane_t_tolerates_nothing(steane_t):
    cc = build_concat(ConcatSpec.leaf("steane"))
    res = effective_distance_search(steane_t, cc, 1)
    assert res.t_verified == 0 and len(res.witness) == 1


def test_budget_gives_lower_bound(c25_t):
    lifted, cc = c25_t
    res = effective_distance_search(lifted, cc, 2, budget=1000)
    assert res.status == LOWER_BOUND
    assert res.witness is None


def test_report_omits_wall_time_by_default(c25_t):
    lifted, cc = c25_t
    d = effective_distance_search(lifted, cc, 1).to_dict()
    assert "wall_time_s" not in d
    assert d["sets_checked"] == {"1": 28 * 15 + 21}


def test_gadget_slots_widen_search(c25_t):
    lifted, cc = c25_t
    locs = enumerate_fault_locations(lifted, gadget_slots=3)
    assert sum(l.kind == "slot" for l in locs) == 3


def test_clifford_layer_with_transversal_cz():
    spec = preset("c25")
    lifted = lift_circuit(spec, logical_gate_on(spec.code, named("CZ")))
    assert lifted.n == 50
    res = effective_distance_search(lifted, build_concat(spec), 1)
    assert res.t_verified == 1


def test_mismatched_width(c25_t):
    _, cc = c25_t
    with pytest.raises(ValueError):
        check_fault_set(Circuit(7), cc, FaultSet(()))
