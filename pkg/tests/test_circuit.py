from fractions import Fraction

import pytest

from hybridft.circuit import Circuit, TABLE_GATES, ckz, gadget, gate_from_name, named, parse_theta, permutation


def test_theta_parsing():
    assert parse_theta("pi/4") == Fraction(1, 4)
    assert parse_theta("0") == 0
    assert ckz(0, "9pi/4").theta == Fraction(1, 4)


@pytest.mark.parametrize("name,clifford", [("H", True), ("K", True), ("S", True), ("CZ", True), ("T", False), ("CCZ", False)])
def test_table_gate_classes(name, clifford):
    assert TABLE_GATES[name].is_clifford() is clifford


def test_small_ckz_are_named_cliffords():
    assert ckz(0, Fraction(1, 2)).is_clifford()
    assert ckz(1, 1).tableau() == named("CZ").tableau()


def test_gate_from_name():
    assert gate_from_name("ckz(2,pi)") == TABLE_GATES["CCZ"]
    with pytest.raises(ValueError):
        gate_from_name("FOO")


def test_variants_deduplicate():
    tags = [t for t, _ in named("H").variants()]
    assert tags == ["plain"]
    tags = [t for t, _ in named("S").variants()]
    assert tags == ["plain", "dagger"]


def test_append_validates_targets():
    c = Circuit(3)
    with pytest.raises(ValueError):
        c.append(named("CNOT"), [0, 0])
    with pytest.raises(ValueError):
        c.append(named("H"), [3])
    with pytest.raises(ValueError):
        c.append(named("CZ"), [0])


def test_text_round_trip():
    c = Circuit(4, blocks=[(0, 2), (2, 4)])
    c.append(named("H"), [0])
    c.append(ckz(0, Fraction(1, 4)), [1])
    c.append(permutation((1, 0)), [2, 3])
    c.append(gadget("switch:T", TABLE_GATES["T"]), [0, 1], group=0)
    back = Circuit.from_text(c.to_text())
    assert back.to_text() == c.to_text()
    assert back.ops[3].gate.action == TABLE_GATES["T"]


def test_inverse_reverses_and_daggers():
    c = Circuit(1)
    c.append(named("S"), [0])
    c.append(named("H"), [0])
    inv = c.inverse()
    assert [op.gate.name for op in inv.ops] == ["H", "SDG"]


def test_coupled_qubits_ignore_permutations():
    c = Circuit(3)
    c.append(permutation((1, 0)), [0, 1])
    c.append(named("CNOT"), [1, 2])
    assert c.coupled_qubits() == {1, 2}
