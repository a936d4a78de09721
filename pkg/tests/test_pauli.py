import pytest
from hypothesis import given, strategies as st

from hybridft.circuit import Circuit, named
from hybridft.pauli import (
    CliffordMap,
    DimensionError,
    PauliOperator,
    clifford_conjugate,
    clifford_from_circuit,
    local_map,
    pauli_commutes,
    pauli_multiply,
    permutation_map,
)


def paulis(n):
    letters = st.text(alphabet="IXYZ", min_size=n, max_size=n)
    prefix = st.sampled_from(["", "-", "i", "-i"])
    return st.builds(lambda p, s: PauliOperator.from_string(p + s), prefix, letters)


def test_parse_and_print_round_trip():
    p = PauliOperator.from_string("-iXIZY")
    assert str(p) == "-iXIZY"
    assert p.weight == 3
    assert p.support == (0, 2, 3)


def test_bad_string():
    with pytest.raises(ValueError):
        PauliOperator.from_string("XQZ")


def test_xz_is_minus_i_y():
    x = PauliOperator.from_string("X")
    z = PauliOperator.from_string("Z")
    assert str(x * z) == "-iY"
    assert str(z * x) == "iY"


def test_size_mismatch():
    with pytest.raises(DimensionError):
        pauli_multiply(PauliOperator.from_string("X"), PauliOperator.from_string("XX"))


@given(paulis(4), paulis(4))
def test_commutation_matches_products(a, b):
    ab, ba = a * b, b * a
    assert (ab.x, ab.z) == (ba.x, ba.z)
    assert pauli_commutes(a, b) == (ab.phase_exp == ba.phase_exp)


@given(paulis(3), paulis(3), paulis(3))
def test_multiplication_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(paulis(3))
def test_square_is_scalar(a):
    sq = a * a
    assert sq.is_identity()


@given(paulis(2))
def test_cnot_conjugation_is_involution(p):
    m = local_map("CNOT")
    assert clifford_conjugate(m, clifford_conjugate(m, p)) == p


def test_cnot_spreads_x_forward_and_z_backward():
    m = local_map("CNOT")
    assert str(clifford_conjugate(m, PauliOperator.from_string("XI"))) == "XX"
    assert str(clifford_conjugate(m, PauliOperator.from_string("IZ"))) == "ZZ"


def test_hadamard_swaps_x_and_z_and_negates_y():
    m = local_map("H")
    assert str(clifford_conjugate(m, PauliOperator.from_string("Y"))) == "-Y"


def test_circuit_tableau_composes_in_time_order():
    c = Circuit(1)
    c.append(named("H"), [0])
    c.append(named("S"), [0])
    # K = S H maps X -> Z -> Z and Z -> X -> Y
    assert clifford_from_circuit(c) == local_map("K")


@pytest.mark.parametrize("name", ["H", "S", "SDG", "K", "CNOT", "CZ", "SWAP", "X", "Y", "Z"])
def test_local_maps_are_symplectic(name):
    assert local_map(name).is_symplectic()


def test_permutation_map():
    m = permutation_map(3, (1, 2, 0))
    assert str(clifford_conjugate(m, PauliOperator.from_string("XZI"))) == "IXZ"
    with pytest.raises(ValueError):
        permutation_map(3, (0, 0, 1))


def test_identity_map():
    assert CliffordMap.identity(3).is_identity()


def test_embed_restrict_inverse():
    p = PauliOperator.from_string("XZ")
    big = p.embed(5, [3, 1])
    assert big.letters == "IZIXI"
    assert big.restrict([3, 1]) == p
