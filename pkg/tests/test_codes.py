import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridft import _accel, kernels
from hybridft.codes import (
    InfeasibleSearchError,
    StabilizerCode,
    UnknownCodeError,
    code_distance,
    make_code,
    min_weight_logical_rep,
    validate_code,
)
from hybridft.pauli import PauliOperator, pauli_commutes

NAMES = ["five_qubit", "steane", "rm15"]


@pytest.mark.parametrize("name,n", [("five_qubit", 5), ("steane", 7), ("rm15", 15)])
def test_parameters(name, n):
    c = make_code(name)
    assert (c.n, c.k) == (n, 1)
    assert validate_code(c).ok
    assert code_distance(c, recompute=True) == 3


def test_unknown_code():
    with pytest.raises(UnknownCodeError):
        make_code("toric")


def test_validation_catches_anticommuting_generators():
    bad = StabilizerCode("bad", 2, (PauliOperator.from_string("XI"), ), PauliOperator.from_string("ZI"),
                         PauliOperator.from_string("IZ"))
    rep = validate_code(bad)
    assert not rep.ok


def test_json_round_trip():
    c = make_code("steane")
    back = StabilizerCode.from_json(c.to_json())
    assert back.generators == c.generators
    assert back.logical_z == c.logical_z


@pytest.mark.parametrize("name,support", [("steane", (0, 1, 6)), ("five_qubit", (0, 2, 4)), ("rm15", None)])
def test_min_weight_logical_z(name, support):
    c = make_code(name)
    rep = min_weight_logical_rep(c, "Z")
    assert rep.weight == 3
    if support is not None:
        assert rep.support == support
    # same coset as the stored operator, same sign
    assert c.in_stabilizer_group(rep * c.logical_z)


def test_distance_search_bound():
    with pytest.raises(InfeasibleSearchError):
        code_distance(make_code("rm15"), max_n=10, recompute=True)


@pytest.mark.parametrize("name", NAMES)
def test_backends_agree_on_coset_weights(name):
    c = make_code(name)
    got = {}
    for be in ("numpy", "numba") if _accel.HAVE_NUMBA else ("numpy",):
        prev = _accel.set_backend(be)
        try:
            got[be] = [kernels.coset_min_weight(c.gen_x, c.gen_z, L.x, L.z)
                       for L in (c.logical_x, c.logical_z, c.logical_y)]
            got[be + "_collect"] = sorted(kernels.coset_collect(c.gen_x, c.gen_z, c.logical_z.x, c.logical_z.z, 3).tolist())
        finally:
            _accel.set_backend(prev)
    if "numba" in got:
        assert got["numba"] == got["numpy"]
        assert got["numba_collect"] == got["numpy_collect"]
    assert got["numpy"] == {"rm15": [7, 3, 7]}.get(name, [3, 3, 3])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(NAMES), st.integers(0, 2 ** 14 - 1))
def test_stabilizer_elements_commute_with_logicals(name, mask):
    c = make_code(name)
    mask &= (1 << len(c.generators)) - 1
    s = c.stabilizer_element(mask)
    assert pauli_commutes(s, c.logical_x) and pauli_commutes(s, c.logical_z)
    assert c.syndrome(s) == 0
    assert c.decompose(s) == mask


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(NAMES), st.integers(0), st.integers(0))
def test_logical_class_consistency(name, x, z):
    c = make_code(name)
    p = PauliOperator(c.n, x % (1 << c.n), z % (1 << c.n))
    for which in "XZY":
        q = p * c.logical(which)
        expected = {"I": which, which: "I"}.get(c.logical_class(p))
        if expected is not None:
            assert c.logical_class(q) == expected


def test_rm15_x_distance_is_seven():
    c = make_code("rm15")
    assert kernels.coset_min_weight(c.gen_x, c.gen_z, c.logical_x.x, c.logical_x.z) == 7


def test_words_layout():
    w = kernels.ints_to_words([1 << 70 | 5], 2)
    assert w.dtype == np.uint64
    assert w.tolist() == [[5, 64]]


def test_env_switch_selects_numpy():
    import os
    import subprocess
    import sys

    env = dict(os.environ, HYBRIDFT_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "import hybridft; print(hybridft.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
