import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridft import _accel
from hybridft.codes import make_code
from hybridft.concat import ConcatSpec, build_concat, preset
from hybridft.decoder import CORRECTED, LOGICAL_FAILURE, decode_hierarchical, decoder_plan, syndrome_table
from hybridft.pauli import PauliOperator, single


@pytest.mark.parametrize("name", ["five_qubit", "steane", "rm15"])
def test_tables_correct_every_single_error(name):
    c = make_code(name)
    tab = syndrome_table(c)
    for q in range(c.n):
        for letter in "XYZ":
            e = single(c.n, q, letter)
            tx, tz = tab.correction(tab.syndrome(e.x, e.z))
            r = PauliOperator(c.n, e.x ^ tx, e.z ^ tz)
            assert c.in_stabilizer_group(r, signed=False)


def test_five_qubit_table_is_perfect():
    tab = syndrome_table(make_code("five_qubit"))
    assert len(tab.tx) == 16


def test_leaf_spec_matches_flat_lookup():
    cc = build_concat(ConcatSpec.leaf("steane"))
    for q in range(7):
        assert decode_hierarchical(cc, single(7, q, "Y")).outcome == CORRECTED
    assert decode_hierarchical(cc, PauliOperator.from_string("XXIIIII")).outcome == LOGICAL_FAILURE


@pytest.mark.parametrize("name", ["c23", "c25", "c31", "c35", "c49"])
def test_two_errors_always_corrected(name):
    cc = build_concat(preset(name))
    rng = np.random.default_rng(7)
    for _ in range(200):
        a, b = rng.choice(cc.n, 2, replace=False)
        e = single(cc.n, int(a), "XYZ"[rng.integers(3)]) * single(cc.n, int(b), "XYZ"[rng.integers(3)])
        assert decode_hierarchical(cc, e).outcome == CORRECTED


def test_two_bare_qubit_errors_on_c25():
    cc = build_concat(preset("c25"))
    # the last four outer qubits are bare
    bare = [a for a, b in cc.block_map if b - a == 1]
    assert len(bare) == 4
    e = single(25, bare[0], "X") * single(25, bare[1], "Z")
    assert decode_hierarchical(cc, e).outcome == CORRECTED


def test_logical_operator_fails():
    cc = build_concat(preset("c25"))
    res = decode_hierarchical(cc, cc.flat.logical_x.phaseless())
    assert res.outcome == LOGICAL_FAILURE and res.letter == "X"


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["c23", "c25", "c49"]), st.integers(0), st.integers(0))
def test_plan_agrees_with_reference(name, x, z):
    cc = build_concat(preset(name))
    mask = (1 << cc.n) - 1
    x &= mask
    z &= mask
    ref = decode_hierarchical(cc, PauliOperator(cc.n, x, z))
    fast = decoder_plan(cc).decode_ints([x], [z])[0]
    assert bool(fast) == (ref.outcome == LOGICAL_FAILURE)
    # the residual is in the normalizer with the reported class
    assert cc.flat.syndrome(ref.residual) == 0
    assert cc.flat.logical_class(ref.residual) == ref.letter


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba unavailable")
def test_backends_agree_on_batches():
    cc = build_concat(preset("c49"))
    rng = np.random.default_rng(3)
    xs = [int(v) for v in rng.integers(0, 2 ** 62, 300)]
    zs = [int(v) for v in rng.integers(0, 2 ** 62, 300)]
    xs = [v & ((1 << 49) - 1) for v in xs]
    zs = [v & ((1 << 49) - 1) for v in zs]
    plan = decoder_plan(cc)
    prev = _accel.set_backend("numpy")
    try:
        slow = plan.decode_ints(xs, zs)
    finally:
        _accel.set_backend(prev)
    _accel.set_backend("numba")
    try:
        fast = plan.decode_ints(xs, zs)
    finally:
        _accel.set_backend(prev)
    assert np.array_equal(slow, fast)


def test_wrong_size():
    with pytest.raises(ValueError):
        decode_hierarchical(build_concat(preset("c25")), single(7, 0, "X"))
