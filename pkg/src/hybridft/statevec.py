"""Dense state-vector simulation for checking logical actions on small codes.

Amplitude index bit ``i`` is qubit ``i`` (little-endian). Arrays may carry
trailing batch axes, which lets the same routines build full unitaries by
pushing every basis column at once.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Circuit, Gate
from .codes import StabilizerCode
from .pauli import PauliOperator

__all__ = [
    "MAX_DENSE_QUBITS",
    "TOL",
    "InfeasibleSizeError",
    "GadgetPresentError",
    "DenseState",
    "gate_matrix",
    "apply_gate",
    "apply_circuit",
    "apply_pauli",
    "encode_logical",
    "encode_basis",
    "verify_logical_action",
    "circuit_unitary",
    "pauli_support",
]

MAX_DENSE_QUBITS = 20
TOL = 1e-9

_SQ = 1 / math.sqrt(2)
_ONE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], complex),
    "Y": np.array([[0, -1j], [1j, 0]], complex),
    "Z": np.diag([1, -1]).astype(complex),
    "H": np.array([[_SQ, _SQ], [_SQ, -_SQ]], complex),
    "S": np.diag([1, 1j]),
    "SDG": np.diag([1, -1j]),
}
_ONE_QUBIT["K"] = _ONE_QUBIT["S"] @ _ONE_QUBIT["H"]
_TWO_QUBIT = {
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], complex),
}


class InfeasibleSizeError(ValueError):
    pass


class GadgetPresentError(ValueError):
    pass


def _check_size(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise InfeasibleSizeError(f"{n} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}")


def gate_matrix(g: Gate) -> np.ndarray:
    """Unitary of a gate; index bit ``a-1-j`` belongs to target ``j``."""
    if g.name in _ONE_QUBIT:
        return _ONE_QUBIT[g.name]
    if g.name in _TWO_QUBIT:
        return _TWO_QUBIT[g.name]
    if g.name == "CKZ":
        d = np.ones(2 ** (g.k + 1), complex)
        d[-1] = cmath.exp(1j * math.pi * float(g.theta))
        return np.diag(d)
    raise ValueError(f"no matrix for {g}")


@dataclass
class DenseState:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_size(self.n)
        if self.amplitudes.shape[0] != 2 ** self.n:
            raise ValueError("amplitude vector has the wrong length")

    @classmethod
    def zero(cls, n: int) -> "DenseState":
        a = np.zeros(2 ** n, complex)
        a[0] = 1
        return cls(n, a)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "DenseState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def copy(self) -> "DenseState":
        return DenseState(self.n, self.amplitudes.copy())


def _tensor(a: np.ndarray, n: int) -> np.ndarray:
    return a.reshape((2,) * n + a.shape[1:])


def _axis(n: int, q: int) -> int:
    return n - 1 - q


def _apply_matrix(a: np.ndarray, n: int, u: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    k = len(targets)
    t = _tensor(a, n)
    axes = [_axis(n, q) for q in targets]
    t = np.moveaxis(t, axes, list(range(k)))
    shape = t.shape
    t = (u @ t.reshape(2 ** k, -1)).reshape(shape)
    t = np.moveaxis(t, list(range(k)), axes)
    return t.reshape(a.shape)


def _apply_perm(a: np.ndarray, n: int, targets: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    t = _tensor(a, n)
    order = list(range(t.ndim))
    # qubit targets[i] moves to targets[perm[i]]
    for i, p in enumerate(perm):
        order[_axis(n, targets[p])] = _axis(n, targets[i])
    return np.transpose(t, order).reshape(a.shape)


def _apply(a: np.ndarray, n: int, g: Gate, targets: Sequence[int]) -> np.ndarray:
    if g.name == "GADGET":
        raise GadgetPresentError(f"cannot simulate gadget {g}")
    if g.name == "PERM":
        return _apply_perm(a, n, targets, g.perm)
    if g.name == "CKZ":
        idx = np.arange(2 ** n)
        mask = sum(1 << q for q in targets)
        phase = cmath.exp(1j * math.pi * float(g.theta))
        hit = (idx & mask) == mask
        out = a.copy()
        out[hit] *= phase
        return out
    return _apply_matrix(a, n, gate_matrix(g), targets)


def apply_gate(state: DenseState, g: Gate, targets: Sequence[int]) -> DenseState:
    return DenseState(state.n, _apply(state.amplitudes, state.n, g, targets))


def apply_circuit(state: DenseState, circ: Circuit) -> DenseState:
    if circ.n != state.n:
        raise ValueError(f"circuit on {circ.n} qubits, state on {state.n}")
    a = state.amplitudes
    for op in circ.ops:
        a = _apply(a, state.n, op.gate, op.targets)
    return DenseState(state.n, a)


def _pauli_array(a: np.ndarray, p: PauliOperator) -> np.ndarray:
    idx = np.arange(2 ** p.n)
    signs = 1 - 2 * (np.bitwise_count(idx & p.z) & 1).astype(np.int64)
    phase = 1j ** ((p.phase_exp + (p.x & p.z).bit_count()) % 4)
    out = np.empty_like(a)
    shaped = signs.reshape((-1,) + (1,) * (a.ndim - 1))
    out[idx ^ p.x] = a * shaped
    return phase * out


def apply_pauli(state: DenseState, p: PauliOperator) -> DenseState:
    return DenseState(state.n, _pauli_array(state.amplitudes, p))


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------

def _project(a: np.ndarray, p: PauliOperator) -> np.ndarray:
    return 0.5 * (a + _pauli_array(a, p))


def _logical_zero(code: StabilizerCode) -> np.ndarray:
    _check_size(code.n)
    rng = np.random.default_rng(20240611)
    a = rng.normal(size=2 ** code.n) + 1j * rng.normal(size=2 ** code.n)
    for g in code.generators:
        a = _project(a, g)
    a = _project(a, code.logical_z)
    return a / np.linalg.norm(a)


_LOGICAL_STATES = {
    "0": (1, 0),
    "1": (0, 1),
    "+": (_SQ, _SQ),
    "-": (_SQ, -_SQ),
    "+i": (_SQ, 1j * _SQ),
    "-i": (_SQ, -1j * _SQ),
}


def encode_logical(code: StabilizerCode, logical="0") -> DenseState:
    """Codeword for a single-qubit state given by name (0, 1, +, -, +i, -i) or amplitudes."""
    alpha, beta = _LOGICAL_STATES[logical] if isinstance(logical, str) else logical
    zero = _logical_zero(code)
    one = _pauli_array(zero, code.logical_x)
    a = alpha * zero + beta * one
    return DenseState(code.n, a / np.linalg.norm(a))


def encode_basis(blocks: Sequence[StabilizerCode], bits: Sequence[int]) -> np.ndarray:
    """Encoded computational basis state, block 0 on the lowest qubits."""
    out = np.ones(1, complex)
    for c, b in zip(blocks, bits):
        out = np.kron(encode_logical(c, str(b)).amplitudes, out)
    return out


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def verify_logical_action(blocks: Sequence[StabilizerCode], circ: Circuit, target) -> float:
    """Largest ``|1 - |<expected|actual>||`` over all encoded basis states and
    their uniform superposition. ``target`` is a Gate or a unitary in which
    index bit ``k-1-j`` belongs to block ``j``."""
    n = sum(c.n for c in blocks)
    _check_size(n)
    if circ.n != n:
        raise ValueError(f"circuit on {circ.n} qubits, blocks hold {n}")
    if any(op.gate.name == "GADGET" for op in circ.ops):
        raise GadgetPresentError("circuit contains gadget placeholders")
    u = gate_matrix(target) if isinstance(target, Gate) else np.asarray(target, complex)
    k = len(blocks)
    if u.shape != (2 ** k, 2 ** k):
        raise ValueError(f"target acts on {int(math.log2(u.shape[0]))} qubits, expected {k}")
    basis = []
    for s in range(2 ** k):
        bits = [(s >> (k - 1 - j)) & 1 for j in range(k)]
        basis.append(encode_basis(blocks, bits))
    basis = np.stack(basis, axis=1)
    expected = basis @ u
    inputs = [basis[:, s] for s in range(2 ** k)] + [basis.sum(axis=1) / math.sqrt(2 ** k)]
    wanted = [expected[:, s] for s in range(2 ** k)] + [expected.sum(axis=1) / math.sqrt(2 ** k)]
    worst = 0.0
    for psi, want in zip(inputs, wanted):
        got = apply_circuit(DenseState(n, psi), circ).amplitudes
        worst = max(worst, abs(1 - abs(np.vdot(want, got))))
    return worst


def circuit_unitary(circ: Circuit, inserts: dict[int, PauliOperator] | None = None) -> np.ndarray:
    """Full unitary, optionally with Paulis inserted after given op indices (-1 = before all)."""
    n = circ.n
    _check_size(n)
    inserts = inserts or {}
    a = np.eye(2 ** n, dtype=complex)
    if -1 in inserts:
        a = _pauli_array(a, inserts[-1])
    for i, op in enumerate(circ.ops):
        a = _apply(a, n, op.gate, op.targets)
        if i in inserts:
            a = _pauli_array(a, inserts[i])
    return a


def _walsh(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    h = 1
    while h < len(v):
        v = v.reshape(-1, 2, h)
        v = np.stack([v[:, 0] + v[:, 1], v[:, 0] - v[:, 1]], axis=1).reshape(-1)
        h *= 2
    return v


def pauli_support(e: np.ndarray, tol: float = 1e-9) -> set[tuple[int, int]]:
    """(x, z) bit pairs of the Paulis with nonzero weight in the expansion of ``e``."""
    dim = e.shape[0]
    idx = np.arange(dim)
    out = set()
    for xa in range(dim):
        w = _walsh(e[idx ^ xa, idx]) / dim
        for zb in np.nonzero(np.abs(w) > tol)[0]:
            out.add((xa, int(zb)))
    return out
