"""Transversal logical gates, the single-non-Clifford C^k Z(theta) construction,
and the coupled-qubit / non-transversal-gate partitions of a logical circuit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .circuit import Circuit, Gate, ckz, named, permutation
from .codes import PauliGroup, StabilizerCode, min_weight_logical_rep
from .pauli import (
    CliffordMap,
    PauliOperator,
    apply_local,
    clifford_conjugate,
    clifford_from_circuit,
    pauli_multiply,
)

__all__ = [
    "NotTransversalError",
    "PartitionResult",
    "check_transversal",
    "transversal_realization",
    "find_transversal_permutation",
    "transversal_circuit",
    "synth_ckz",
    "partition",
    "logical_gate_on",
]

MAX_PERMUTATION_SEARCH = 8


class NotTransversalError(ValueError):
    pass


def _block_count(g: Gate) -> int:
    return g.arity or 1


def _code_key(c: StabilizerCode):
    return (c.name, c.n, tuple(str(g) for g in c.generators), str(c.logical_x), str(c.logical_z))


def _substitute(local: PauliOperator, logicals: Sequence[tuple[PauliOperator, PauliOperator, PauliOperator]]) -> PauliOperator:
    """Replace letter j of ``local`` by the j-th block's logical X/Y/Z."""
    n = logicals[0][0].n
    out = PauliOperator(n, 0, 0, local.phase_exp)
    for j, (lx, ly, lz) in enumerate(logicals):
        letter = local.letter(j)
        if letter != "I":
            out = pauli_multiply(out, {"X": lx, "Y": ly, "Z": lz}[letter])
    return out


def _stacked(c: StabilizerCode, m: int):
    N = m * c.n
    qubits = [list(range(b * c.n, (b + 1) * c.n)) for b in range(m)]
    gens = [g.embed(N, q) for q in qubits for g in c.generators]
    logicals = [(c.logical_x.embed(N, q), c.logical_y.embed(N, q), c.logical_z.embed(N, q)) for q in qubits]
    return N, PauliGroup(N, gens), logicals


def _layer(seq: Sequence[Gate], n: int, m: int, perm: Sequence[int] | None) -> Circuit:
    circ = Circuit(m * n, blocks=[(b * n, (b + 1) * n) for b in range(m)])
    for i in range(n):
        for g in seq:
            circ.append(g, [b * n + i for b in range(m)])
    if perm is not None and tuple(perm) != tuple(range(n)):
        for b in range(m):
            circ.append(permutation(perm), range(b * n, (b + 1) * n))
    return circ


def _permute_pauli(p: PauliOperator, perm: Sequence[int], n: int, m: int) -> PauliOperator:
    x = z = 0
    for b in range(m):
        for i in range(n):
            src = b * n + i
            dst = b * n + perm[i]
            x |= ((p.x >> src) & 1) << dst
            z |= ((p.z >> src) & 1) << dst
    return PauliOperator(p.n, x, z, p.phase_exp)


def _induces(cmap: CliffordMap, group: PauliGroup, gens, logicals, g: Gate,
             perm: Sequence[int] | None, n: int, m: int) -> bool:
    def image(p):
        q = clifford_conjugate(cmap, p)
        return _permute_pauli(q, perm, n, m) if perm is not None else q

    for s in gens:
        if not group.contains(image(s)):
            return False
    target = g.tableau()
    for j in range(m):
        for which, src in (("X", logicals[j][0]), ("Z", logicals[j][2])):
            want_local = target.x_images[j] if which == "X" else target.z_images[j]
            want = _substitute(want_local, logicals)
            got = image(src)
            # got == want * s  <=>  want * got == s
            if not group.contains(pauli_multiply(want, got)):
                return False
    return True


_REALIZE_CACHE: dict = {}


def _realize(c: StabilizerCode, g: Gate, perm: tuple[int, ...] | None) -> tuple[Gate, ...] | None:
    if not g.is_clifford() or g.name in ("PERM", "GADGET"):
        return None
    m = _block_count(g)
    N, group, logicals = _stacked(c, m)
    for _, seq in g.variants():
        cmap = clifford_from_circuit(_layer(seq, c.n, m, None))
        if _induces(cmap, group, group.generators, logicals, g, perm, c.n, m):
            return seq
    return None


def transversal_realization(c: StabilizerCode, g: Gate, perm: Sequence[int] | None = None) -> tuple[Gate, ...] | None:
    """Per-qubit gate sequence (g, its inverse, conjugate or transpose) realising logical g, if any."""
    p = None if perm is None or tuple(perm) == tuple(range(c.n)) else tuple(perm)
    key = (_code_key(c), g, p)
    if key not in _REALIZE_CACHE:
        _REALIZE_CACHE[key] = _realize(c, g, p)
    return _REALIZE_CACHE[key]


def check_transversal(c: StabilizerCode, g: Gate, perm: Sequence[int] | None = None) -> bool:
    """Whether g applied qubit-wise (then ``perm`` on each block) preserves the
    code and induces logical g. Non-Clifford gates give False."""
    return transversal_realization(c, g, perm) is not None


def find_transversal_permutation(c: StabilizerCode, g: Gate) -> tuple[int, ...] | None:
    """First permutation (identity first, then lexicographic) making g transversal.

    Searches only codes with at most ``MAX_PERMUTATION_SEARCH`` qubits.
    """
    if check_transversal(c, g):
        return tuple(range(c.n))
    if c.n > MAX_PERMUTATION_SEARCH:
        return None
    for perm in itertools.permutations(range(c.n)):
        if perm != tuple(range(c.n)) and check_transversal(c, g, perm):
            return perm
    return None


def transversal_circuit(c: StabilizerCode, g: Gate, perm: Sequence[int] | None = None) -> Circuit:
    seq = transversal_realization(c, g, perm)
    if seq is None:
        raise NotTransversalError(f"{g} is not transversal on {c.name}" + (f" with permutation {perm}" if perm else ""))
    m = _block_count(g)
    circ = _layer(seq, c.n, m, perm)
    circ.name = f"transversal {g} on {c.name}"
    return circ


def logical_gate_on(c: StabilizerCode, g: Gate) -> Circuit:
    """Level-1 circuit for logical g on codewords of c.

    Transversal gates are applied qubit-wise; C^k Z(theta) gates otherwise
    use the single-non-Clifford construction; remaining gates fall back on a
    transversal permutation when one exists.
    """
    if check_transversal(c, g):
        return transversal_circuit(c, g)
    from .circuit import as_ckz

    family = as_ckz(g)
    if family is not None:
        return synth_ckz([c] * (family.k + 1), family.k, family.theta)
    perm = find_transversal_permutation(c, g)
    if perm is None:
        raise NotTransversalError(f"{g} is neither transversal on {c.name} nor a C^k Z gate")
    return transversal_circuit(c, g, perm)


# ---------------------------------------------------------------------------
# C^k Z(theta) with a single physical C^k Z(theta)
# ---------------------------------------------------------------------------

def _basis_change(rep: PauliOperator) -> tuple[list[tuple[Gate, tuple[int, ...]]], int]:
    """Clifford ops on supp(rep) taking ``rep`` to +Z on one representative qubit."""
    support = rep.support
    z_letters = [q for q in support if rep.letter(q) == "Z"]
    r = max(z_letters) if z_letters else max(support)
    ops: list[tuple[Gate, tuple[int, ...]]] = []
    for q in support:
        letter = rep.letter(q)
        if letter == "X":
            ops.append((named("H"), (q,)))
        elif letter == "Y":
            ops.append((named("SDG"), (q,)))
            ops.append((named("H"), (q,)))
    for q in support:
        if q != r:
            ops.append((named("CNOT"), (q, r)))
    cur = rep
    for g, t in ops:
        cur = apply_local(cur, g.tableau(), t)
    if cur.phase_exp == 2:
        ops.append((named("X"), (r,)))
        cur = apply_local(cur, named("X").tableau(), (r,))
    assert cur.x == 0 and cur.z == 1 << r and cur.phase_exp == 0, cur
    return ops, r


def synth_ckz(blocks: Sequence[StabilizerCode], k: int, theta) -> Circuit:
    """Logical C^k Z(theta) across ``k + 1`` codewords using one physical C^k Z(theta).

    Each block gets a Clifford V on the support of its minimum-weight logical
    Z that maps that operator to Z on one qubit; the circuit is V, then the
    physical gate on those qubits, then V^dag.
    """
    if len(blocks) != k + 1:
        raise ValueError(f"C^{k}Z needs {k + 1} blocks, got {len(blocks)}")
    gate = theta if isinstance(theta, Gate) else ckz(k, theta)
    sizes = [c.n for c in blocks]
    offsets = [sum(sizes[:b]) for b in range(len(blocks))]
    N = sum(sizes)
    circ = Circuit(N, blocks=[(o, o + s) for o, s in zip(offsets, sizes)],
                   name=f"C^{k}Z({gate.theta}pi) on " + "x".join(c.name for c in blocks))
    prefix: list[tuple[Gate, tuple[int, ...]]] = []
    reps = []
    for c, off in zip(blocks, offsets):
        rep = min_weight_logical_rep(c, "Z")
        ops, r = _basis_change(rep)
        prefix.extend((g, tuple(t + off for t in tg)) for g, tg in ops)
        reps.append(r + off)
    for g, tg in prefix:
        circ.append(g, tg)
    circ.append(gate, reps)
    for g, tg in reversed(prefix):
        for h in g.dagger():
            circ.append(h, tg)
    return circ


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PartitionResult:
    b1: frozenset[int]
    b2: frozenset[int]
    s1: frozenset[int]
    s2: frozenset[int]

    def render(self) -> dict[str, list[str]]:
        return {
            "B1": [f"q{q + 1}" for q in sorted(self.b1)],
            "B2": [f"q{q + 1}" for q in sorted(self.b2)],
            "S1": [f"g{g + 1}" for g in sorted(self.s1)],
            "S2": [f"g{g + 1}" for g in sorted(self.s2)],
        }


def partition(u: Circuit, inner_code: StabilizerCode) -> PartitionResult:
    """Coupled qubits (B1) vs the rest, and gates not transversal on the inner code (S1) vs the rest."""
    b1 = frozenset(u.coupled_qubits())
    b2 = frozenset(range(u.n)) - b1
    s1, s2 = set(), set()
    for op in u.ops:
        ok = op.gate.name == "PERM" or (op.gate.name != "GADGET" and check_transversal(inner_code, op.gate))
        (s2 if ok else s1).add(op.loc)
    return PartitionResult(b1, b2, frozenset(s1), frozenset(s2))
