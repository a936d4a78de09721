"""Hybrid concatenated codes: construction, distances and gate lifting.

A :class:`ConcatSpec` names an outer code and, for each of its qubits, either
``None`` (left unencoded) or a nested spec. The five codes of the comparison
table are available as presets ``c25``, ``c49``, ``c23``, ``c31`` and ``c35``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence, Union

import numpy as np

from . import kernels
from .circuit import Circuit, Gate, TABLE_GATES, as_ckz, gadget, permutation
from .codes import (
    MAX_SEARCH_QUBITS,
    StabilizerCode,
    code_distance,
    make_code,
    min_weight_logical_rep,
    validate_code,
)
from .pauli import PauliOperator, pauli_multiply
from .synth import (
    check_transversal,
    find_transversal_permutation,
    synth_ckz,
    transversal_circuit,
    transversal_realization,
)

__all__ = [
    "ConcatSpec",
    "ConcatCode",
    "MalformedSpecError",
    "LiftError",
    "UnclassifiableGateError",
    "NOT_APPLICABLE",
    "EXACT",
    "PREDICTED",
    "PRESETS",
    "preset",
    "build_concat",
    "overall_distance",
    "predict_effective_distance",
    "lift_circuit",
    "weighted_distance",
]

NOT_APPLICABLE = "NOT_APPLICABLE"
EXACT = "EXACT"
PREDICTED = "PREDICTED"
POLICIES = ("switch", "msd", "pft")


class MalformedSpecError(ValueError):
    pass


class LiftError(ValueError):
    pass


class UnclassifiableGateError(ValueError):
    pass


Child = Union[None, "ConcatSpec"]


@dataclass(frozen=True)
class ConcatSpec:
    root: str
    children: tuple[Child, ...]
    gadget_level: int = 1
    name: str = ""

    def __post_init__(self):
        code = make_code(self.root)
        kids = tuple(_coerce_child(c) for c in self.children)
        object.__setattr__(self, "children", kids)
        if len(kids) != code.n:
            raise MalformedSpecError(f"{self.root} has {code.n} qubits but {len(kids)} children were given")
        if not 1 <= self.gadget_level <= self.levels:
            raise MalformedSpecError(f"gadget level {self.gadget_level} outside 1..{self.levels}")

    @classmethod
    def leaf(cls, root: str) -> "ConcatSpec":
        return cls(root, (None,) * make_code(root).n)

    @property
    def code(self) -> StabilizerCode:
        return make_code(self.root)

    @property
    def levels(self) -> int:
        return 1 + max((c.levels for c in self.children if c is not None), default=0)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        kids = ",".join("bare" if c is None else c.label for c in self.children)
        return f"{self.root}({kids})" if any(c is not None for c in self.children) else self.root

    def structure(self):
        """Hashable shape used to compare sibling blocks (names ignored)."""
        return (self.root, tuple(None if c is None else c.structure() for c in self.children))

    def to_dict(self) -> dict:
        def child(c):
            if c is None:
                return "bare"
            if all(g is None for g in c.children) and c.gadget_level == 1:
                return c.root
            return c.to_dict()

        d = {"root": self.root, "children": [child(c) for c in self.children]}
        if self.gadget_level != 1:
            d["gadget_level"] = self.gadget_level
        if self.name:
            d["name"] = self.name
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: Mapping) -> "ConcatSpec":
        if "root" not in d or "children" not in d:
            raise MalformedSpecError("spec needs 'root' and 'children'")
        return cls(d["root"], tuple(d["children"]), int(d.get("gadget_level", 1)), d.get("name", ""))

    @classmethod
    def from_json(cls, text: str) -> "ConcatSpec":
        return cls.from_dict(json.loads(text))


def _coerce_child(c) -> Child:
    if c is None or c == "bare":
        return None
    if isinstance(c, ConcatSpec):
        return c
    if isinstance(c, str):
        return ConcatSpec.leaf(c)
    if isinstance(c, Mapping):
        return ConcatSpec.from_dict(c)
    raise MalformedSpecError(f"cannot interpret child {c!r}")


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def coupled_set(root: str) -> frozenset[int]:
    """Outer qubits coupled by the root code's C^k Z construction (B1)."""
    return frozenset(min_weight_logical_rep(make_code(root), "Z").support)


def _hybrid(name: str, root: str, inner: str, b2: str | None) -> ConcatSpec:
    b1 = coupled_set(root)
    kids = [inner if i in b1 else b2 for i in range(make_code(root).n)]
    return ConcatSpec(root, tuple(kids), name=name)


PRESET_RECIPES = {
    "c25": ("steane", "steane", None),
    "c49": ("steane", "steane", "steane"),
    "c23": ("five_qubit", "steane", None),
    "c31": ("five_qubit", "steane", "five_qubit"),
    "c35": ("five_qubit", "steane", "steane"),
}
PRESETS = tuple(PRESET_RECIPES)


@lru_cache(maxsize=None)
def preset(name: str) -> ConcatSpec:
    if name not in PRESET_RECIPES:
        raise MalformedSpecError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return _hybrid(name, *PRESET_RECIPES[name])


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

@dataclass
class ConcatCode:
    spec: ConcatSpec
    flat: StabilizerCode
    block_map: list[tuple[int, int]]
    children: list["ConcatCode | None"]
    case_tag: str

    @property
    def n(self) -> int:
        return self.flat.n

    @property
    def root(self) -> StabilizerCode:
        return self.spec.code


def _case_tag(spec: ConcatSpec) -> str:
    kids = spec.children
    if all(c is None for c in kids):
        return "unencoded"
    if any(c is None for c in kids):
        return "Case1"
    shapes = {c.structure() for c in kids}
    if len(shapes) == 1:
        return "Case2=3" if kids[0].root == spec.root else "Case3"
    b1 = coupled_set(spec.root)
    inner = {kids[i].structure() for i in b1}
    rest = {kids[i].structure() for i in range(len(kids)) if i not in b1}
    if len(inner) == 1 and rest == {ConcatSpec.leaf(spec.root).structure()}:
        return "Case2"
    return "other"


def _substitute(outer: PauliOperator, n_total: int, child_logicals) -> PauliOperator:
    out = PauliOperator(n_total, 0, 0, outer.phase_exp)
    for i, (lx, ly, lz) in enumerate(child_logicals):
        letter = outer.letter(i)
        if letter != "I":
            out = pauli_multiply(out, {"X": lx, "Y": ly, "Z": lz}[letter])
    return out


def build_concat(spec: ConcatSpec) -> ConcatCode:
    """Flatten a spec into one stabilizer code over all physical qubits."""
    return _build(spec)


@lru_cache(maxsize=None)
def _build(spec: ConcatSpec) -> ConcatCode:
    root = spec.code
    subs: list[ConcatCode | None] = [None if c is None else _build(c) for c in spec.children]
    sizes = [1 if s is None else s.n for s in subs]
    N = sum(sizes)
    offsets = [sum(sizes[:i]) for i in range(len(sizes))]
    block_map = [(o, o + s) for o, s in zip(offsets, sizes)]
    gens: list[PauliOperator] = []
    child_logicals = []
    for sub, (a, b) in zip(subs, block_map):
        q = list(range(a, b))
        if sub is None:
            one = [PauliOperator.from_string(s).embed(N, q) for s in ("X", "Y", "Z")]
            child_logicals.append(tuple(one))
            continue
        gens.extend(g.embed(N, q) for g in sub.flat.generators)
        f = sub.flat
        child_logicals.append((f.logical_x.embed(N, q), f.logical_y.embed(N, q), f.logical_z.embed(N, q)))
    gens.extend(_substitute(g, N, child_logicals) for g in root.generators)
    flat = StabilizerCode(
        name=spec.label,
        n=N,
        generators=tuple(gens),
        logical_x=_substitute(root.logical_x, N, child_logicals),
        logical_z=_substitute(root.logical_z, N, child_logicals),
    )
    report = validate_code(flat)
    if not report.ok:
        raise MalformedSpecError(f"concatenated code invalid: {report.failures}")
    return ConcatCode(spec, flat, block_map, subs, _case_tag(spec))


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------

def weighted_distance(code: StabilizerCode, weights: np.ndarray) -> int:
    """Minimum over nontrivial logical operators of the summed per-qubit letter weights.

    ``weights`` has shape (n, 4) indexed by letter code ``x + 2 z`` (I, X, Z, Y).
    """
    weights = np.asarray(weights, dtype=np.int64)
    return min(_coset_weighted(code, which, weights) for which in "XZY")


@lru_cache(maxsize=None)
def _typed_distance(spec: ConcatSpec) -> tuple[int, int, int]:
    """Predicted minimum weight of the X, Z and Y logical cosets of a subtree."""
    code = spec.code
    w = _child_weights(spec, [True] * code.n)
    return tuple(_coset_weighted(code, which, w) for which in "XZY")


def _coset_weighted(code: StabilizerCode, which: str, weights: np.ndarray) -> int:
    sx, sz = kernels._span(code.gen_x, code.gen_z)
    L = code.logical(which)
    ex = sx ^ np.uint64(L.x)
    ez = sz ^ np.uint64(L.z)
    total = np.zeros(len(ex), np.int64)
    for i in range(code.n):
        letter = ((ex >> np.uint64(i)) & np.uint64(1)) + 2 * ((ez >> np.uint64(i)) & np.uint64(1))
        total += weights[i][letter.astype(np.int64)]
    return int(total.min())


def _child_weights(spec: ConcatSpec, protected: Sequence[bool]) -> np.ndarray:
    """Letter weights per outer qubit; unprotected children fail under one fault."""
    w = np.ones((len(spec.children), 4), np.int64)
    w[:, 0] = 0
    for i, (c, ok) in enumerate(zip(spec.children, protected)):
        if c is not None and ok:
            dx, dz, dy = _typed_distance(c)
            w[i, 1], w[i, 2], w[i, 3] = dx, dz, dy
    return w


def predicted_distance(spec: ConcatSpec | None) -> int:
    if spec is None:
        return 1
    return min(_typed_distance(spec))


@dataclass(frozen=True)
class OverallDistance:
    value: int
    tier: str
    predicted: int
    components: dict = field(default_factory=dict, compare=False)


def overall_distance(cc: ConcatCode, max_n: int | None = None) -> OverallDistance:
    """Overall distance with an EXACT tier when the flat code is small enough to search."""
    bound = MAX_SEARCH_QUBITS if max_n is None else max_n
    pred = predicted_distance(cc.spec)
    comps = {}
    for name in sorted({_leaf for _leaf in _codes_in(cc.spec)}):
        comps[name] = code_distance(make_code(name))
    if cc.n <= bound:
        return OverallDistance(code_distance(cc.flat, max_n=bound), EXACT, pred, comps)
    return OverallDistance(pred, PREDICTED, pred, comps)


def _codes_in(spec: ConcatSpec):
    yield spec.root
    for c in spec.children:
        if c is not None:
            yield from _codes_in(c)


# ---------------------------------------------------------------------------
# effective distance rules
# ---------------------------------------------------------------------------

def _valid_permutations(code: StabilizerCode, g: Gate) -> list[tuple[int, ...]]:
    import itertools

    from .synth import MAX_PERMUTATION_SEARCH

    if find_transversal_permutation(code, g) is None or code.n > MAX_PERMUTATION_SEARCH:
        return []
    return [p for p in itertools.permutations(range(code.n)) if check_transversal(code, g, p)]


def _preserves_blocks(spec: ConcatSpec, perm: Sequence[int]) -> bool:
    shape = [None if c is None else c.structure() for c in spec.children]
    return all(shape[i] == shape[perm[i]] for i in range(len(perm)))


def predict_effective_distance(spec: ConcatSpec, gate: Gate, synth_levels: int | None = None):
    """Distance protected while applying ``gate`` on the concatenated code.

    Gates transversal on the outer code (possibly through a permutation that
    only swaps blocks of the same code) keep the overall distance where every
    block also carries them transversally; blocks lacking a transversal
    version count as single points of failure. Other gates are built from the
    single-C^kZ construction on the outer code: a fault inside the coupled
    blocks may spread to all of them, while the uncoupled blocks stay
    protected by the outer code.
    """
    if synth_levels is None:
        synth_levels = spec.levels - spec.gadget_level
    code = spec.code
    if check_transversal(code, gate):
        return _transversal_value(spec, gate)
    family = as_ckz(gate)
    if family is None:
        # permutation transversality is only consulted outside the C^k Z family
        perms = _valid_permutations(code, gate)
        if not perms:
            raise UnclassifiableGateError(f"{gate} is neither transversal on {code.name} nor a C^k Z gate")
        if any(_preserves_blocks(spec, p) for p in perms):
            return _transversal_value(spec, gate)
        return NOT_APPLICABLE
    if synth_levels <= 0:
        return predicted_distance(spec)
    b1 = coupled_set(spec.root)
    d1 = min(_typed_distance(ConcatSpec.leaf(spec.root)))
    coupled = []
    for i in sorted(b1):
        child = spec.children[i]
        if child is None:
            coupled.append(1)
        else:
            v = predict_effective_distance(child, family, synth_levels - 1)
            coupled.append(predicted_distance(child) if v == NOT_APPLICABLE else min(v, predicted_distance(child)))
    others = [predicted_distance(spec.children[i]) for i in range(code.n) if i not in b1]
    value = min(coupled)
    if others:
        value = min(value, d1 * min(others))
    return value


def _transversal_value(spec: ConcatSpec, gate: Gate) -> int:
    protected = []
    for c in spec.children:
        if c is None:
            protected.append(True)
            continue
        sub = predict_effective_distance(c, gate, 0) if _carries(c, gate) else None
        protected.append(sub is not None and sub != NOT_APPLICABLE)
    w = _child_weights(spec, protected)
    return weighted_distance(spec.code, w)


def _carries(spec: ConcatSpec, gate: Gate) -> bool:
    """The gate is transversal on this block all the way down."""
    code = spec.code
    ok = check_transversal(code, gate) or (
        as_ckz(gate) is None and any(_preserves_blocks(spec, p) for p in _valid_permutations(code, gate)))
    return ok and all(c is None or _carries(c, gate) for c in spec.children)


# ---------------------------------------------------------------------------
# lifting logical circuits to physical ones
# ---------------------------------------------------------------------------

def _gate_label(g: Gate) -> str:
    for name, tg in TABLE_GATES.items():
        if tg == g:
            return name
    return str(g)


def _policy_for(policy, g: Gate) -> str | None:
    if policy is None or isinstance(policy, str):
        return policy
    return policy.get(_gate_label(g), policy.get(str(g)))


def lift_circuit(spec: ConcatSpec, level1: Circuit, policy: Union[str, Mapping[str, str], None] = "switch",
                 synth_levels: int | None = None) -> Circuit:
    """Physical circuit for a circuit written on codewords of the outer code.

    Gates transversal on a block become transversal layers on it, bare
    qubits receive the gate itself, and gates with no transversal version
    on the block become gadget placeholders chosen by ``policy``.
    """
    cc = build_concat(spec)
    n1 = spec.code.n
    if level1.n % n1:
        raise LiftError(f"circuit on {level1.n} qubits is not a whole number of {spec.root} codewords")
    m = level1.n // n1
    if synth_levels is None:
        synth_levels = spec.levels - spec.gadget_level - 1
    N = m * cc.n
    blocks = []
    for j in range(m):
        blocks.extend((j * cc.n + a, j * cc.n + b) for a, b in cc.block_map)
    out = Circuit(N, blocks=blocks, name=f"{level1.name or 'circuit'} on {spec.label}")

    def phys(q1: int) -> list[int]:
        a, b = blocks[q1]
        return list(range(a, b))

    for op in level1.ops:
        g = op.gate
        kids = [spec.children[t % n1] for t in op.targets]
        if g.name == "PERM":
            cw = {t // n1 for t in op.targets}
            if len(cw) != 1 or len(op.targets) != n1:
                raise LiftError("permutations must act on one whole codeword")
            local = [t % n1 for t in op.targets]
            perm = [0] * n1
            for i, p in enumerate(g.perm):
                perm[local[i]] = local[p]
            if not _preserves_blocks(spec, perm):
                raise LiftError(f"permutation {g} mixes blocks encoded with different codes")
            base = op.targets[0] - op.targets[0] % n1
            src = [q for i in range(n1) for q in phys(base + i)]
            dst_map = {}
            for i in range(n1):
                for s, d in zip(phys(base + i), phys(base + perm[i])):
                    dst_map[s] = d
            out.append(permutation([src.index(dst_map[s]) for s in src]), src, op.loc)
            continue
        if g.name == "GADGET":
            out.append(g, [q for t in op.targets for q in phys(t)], op.loc)
            continue
        if all(k is None for k in kids):
            out.append(g, [phys(t)[0] for t in op.targets], op.loc)
            continue
        if any(k is None for k in kids) or len({k.structure() for k in kids}) != 1:
            raise LiftError(f"{g} at g{op.loc + 1} couples blocks of different kinds")
        child = kids[0]
        targets = [q for t in op.targets for q in phys(t)]
        sub = _lift_on_child(child, g, policy, synth_levels)
        if sub is None:
            choice = _policy_for(policy, g)
            if choice is None:
                raise LiftError(f"{g} at g{op.loc + 1} is not transversal on {child.root} and no gadget was chosen")
            if choice not in POLICIES:
                raise LiftError(f"unknown gadget policy {choice!r}")
            if choice == "pft" and (g.arity or 1) == 1:
                raise LiftError("pieceable fault tolerance has no single-qubit gadget")
            out.append(gadget(f"{choice}:{_gate_label(g)}", g), targets, op.loc)
            continue
        for sop in sub.ops:
            out.append(sop.gate, [targets[t] for t in sop.targets], op.loc)
    return out


def _lift_on_child(child: ConcatSpec, g: Gate, policy, synth_levels: int) -> Circuit | None:
    """Physical circuit for logical g on ``arity`` blocks of ``child``, or None for a gadget."""
    code = child.code
    if transversal_realization(code, g) is not None:
        inner = transversal_circuit(code, g)
    else:
        perms = [] if as_ckz(g) is not None else [p for p in _valid_permutations(code, g) if _preserves_blocks(child, p)]
        if perms:
            inner = transversal_circuit(code, g, perms[0])
        elif synth_levels > 0 and as_ckz(g) is not None:
            fam = as_ckz(g)
            inner = synth_ckz([code] * (fam.k + 1), fam.k, fam.theta)
        else:
            return None
    if all(c is None for c in child.children):
        return inner
    return lift_circuit(child, inner, policy, synth_levels - 1)
