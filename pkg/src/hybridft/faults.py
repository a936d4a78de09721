"""Adversarial fault injection and effective-distance search.

Faults are Pauli operators inserted right after a location (a physical gate,
an internal slot of a gadget, or optionally an idle qubit) and pushed to the
end of the circuit. Clifford gates map Paulis to Paulis. A non-Clifford gate
that receives an X or Y component cannot be tracked exactly, so the engine
branches over every non-identity Pauli on its support; this is a sound
worst-case over-approximation. Ideal error correction runs at the end and,
optionally, between the logical gates of the source circuit.

Internally a Pauli on ``N`` qubits is the integer ``x | z << N`` so that
products are XORs.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .circuit import Circuit, Gate
from .decoder import CORRECTED, LOGICAL_FAILURE, decode_codewords, decoder_plan
from .pauli import PauliOperator, apply_local

__all__ = [
    "DEFAULT_BUDGET",
    "EXACT",
    "LOWER_BOUND",
    "InvalidLocationError",
    "FaultLocation",
    "FaultSet",
    "GadgetModel",
    "Verdict",
    "SearchResult",
    "enumerate_fault_locations",
    "gadget_models",
    "propagate_faults",
    "check_fault_set",
    "effective_distance_search",
]

DEFAULT_BUDGET = 10**8
EXACT = "EXACT"
LOWER_BOUND = "LOWER_BOUND"
_CHUNK = 1 << 15


class InvalidLocationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# locations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FaultLocation:
    """Where a fault may strike.

    ``position`` is the index of the operation after which the fault is
    inserted (-1 = before the first one). Gate and idle locations allow any
    non-identity Pauli on ``support``; gadget slots allow a single-qubit
    Pauli on any qubit of the gadget block.
    """

    id: int
    kind: str
    op: int
    position: int
    support: tuple[int, ...]
    slot: int = 0

    def __post_init__(self):
        if not self.support:
            raise InvalidLocationError("fault location with empty support")

    def choices(self, n: int) -> list[PauliOperator]:
        if self.kind == "slot":
            return [PauliOperator(n, x << q, z << q) for q in self.support for x, z in ((1, 0), (0, 1), (1, 1))]
        out = []
        for idx in range(1, 4 ** len(self.support)):
            x = z = 0
            for j, q in enumerate(self.support):
                d = (idx >> (2 * j)) & 3
                x |= (d & 1) << q
                z |= (d >> 1) << q
            out.append(PauliOperator(n, x, z))
        return out

    def allows(self, p: PauliOperator) -> bool:
        mask = sum(1 << q for q in self.support)
        if p.is_identity() or (p.x | p.z) & ~mask:
            return False
        return self.kind != "slot" or p.weight == 1

    def label(self) -> str:
        if self.kind == "input":
            return "input"
        tag = f"g{self.op + 1}"
        if self.kind == "slot":
            tag += f".slot{self.slot + 1}"
        elif self.kind == "idle":
            tag = f"idle@layer{self.op + 1}"
        return tag


@dataclass(frozen=True)
class GadgetModel:
    label: str
    action: Gate
    slots: int
    support: tuple[int, ...]


def gadget_models(c: Circuit, slots: int = 1) -> list[tuple[int, GadgetModel]]:
    return [(i, GadgetModel(op.gate.label, op.gate.action, slots, tuple(op.targets)))
            for i, op in enumerate(c.ops) if op.gate.name == "GADGET"]


def _layers(c: Circuit) -> list[int]:
    depth = [0] * c.n
    out = []
    for op in c.ops:
        qs = list(op.targets)
        lay = max(depth[q] for q in qs)
        for q in qs:
            depth[q] = lay + 1
        out.append(lay)
    return out


def enumerate_fault_locations(c: Circuit, idle: bool = False, gadget_slots: int = 1) -> list[FaultLocation]:
    """One location per physical gate, each gadget's internal slots and,
    with ``idle``, one per qubit at the input and per idle qubit and layer."""
    raw: list[tuple] = []
    for i, op in enumerate(c.ops):
        if op.gate.name == "GADGET":
            for s in range(gadget_slots):
                raw.append(("slot", i, i, tuple(op.targets), s))
        elif op.gate.name != "PERM":
            raw.append(("gate", i, i, tuple(op.targets), 0))
    if idle:
        for q in range(c.n):
            raw.append(("input", -1, -1, (q,), 0))
        layers = _layers(c)
        depth = max(layers, default=-1) + 1
        busy = [set() for _ in range(depth)]
        for i, (op, lay) in enumerate(zip(c.ops, layers)):
            busy[lay].update(op.targets)
        for lay in range(depth):
            for q in range(c.n):
                if q in busy[lay]:
                    continue
                pos = max((i for i, (op, l2) in enumerate(zip(c.ops, layers)) if l2 < lay and q in op.targets),
                          default=-1)
                raw.append(("idle", lay, pos, (q,), 0))
    raw.sort(key=lambda r: (r[2], {"input": 0, "gate": 1, "slot": 2, "idle": 3}[r[0]], r[1], r[3], r[4]))
    return [FaultLocation(k, kind, op, pos, sup, slot) for k, (kind, op, pos, sup, slot) in enumerate(raw)]


@dataclass(frozen=True)
class FaultSet:
    faults: tuple[tuple[FaultLocation, PauliOperator], ...]

    def __post_init__(self):
        ids = [loc.id for loc, _ in self.faults]
        if len(set(ids)) != len(ids):
            raise InvalidLocationError("a fault set uses each location at most once")
        for loc, p in self.faults:
            if not loc.allows(p):
                raise InvalidLocationError(f"Pauli {p} not allowed at location {loc.label()}")

    def __len__(self):
        return len(self.faults)

    def render(self) -> list[dict]:
        out = []
        for loc, p in self.faults:
            out.append({
                "location": loc.id,
                "at": loc.label(),
                "qubits": [f"q{q + 1}" for q in p.support],
                "pauli": "".join(p.letter(q) for q in p.support),
            })
        return out


@dataclass(frozen=True)
class Verdict:
    outcome: str
    residual: PauliOperator
    witness: FaultSet | None = None
    branches: int = 1


# ---------------------------------------------------------------------------
# propagation
# ---------------------------------------------------------------------------

def _paulis_on(qubits: Sequence[int], n: int, single: bool = False) -> list[int]:
    out = []
    for idx in range(1, 4 ** len(qubits)):
        v = 0
        for j, q in enumerate(qubits):
            d = (idx >> (2 * j)) & 3
            v |= (d & 1) << q
            v |= (d >> 1) << (q + n)
        out.append(v)
    return out


class _Compiled:
    """Circuit turned into bit operations on the packed representation."""

    _FAST = {"H", "S", "SDG", "K", "CNOT", "CZ", "SWAP"}

    def __init__(self, c: Circuit):
        self.n = c.n
        self.steps = [self._compile(op) for op in c.ops]
        self.branching = [i for i, s in enumerate(self.steps) if s[0] in ("BRANCH", "GBRANCH")]

    def _compile(self, op):
        g, t, n = op.gate, tuple(op.targets), self.n
        if g.name == "PERM":
            return ("PERM", t, tuple(t[p] for p in g.perm))
        if g.name == "GADGET":
            a = g.action.arity or 1
            size = len(t) // a
            slices = [tuple(t[b * size + j] for b in range(a)) for j in range(size)]
            if g.action.is_clifford():
                return ("GCLIFF", g.action.tableau(), slices)
            diag = g.action.is_diagonal()
            return ("GBRANCH", [(sum(1 << q for q in s), _slice_mask(s, n), _paulis_on(s, n)) for s in slices], diag)
        if not g.is_clifford():
            return ("BRANCH", [(sum(1 << q for q in t), _slice_mask(t, n), _paulis_on(t, n))], g.is_diagonal())
        name = g.name
        if name == "CKZ":
            name = g._ckz_clifford_name()
        if name in ("I", "X", "Y", "Z"):
            return ("NOP",)
        if name in self._FAST:
            return (name, t)
        return ("CLIFF", g.tableau(), [t])

    def step(self, i: int, v: int) -> Iterable[int]:
        s = self.steps[i]
        kind = s[0]
        if kind in ("BRANCH", "GBRANCH"):
            return self._branch(s[1], s[2], v)
        return (self.apply(s, v),)

    def _branch(self, parts, diag, v):
        out = [v]
        for xmask, full, pats in parts:
            hit = v & (xmask if diag else full)
            if not hit:
                continue
            nxt = []
            for w in out:
                base = w & ~full
                nxt.extend(base | p for p in pats)
            out = nxt
        return out

    def apply(self, s, v: int) -> int:
        n = self.n
        kind = s[0]
        if kind == "NOP":
            return v
        if kind in ("H", "S", "SDG", "K"):
            q = s[1][0]
            x, z = (v >> q) & 1, (v >> (q + n)) & 1
            if kind == "H":
                nx, nz = z, x
            elif kind == "K":
                nx, nz = z, x ^ z
            else:
                nx, nz = x, z ^ x
            return (v & ~((1 << q) | (1 << (q + n)))) | (nx << q) | (nz << (q + n))
        if kind == "CNOT":
            a, b = s[1]
            v ^= ((v >> a) & 1) << b
            v ^= ((v >> (b + n)) & 1) << (a + n)
            return v
        if kind == "CZ":
            a, b = s[1]
            xa, xb = (v >> a) & 1, (v >> b) & 1
            return v ^ (xb << (a + n)) ^ (xa << (b + n))
        if kind == "SWAP":
            a, b = s[1]
            return _move(v, n, (a, b), (b, a))
        if kind == "PERM":
            return _move(v, n, s[1], s[2])
        if kind in ("CLIFF", "GCLIFF"):
            tab = s[1]
            for qs in s[2]:
                v = _apply_tableau(v, n, tab, qs)
            return v
        raise AssertionError(kind)

    def run(self, v: int, start: int, stop: int) -> int:
        """Clifford-only propagation through ops [start, stop)."""
        for i in range(start, stop):
            v = self.apply(self.steps[i], v)
        return v


def _slice_mask(qs, n):
    return sum((1 << q) | (1 << (q + n)) for q in qs)


def _move(v: int, n: int, src, dst) -> int:
    mask = _slice_mask(src, n)
    out = v & ~mask
    for a, b in zip(src, dst):
        out |= ((v >> a) & 1) << b
        out |= ((v >> (a + n)) & 1) << (b + n)
    return out


def _apply_tableau(v: int, n: int, tab, qs) -> int:
    mask = _slice_mask(qs, n)
    if not v & mask:
        return v
    p = PauliOperator(n, v & ((1 << n) - 1), v >> n)
    q = apply_local(p, tab, qs)
    return (v & ~mask) | (q.x & sum(1 << t for t in qs)) | ((q.z & sum(1 << t for t in qs)) << n)


def _pack(p: PauliOperator) -> int:
    return p.x | (p.z << p.n)


def _unpack(v: int, n: int) -> PauliOperator:
    return PauliOperator(n, v & ((1 << n) - 1), v >> n)


def _group_ends(c: Circuit) -> set[int]:
    """Indices after which the source logical gate changes."""
    ends = set()
    for i in range(len(c.ops) - 1):
        if c.ops[i].group != c.ops[i + 1].group:
            ends.add(i)
    return ends


def _propagate(comp: _Compiled, c: Circuit, f: FaultSet, ec=None) -> tuple[set[int], bool]:
    by_pos: dict[int, int] = {}
    for loc, p in f.faults:
        if loc.position >= len(c.ops) or loc.position < -1:
            raise InvalidLocationError(f"location {loc.label()} outside the circuit")
        by_pos[loc.position] = by_pos.get(loc.position, 0) ^ _pack(p)
    branches = {by_pos.get(-1, 0)}
    ends = _group_ends(c) if ec is not None else set()
    for i in range(len(comp.steps)):
        nxt = set()
        for v in branches:
            nxt.update(comp.step(i, v))
        add = by_pos.get(i, 0)
        branches = {v ^ add for v in nxt} if add else nxt
        if i in ends:
            if ec(branches):
                return branches, True
            branches = {0}
    return branches, False


def propagate_faults(c: Circuit, f: FaultSet) -> set[PauliOperator]:
    """Phaseless residual branches at the end of the circuit."""
    comp = _Compiled(c)
    branches, _ = _propagate(comp, c, f)
    return {_unpack(v, c.n) for v in branches}


def _codewords(c: Circuit, cc) -> int:
    if c.n % cc.n:
        raise ValueError(f"circuit on {c.n} qubits is not a whole number of {cc.n}-qubit codewords")
    return c.n // cc.n


def check_fault_set(c: Circuit, cc, f: FaultSet, interleaved_ec: bool = False) -> Verdict:
    """Propagate ``f`` and decode every branch; corrected only if all branches are."""
    m = _codewords(c, cc)
    comp = _Compiled(c)
    ec = None
    if interleaved_ec:
        plan = decoder_plan(cc, m)
        ec = lambda bs: _fails(plan, bs, c.n).any()  # noqa: E731
    branches, failed_mid = _propagate(comp, c, f, ec)
    ordered = sorted(branches)
    if failed_mid:
        bad = next(v for v in ordered if _fails(decoder_plan(cc, m), [v], c.n)[0])
        return Verdict(LOGICAL_FAILURE, _unpack(bad, c.n), f, len(ordered))
    residual = PauliOperator(c.n, 0, 0)
    for v in ordered:
        p = _unpack(v, c.n)
        results = decode_codewords(cc, p)
        full_x = full_z = 0
        for j, r in enumerate(results):
            full_x |= r.residual.x << (j * cc.n)
            full_z |= r.residual.z << (j * cc.n)
        res = PauliOperator(c.n, full_x, full_z)
        if any(r.outcome != CORRECTED for r in results):
            return Verdict(LOGICAL_FAILURE, res, f, len(ordered))
        if v == ordered[0]:
            residual = res
    return Verdict(CORRECTED, residual, None, len(ordered))


def _fails(plan, branches, n: int) -> np.ndarray:
    vs = list(branches)
    low = (1 << n) - 1
    return plan.decode_ints([v & low for v in vs], [v >> n for v in vs])


# ---------------------------------------------------------------------------
# exhaustive search
# ---------------------------------------------------------------------------

@dataclass
class SearchResult:
    t_verified: int
    witness: FaultSet | None
    status: str
    t_max: int
    locations: int
    sets_checked: dict[int, int] = field(default_factory=dict)
    branch_decodes: int = 0
    wall_time: float = 0.0

    @property
    def effective_distance(self) -> int:
        """2t+1: exact when a witness of size t+1 was found, a lower bound otherwise."""
        return 2 * self.t_verified + 1

    @property
    def exact(self) -> bool:
        return self.witness is not None and len(self.witness) == self.t_verified + 1

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "t_verified": self.t_verified,
            "t_max": self.t_max,
            "status": self.status,
            "effective_distance": self.effective_distance,
            "effective_distance_exact": self.exact,
            "locations": self.locations,
            "sets_checked": {str(k): v for k, v in sorted(self.sets_checked.items())},
            "branch_decodes": self.branch_decodes,
            "witness": None if self.witness is None else self.witness.render(),
        }
        if timing:
            d["wall_time_s"] = round(self.wall_time, 3)
        return d


def _count_sets(sizes: Sequence[int], t: int) -> int:
    """Elementary symmetric polynomial e_t of the per-location choice counts."""
    e = [1] + [0] * t
    for k in sizes:
        for j in range(t, 0, -1):
            e[j] += e[j - 1] * k
    return e[t]


class _Search:
    def __init__(self, c: Circuit, cc, interleaved_ec: bool, idle: bool, gadget_slots: int):
        self.c = c
        self.cc = cc
        self.m = _codewords(c, cc)
        self.n = c.n
        self.plan = decoder_plan(cc, self.m)
        self.comp = _Compiled(c)
        self.locs = enumerate_fault_locations(c, idle, gadget_slots)
        self.choices = [loc.choices(c.n) for loc in self.locs]
        self.interleaved = interleaved_ec and bool(_group_ends(c))
        self.linear = not self.comp.branching and not self.interleaved
        bounds = self.comp.branching + [len(c.ops)]
        self.bounds = bounds
        self.seg = []
        self.vecs = []
        for loc, ch in zip(self.locs, self.choices):
            s = sum(1 for b in self.comp.branching if b <= loc.position)
            stop = bounds[s]
            self.seg.append(s)
            self.vecs.append([self.comp.run(_pack(p), loc.position + 1, stop) for p in ch])
        self._memo = [dict() for _ in range(len(bounds))]
        if self.linear:
            w = self.plan.words
            low = (1 << self.n) - 1
            from .kernels import ints_to_words

            self.vx = [ints_to_words([v & low for v in vs], w) for vs in self.vecs]
            self.vz = [ints_to_words([v >> self.n for v in vs], w) for vs in self.vecs]

    def _seg_run(self, j: int, v: int) -> int:
        memo = self._memo[j]
        r = memo.get(v)
        if r is None:
            r = self.comp.run(v, self.bounds[j - 1] + 1, self.bounds[j])
            memo[v] = r
        return r

    def branches(self, sel: Sequence[tuple[int, int]]) -> set[int]:
        acc = [0] * len(self.bounds)
        for l, k in sel:
            acc[self.seg[l]] ^= self.vecs[l][k]
        cur = {acc[0]}
        for j, b in enumerate(self.comp.branching, start=1):
            nxt = set()
            for v in cur:
                nxt.update(self.comp.step(b, v))
            cur = {self._seg_run(j, v) ^ acc[j] for v in nxt}
        return cur

    def fault_set(self, sel) -> FaultSet:
        return FaultSet(tuple((self.locs[l], self.choices[l][k]) for l, k in sel))

    def size(self, t: int, budget_left: int):
        """Exhaust size-t sets; returns (witness selection or None, sets, decodes, aborted)."""
        if self.linear:
            return self._size_linear(t, budget_left)
        return self._size_branching(t, budget_left)

    def _size_linear(self, t, budget_left):
        total = _count_sets([len(c) for c in self.choices], t)
        if total > budget_left:
            return None, 0, 0, True
        W = self.plan.words
        buf_x, buf_z, owners = [], [], []
        rows = 0
        checked = 0

        def flush():
            nonlocal buf_x, buf_z, owners, rows, checked
            if not rows:
                return None
            fx = np.concatenate(buf_x)
            fz = np.concatenate(buf_z)
            fail = self.plan.decode_words(fx, fz)
            checked += rows
            hit = None
            if fail.any():
                idx = int(np.argmax(fail))
                for combo, start, count in owners:
                    if start <= idx < start + count:
                        hit = (combo, idx - start)
                        break
            buf_x, buf_z, owners, rows = [], [], [], 0
            return hit

        for combo in itertools.combinations(range(len(self.locs)), t):
            x = self.vx[combo[0]]
            z = self.vz[combo[0]]
            for l in combo[1:]:
                x = (x[:, None, :] ^ self.vx[l][None, :, :]).reshape(-1, W)
                z = (z[:, None, :] ^ self.vz[l][None, :, :]).reshape(-1, W)
            owners.append((combo, rows, len(x)))
            buf_x.append(x)
            buf_z.append(z)
            rows += len(x)
            if rows >= _CHUNK:
                hit = flush()
                if hit:
                    return self._decode_hit(*hit), checked, checked, False
        hit = flush()
        if hit:
            return self._decode_hit(*hit), checked, checked, False
        return None, checked, checked, False

    def _decode_hit(self, combo, flat):
        sizes = [len(self.choices[l]) for l in combo]
        ks = []
        for s in reversed(sizes):
            flat, k = divmod(flat, s)
            ks.append(k)
        return list(zip(combo, reversed(ks)))

    def _size_branching(self, t, budget_left):
        total = _count_sets([len(c) for c in self.choices], t)
        if total > budget_left:
            return None, 0, 0, True
        low = (1 << self.n) - 1
        decodes = 0
        checked = 0
        pending: list[tuple[list, list[int]]] = []
        pend_rows = 0

        def flush():
            nonlocal pending, pend_rows, decodes
            if not pending:
                return None
            vs = [v for _, bs in pending for v in bs]
            fail = self.plan.decode_ints([v & low for v in vs], [v >> self.n for v in vs])
            decodes += len(vs)
            hit = None
            if fail.any():
                idx = int(np.argmax(fail))
                for sel, bs in pending:
                    if idx < len(bs):
                        hit = sel
                        break
                    idx -= len(bs)
            pending, pend_rows = [], 0
            return hit

        for combo in itertools.combinations(range(len(self.locs)), t):
            for ks in itertools.product(*(range(len(self.choices[l])) for l in combo)):
                sel = list(zip(combo, ks))
                checked += 1
                if self.interleaved:
                    v = check_fault_set(self.c, self.cc, self.fault_set(sel), interleaved_ec=True)
                    decodes += v.branches
                    if v.outcome != CORRECTED:
                        return sel, checked, decodes, False
                    if decodes > budget_left:
                        return None, checked, decodes, True
                    continue
                bs = sorted(self.branches(sel))
                pending.append((sel, bs))
                pend_rows += len(bs)
                if pend_rows >= _CHUNK:
                    hit = flush()
                    if hit:
                        return hit, checked, decodes, False
                    if decodes > budget_left:
                        return None, checked, decodes, True
        hit = flush()
        if hit:
            return hit, checked, decodes, False
        return None, checked, decodes, decodes > budget_left


def effective_distance_search(c: Circuit, cc, t_max: int, budget: int = DEFAULT_BUDGET,
                              interleaved_ec: bool = False, idle: bool = False,
                              gadget_slots: int = 1) -> SearchResult:
    """Largest t such that every set of at most t faults is corrected.

    Sizes 1..t_max are enumerated exhaustively in a fixed order (location
    subsets lexicographically, then Pauli choices); the first failing set
    found is returned as the witness. If the next size would exceed the
    remaining branch-decode budget the result is flagged LOWER_BOUND.
    """
    start = time.perf_counter()
    s = _Search(c, cc, interleaved_ec, idle, gadget_slots)
    res = SearchResult(0, None, EXACT, t_max, len(s.locs))
    for t in range(1, t_max + 1):
        hit, checked, decodes, aborted = s.size(t, budget - res.branch_decodes)
        res.sets_checked[t] = checked
        res.branch_decodes += decodes
        if aborted:
            res.status = LOWER_BOUND
            break
        if hit is not None:
            res.witness = s.fault_set(hit)
            break
        res.t_verified = t
    res.wall_time = time.perf_counter() - start
    return res
