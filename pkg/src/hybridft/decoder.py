"""Hierarchical decoding of concatenated codes.

Inner blocks are decoded first by minimum-weight syndrome lookup; their
induced letters form the error seen by the next level. Each block also
reports soft information: for each logical hypothesis I, X, Z, Y the least
physical weight consistent with its syndrome. The root picks the cheapest
hypothesis, which makes the whole decoder a minimum-weight decoder for the
tree. Without the soft step two single errors on two unencoded outer qubits
would already defeat a distance-5 code.

Letters are indexed ``x + 2 z``: I=0, X=1, Z=2, Y=3.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .codes import StabilizerCode
from .pauli import PauliOperator

__all__ = [
    "CORRECTED",
    "LOGICAL_FAILURE",
    "SyndromeTable",
    "syndrome_table",
    "DecoderPlan",
    "decoder_plan",
    "decode_hierarchical",
    "DecodeResult",
]

CORRECTED = "CORRECTED"
LOGICAL_FAILURE = "LOGICAL_FAILURE"
LETTER_INDEX = {"I": 0, "X": 1, "Z": 2, "Y": 3}
INDEX_LETTER = "IXZY"
# tie-break order of letters inside one support: X < Y < Z
_ORDERED_LETTERS = ((1, 0), (1, 1), (0, 1))


def _parity(v: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(v) & 1).astype(np.int64)


@dataclass(frozen=True)
class SyndromeTable:
    code: StabilizerCode
    tx: np.ndarray
    tz: np.ndarray
    leaf: np.ndarray

    @property
    def ngen(self) -> int:
        return len(self.code.generators)

    def syndrome(self, x: int, z: int) -> int:
        s = 0
        for g, (a, b) in enumerate(zip(self.code.gen_x, self.code.gen_z)):
            if ((x & int(b)) ^ (z & int(a))).bit_count() & 1:
                s |= 1 << g
        return s

    def correction(self, syn: int) -> tuple[int, int]:
        return int(self.tx[syn]), int(self.tz[syn])

    def hypotheses(self) -> list[tuple[int, int]]:
        lx, lz = self.code.logical_x, self.code.logical_z
        return [(0, 0), (lx.x, lx.z), (lz.x, lz.z), (lx.x ^ lz.x, lx.z ^ lz.z)]

    def letter(self, x: int, z: int) -> int:
        """Logical class index of a normalizer element."""
        lx, lz = self.code.logical_x, self.code.logical_z
        ax = ((x & lz.z) ^ (z & lz.x)).bit_count() & 1
        az = ((x & lx.z) ^ (z & lx.x)).bit_count() & 1
        return ax + 2 * az


def _code_key(c: StabilizerCode):
    return (c.name, c.n, tuple(str(g) for g in c.generators), str(c.logical_x), str(c.logical_z))


_TABLES: dict = {}


def syndrome_table(code: StabilizerCode) -> SyndromeTable:
    """Minimum-weight correction for every syndrome.

    Ties go to the lexicographically smallest support, then the smallest
    letter string (X < Y < Z).
    """
    key = _code_key(code)
    if key not in _TABLES:
        _TABLES[key] = _build_table(code)
    return _TABLES[key]


def _build_table(code: StabilizerCode) -> SyndromeTable:
    n, ngen = code.n, len(code.generators)
    size = 1 << ngen
    tx = np.zeros(size, np.uint64)
    tz = np.zeros(size, np.uint64)
    seen = np.zeros(size, bool)
    seen[0] = True
    left = size - 1
    gx, gz = code.gen_x, code.gen_z
    for w in range(1, n + 1):
        if not left:
            break
        lx = np.array([[a for a, _ in combo] for combo in itertools.product(_ORDERED_LETTERS, repeat=w)], np.uint64)
        lz = np.array([[b for _, b in combo] for combo in itertools.product(_ORDERED_LETTERS, repeat=w)], np.uint64)
        supports = itertools.combinations(range(n), w)
        chunk = max(1, (1 << 20) // len(lx))
        while left:
            sup = np.array(list(itertools.islice(supports, chunk)), np.uint64)
            if not len(sup):
                break
            x = np.zeros((len(sup), len(lx)), np.uint64)
            z = np.zeros_like(x)
            for j in range(w):
                x |= lx[None, :, j] << sup[:, None, j]
                z |= lz[None, :, j] << sup[:, None, j]
            x, z = x.ravel(), z.ravel()
            syn = np.zeros(len(x), np.int64)
            for g in range(ngen):
                syn |= _parity((x & gz[g]) ^ (z & gx[g])) << g
            uniq, first = np.unique(syn, return_index=True)
            new = ~seen[uniq]
            uniq, first = uniq[new], first[new]
            tx[uniq] = x[first]
            tz[uniq] = z[first]
            seen[uniq] = True
            left -= len(uniq)
    if left:
        raise RuntimeError(f"syndrome table for {code.name} incomplete")
    sx, sz = kernels._span(gx, gz)
    lgx, lgz = code.logical_x, code.logical_z
    hx = np.array([0, lgx.x, lgz.x, lgx.x ^ lgz.x], np.uint64)
    hz = np.array([0, lgx.z, lgz.z, lgx.z ^ lgz.z], np.uint64)
    leaf = kernels.leaf_costs(tx, tz, hx, hz, sx, sz)
    return SyndromeTable(code, tx, tz, leaf)


_PASSTHROUGH = StabilizerCode("bare", 1, (), PauliOperator.from_string("X"), PauliOperator.from_string("Z"))


# ---------------------------------------------------------------------------
# batched plan
# ---------------------------------------------------------------------------

@dataclass
class _Level:
    blk_code: np.ndarray
    blk_src: np.ndarray
    blk_len: np.ndarray
    blk_leaf: np.ndarray


class DecoderPlan:
    """Flattened decode schedule for ``m`` codewords of a concatenated code.

    Shallow subtrees are padded with pass-through blocks so that every level
    reads only the level directly below it.
    """

    def __init__(self, cc, m: int = 1):
        self.cc = cc
        self.m = m
        self.n = m * cc.n
        self.words = (self.n + 63) // 64
        self._codes: list[StabilizerCode] = [_PASSTHROUGH]
        self._index: dict = {_code_key(_PASSTHROUGH): 0}
        raw: dict[int, list[tuple[int, list[int]]]] = {}

        def add(level: int, code_id: int, srcs: list[int]) -> int:
            blocks = raw.setdefault(level, [])
            blocks.append((code_id, srcs))
            return len(blocks) - 1

        def code_id(c: StabilizerCode) -> int:
            k = _code_key(c)
            if k not in self._index:
                self._index[k] = len(self._codes)
                self._codes.append(c)
            return self._index[k]

        def lift(pos: int, frm: int, to: int) -> int:
            for lvl in range(frm + 1, to + 1):
                pos = add(lvl, 0, [pos])
            return pos

        def place(node, offset: int, target: int) -> int:
            spec = node.spec
            h = spec.levels
            srcs = []
            for sub, (a, _) in zip(node.children, node.block_map):
                if sub is None:
                    srcs.append(lift(offset + a, 0, h - 1))
                else:
                    srcs.append(place(sub, offset + a, h - 1))
            return lift(add(h, code_id(spec.code), srcs), h, target)

        self.height = cc.spec.levels
        for j in range(m):
            place(cc, j * cc.n, self.height)
        self.levels = []
        for lvl in range(1, self.height + 1):
            blocks = raw[lvl]
            width = max(len(s) for _, s in blocks)
            src = np.zeros((len(blocks), width), np.int64)
            for b, (_, s) in enumerate(blocks):
                src[b, :len(s)] = s
            self.levels.append(_Level(
                np.array([c for c, _ in blocks], np.int64),
                src,
                np.array([len(s) for _, s in blocks], np.int64),
                np.full(len(blocks), lvl == 1),
            ))
        self.tables = self._pack_tables()

    def _pack_tables(self):
        tabs = [syndrome_table(c) for c in self._codes]
        C = len(tabs)
        G = max(1, max(t.ngen for t in tabs))
        T = 1 << G
        ngen = np.array([t.ngen for t in tabs], np.int64)
        gx = np.zeros((C, G), np.uint64)
        gz = np.zeros((C, G), np.uint64)
        tx = np.zeros((C, T), np.uint64)
        tz = np.zeros((C, T), np.uint64)
        sx = np.zeros((C, T), np.uint64)
        sz = np.zeros((C, T), np.uint64)
        leaf = np.zeros((C, T, 4), np.int32)
        nstab = np.zeros(C, np.int64)
        lxx, lxz, lzx, lzz = (np.zeros(C, np.uint64) for _ in range(4))
        for i, t in enumerate(tabs):
            c = t.code
            g = t.ngen
            gx[i, :g] = c.gen_x
            gz[i, :g] = c.gen_z
            tx[i, :1 << g] = t.tx
            tz[i, :1 << g] = t.tz
            leaf[i, :1 << g] = t.leaf
            spx, spz = kernels._span(c.gen_x, c.gen_z)
            sx[i, :len(spx)] = spx
            sz[i, :len(spz)] = spz
            nstab[i] = len(spx)
            lxx[i], lxz[i] = c.logical_x.x, c.logical_x.z
            lzx[i], lzz[i] = c.logical_z.x, c.logical_z.z
        return (ngen, gx, gz, tx, tz, lxx, lxz, lzx, lzz, nstab, sx, sz, leaf)

    def decode_words(self, ex: np.ndarray, ez: np.ndarray) -> np.ndarray:
        """Logical-failure flag for each row of bit-packed errors of shape (B, words)."""
        cost = np.zeros((1, 1, 4), np.int32)
        x, z = np.ascontiguousarray(ex, np.uint64), np.ascontiguousarray(ez, np.uint64)
        for level in self.levels:
            x, z, cost = kernels.decode_level(x, z, cost, level, self.tables)
        letters = np.zeros((len(x), self.m), np.int64)
        for j in range(self.m):
            w, b = divmod(j, 64)
            letters[:, j] = ((x[:, w] >> np.uint64(b)) & np.uint64(1)) + 2 * ((z[:, w] >> np.uint64(b)) & np.uint64(1))
        best = np.argmin(cost, axis=2)
        return (letters != best).any(axis=1)

    def decode_ints(self, xs, zs) -> np.ndarray:
        if not len(xs):
            return np.zeros(0, bool)
        return self.decode_words(kernels.ints_to_words(xs, self.words), kernels.ints_to_words(zs, self.words))


@lru_cache(maxsize=64)
def _plan_cached(spec, m: int) -> DecoderPlan:
    from .concat import build_concat

    return DecoderPlan(build_concat(spec), m)


def decoder_plan(cc, m: int = 1) -> DecoderPlan:
    return _plan_cached(cc.spec, m)


# ---------------------------------------------------------------------------
# reference decoder
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecodeResult:
    outcome: str
    residual: PauliOperator
    letter: str


def _decode_node(node, x: int, z: int):
    """Returns (hard letter, hypothesis costs, correction bits) for one subtree."""
    if node is None:
        return x + 2 * z, [0, 1, 1, 1], (0, 0)
    tab = syndrome_table(node.spec.code)
    letters, costs = [], []
    corr_x = corr_z = 0
    for sub, (a, b) in zip(node.children, node.block_map):
        mask = (1 << (b - a)) - 1
        h, c, (cx, cz) = _decode_node(sub, (x >> a) & mask, (z >> a) & mask)
        letters.append(h)
        costs.append(c)
        corr_x |= cx << a
        corr_z |= cz << a
    lx = sum((h & 1) << i for i, h in enumerate(letters))
    lz = sum((h >> 1) << i for i, h in enumerate(letters))
    syn = tab.syndrome(lx, lz)
    tx, tz = tab.correction(syn)
    out = tab.letter(lx ^ tx, lz ^ tz)
    hyp = []
    span_x, span_z = kernels._span(node.spec.code.gen_x, node.spec.code.gen_z)
    for hx, hz in tab.hypotheses():
        best = None
        for sx, sz in zip(span_x.tolist(), span_z.tolist()):
            vx, vz = tx ^ hx ^ sx, tz ^ hz ^ sz
            tot = sum(costs[i][((vx >> i) & 1) + 2 * ((vz >> i) & 1)] for i in range(len(letters)))
            best = tot if best is None else min(best, tot)
        hyp.append(best)
    cx, cz = _lift_bits(node, tx, tz)
    return out, hyp, (corr_x ^ cx, corr_z ^ cz)


def _lift_bits(node, x: int, z: int) -> tuple[int, int]:
    """Physical bits of a root-level Pauli with each letter replaced by the block's logical."""
    ox = oz = 0
    for i, (sub, (a, _)) in enumerate(zip(node.children, node.block_map)):
        bx, bz = (x >> i) & 1, (z >> i) & 1
        if not (bx or bz):
            continue
        if sub is None:
            ox ^= bx << a
            oz ^= bz << a
            continue
        f = sub.flat
        if bx:
            ox ^= f.logical_x.x << a
            oz ^= f.logical_x.z << a
        if bz:
            ox ^= f.logical_z.x << a
            oz ^= f.logical_z.z << a
    return ox, oz


def decode_hierarchical(cc, e: PauliOperator) -> DecodeResult:
    """Decode an error on one codeword of ``cc`` and report the residual class."""
    if e.n != cc.n:
        raise ValueError(f"error has {e.n} qubits, code has {cc.n}")
    h, costs, (cx, cz) = _decode_node(cc, e.x, e.z)
    best = min(range(4), key=lambda i: (costs[i], i))
    tab = syndrome_table(cc.spec.code)
    hx, hz = tab.hypotheses()[best]
    fx, fz = _lift_bits(cc, hx, hz)
    residual = PauliOperator(cc.n, e.x ^ cx ^ fx, e.z ^ cz ^ fz)
    letter = INDEX_LETTER[h ^ best]
    return DecodeResult(CORRECTED if letter == "I" else LOGICAL_FAILURE, residual, letter)


def decode_codewords(cc, e: PauliOperator) -> list[DecodeResult]:
    if e.n % cc.n:
        raise ValueError(f"error on {e.n} qubits is not a whole number of {cc.n}-qubit codewords")
    return [decode_hierarchical(cc, e.restrict(range(j * cc.n, (j + 1) * cc.n))) for j in range(e.n // cc.n)]
