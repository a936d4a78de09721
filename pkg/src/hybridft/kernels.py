"""Hot loops: logical-coset enumeration and batched lookup-table decoding.

Every kernel has a numba version and a numpy version with identical
results; :func:`hybridft._accel.set_backend` picks one at call time.
Pauli vectors are packed into ``uint64`` words, bit ``i`` of word ``w`` being
qubit ``64*w + i``. Coset kernels require a single word (n <= 64).
"""

from __future__ import annotations

import numpy as np

from . import _accel
from ._accel import njit, prange

U64 = np.uint64
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_S1 = np.uint64(1)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S56 = np.uint64(56)
_WORD_MASK = (1 << 64) - 1


@njit(cache=True, inline="always")
def _popcount(v):
    v = v - ((v >> _S1) & _M1)
    v = (v & _M2) + ((v >> _S2) & _M2)
    v = (v + (v >> _S4)) & _M4
    return np.int64((v * _H01) >> _S56)


@njit(cache=True, inline="always")
def _ctz(i):
    j = 0
    while (i & 1) == 0:
        i >>= 1
        j += 1
    return j


# ---------------------------------------------------------------------------
# coset enumeration
# ---------------------------------------------------------------------------

@njit(cache=True, parallel=True)
def _coset_min_nb(gx, gz, lx, lz, hi_bits):
    m = gx.shape[0]
    lo = m - hi_bits
    nchunks = 1 << hi_bits
    best = np.full(nchunks, 1 << 30, np.int64)
    for c in prange(nchunks):
        x = lx
        z = lz
        for j in range(hi_bits):
            if (c >> j) & 1:
                x ^= gx[lo + j]
                z ^= gz[lo + j]
        b = _popcount(x | z)
        for i in range(1, 1 << lo):
            j = _ctz(i)
            x ^= gx[j]
            z ^= gz[j]
            w = _popcount(x | z)
            if w < b:
                b = w
        best[c] = b
    return best.min()


@njit(cache=True)
def _coset_collect_nb(gx, gz, lx, lz, target):
    m = gx.shape[0]
    total = 1 << m
    count = 0
    x = lx
    z = lz
    for i in range(total):
        if i > 0:
            j = _ctz(i)
            x ^= gx[j]
            z ^= gz[j]
        if _popcount(x | z) == target:
            count += 1
    out = np.empty(count, np.int64)
    k = 0
    x = lx
    z = lz
    for i in range(total):
        if i > 0:
            j = _ctz(i)
            x ^= gx[j]
            z ^= gz[j]
        if _popcount(x | z) == target:
            out[k] = i ^ (i >> 1)
            k += 1
    return out


def _span(gx, gz):
    """All XOR combinations; index bit j selects generator j."""
    x = np.zeros(1, U64)
    z = np.zeros(1, U64)
    for a, b in zip(gx, gz):
        x = np.concatenate([x, x ^ a])
        z = np.concatenate([z, z ^ b])
    return x, z


def _split_tables(gx, gz, lx, lz):
    m = len(gx)
    a = m // 2
    lox, loz = _span(gx[:a], gz[:a])
    hix, hiz = _span(gx[a:], gz[a:])
    return a, lox, loz, hix ^ U64(lx), hiz ^ U64(lz)


def _coset_iter_np(gx, gz, lx, lz):
    a, lox, loz, hix, hiz = _split_tables(gx, gz, lx, lz)
    step = max(1, (1 << 20) // len(lox))
    for s in range(0, len(hix), step):
        w = np.bitwise_count((lox[None, :] ^ hix[s:s + step, None]) | (loz[None, :] ^ hiz[s:s + step, None]))
        yield a, s, w


def _coset_min_np(gx, gz, lx, lz):
    return int(min(int(w.min()) for _, _, w in _coset_iter_np(gx, gz, lx, lz)))


def _coset_collect_np(gx, gz, lx, lz, target):
    out = []
    for a, s, w in _coset_iter_np(gx, gz, lx, lz):
        hi, lo = np.nonzero(w == target)
        out.append(lo.astype(np.int64) | ((hi.astype(np.int64) + s) << a))
    res = np.concatenate(out) if out else np.zeros(0, np.int64)
    return np.sort(res)


def _as_words(gx, gz):
    return np.asarray(gx, dtype=U64), np.asarray(gz, dtype=U64)


def coset_min_weight(gx, gz, lx: int, lz: int) -> int:
    """Minimum weight over ``L * <generators>`` (phases ignored)."""
    gx, gz = _as_words(gx, gz)
    if len(gx) == 0:
        return (int(lx) | int(lz)).bit_count()
    if _accel.backend() == "numba":
        hi_bits = min(len(gx), 6)
        return int(_coset_min_nb(gx, gz, U64(lx), U64(lz), hi_bits))
    return _coset_min_np(gx, gz, lx, lz)


def coset_collect(gx, gz, lx: int, lz: int, weight: int) -> np.ndarray:
    """Generator-subset masks of every coset element of the given weight, sorted."""
    gx, gz = _as_words(gx, gz)
    if len(gx) == 0:
        w = (int(lx) | int(lz)).bit_count()
        return np.zeros(1 if w == weight else 0, np.int64)
    if _accel.backend() == "numba":
        return np.sort(_coset_collect_nb(gx, gz, U64(lx), U64(lz), weight))
    return _coset_collect_np(gx, gz, lx, lz, weight)


# ---------------------------------------------------------------------------
# batched soft-output decoding of one concatenation level
# ---------------------------------------------------------------------------
#
# Every block reads the letters of its children (the previous level) and
#   * applies its lookup-table correction to get a hard output letter,
#   * reports, for each logical hypothesis I, X, Z, Y (index x + 2 z), the
#     least total child cost of an error consistent with its syndrome whose
#     residual after the table correction lies in that class.
# Level-1 blocks read physical qubits, whose hypothesis costs are (0, 1, 1, 1);
# for them the costs come from a precomputed table.

@njit(cache=True)
def _decode_level_nb(in_x, in_z, in_cost, blk_code, blk_src, blk_len, blk_leaf,
                     ngen, gx, gz, tx, tz, lxx, lxz, lzx, lzz, nstab, sx, sz, leafcost):
    nb_batch = in_x.shape[0]
    nblocks = blk_code.shape[0]
    wout = (nblocks + 63) // 64
    out_x = np.zeros((nb_batch, wout), np.uint64)
    out_z = np.zeros((nb_batch, wout), np.uint64)
    out_cost = np.zeros((nb_batch, nblocks, 4), np.int32)
    hx = np.empty(4, np.uint64)
    hz = np.empty(4, np.uint64)
    for e in range(nb_batch):
        for b in range(nblocks):
            c = blk_code[b]
            lx = _ZERO
            lz = _ZERO
            for s in range(blk_len[b]):
                p = blk_src[b, s]
                sh = np.uint64(p & 63)
                bx = (in_x[e, p >> 6] >> sh) & _ONE
                bz = (in_z[e, p >> 6] >> sh) & _ONE
                lx |= bx << np.uint64(s)
                lz |= bz << np.uint64(s)
            syn = 0
            for g in range(ngen[c]):
                if _popcount((lx & gz[c, g]) ^ (lz & gx[c, g])) & 1:
                    syn |= 1 << g
            rx = lx ^ tx[c, syn]
            rz = lz ^ tz[c, syn]
            ox = _popcount((rx & lzz[c]) ^ (rz & lzx[c])) & 1
            oz = _popcount((rx & lxz[c]) ^ (rz & lxx[c])) & 1
            sh = np.uint64(b & 63)
            if ox:
                out_x[e, b >> 6] |= _ONE << sh
            if oz:
                out_z[e, b >> 6] |= _ONE << sh
            if blk_leaf[b]:
                for h in range(4):
                    out_cost[e, b, h] = leafcost[c, syn, h]
                continue
            hx[0] = _ZERO
            hz[0] = _ZERO
            hx[1] = lxx[c]
            hz[1] = lxz[c]
            hx[2] = lzx[c]
            hz[2] = lzz[c]
            hx[3] = lxx[c] ^ lzx[c]
            hz[3] = lxz[c] ^ lzz[c]
            for h in range(4):
                best = 1 << 30
                for k in range(nstab[c]):
                    vx = tx[c, syn] ^ hx[h] ^ sx[c, k]
                    vz = tz[c, syn] ^ hz[h] ^ sz[c, k]
                    tot = 0
                    for s in range(blk_len[b]):
                        letter = ((vx >> np.uint64(s)) & _ONE) + 2 * ((vz >> np.uint64(s)) & _ONE)
                        tot += in_cost[e, blk_src[b, s], letter]
                    if tot < best:
                        best = tot
                out_cost[e, b, h] = best
    return out_x, out_z, out_cost


def _decode_level_np(in_x, in_z, in_cost, blk_code, blk_src, blk_len, blk_leaf,
                     ngen, gx, gz, tx, tz, lxx, lxz, lzx, lzz, nstab, sx, sz, leafcost):
    nb_batch = in_x.shape[0]
    nblocks = len(blk_code)
    wout = (nblocks + 63) // 64
    out_x = np.zeros((nb_batch, wout), U64)
    out_z = np.zeros((nb_batch, wout), U64)
    out_cost = np.zeros((nb_batch, nblocks, 4), np.int32)
    rows = np.arange(nb_batch)
    for b in range(nblocks):
        c = blk_code[b]
        n = int(blk_len[b])
        lx = np.zeros(nb_batch, U64)
        lz = np.zeros(nb_batch, U64)
        for s in range(n):
            p = int(blk_src[b, s])
            sh = U64(p & 63)
            lx |= ((in_x[:, p >> 6] >> sh) & _ONE) << U64(s)
            lz |= ((in_z[:, p >> 6] >> sh) & _ONE) << U64(s)
        syn = np.zeros(nb_batch, np.int64)
        for g in range(ngen[c]):
            par = np.bitwise_count((lx & gz[c, g]) ^ (lz & gx[c, g])) & 1
            syn |= par.astype(np.int64) << g
        rx = lx ^ tx[c][syn]
        rz = lz ^ tz[c][syn]
        ox = np.bitwise_count((rx & lzz[c]) ^ (rz & lzx[c])) & 1
        oz = np.bitwise_count((rx & lxz[c]) ^ (rz & lxx[c])) & 1
        sh = U64(b & 63)
        out_x[:, b >> 6] |= ox.astype(U64) << sh
        out_z[:, b >> 6] |= oz.astype(U64) << sh
        if blk_leaf[b]:
            out_cost[:, b, :] = leafcost[c][syn]
            continue
        hyp_x = np.array([0, lxx[c], lzx[c], lxx[c] ^ lzx[c]], U64)
        hyp_z = np.array([0, lxz[c], lzz[c], lxz[c] ^ lzz[c]], U64)
        st_x = sx[c, :nstab[c]]
        st_z = sz[c, :nstab[c]]
        for h in range(4):
            vx = (tx[c][syn] ^ hyp_x[h])[:, None] ^ st_x[None, :]
            vz = (tz[c][syn] ^ hyp_z[h])[:, None] ^ st_z[None, :]
            tot = np.zeros(vx.shape, np.int64)
            for s in range(n):
                letter = ((vx >> U64(s)) & _ONE) + 2 * ((vz >> U64(s)) & _ONE)
                cost_s = in_cost[:, int(blk_src[b, s]), :]
                tot += cost_s[rows[:, None], letter.astype(np.int64)]
            out_cost[:, b, h] = tot.min(axis=1)
    return out_x, out_z, out_cost


def decode_level(in_x, in_z, in_cost, level, tables):
    """Decode every block of one level.

    Returns the hard output letters (bit-packed) and the per-block hypothesis
    costs of the next level.
    """
    fn = _decode_level_nb if _accel.backend() == "numba" else _decode_level_np
    return fn(in_x, in_z, in_cost, level.blk_code, level.blk_src, level.blk_len, level.blk_leaf, *tables)


@njit(cache=True, parallel=True)
def _leaf_costs_nb(tx, tz, hyp_x, hyp_z, sx, sz):
    nsyn = tx.shape[0]
    out = np.empty((nsyn, 4), np.int32)
    for syn in prange(nsyn):
        for h in range(4):
            best = 1 << 30
            for k in range(sx.shape[0]):
                w = _popcount((tx[syn] ^ hyp_x[h] ^ sx[k]) | (tz[syn] ^ hyp_z[h] ^ sz[k]))
                if w < best:
                    best = w
            out[syn, h] = best
    return out


def _leaf_costs_np(tx, tz, hyp_x, hyp_z, sx, sz):
    out = np.empty((len(tx), 4), np.int32)
    step = max(1, (1 << 22) // len(sx))
    for a in range(0, len(tx), step):
        for h in range(4):
            vx = (tx[a:a + step] ^ hyp_x[h])[:, None] ^ sx[None, :]
            vz = (tz[a:a + step] ^ hyp_z[h])[:, None] ^ sz[None, :]
            out[a:a + step, h] = np.bitwise_count(vx | vz).min(axis=1)
    return out


def leaf_costs(tx, tz, hyp_x, hyp_z, sx, sz) -> np.ndarray:
    """Minimum weight of ``t[syn] * hyp[h] * S`` over the stabilizer span, per syndrome and hypothesis."""
    args = [np.asarray(a, dtype=U64) for a in (tx, tz, hyp_x, hyp_z, sx, sz)]
    fn = _leaf_costs_nb if _accel.backend() == "numba" else _leaf_costs_np
    return fn(*args)


def ints_to_words(values, n_words: int) -> np.ndarray:
    """Pack Python ints into a (len, n_words) uint64 array."""
    values = list(values)
    out = np.empty((len(values), n_words), U64)
    for w in range(n_words):
        sh = 64 * w
        out[:, w] = np.fromiter(((v >> sh) & _WORD_MASK for v in values), dtype=U64, count=len(values))
    return out
