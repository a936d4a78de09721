"""The three base codes and exhaustive logical-coset search.

Codes are [[n, 1, d]] stabilizer codes with ``n - 1`` independent generators.
User-facing text uses 1-based qubit labels; everything here is 0-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import kernels
from .pauli import PauliOperator, identity, pauli_commutes, pauli_multiply

__all__ = [
    "StabilizerCode",
    "ValidationReport",
    "InfeasibleSearchError",
    "UnknownCodeError",
    "CODE_NAMES",
    "MAX_SEARCH_QUBITS",
    "make_code",
    "validate_code",
    "code_distance",
    "min_weight_logical_rep",
    "gf2_rank",
    "PauliGroup",
]

MAX_SEARCH_QUBITS = 26
CODE_NAMES = ("five_qubit", "steane", "rm15")


class InfeasibleSearchError(RuntimeError):
    """Coset enumeration would exceed the configured size bound."""


class UnknownCodeError(KeyError):
    pass


def gf2_rank(rows: Sequence[int]) -> int:
    """Rank over GF(2) of integer bit-rows."""
    pivots: dict[int, int] = {}
    rank = 0
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in pivots:
                pivots[top] = r
                rank += 1
                break
            r ^= pivots[top]
    return rank


class _Reducer:
    """Incremental GF(2) elimination that remembers which generators built each pivot."""

    def __init__(self, rows: Sequence[int]):
        self.pivots: dict[int, tuple[int, int]] = {}
        for j, r in enumerate(rows):
            combo = 1 << j
            while r:
                top = r.bit_length() - 1
                if top not in self.pivots:
                    self.pivots[top] = (r, combo)
                    break
                pr, pc = self.pivots[top]
                r ^= pr
                combo ^= pc

    def decompose(self, v: int) -> int | None:
        combo = 0
        while v:
            top = v.bit_length() - 1
            if top not in self.pivots:
                return None
            pr, pc = self.pivots[top]
            v ^= pr
            combo ^= pc
        return combo


class PauliGroup:
    """Signed abelian group generated by commuting Hermitian Paulis."""

    def __init__(self, n: int, generators: Sequence[PauliOperator]):
        self.n = n
        self.generators = tuple(generators)
        self._reducer = _Reducer([g.x | (g.z << n) for g in self.generators])

    def element(self, mask: int) -> PauliOperator:
        out = identity(self.n)
        for j, g in enumerate(self.generators):
            if (mask >> j) & 1:
                out = pauli_multiply(out, g)
        return out

    def decompose(self, p: PauliOperator) -> int | None:
        return self._reducer.decompose(p.x | (p.z << self.n))

    def contains(self, p: PauliOperator, signed: bool = True) -> bool:
        mask = self.decompose(p)
        if mask is None:
            return False
        return not signed or self.element(mask).phase_exp == p.phase_exp


@dataclass
class StabilizerCode:
    name: str
    n: int
    generators: tuple[PauliOperator, ...]
    logical_x: PauliOperator
    logical_z: PauliOperator
    k: int = 1
    distance: int | None = field(default=None, compare=False)

    def __post_init__(self):
        self.generators = tuple(self.generators)

    # -- cached bit views -------------------------------------------------
    @cached_property
    def gen_x(self) -> np.ndarray:
        return np.array([g.x for g in self.generators], dtype=np.uint64)

    @cached_property
    def gen_z(self) -> np.ndarray:
        return np.array([g.z for g in self.generators], dtype=np.uint64)

    @cached_property
    def group(self) -> PauliGroup:
        return PauliGroup(self.n, self.generators)

    @property
    def logical_y(self) -> PauliOperator:
        # Y = i X Z keeps the logical Y Hermitian
        xz = pauli_multiply(self.logical_x, self.logical_z)
        return PauliOperator(self.n, xz.x, xz.z, xz.phase_exp + 1)

    def logical(self, which: str) -> PauliOperator:
        return {"X": self.logical_x, "Z": self.logical_z, "Y": self.logical_y}[which.upper()]

    # -- group membership -------------------------------------------------
    def stabilizer_element(self, mask: int) -> PauliOperator:
        """Signed product of the generators selected by ``mask`` (generator order)."""
        return self.group.element(mask)

    def decompose(self, p: PauliOperator) -> int | None:
        """Generator mask reproducing ``p`` up to phase, or None outside the group."""
        return self.group.decompose(p)

    def in_stabilizer_group(self, p: PauliOperator, signed: bool = True) -> bool:
        return self.group.contains(p, signed)

    def syndrome(self, p: PauliOperator) -> int:
        s = 0
        for j, g in enumerate(self.generators):
            if not pauli_commutes(g, p):
                s |= 1 << j
        return s

    def logical_class(self, p: PauliOperator) -> str:
        """Which logical coset a normalizer element lies in: I, X, Y or Z."""
        has_x = not pauli_commutes(p, self.logical_z)
        has_z = not pauli_commutes(p, self.logical_x)
        return "IXZY"[has_x | (has_z << 1)]

    def set_distance(self, d: int) -> None:
        if self.distance is not None and self.distance != d:
            raise RuntimeError(f"{self.name}: recomputed distance {d} disagrees with cached {self.distance}")
        self.distance = d

    # -- structured text --------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "k": self.k,
            "generators": [str(g) for g in self.generators],
            "logical_x": str(self.logical_x),
            "logical_z": str(self.logical_z),
            "distance": self.distance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "StabilizerCode":
        code = cls(
            name=d["name"],
            n=int(d["n"]),
            generators=tuple(PauliOperator.from_string(s) for s in d["generators"]),
            logical_x=PauliOperator.from_string(d["logical_x"]),
            logical_z=PauliOperator.from_string(d["logical_z"]),
            k=int(d.get("k", 1)),
            distance=d.get("distance"),
        )
        return code

    @classmethod
    def from_json(cls, text: str) -> "StabilizerCode":
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        d = "?" if self.distance is None else self.distance
        return f"StabilizerCode({self.name!r}, [[{self.n},{self.k},{d}]])"


def _from_strings(name: str, gens: Sequence[str], lx: str, lz: str) -> StabilizerCode:
    return StabilizerCode(name, len(lx), tuple(PauliOperator.from_string(g) for g in gens),
                          PauliOperator.from_string(lx), PauliOperator.from_string(lz))


def _five_qubit() -> StabilizerCode:
    # cyclic XZZXI code; logical Z stored as its weight-3 representative on
    # qubits 1, 3, 5 (equal to ZZZZZ times a stabilizer)
    gens = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
    return _from_strings("five_qubit", gens, "XXXXX", "-XIZIX")


# Hamming-code column (as a 3-bit integer) for each Steane qubit; q1 ^ q2 == q7
# puts a weight-3 logical Z on {1, 2, 7}.
_STEANE_COLUMNS = (1, 2, 4, 5, 6, 7, 3)


def _css_from_columns(name: str, n: int, x_checks: Sequence[int], z_checks: Sequence[int]) -> StabilizerCode:
    def row(mask: int, letter: str) -> str:
        return "".join(letter if (mask >> i) & 1 else "I" for i in range(n))

    gens = [row(m, "X") for m in x_checks] + [row(m, "Z") for m in z_checks]
    return _from_strings(name, gens, "X" * n, "Z" * n)


def _steane() -> StabilizerCode:
    checks = [sum(1 << q for q, col in enumerate(_STEANE_COLUMNS) if (col >> b) & 1) for b in range(3)]
    return _css_from_columns("steane", 7, checks, checks)


def _rm15() -> StabilizerCode:
    # qubit q (0-based) <-> nonzero 4-bit vector q + 1
    def sel(pred) -> int:
        return sum(1 << q for q in range(15) if pred(q + 1))

    x_checks = [sel(lambda v, b=b: (v >> b) & 1) for b in range(4)]
    pairs = [sel(lambda v, a=a, b=b: (v >> a) & 1 and (v >> b) & 1) for a in range(4) for b in range(a + 1, 4)]
    return _css_from_columns("rm15", 15, x_checks, x_checks + pairs)


_BUILDERS = {"five_qubit": _five_qubit, "steane": _steane, "rm15": _rm15}
_CACHE: dict[str, StabilizerCode] = {}


def make_code(name: str) -> StabilizerCode:
    """Return the validated base code ``five_qubit``, ``steane`` or ``rm15``.

    Instances are shared; treat them as immutable.
    """
    if name not in _BUILDERS:
        raise UnknownCodeError(f"unknown code {name!r}; choose from {', '.join(CODE_NAMES)}")
    if name not in _CACHE:
        code = _BUILDERS[name]()
        report = validate_code(code)
        if not report.ok:
            raise AssertionError(f"built-in code {name} is invalid: {report.failures}")
        _CACHE[name] = code
    return _CACHE[name]


@dataclass
class ValidationReport:
    code: str
    checks: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(name)
        if not passed:
            self.failures.append(f"{name}: {detail}" if detail else name)


def validate_code(c: StabilizerCode) -> ValidationReport:
    rep = ValidationReport(c.name)
    ops = [*c.generators, c.logical_x, c.logical_z]
    rep.check("sizes", all(p.n == c.n for p in ops), "operator size differs from n")
    if not rep.ok:
        return rep
    rep.check("generator count", len(c.generators) == c.n - c.k,
              f"{len(c.generators)} generators for n={c.n}, k={c.k}")
    rep.check("hermitian", all(p.is_hermitian() for p in ops), "operator with imaginary phase")
    bad = [(i + 1, j + 1) for i, a in enumerate(c.generators) for j, b in enumerate(c.generators)
           if i < j and not pauli_commutes(a, b)]
    rep.check("generators commute", not bad, f"anticommuting generator pairs {bad}")
    rank = gf2_rank([g.x | (g.z << c.n) for g in c.generators])
    rep.check("generators independent", rank == len(c.generators), f"rank {rank} < {len(c.generators)}")
    for lname, lop in (("logical_x", c.logical_x), ("logical_z", c.logical_z)):
        bad = [j + 1 for j, g in enumerate(c.generators) if not pauli_commutes(g, lop)]
        rep.check(f"{lname} commutes with stabilizers", not bad, f"anticommutes with generators {bad}")
    rep.check("logical X/Z anticommute", not pauli_commutes(c.logical_x, c.logical_z),
              "logical_x commutes with logical_z")
    return rep


def _coset_args(c: StabilizerCode, which: str, max_n: int | None):
    bound = MAX_SEARCH_QUBITS if max_n is None else max_n
    if c.n > bound or c.n > 64:
        raise InfeasibleSearchError(
            f"{c.name}: coset search over 2^{len(c.generators)} elements exceeds bound n <= {bound}")
    L = c.logical(which)
    return c.gen_x, c.gen_z, L


def code_distance(c: StabilizerCode, max_n: int | None = None, recompute: bool = False) -> int:
    """Minimum weight over the X, Y and Z logical cosets (exhaustive)."""
    if c.distance is not None and not recompute:
        return c.distance
    best = None
    for which in "XZY":
        gx, gz, L = _coset_args(c, which, max_n)
        w = kernels.coset_min_weight(gx, gz, L.x, L.z)
        best = w if best is None else min(best, w)
    c.set_distance(best)
    return best


def min_weight_logical_rep(c: StabilizerCode, which: str = "Z", max_n: int | None = None) -> PauliOperator:
    """Minimum-weight element of a logical coset with its exact sign.

    Ties go to the code's stored representative when it is itself of minimum
    weight, then to the lexicographically smallest support, then to the
    smallest letter string.
    """
    which = which.upper()
    gx, gz, L = _coset_args(c, which, max_n)
    w = kernels.coset_min_weight(gx, gz, L.x, L.z)
    if L.weight == w:
        return L
    masks = kernels.coset_collect(gx, gz, L.x, L.z, w)
    best_key, best_mask = None, None
    for mask in masks.tolist():
        x, z = L.x, L.z
        m = mask
        j = 0
        while m:
            if m & 1:
                x ^= c.generators[j].x
                z ^= c.generators[j].z
            m >>= 1
            j += 1
        p = PauliOperator(c.n, x, z)
        key = (p.support, p.letters)
        if best_key is None or key < best_key:
            best_key, best_mask = key, mask
    return pauli_multiply(L, c.stabilizer_element(best_mask))
