"""Gates and located-gate circuits, plus their line-oriented text format.

Text format, one gate per line (qubits and locations are 1-based)::

    qubits: 7
    g1: CNOT q1 q7
    g3: CKZ(0,pi/4) q7
    g6: GADGET(switch:T) q15 q16 ...

Blank lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .pauli import CliffordMap, UnsupportedGateError, local_map, permutation_map

__all__ = [
    "Gate",
    "Op",
    "Circuit",
    "parse_theta",
    "format_theta",
    "ckz",
    "named",
    "permutation",
    "gadget",
    "TABLE_GATES",
]

NAMED_ONE = ("I", "X", "Y", "Z", "H", "S", "SDG", "K")
NAMED_TWO = ("CNOT", "CZ", "SWAP")
NAMED = NAMED_ONE + NAMED_TWO

# time-ordered decompositions into primitive named gates
_DECOMP = {"K": ("H", "S")}
_DAGGER = {"S": "SDG", "SDG": "S"}
_CONJ = {"S": "SDG", "SDG": "S"}


def parse_theta(text: str) -> Fraction:
    """Parse an exact multiple of pi: ``0``, ``pi``, ``pi/4``, ``3pi/4``, ``-pi/2``."""
    t = text.strip().replace(" ", "").replace("*", "")
    m = re.fullmatch(r"([+-]?)(\d*)pi(?:/(\d+))?", t)
    if m:
        sign, num, den = m.groups()
        val = Fraction(int(num) if num else 1, int(den) if den else 1)
        return -val if sign == "-" else val
    if re.fullmatch(r"[+-]?0", t):
        return Fraction(0)
    raise ValueError(f"angle must be an exact rational multiple of pi, got {text!r}")


def format_theta(theta: Fraction) -> str:
    if theta == 0:
        return "0"
    num, den = theta.numerator, theta.denominator
    sign = "-" if num < 0 else ""
    num = abs(num)
    head = "pi" if num == 1 else f"{num}pi"
    return f"{sign}{head}" + (f"/{den}" if den != 1 else "")


@dataclass(frozen=True)
class Gate:
    """A gate kind; targets live on :class:`Op`.

    ``name`` is a named Clifford (see ``NAMED``), ``"CKZ"`` for the diagonal
    ``C^k Z(theta)`` family with ``theta`` in units of pi, ``"PERM"`` for an
    explicit qubit permutation, or ``"GADGET"`` for an abstract gadget.
    """

    name: str
    k: int = 0
    theta: Fraction = Fraction(0)
    perm: tuple[int, ...] | None = None
    label: str | None = None
    action: "Gate | None" = field(default=None, compare=True)

    def __post_init__(self):
        if self.name == "CKZ":
            if self.k < 0:
                raise ValueError("CkZ needs k >= 0")
            # reduce mod 2pi, lowest terms by Fraction
            object.__setattr__(self, "theta", Fraction(self.theta) % 2)
        elif self.name == "PERM":
            if self.perm is None or sorted(self.perm) != list(range(len(self.perm))):
                raise ValueError(f"bad permutation {self.perm}")
        elif self.name == "GADGET":
            if not self.label:
                raise ValueError("gadget needs a label")
        elif self.name not in NAMED:
            raise ValueError(f"unknown gate {self.name!r}")

    @property
    def arity(self) -> int | None:
        if self.name in NAMED_ONE:
            return 1
        if self.name in NAMED_TWO:
            return 2
        if self.name == "CKZ":
            return self.k + 1
        if self.name == "PERM":
            return len(self.perm)
        return None

    # -- classification ----------------------------------------------------
    def is_clifford(self) -> bool:
        if self.name in NAMED or self.name == "PERM":
            return True
        if self.name == "CKZ":
            return self._ckz_clifford_name() is not None
        if self.name == "GADGET":
            return self.action is not None and self.action.is_clifford()
        return False

    def _ckz_clifford_name(self) -> str | None:
        th = self.theta
        if th == 0:
            return "I"
        if self.k == 0:
            return {Fraction(1, 2): "S", Fraction(1): "Z", Fraction(3, 2): "SDG"}.get(th)
        if self.k == 1 and th == 1:
            return "CZ"
        return None

    def is_diagonal(self) -> bool:
        return self.name in ("I", "Z", "S", "SDG", "CZ", "CKZ")

    def couples(self) -> bool:
        """Acts jointly on more than one qubit."""
        if self.name == "GADGET":
            return True
        return (self.arity or 0) > 1

    def tableau(self) -> CliffordMap:
        if self.name in NAMED:
            return local_map(self.name)
        if self.name == "PERM":
            return permutation_map(len(self.perm), self.perm)
        if self.name == "CKZ":
            cname = self._ckz_clifford_name()
            if cname is None:
                raise UnsupportedGateError(f"{self} is not Clifford")
            if cname == "I" and self.k > 0:
                return CliffordMap.identity(self.k + 1)
            return local_map(cname)
        if self.name == "GADGET" and self.action is not None and self.action.is_clifford():
            return self.action.tableau()
        raise UnsupportedGateError(f"{self} has no tableau")

    # -- variants ---------------------------------------------------------
    def primitives(self) -> tuple["Gate", ...]:
        """Time-ordered decomposition into primitive gates."""
        if self.name in _DECOMP:
            return tuple(named(p) for p in _DECOMP[self.name])
        return (self,)

    def dagger(self) -> tuple["Gate", ...]:
        if self.name == "CKZ":
            return (ckz(self.k, -self.theta),)
        if self.name == "PERM":
            inv = [0] * len(self.perm)
            for i, p in enumerate(self.perm):
                inv[p] = i
            return (permutation(inv),)
        if self.name == "GADGET":
            raise UnsupportedGateError("gadgets have no generic inverse")
        return tuple(named(_DAGGER.get(g.name, g.name)) for g in reversed(self.primitives()))

    def conj(self) -> tuple["Gate", ...]:
        """Complex conjugate (Y and the identity up to phase are real up to sign)."""
        if self.name == "CKZ":
            return (ckz(self.k, -self.theta),)
        if self.name in ("PERM", "GADGET"):
            return (self,)
        return tuple(named(_CONJ.get(g.name, g.name)) for g in self.primitives())

    def transpose(self) -> tuple["Gate", ...]:
        out: list[Gate] = []
        for g in self.conj():
            out.extend(g.dagger())
        return tuple(reversed(out))

    def variants(self) -> list[tuple[str, tuple["Gate", ...]]]:
        """The gate, its inverse, conjugate and transpose (deduplicated, ordered)."""
        seen: list[tuple[str, tuple[Gate, ...]]] = []
        for tag, seq in (("plain", self.primitives()), ("dagger", self.dagger()),
                         ("conj", self.conj()), ("transpose", self.transpose())):
            if all(seq != s for _, s in seen):
                seen.append((tag, seq))
        return seen

    def __str__(self) -> str:
        if self.name == "CKZ":
            return f"CKZ({self.k},{format_theta(self.theta)})"
        if self.name == "PERM":
            return "PERM(" + ",".join(str(p + 1) for p in self.perm) + ")"
        if self.name == "GADGET":
            return f"GADGET({self.label})"
        return self.name


def named(name: str) -> Gate:
    return Gate(name.upper())


def ckz(k: int, theta) -> Gate:
    if isinstance(theta, str):
        theta = parse_theta(theta)
    return Gate("CKZ", k=k, theta=Fraction(theta))


def permutation(perm: Sequence[int]) -> Gate:
    return Gate("PERM", perm=tuple(perm))


def gadget(label: str, action: Gate | None = None) -> Gate:
    return Gate("GADGET", label=label, action=action)


# The gate columns of the comparison table, as Gate objects.
TABLE_GATES = {
    "H": named("H"),
    "K": named("K"),
    "T": ckz(0, Fraction(1, 4)),
    "S": named("S"),
    "CZ": named("CZ"),
    "CCZ": ckz(2, 1),
}


def gate_from_name(text: str) -> Gate:
    """``T``, ``CCZ``, ``H``... or ``CKZ(k,theta)``."""
    t = text.strip()
    if t.upper() in TABLE_GATES:
        return TABLE_GATES[t.upper()]
    if t.upper() in NAMED:
        return named(t)
    m = re.fullmatch(r"CKZ\((\d+),([^)]+)\)", t, flags=re.I)
    if m:
        return ckz(int(m.group(1)), parse_theta(m.group(2)))
    raise ValueError(f"unknown gate {text!r}")


def as_ckz(g: Gate) -> Gate | None:
    """Express a diagonal gate as a member of the C^k Z(theta) family."""
    if g.name == "CKZ":
        return g
    table = {"Z": ckz(0, 1), "S": ckz(0, Fraction(1, 2)), "SDG": ckz(0, Fraction(3, 2)), "CZ": ckz(1, 1)}
    return table.get(g.name)


@dataclass(frozen=True)
class Op:
    gate: Gate
    targets: tuple[int, ...]
    loc: int
    group: int | None = None  # source location in the circuit this was lifted from


@dataclass
class Circuit:
    """Ordered located gates over qubits ``0..n-1``.

    ``blocks`` optionally groups qubits into codewords as (start, stop) ranges.
    """

    n: int
    ops: list[Op] = field(default_factory=list)
    blocks: list[tuple[int, int]] | None = None
    name: str = ""

    def append(self, gate: Gate, targets: Iterable[int], group: int | None = None) -> Op:
        targets = tuple(int(t) for t in targets)
        if any(t < 0 or t >= self.n for t in targets):
            raise ValueError(f"targets {targets} outside 0..{self.n - 1}")
        if len(set(targets)) != len(targets):
            raise ValueError(f"repeated target in {targets}")
        if gate.arity is not None and gate.arity != len(targets):
            raise ValueError(f"{gate} expects {gate.arity} targets, got {len(targets)}")
        op = Op(gate, targets, len(self.ops), group)
        self.ops.append(op)
        return op

    def extend(self, other: "Circuit", offset: int = 0) -> None:
        for op in other.ops:
            self.append(op.gate, [t + offset for t in op.targets], op.group)

    def inverse(self) -> "Circuit":
        out = Circuit(self.n, blocks=self.blocks, name=f"{self.name}^-1" if self.name else "")
        for op in reversed(self.ops):
            for g in op.gate.dagger():
                out.append(g, op.targets)
        return out

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def non_clifford_locations(self) -> list[int]:
        return [op.loc for op in self.ops if not op.gate.is_clifford()]

    def coupled_qubits(self) -> set[int]:
        out: set[int] = set()
        for op in self.ops:
            if op.gate.couples() and op.gate.name != "PERM":
                out.update(op.targets)
        return out

    def count(self, name: str) -> int:
        return sum(op.gate.name == name for op in self.ops)

    # -- text format ----------------------------------------------------
    def to_text(self) -> str:
        lines = [f"qubits: {self.n}"]
        if self.blocks:
            lines.append("blocks: " + " ".join(f"{a + 1}-{b}" for a, b in self.blocks))
        for op in self.ops:
            tg = " ".join(f"q{t + 1}" for t in op.targets)
            grp = f" @g{op.group + 1}" if op.group is not None else ""
            lines.append(f"g{op.loc + 1}: {op.gate} {tg}{grp}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        circ: Circuit | None = None
        blocks = None
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("qubits:"):
                circ = cls(int(line.split(":", 1)[1]))
                continue
            if line.startswith("blocks:"):
                blocks = []
                for part in line.split(":", 1)[1].split():
                    a, b = part.split("-")
                    blocks.append((int(a) - 1, int(b)))
                continue
            if circ is None:
                raise ValueError("circuit text must start with 'qubits: N'")
            m = re.fullmatch(r"g(\d+):\s+(\S+)((?:\s+q\d+)*)(?:\s+@g(\d+))?", line)
            if m is None:
                raise ValueError(f"cannot parse circuit line {line!r}")
            loc = int(m.group(1)) - 1
            if loc != len(circ.ops):
                raise ValueError(f"location ids must be consecutive, got g{loc + 1}")
            gate = _parse_gate(m.group(2))
            targets = [int(t[1:]) - 1 for t in m.group(3).split()]
            group = int(m.group(4)) - 1 if m.group(4) else None
            circ.append(gate, targets, group)
        if circ is None:
            raise ValueError("empty circuit text")
        circ.blocks = blocks
        return circ


def _parse_gate(tok: str) -> Gate:
    if tok in NAMED:
        return named(tok)
    m = re.fullmatch(r"CKZ\((\d+),([^)]+)\)", tok)
    if m:
        return ckz(int(m.group(1)), parse_theta(m.group(2)))
    m = re.fullmatch(r"PERM\(([\d,]+)\)", tok)
    if m:
        return permutation([int(p) - 1 for p in m.group(1).split(",")])
    m = re.fullmatch(r"GADGET\((.+)\)", tok)
    if m:
        label = m.group(1)
        action = None
        if ":" in label:
            try:
                action = gate_from_name(label.split(":", 1)[1])
            except ValueError:
                action = None
        return gadget(label, action)
    raise ValueError(f"unknown gate token {tok!r}")


def with_group(circ: Circuit, group: int) -> Circuit:
    out = Circuit(circ.n, blocks=circ.blocks, name=circ.name)
    out.ops = [replace(op, group=group) for op in circ.ops]
    return out
