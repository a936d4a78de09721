"""Symplectic Pauli algebra and Clifford tableaus.

A :class:`PauliOperator` on ``n`` qubits is stored as two integer bitmasks
(bit ``i`` is qubit ``i``) plus a phase exponent. The operator it denotes is

    i**phase_exp * P_0 (x) P_1 (x) ... (x) P_{n-1}

where ``P_j`` is the Hermitian letter I, X, Y or Z given by ``(x_j, z_j)``.
In this "letter form" ``Y`` is the Hermitian Pauli, so a plain string such
as ``"XYZ"`` has phase exponent 0.

Conventions: ``S X S^dag = Y``, ``T = diag(1, exp(i pi/4))``, ``K = S H``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "PauliOperator",
    "CliffordMap",
    "DimensionError",
    "UnsupportedGateError",
    "pauli_multiply",
    "pauli_commutes",
    "clifford_conjugate",
    "clifford_from_circuit",
    "identity",
    "single",
    "popcount",
]

_PHASE_PREFIX = {0: "", 1: "i", 2: "-", 3: "-i"}
_PREFIX_PHASE = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}
_PAULI_RE = re.compile(r"^\s*([+-]?i?)([IXYZ]*)\s*$")


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


class UnsupportedGateError(ValueError):
    """A gate has no Clifford tableau (non-Clifford or abstract gadget)."""


def popcount(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int
    z: int
    phase_exp: int = 0

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask or self.x < 0 or self.z < 0:
            raise ValueError(f"bit-vectors exceed {self.n} qubits")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    # -- construction -------------------------------------------------
    @classmethod
    def from_string(cls, text: str) -> "PauliOperator":
        """Parse ``[+|-][i]`` followed by letters, qubit 0 first (e.g. ``-iXIZ``)."""
        m = _PAULI_RE.match(text)
        if m is None:
            raise ValueError(f"not a Pauli string: {text!r}")
        prefix, letters = m.groups()
        x = z = 0
        for i, ch in enumerate(letters):
            if ch in "XY":
                x |= 1 << i
            if ch in "ZY":
                z |= 1 << i
        return cls(len(letters), x, z, _PREFIX_PHASE[prefix])

    @classmethod
    def from_bits(cls, xs: Sequence[int], zs: Sequence[int], phase_exp: int = 0) -> "PauliOperator":
        if len(xs) != len(zs):
            raise DimensionError("x and z bit-vectors differ in length")
        x = sum(1 << i for i, b in enumerate(xs) if b)
        z = sum(1 << i for i, b in enumerate(zs) if b)
        return cls(len(xs), x, z, phase_exp)

    # -- views ----------------------------------------------------------
    @property
    def x_bits(self) -> list[int]:
        return [(self.x >> i) & 1 for i in range(self.n)]

    @property
    def z_bits(self) -> list[int]:
        return [(self.z >> i) & 1 for i in range(self.n)]

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    @property
    def support(self) -> tuple[int, ...]:
        s = self.x | self.z
        return tuple(i for i in range(self.n) if (s >> i) & 1)

    def letter(self, i: int) -> str:
        return "IXZY"[((self.x >> i) & 1) | (((self.z >> i) & 1) << 1)]

    @property
    def letters(self) -> str:
        return "".join(self.letter(i) for i in range(self.n))

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def phaseless(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, 0)

    def is_hermitian(self) -> bool:
        return self.phase_exp % 2 == 0

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase_exp] + self.letters

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return pauli_multiply(self, other)

    def __neg__(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.phase_exp + 2)

    # -- embedding ------------------------------------------------------
    def embed(self, n: int, qubits: Sequence[int]) -> "PauliOperator":
        """Place this operator on ``qubits`` of a larger ``n``-qubit register."""
        if len(qubits) != self.n:
            raise DimensionError("qubit list length differs from operator size")
        x = z = 0
        for i, q in enumerate(qubits):
            x |= ((self.x >> i) & 1) << q
            z |= ((self.z >> i) & 1) << q
        return PauliOperator(n, x, z, self.phase_exp)

    def restrict(self, qubits: Sequence[int]) -> "PauliOperator":
        """Letters on ``qubits`` (in the given order); phase is dropped."""
        x = z = 0
        for i, q in enumerate(qubits):
            x |= ((self.x >> q) & 1) << i
            z |= ((self.z >> q) & 1) << i
        return PauliOperator(len(qubits), x, z, 0)

    def conjugate(self) -> "PauliOperator":
        """Complex conjugate: ``i -> -i`` and every Y letter flips sign."""
        ny = popcount(self.x & self.z)
        return PauliOperator(self.n, self.x, self.z, -self.phase_exp + 2 * ny)


def identity(n: int) -> PauliOperator:
    return PauliOperator(n, 0, 0, 0)


def single(n: int, qubit: int, letter: str) -> PauliOperator:
    """``letter`` on ``qubit`` of an ``n``-qubit register."""
    x = (1 << qubit) if letter in "XY" else 0
    z = (1 << qubit) if letter in "ZY" else 0
    if letter not in "IXYZ":
        raise ValueError(f"bad Pauli letter {letter!r}")
    return PauliOperator(n, x, z, 0)


def _product_phase(ax: int, az: int, bx: int, bz: int) -> int:
    """Power of i picked up multiplying letter-form Paulis a*b (mod 4)."""
    a_x, a_y, a_z = ax & ~az, ax & az, az & ~ax
    b_x, b_y, b_z = bx & ~bz, bx & bz, bz & ~bx
    plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x)
    minus = (a_y & b_x) | (a_z & b_y) | (a_x & b_z)
    return popcount(plus) - popcount(minus)


def pauli_multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    if a.n != b.n:
        raise DimensionError(f"cannot multiply {a.n}-qubit and {b.n}-qubit Paulis")
    phase = a.phase_exp + b.phase_exp + _product_phase(a.x, a.z, b.x, b.z)
    return PauliOperator(a.n, a.x ^ b.x, a.z ^ b.z, phase)


def pauli_commutes(a: PauliOperator, b: PauliOperator) -> bool:
    if a.n != b.n:
        raise DimensionError(f"cannot compare {a.n}-qubit and {b.n}-qubit Paulis")
    return popcount((a.x & b.z) ^ (a.z & b.x)) % 2 == 0


def symplectic_product(ax: int, az: int, bx: int, bz: int) -> int:
    return popcount((ax & bz) ^ (az & bx)) & 1


class CliffordMap:
    """Conjugation action ``P -> U P U^dag`` stored as images of ``X_i`` and ``Z_i``."""

    __slots__ = ("n", "x_images", "z_images")

    def __init__(self, n: int, x_images: Sequence[PauliOperator], z_images: Sequence[PauliOperator]):
        if len(x_images) != n or len(z_images) != n:
            raise DimensionError("need one X and one Z image per qubit")
        for p in (*x_images, *z_images):
            if p.n != n:
                raise DimensionError("image acts on wrong number of qubits")
        self.n = n
        self.x_images = tuple(x_images)
        self.z_images = tuple(z_images)

    @classmethod
    def identity(cls, n: int) -> "CliffordMap":
        return cls(n, [single(n, i, "X") for i in range(n)], [single(n, i, "Z") for i in range(n)])

    def is_symplectic(self) -> bool:
        gens = [(single(self.n, i, "X"), self.x_images[i]) for i in range(self.n)]
        gens += [(single(self.n, i, "Z"), self.z_images[i]) for i in range(self.n)]
        for i, (a, ia) in enumerate(gens):
            if not ia.is_hermitian():
                return False
            for b, ib in gens[i + 1:]:
                if pauli_commutes(a, b) != pauli_commutes(ia, ib):
                    return False
        return True

    def is_identity(self) -> bool:
        return self == CliffordMap.identity(self.n)

    def then(self, other: "CliffordMap") -> "CliffordMap":
        """Map of ``self`` applied first, ``other`` second."""
        return CliffordMap(
            self.n,
            [clifford_conjugate(other, p) for p in self.x_images],
            [clifford_conjugate(other, p) for p in self.z_images],
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CliffordMap)
            and self.n == other.n
            and self.x_images == other.x_images
            and self.z_images == other.z_images
        )

    def __hash__(self):
        return hash((self.n, self.x_images, self.z_images))

    def __repr__(self) -> str:
        xs = ", ".join(str(p) for p in self.x_images)
        zs = ", ".join(str(p) for p in self.z_images)
        return f"CliffordMap(n={self.n}, X->[{xs}], Z->[{zs}])"


def clifford_conjugate(cmap: CliffordMap, p: PauliOperator) -> PauliOperator:
    if cmap.n != p.n:
        raise DimensionError(f"{cmap.n}-qubit map applied to {p.n}-qubit Pauli")
    # letter form -> i^(phase + #Y) * prod_i X_i^x_i Z_i^z_i
    out = PauliOperator(p.n, 0, 0, p.phase_exp + popcount(p.x & p.z))
    for i in range(p.n):
        if (p.x >> i) & 1:
            out = pauli_multiply(out, cmap.x_images[i])
        if (p.z >> i) & 1:
            out = pauli_multiply(out, cmap.z_images[i])
    return out


# --- per-gate local tableaus ------------------------------------------------
# Images of X and Z on each target, in letter form with sign prefix.
_LOCAL_IMAGES: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "I": (("X",), ("Z",)),
    "X": (("X",), ("-Z",)),
    "Y": (("-X",), ("-Z",)),
    "Z": (("-X",), ("Z",)),
    "H": (("Z",), ("X",)),
    "S": (("Y",), ("Z",)),
    "SDG": (("-Y",), ("Z",)),
    "K": (("Z",), ("Y",)),
    "CNOT": (("XX", "IX"), ("ZI", "ZZ")),
    "CZ": (("XZ", "ZX"), ("ZI", "IZ")),
    "SWAP": (("IX", "XI"), ("IZ", "ZI")),
}


def local_map(name: str) -> CliffordMap:
    """Tableau of a named Clifford on its own targets."""
    try:
        xs, zs = _LOCAL_IMAGES[name]
    except KeyError:
        raise UnsupportedGateError(f"no tableau for gate {name!r}") from None
    return CliffordMap(len(xs), [PauliOperator.from_string(s) for s in xs],
                       [PauliOperator.from_string(s) for s in zs])


def embed_map(local: CliffordMap, n: int, targets: Sequence[int]) -> CliffordMap:
    xs = [single(n, i, "X") for i in range(n)]
    zs = [single(n, i, "Z") for i in range(n)]
    for j, q in enumerate(targets):
        xs[q] = local.x_images[j].embed(n, targets)
        zs[q] = local.z_images[j].embed(n, targets)
    return CliffordMap(n, xs, zs)


def permutation_map(n: int, perm: Sequence[int]) -> CliffordMap:
    """Qubit ``i`` moves to position ``perm[i]``."""
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation of {n} qubits: {perm}")
    return CliffordMap(n, [single(n, perm[i], "X") for i in range(n)],
                       [single(n, perm[i], "Z") for i in range(n)])


def apply_local(p: PauliOperator, local: CliffordMap, targets: Sequence[int]) -> PauliOperator:
    """Conjugate ``p`` by a gate with tableau ``local`` acting on ``targets``."""
    sub = p.restrict(targets)
    if sub.is_identity():
        return p
    clear = 0
    for q in targets:
        clear |= 1 << q
    rest = PauliOperator(p.n, p.x & ~clear, p.z & ~clear, p.phase_exp)
    # letters on targets had phase 0 in the restriction; reattach after mapping
    mapped = clifford_conjugate(local, sub).embed(p.n, targets)
    return pauli_multiply(rest, mapped)


def clifford_from_circuit(circuit) -> CliffordMap:
    """Compose the tableaus of every gate in ``circuit`` (time order, left to right)."""
    n = circuit.n
    xs = [single(n, i, "X") for i in range(n)]
    zs = [single(n, i, "Z") for i in range(n)]
    for op in circuit.ops:
        local = op.gate.tableau()
        targets = op.targets
        xs = [apply_local(p, local, targets) for p in xs]
        zs = [apply_local(p, local, targets) for p in zs]
    return CliffordMap(n, xs, zs)


def paulis_on(k: int) -> Iterable[PauliOperator]:
    """All non-identity phaseless Paulis on ``k`` qubits, in (x, z) counting order."""
    for v in range(1, 4 ** k):
        yield PauliOperator(k, v & ((1 << k) - 1), v >> k, 0)
