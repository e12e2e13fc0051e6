"""Boolean constraints as truth tables, plus the closure-property detectors.

A constraint of arity k is a Boolean function {0,1}^k -> {0,1} stored as a
bit table of length 2**k.  The assignment (a1, ..., ak) lands at table index
sum(a_j * 2**(k-j)), i.e. the first coordinate is the most significant bit.
This index order is fixed everywhere (files, built-ins, derived functions).

The detectors implement the classic closure characterizations on the set of
satisfying assignments:

    Horn        closed under coordinatewise AND,
    anti-Horn   closed under coordinatewise OR,
    bijunctive  closed under coordinatewise majority of any three,
    affine      closed under coordinatewise XOR of any three,

and 2-affine is decided as affine-and-bijunctive.  Closure over pairs
(AND/OR) and distinct triples (majority/XOR) suffices because repeated
arguments degenerate to members of the set.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

MAX_ARITY = 16


@dataclass(frozen=True)
class Constraint:
    """A named Boolean function of fixed arity, given by its truth table."""

    name: str
    arity: int
    table: tuple[int, ...]

    def __post_init__(self):
        if not self.name:
            raise ValueError("constraint name must be non-empty")
        if not 1 <= self.arity <= MAX_ARITY:
            raise ValueError(f"arity {self.arity} outside 1..{MAX_ARITY}")
        if len(self.table) != 1 << self.arity:
            raise ValueError(
                f"table length {len(self.table)} != 2**{self.arity}"
            )
        if any(b not in (0, 1) for b in self.table):
            raise ValueError("table entries must be 0/1 bits")

    @property
    def mask(self) -> int:
        """Table as an int; bit i is the value at assignment index i."""
        m = 0
        for i, b in enumerate(self.table):
            m |= b << i
        return m

    @property
    def bits(self) -> str:
        """Table as a 0/1 string in index order (the file format column)."""
        return "".join(str(b) for b in self.table)


def make_constraint(name: str, arity: int, fn) -> Constraint:
    """Build a constraint from a Python predicate over bit tuples."""
    table = []
    for idx in range(1 << arity):
        a = tuple((idx >> (arity - 1 - j)) & 1 for j in range(arity))
        table.append(1 if fn(*a) else 0)
    return Constraint(name, arity, tuple(table))


def constraint_from_bits(name: str, arity: int, bits: str) -> Constraint:
    if len(bits) != 1 << arity or set(bits) - {"0", "1"}:
        raise ValueError(f"bad table {bits!r} for arity {arity}")
    return Constraint(name, arity, tuple(int(b) for b in bits))


def eval_constraint(c: Constraint, a: Iterable[int]) -> int:
    """Evaluate c at assignment a (first coordinate most significant)."""
    a = tuple(a)
    if len(a) != c.arity:
        raise ValueError(f"{c.name} has arity {c.arity}, got {len(a)} bits")
    idx = 0
    for bit in a:
        idx = (idx << 1) | (1 if bit else 0)
    return c.table[idx]


@dataclass(frozen=True)
class PropertySet:
    """Schaefer-style property flags of a single constraint."""

    zero_valid: bool
    one_valid: bool
    horn: bool
    anti_horn: bool
    bijunctive: bool
    affine: bool
    two_affine: bool
    complementative: bool


class TrichotomyClass(enum.Enum):
    CONP_AND_GI_HARD = "CONP_AND_GI_HARD"
    GI_EQUIVALENT = "GI_EQUIVALENT"
    IN_P = "IN_P"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


def _and_closed(sat: list[int], mask: int) -> bool:
    for i, a in enumerate(sat):
        for b in sat[i + 1:]:
            if not (mask >> (a & b)) & 1:
                return False
    return True


def _or_closed(sat: list[int], mask: int) -> bool:
    for i, a in enumerate(sat):
        for b in sat[i + 1:]:
            if not (mask >> (a | b)) & 1:
                return False
    return True


def _majority_closed(sat: list[int], mask: int) -> bool:
    n = len(sat)
    for i in range(n):
        a = sat[i]
        for j in range(i + 1, n):
            b = sat[j]
            ab = a & b
            a_or_b = a | b
            for k in range(j + 1, n):
                c = sat[k]
                if not (mask >> (ab | (a_or_b & c))) & 1:
                    return False
    return True


def _xor_closed(sat: list[int], mask: int) -> bool:
    n = len(sat)
    for i in range(n):
        a = sat[i]
        for j in range(i + 1, n):
            axb = sat[j] ^ a
            for k in range(j + 1, n):
                if not (mask >> (axb ^ sat[k])) & 1:
                    return False
    return True


def detect_properties(c: Constraint) -> PropertySet:
    """Compute all property flags by direct closure checks on the table."""
    mask = c.mask
    size = 1 << c.arity
    sat = [i for i in range(size) if (mask >> i) & 1]
    full = size - 1
    horn = _and_closed(sat, mask)
    anti_horn = _or_closed(sat, mask)
    bij = _majority_closed(sat, mask)
    aff = _xor_closed(sat, mask)
    return PropertySet(
        zero_valid=bool(mask & 1),
        one_valid=bool((mask >> full) & 1),
        horn=horn,
        anti_horn=anti_horn,
        bijunctive=bij,
        affine=aff,
        two_affine=aff and bij,
        complementative=all((mask >> i) & 1 == (mask >> (full ^ i)) & 1
                            for i in range(size)),
    )


def is_schaefer_set(cs: Iterable[Constraint]) -> bool:
    """True iff all members are Horn, or all anti-Horn, or all affine,
    or all bijunctive."""
    props = [detect_properties(c) for c in cs]
    if not props:
        raise ValueError("empty constraint set")
    return (all(p.horn for p in props)
            or all(p.anti_horn for p in props)
            or all(p.affine for p in props)
            or all(p.bijunctive for p in props))


def classify_trichotomy(cs: Iterable[Constraint]) -> TrichotomyClass:
    """Complexity class of the isomorphism problem for the given set."""
    cs = list(cs)
    if not cs:
        raise ValueError("empty constraint set")
    if not is_schaefer_set(cs):
        return TrichotomyClass.CONP_AND_GI_HARD
    if all(detect_properties(c).two_affine for c in cs):
        return TrichotomyClass.IN_P
    return TrichotomyClass.GI_EQUIVALENT


OR0 = make_constraint("or0", 2, lambda x, y: x | y)
OR1 = make_constraint("or1", 2, lambda x, y: (1 - x) | y)
OR2 = make_constraint("or2", 2, lambda x, y: (1 - x) | (1 - y))
XOR2 = make_constraint("xor2", 2, lambda x, y: x ^ y)
XOR3 = make_constraint("xor3", 3, lambda x, y, z: x ^ y ^ z)
ONE_IN_THREE = make_constraint(
    "one-in-three", 3, lambda x, y, z: x + y + z == 1
)

BUILTINS = {c.name: c for c in (OR0, OR1, OR2, XOR2, XOR3, ONE_IN_THREE)}
